//! Weighted `L^2` bound monitors along the drift heat flow.
//!
//! Every bound is tracked as a dimensionless squared ratio
//! `r(t) = μ(t)^{n/2} ||P_t v||^2_{γ(t)} / (μ(0)^{n/2} ||v||^2_{γ(0)})`, where
//! `||·||_γ` is the norm of `L^2(e^{-f/γ} dVol)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::QuadratureRule;
use crate::soliton::ModelKind;
use crate::spectral::{GaussianProfile, HermiteField, InitialData, ProfileFamily};

/// Tolerance for ratios computed from closed forms or exact quadrature.
pub const CLOSED_FORM_TOL: f64 = 1e-8;
/// Tolerance for paths that carry quadrature or finite-difference error.
pub const NUMERIC_TOL: f64 = 1e-4;
/// Allowed increase between consecutive samples of a nonincreasing series.
pub const MONOTONE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum GammaSchedule {
    Constant(f64),
    /// `(e^t + 1)/2`.
    Critical,
    /// `(1 + e^t - ε(e^t - 1))/2`.
    SubCritical(f64),
}

impl GammaSchedule {
    pub fn value(&self, t: f64) -> f64 {
        let et = t.exp();
        match *self {
            GammaSchedule::Constant(g) => g,
            GammaSchedule::Critical => (et + 1.0) / 2.0,
            GammaSchedule::SubCritical(eps) => (1.0 + et - eps * (et - 1.0)) / 2.0,
        }
    }

    pub fn rate(&self, t: f64) -> f64 {
        let et = t.exp();
        match *self {
            GammaSchedule::Constant(_) => 0.0,
            GammaSchedule::Critical => et / 2.0,
            GammaSchedule::SubCritical(eps) => (1.0 - eps) * et / 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MuSchedule {
    /// `μ ≡ 1`.
    Constant,
    /// `μ = e^{-t}`.
    ExpDecay,
}

impl MuSchedule {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            MuSchedule::Constant => 1.0,
            MuSchedule::ExpDecay => (-t).exp(),
        }
    }

    /// `μ̇/μ`.
    pub fn log_rate(&self) -> f64 {
        match self {
            MuSchedule::Constant => 0.0,
            MuSchedule::ExpDecay => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub gamma: GammaSchedule,
    pub mu: MuSchedule,
    pub alpha: f64,
}

impl Schedule {
    /// `γ ≡ 1, μ ≡ 1, α = 0`: the time-invariant weight.
    pub fn classical() -> Self {
        Self {
            gamma: GammaSchedule::Constant(1.0),
            mu: MuSchedule::Constant,
            alpha: 0.0,
        }
    }

    /// `γ = (e^t+1)/2, μ = e^{-t}, α = 1`.
    pub fn critical() -> Self {
        Self {
            gamma: GammaSchedule::Critical,
            mu: MuSchedule::ExpDecay,
            alpha: 1.0,
        }
    }

    pub fn validate(&self, times: &[f64]) -> Result<()> {
        if !self.alpha.is_finite() {
            return Err(Error::Config("alpha must be finite".into()));
        }
        for &t in times {
            let g = self.gamma.value(t);
            if !(g.is_finite() && g > 0.0) {
                return Err(Error::Config(format!("gamma({t}) = {g} is not positive")));
            }
        }
        Ok(())
    }

    /// Coefficient of `f` in the ansatz integrand:
    /// `½(1-α)^2 + γ^{-2}(½ - γ + γ̇)`.
    pub fn f_coefficient(&self, t: f64) -> f64 {
        let g = self.gamma.value(t);
        let gd = self.gamma.rate(t);
        0.5 * (1.0 - self.alpha).powi(2) + (0.5 - g + gd) / (g * g)
    }

    /// Coefficient of `n/2` in the ansatz integrand: `α + μ̇/μ`.
    pub fn constant_coefficient(&self) -> f64 {
        self.alpha + self.mu.log_rate()
    }
}

/// `t = 0` followed by 39 log-spaced points on `[10^-2, 5]`.
pub fn default_time_grid() -> Vec<f64> {
    time_grid(40, 1e-2, 5.0)
}

/// `t = 0` followed by `points - 1` log-spaced samples of `[first, last]`.
pub fn time_grid(points: usize, first: f64, last: f64) -> Vec<f64> {
    let mut out = vec![0.0];
    if points <= 1 {
        return out;
    }
    let k = points - 1;
    let (a, b) = (first.ln(), last.ln());
    for i in 0..k {
        let s = if k == 1 { 1.0 } else { i as f64 / (k - 1) as f64 };
        out.push((a + s * (b - a)).exp());
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Violation,
    /// A weighted norm became infinite; no verdict on the inequality.
    Diverged,
    /// Reported for information only.
    Probe,
}

impl Verdict {
    pub fn is_failure(&self) -> bool {
        matches!(self, Verdict::Violation)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub schedule: Schedule,
    pub times: Vec<f64>,
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    pub monotone: bool,
    /// Largest increase between consecutive ratios (negative when strictly decreasing).
    pub max_increase: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub detail: Option<String>,
}

impl BoundReport {
    fn from_series(
        name: &str,
        schedule: Schedule,
        times: Vec<f64>,
        ratios: Vec<f64>,
        tolerance: f64,
        require_monotone: bool,
    ) -> Self {
        let max_ratio = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let max_increase = ratios
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max);
        let monotone = max_increase <= MONOTONE_TOL;
        let ok = max_ratio <= 1.0 + tolerance && (!require_monotone || monotone);
        Self {
            name: name.to_string(),
            schedule,
            times,
            ratios,
            max_ratio,
            monotone,
            max_increase,
            tolerance,
            verdict: if ok { Verdict::Pass } else { Verdict::Violation },
            detail: None,
        }
    }

    fn diverged(name: &str, schedule: Schedule, times: Vec<f64>, tolerance: f64, why: String) -> Self {
        Self {
            name: name.to_string(),
            schedule,
            times,
            ratios: Vec::new(),
            max_ratio: f64::NAN,
            monotone: false,
            max_increase: f64::NAN,
            tolerance,
            verdict: Verdict::Diverged,
            detail: Some(why),
        }
    }
}

fn check_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::Config("time grid is empty".into()));
    }
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::Config("time grid must contain finite t >= 0".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("time grid must be strictly increasing".into()));
    }
    Ok(())
}

/// `μ(t)^{n/2} ||P_t v||^2_{γ(t)}`.
pub fn monitored_quantity(v: &InitialData, schedule: &Schedule, t: f64) -> Result<f64> {
    let n = v.dim() as f64;
    let vt = v.evolve(t)?;
    Ok(schedule.mu.value(t).powf(n / 2.0) * vt.weighted_norm_sq(schedule.gamma.value(t))?)
}

/// Ratio series for an arbitrary schedule. Nonincreasing behaviour is
/// reported but only the bound `r <= 1 + tol` decides the verdict.
pub fn schedule_bound(v: &InitialData, schedule: &Schedule, times: &[f64], tolerance: f64) -> Result<BoundReport> {
    schedule_bound_named("schedule_bound", v, schedule, times, tolerance, false)
}

fn schedule_bound_named(
    name: &str,
    v: &InitialData,
    schedule: &Schedule,
    times: &[f64],
    tolerance: f64,
    require_monotone: bool,
) -> Result<BoundReport> {
    check_grid(times)?;
    schedule.validate(times)?;
    let base = match monitored_quantity(v, schedule, 0.0) {
        Ok(b) => b,
        Err(Error::Divergence { reason, .. }) => {
            return Ok(BoundReport::diverged(name, *schedule, times.to_vec(), tolerance, reason))
        }
        Err(e) => return Err(e),
    };
    if base == 0.0 {
        return Err(Error::Domain("initial data has zero weighted norm".into()));
    }
    let mut ratios = Vec::with_capacity(times.len());
    for &t in times {
        match monitored_quantity(v, schedule, t) {
            Ok(q) => ratios.push(q / base),
            Err(Error::Divergence { reason, .. }) => {
                return Ok(BoundReport::diverged(name, *schedule, times.to_vec(), tolerance, reason))
            }
            Err(e) => return Err(e),
        }
    }
    Ok(BoundReport::from_series(name, *schedule, times.to_vec(), ratios, tolerance, require_monotone))
}

/// `||P_t v||^2_1 / ||v||^2_1`, required to be `<= 1` and nonincreasing.
pub fn classical_bound(v: &InitialData, times: &[f64], tolerance: f64) -> Result<BoundReport> {
    schedule_bound_named("classical_bound", v, &Schedule::classical(), times, tolerance, true)
}

/// `e^{-nt/2} ||P_t v||^2_{(e^t+1)/2} / ||v||^2_1`, required to be `<= 1` and
/// nonincreasing.
pub fn critical_bound(v: &InitialData, times: &[f64], tolerance: f64) -> Result<BoundReport> {
    schedule_bound_named("critical_bound", v, &Schedule::critical(), times, tolerance, true)
}

/// `C_{1+e^t,γ}` on `R^n`; errors unless `0 < γ < (1+e^t)/2` and `t > 0`.
pub fn euclidean_constant(t: f64, gamma: f64, n: usize) -> Result<f64> {
    let (a, expo) = constant_parts(t, gamma, n)?;
    Ok((PI / a).powf(expo / 2.0))
}

/// `C^{4/n} = (π/a)^{(q-2)/q}`, computed without passing through `C`.
pub fn euclidean_constant_pow4n(t: f64, gamma: f64) -> Result<f64> {
    let (a, _) = constant_parts(t, gamma, 1)?;
    let q = 1.0 + t.exp();
    Ok((PI / a).powf((q - 2.0) / q))
}

/// Decay rate `a` of the defining integrand `e^{-a|y|^2}` and the exponent
/// `(n/2)(q-2)/q` of `C^2`.
fn constant_parts(t: f64, gamma: f64, n: usize) -> Result<(f64, f64)> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Domain(format!("the constant needs t > 0, got {t}")));
    }
    if n == 0 {
        return Err(Error::Config("dimension must be >= 1".into()));
    }
    let q = 1.0 + t.exp();
    if !(gamma > 0.0 && gamma < q / 2.0) {
        return Err(Error::Divergence {
            reason: format!("the constant needs 0 < gamma < (1+e^t)/2 = {}, got {gamma}", q / 2.0),
            critical_gamma: q / 2.0,
        });
    }
    let a = 0.25 * (1.0 / gamma - 2.0 / q) * q / (q - 2.0);
    Ok((a, (n as f64 / 2.0) * (q - 2.0) / q))
}

/// `C_{1+e^t,γ}` from its defining integral
/// `{∫ (e^{-f[1/γ - 2/q]})^{q/(q-2)} dy}^{(q-2)/(2q)}`, evaluated by a tensor
/// rule whose scale is deliberately not matched to the integrand.
pub fn euclidean_constant_quadrature(t: f64, gamma: f64, n: usize, order: usize) -> Result<f64> {
    let (a, _) = constant_parts(t, gamma, n)?;
    let q = 1.0 + t.exp();
    let sigma = 1.3 * (0.5 / a).sqrt();
    let rule = QuadratureRule::new(n, order, sigma)?;
    let p = q / (q - 2.0);
    let c = 1.0 / gamma - 2.0 / q;
    let integral = rule.integrate_log(|y| {
        let f: f64 = y.iter().map(|v| v * v).sum::<f64>() / 4.0;
        -f * c * p
    });
    Ok(integral.powf((q - 2.0) / (2.0 * q)))
}

/// Checks `||P_t v||_γ <= C_{1+e^t,γ} ||v||_1` in squared-ratio form.
pub fn bakry_emery_bound(v: &InitialData, t: f64, gamma: f64, tolerance: f64) -> Result<BoundReport> {
    let schedule = Schedule {
        gamma: GammaSchedule::Constant(gamma),
        mu: MuSchedule::Constant,
        alpha: 0.0,
    };
    if v.dim() == 0 {
        return Err(Error::Config("dimension must be >= 1".into()));
    }
    let c = match euclidean_constant(t, gamma, v.dim()) {
        Ok(c) => c,
        Err(Error::Divergence { reason, .. }) => {
            return Ok(BoundReport::diverged("bakry_emery_bound", schedule, vec![t], tolerance, reason))
        }
        Err(e) => return Err(e),
    };
    let lhs = match v.evolve(t)?.weighted_norm_sq(gamma) {
        Ok(x) => x,
        Err(Error::Divergence { reason, .. }) => {
            return Ok(BoundReport::diverged("bakry_emery_bound", schedule, vec![t], tolerance, reason))
        }
        Err(e) => return Err(e),
    };
    let rhs = c * c * v.weighted_norm_sq(1.0)?;
    let mut report = BoundReport::from_series("bakry_emery_bound", schedule, vec![t], vec![lhs / rhs], tolerance, false);
    report.detail = Some(format!("C = {c:.12e}"));
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypercontractivityProbe {
    pub t: f64,
    /// `(1+e^t)/2`.
    pub q_stated: f64,
    /// `||P_t v||_{q_stated} / ||v||_2`.
    pub ratio_stated: f64,
    /// `1+e^t`.
    pub q_used: f64,
    pub ratio_used: f64,
    pub verdict: Verdict,
}

/// `L^q(e^{-f})` norm, closed form for profiles and quadrature for fields.
pub fn lq_norm(v: &InitialData, q: f64) -> Result<f64> {
    let integral = match v {
        InitialData::Profile(p) => p.weighted_power_integral(q, 1.0)?,
        InitialData::Field(f) => {
            let axes = match f.model().kind() {
                ModelKind::EuclideanGaussian => f.dim(),
                ModelKind::RoundCylinder => 1,
            };
            let order = match axes {
                1 => 96,
                2 => 40,
                _ => 20,
            };
            f.weighted_power_integral(q, 1.0, order.max(f.max_degree() as usize + 2))?
        }
    };
    Ok(integral.powf(1.0 / q))
}

/// Compares `||P_t v||_q` with `||v||_2` for both exponents in use. Never
/// certifies anything.
pub fn hypercontractivity_probe(v: &InitialData, t: f64) -> Result<HypercontractivityProbe> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Domain(format!("probe time must be >= 0, got {t}")));
    }
    let et = t.exp();
    let vt = v.evolve(t)?;
    let base = v.weighted_norm_sq(1.0)?.sqrt();
    let q_stated = (1.0 + et) / 2.0;
    let q_used = 1.0 + et;
    Ok(HypercontractivityProbe {
        t,
        q_stated,
        ratio_stated: lq_norm(&vt, q_stated)? / base,
        q_used,
        ratio_used: lq_norm(&vt, q_used)? / base,
        verdict: Verdict::Probe,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnsatzValue {
    pub t: f64,
    pub f_coefficient: f64,
    pub constant_coefficient: f64,
    /// `∫ {a f + b n/2} v_t^2 e^{-f/γ} dVol`.
    pub functional: f64,
}

/// Evaluates the ansatz upper bound for `μ^{-n/2} d/dt(μ^{n/2} ||P_t v||^2_γ)`
/// at the evolved state `v_t`.
pub fn ansatz_derivative(v_t: &InitialData, schedule: &Schedule, t: f64) -> Result<AnsatzValue> {
    schedule.validate(&[t])?;
    let a = schedule.f_coefficient(t);
    let b = schedule.constant_coefficient();
    let half_n = v_t.dim() as f64 / 2.0;
    let gamma = schedule.gamma.value(t);
    let functional = v_t.weighted_square_integral(gamma, |f| a * f + b * half_n)?;
    Ok(AnsatzValue {
        t,
        f_coefficient: a,
        constant_coefficient: b,
        functional,
    })
}

/// Exact `μ^{-n/2} d/dt(μ^{n/2} ||P_t v||^2_γ)` for a Euclidean field:
/// `∫ {2 v Δ_f v + (γ̇/γ^2) f v^2 + (μ̇/μ)(n/2) v^2} e^{-f/γ}`.
pub fn monitored_derivative(v: &HermiteField, schedule: &Schedule, t: f64) -> Result<f64> {
    schedule.validate(&[t])?;
    let vt = v.evolve(t)?;
    let lv = vt.apply_drift_laplacian();
    let g = schedule.gamma.value(t);
    let gd = schedule.gamma.rate(t);
    let half_n = v.dim() as f64 / 2.0;
    let order = v.max_degree() as usize + 2;
    let cross = vt.weighted_product_integral_with(&lv, g, order, |_| 2.0)?;
    let rest = vt.weighted_square_integral_with(g, order, |f| gd / (g * g) * f + schedule.mu.log_rate() * half_n)?;
    Ok(cross + rest)
}

/// Closed-form solution `(γ₀ - ½)e^t + ½` of `γ̇ = γ - ½`.
pub fn gamma_ode(gamma0: f64, t: f64) -> f64 {
    (gamma0 - 0.5) * t.exp() + 0.5
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharpnessReport {
    /// Limit value of `L(v)` from closed forms.
    pub closed_form: f64,
    /// `sqrt(r(t))` at `t = 20` and `t = 25`.
    pub numeric_t20: f64,
    pub numeric_t25: f64,
    /// Extrapolation of the squared ratio assuming an `e^{-t}` transient.
    pub richardson: f64,
}

/// `L(v) = sqrt(lim_{t→∞} e^{-nt/2} ||P_t v||^2_{(e^t+1)/2} / ||v||^2_1)` on `R^n`.
pub fn sharpness_l(v: &InitialData) -> Result<SharpnessReport> {
    let closed_form = match v {
        InitialData::Profile(p) => profile_sharpness(p)?,
        InitialData::Field(f) => field_sharpness(f)?,
    };
    let r = |t: f64| -> Result<f64> {
        let q = monitored_quantity(v, &Schedule::critical(), t)?;
        Ok(q / v.weighted_norm_sq(1.0)?)
    };
    let (r20, r25) = (r(20.0)?, r(25.0)?);
    let damp = (-5.0f64).exp();
    let richardson = (r25 - damp * r20) / (1.0 - damp);
    Ok(SharpnessReport {
        closed_form,
        numeric_t20: r20.sqrt(),
        numeric_t25: r25.sqrt(),
        richardson: richardson.max(0.0).sqrt(),
    })
}

fn profile_sharpness(p: &GaussianProfile) -> Result<f64> {
    let n = p.dim as f64;
    let c = p.c;
    let s = match p.family {
        ProfileFamily::Reverse => 1.0,
        ProfileFamily::Forward => -1.0,
    };
    if s > 0.0 && c <= 1.0 {
        return Err(Error::Divergence {
            reason: format!("reverse profile with c = {c} leaves the critical weight space"),
            critical_gamma: (c * p.t.exp() + 1.0) / 2.0,
        });
    }
    // A → c^{-n/2} and e^t (1/(4γ) - 2B) → (1 - s/c)/2.
    let limit = c.powf(-n) * (2.0 * PI / (1.0 - s / c)).powf(n / 2.0);
    let base = p.weighted_norm_sq(1.0)?;
    Ok((limit / base).sqrt())
}

fn field_sharpness(v: &HermiteField) -> Result<f64> {
    if v.model().kind() != ModelKind::EuclideanGaussian {
        return Err(Error::Unsupported("L(v) is evaluated on R^n".into()));
    }
    // Under y = e^{t/2} x the mode e^{-|k|t/2} h_k(y) tends to its leading
    // monomial 2^{-|k|/2} x^k, and the weight tends to e^{-|x|^2/2}.
    let n = v.dim();
    let rule = QuadratureRule::new(n, v.max_degree() as usize + 1, 1.0)?;
    let top: Vec<(Vec<u32>, f64)> = v
        .terms()
        .map(|(k, a)| {
            let deg: u32 = k.iter().sum();
            (k.clone(), a * 2f64.powf(-(deg as f64) / 2.0))
        })
        .collect();
    let limit = rule.integrate(|x| {
        let w: f64 = top
            .iter()
            .map(|(k, a)| a * k.iter().zip(x).map(|(&ki, &xi)| xi.powi(ki as i32)).product::<f64>())
            .sum();
        w * w
    });
    Ok((limit / v.weighted_norm_sq(1.0)?).sqrt())
}
