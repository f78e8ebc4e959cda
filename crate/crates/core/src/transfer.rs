//! Passage between the drift heat flow on the Gaussian shrinker and the heat
//! equation along its (flat, self-similar) Ricci flow, plus the Schur-test
//! bound for the heat operator between Gaussian-weighted spaces.
//!
//! Flow time `τ ∈ [-1, 0)` corresponds to soliton time `t = -ln(-τ)`, and
//! `u(τ, x) = v(t, (-τ)^{-1/2} x)`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::quadrature::QuadratureRule;
use crate::soliton::ModelKind;
use crate::spectral::{InitialData, ProfileFamily};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowFrame {
    pub tau: f64,
    pub t: f64,
    /// `(-τ)^{-1/2}`, the factor taking flow coordinates to soliton coordinates.
    pub scale: f64,
}

impl FlowFrame {
    pub fn from_tau(tau: f64) -> Result<Self> {
        if !(tau >= -1.0 && tau < 0.0) {
            return Err(Error::Domain(format!("flow time must lie in [-1, 0), got {tau}")));
        }
        Ok(Self {
            tau,
            t: -(-tau).ln(),
            scale: (-tau).powf(-0.5),
        })
    }

    pub fn from_t(t: f64) -> Result<Self> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::Domain(format!("soliton time must be >= 0, got {t}")));
        }
        Ok(Self {
            tau: -(-t).exp(),
            t,
            scale: (t / 2.0).exp(),
        })
    }
}

fn require_euclidean(v: &InitialData) -> Result<()> {
    if let InitialData::Field(f) = v {
        if f.model().kind() != ModelKind::EuclideanGaussian {
            return Err(Error::Unsupported("the flow dictionary is built on R^n".into()));
        }
    }
    Ok(())
}

/// `u(τ, x) = v(-ln(-τ), (-τ)^{-1/2} x)`, by evolving `v` and rescaling.
pub fn to_flow(v: &InitialData, tau: f64, x: &[f64]) -> Result<f64> {
    require_euclidean(v)?;
    let frame = FlowFrame::from_tau(tau)?;
    let y: Vec<f64> = x.iter().map(|xi| xi * frame.scale).collect();
    v.evolve(frame.t)?.eval(&y)
}

/// Closed-form flow solution for Gaussian profiles:
/// `(c ∓ τ)^{-n/2} exp(±|x|^2 / (4(c ∓ τ)))`.
pub fn profile_flow_closed_form(family: ProfileFamily, c: f64, n: usize, tau: f64, x: &[f64]) -> f64 {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    let nh = n as f64 / 2.0;
    match family {
        ProfileFamily::Reverse => (c - tau).powf(-nh) * (r2 / (4.0 * (c - tau))).exp(),
        ProfileFamily::Forward => (c + tau).powf(-nh) * (-r2 / (4.0 * (c + tau))).exp(),
    }
}

/// `∂u/∂τ - Δu` at a point by central differences (`h_τ = 1e-4`, `h_x = 1e-3`).
pub fn heat_residual(v: &InitialData, tau: f64, x: &[f64]) -> Result<f64> {
    let ht = 1e-4;
    let hx = 1e-3;
    if tau - ht < -1.0 || tau + ht >= 0.0 {
        return Err(Error::Domain(format!("τ = {tau} is too close to the ends of [-1, 0)")));
    }
    let u_tau = (to_flow(v, tau + ht, x)? - to_flow(v, tau - ht, x)?) / (2.0 * ht);
    let u0 = to_flow(v, tau, x)?;
    let mut lap = 0.0;
    let mut p = x.to_vec();
    for i in 0..x.len() {
        p[i] = x[i] + hx;
        let up = to_flow(v, tau, &p)?;
        p[i] = x[i] - hx;
        let um = to_flow(v, tau, &p)?;
        p[i] = x[i];
        lap += (up - 2.0 * u0 + um) / (hx * hx);
    }
    Ok((u_tau - lap).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowNormCheck {
    pub t: f64,
    pub tau: f64,
    /// `e^{-nt/2} ∫ v_t^2 e^{-f/((e^t+1)/2)} dy`.
    pub soliton_side: f64,
    /// `∫ u_τ(x)^2 e^{-|x|^2/(2(1-τ))} dx`.
    pub flow_side: f64,
    pub residual: f64,
    /// `flow_side / ||v||^2_{L^2(e^{-f})}`; at most one by the critical bound.
    pub ratio_to_initial: f64,
}

/// Compares the critical weighted norm on the soliton side with the
/// corresponding Gaussian-weighted norm of the flow solution. The two sides
/// use independent quadratures in their own coordinates.
pub fn flow_norm_identity(v: &InitialData, t: f64) -> Result<FlowNormCheck> {
    require_euclidean(v)?;
    let frame = FlowFrame::from_t(t)?;
    let n = v.dim();
    let gamma = (t.exp() + 1.0) / 2.0;
    let soliton_side = (-(n as f64) * t / 2.0).exp() * v.evolve(t)?.weighted_norm_sq(gamma)?;
    let tau = frame.tau;
    let kappa = 1.0 / (2.0 * (1.0 - tau));
    let flow_side = match v {
        InitialData::Field(f) => {
            let order = f.max_degree() as usize + 2;
            let rule = QuadratureRule::for_decay(n, order, kappa)?;
            let evolved = v.evolve(t)?;
            let scale = frame.scale;
            rule.integrate(|x| {
                let y: Vec<f64> = x.iter().map(|xi| xi * scale).collect();
                evolved.eval(&y).map(|u| u * u).unwrap_or(f64::NAN)
            })
        }
        InitialData::Profile(p) => {
            let b = match p.family {
                ProfileFamily::Reverse => 1.0 / (4.0 * (p.c - tau)),
                ProfileFamily::Forward => -1.0 / (4.0 * (p.c + tau)),
            };
            let decay = kappa - 2.0 * b;
            if decay <= 0.0 {
                return Err(Error::Divergence {
                    reason: "flow solution is not square integrable against the flow weight".into(),
                    critical_gamma: (p.c * t.exp() + 1.0) / 2.0,
                });
            }
            // Rule scaled 5% wider than the integrand and centred off the origin.
            let rule = QuadratureRule::for_decay(n, 48, decay / 1.1025)?.with_center(vec![0.05; n])?;
            // log u(τ, x) = log A(t) + B(t) |e^{t/2} x|^2, kept in log form so
            // far nodes do not overflow.
            let evolved = p.evolve(t)?;
            let (log_a, b_t, s2) = (evolved.amplitude().ln(), evolved.exponent(), frame.scale * frame.scale);
            rule.integrate_log(|x| {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                2.0 * (log_a + b_t * s2 * r2) - kappa * r2
            })
        }
    };
    Ok(FlowNormCheck {
        t,
        tau,
        soliton_side,
        flow_side,
        residual: (soliton_side - flow_side).abs(),
        ratio_to_initial: flow_side / v.weighted_norm_sq(1.0)?,
    })
}

/// `(-τ) f((-τ)^{-1/2} x)` for `f = |y|^2/4`.
pub fn rescaled_potential(tau: f64, x: &[f64]) -> Result<f64> {
    let frame = FlowFrame::from_tau(tau)?;
    let y2: f64 = x.iter().map(|xi| (xi * frame.scale).powi(2)).sum();
    Ok(-tau * y2 / 4.0)
}

fn check_schur_tau(tau: f64) -> Result<()> {
    if !(tau >= 0.0 && tau < 1.0) {
        return Err(Error::Domain(format!("kernel time must lie in [0, 1), got {tau}")));
    }
    Ok(())
}

/// `|[2/(τ+1)]|x-y|^2 - |y|^2 - ([(1-τ)/(τ+1)]|y - 2x/(1-τ)|^2 - 2|x|^2/(1-τ))|`.
pub fn schur_identity_residual(x: &[f64], y: &[f64], tau: f64) -> Result<f64> {
    check_schur_tau(tau)?;
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum();
    let y2: f64 = y.iter().map(|b| b * b).sum();
    let x2: f64 = x.iter().map(|a| a * a).sum();
    let s2: f64 = x.iter().zip(y).map(|(a, b)| (b - 2.0 * a / (1.0 - tau)).powi(2)).sum();
    let lhs = 2.0 / (tau + 1.0) * d2 - y2;
    let rhs = (1.0 - tau) / (tau + 1.0) * s2 - 2.0 * x2 / (1.0 - tau);
    Ok((lhs - rhs).abs())
}

/// Largest identity residual over `count` draws with `n ∈ {1,2,3}`,
/// `x, y ∈ [-3,3]^n` and `τ ∈ [0, 0.99]`.
pub fn schur_identity_sweep(seed: u64, count: usize) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let n = rng.gen_range(1..=3usize);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..=3.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..=3.0)).collect();
        let tau = rng.gen_range(0.0..=0.99);
        worst = worst.max(schur_identity_residual(&x, &y, tau)?);
    }
    Ok(worst)
}

/// `log K(x, y) = -(n/2) ln(4π(τ+1)) + |y|^2/4 - |x-y|^2/(4(τ+1))`.
fn log_kernel(x: &[f64], y: &[f64], tau: f64) -> f64 {
    let n = x.len() as f64;
    let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum();
    let y2: f64 = y.iter().map(|b| b * b).sum();
    -(n / 2.0) * (4.0 * PI * (tau + 1.0)).ln() + y2 / 4.0 - d2 / (4.0 * (tau + 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchurRows {
    pub tau: f64,
    pub dim: usize,
    /// `∫ K(x,y) h_Y(y) dν_y / h_X(x)` at each sample `x`.
    pub x_row: Vec<f64>,
    /// `∫ K(x,y) h_X(x) dμ_x / h_Y(y)` at each sample `y`.
    pub y_row: Vec<f64>,
    pub c_x: f64,
    pub c_y: f64,
    pub c_x_variance: f64,
    pub c_y_variance: f64,
    /// `sqrt(C_X C_Y)`.
    pub bound: f64,
    /// `(2/(1-τ))^{n/2}`.
    pub c_x_closed: f64,
    /// `((1-τ)/2)^{n/2}`.
    pub c_y_closed: f64,
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64;
    (m, v)
}

/// Row integrals of the Schur test for the weights
/// `h_Y = e^{|y|^2/8}`, `h_X = e^{|x|^2/(4(1-τ))}`, `dν = e^{-|y|^2/4} dy`,
/// `dμ = e^{-|x|^2/(2(1-τ))} dx`. Each integral is evaluated from the literal
/// kernel in log form on a rule that is deliberately 10% too wide and offset
/// from the peak.
pub fn schur_row_constant(tau: f64, n: usize, samples: &[Vec<f64>], order: usize) -> Result<SchurRows> {
    check_schur_tau(tau)?;
    if samples.is_empty() {
        return Err(Error::Config("need at least one sample point".into()));
    }
    if let Some(bad) = samples.iter().find(|s| s.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: bad.len(),
        });
    }
    let one_minus = 1.0 - tau;
    let mut x_row = Vec::with_capacity(samples.len());
    let mut y_row = Vec::with_capacity(samples.len());
    for s in samples {
        // X-row: peak of the y-integrand at 2x/(1-τ), variance 4(1+τ)/(1-τ).
        let sigma = (4.0 * (1.0 + tau) / one_minus).sqrt();
        let center: Vec<f64> = s.iter().map(|x| 2.0 * x / one_minus + 0.1 * sigma).collect();
        let rule = QuadratureRule::new(n, order, 1.1 * sigma)?.with_center(center)?;
        let x2: f64 = s.iter().map(|v| v * v).sum();
        let log_hx = x2 / (4.0 * one_minus);
        x_row.push(rule.integrate_log(|y| {
            let y2: f64 = y.iter().map(|v| v * v).sum();
            log_kernel(s, y, tau) + y2 / 8.0 - y2 / 4.0 - log_hx
        }));

        // Y-row: peak of the x-integrand at (1-τ)y/2, variance (1+τ)(1-τ).
        let sigma = ((1.0 + tau) * one_minus).sqrt();
        let center: Vec<f64> = s.iter().map(|y| one_minus * y / 2.0 + 0.1 * sigma).collect();
        let rule = QuadratureRule::new(n, order, 1.1 * sigma)?.with_center(center)?;
        let y2: f64 = s.iter().map(|v| v * v).sum();
        let log_hy = y2 / 8.0;
        y_row.push(rule.integrate_log(|x| {
            let x2: f64 = x.iter().map(|v| v * v).sum();
            log_kernel(x, s, tau) + x2 / (4.0 * one_minus) - x2 / (2.0 * one_minus) - log_hy
        }));
    }
    let (c_x, c_x_variance) = mean_var(&x_row);
    let (c_y, c_y_variance) = mean_var(&y_row);
    let nh = n as f64 / 2.0;
    Ok(SchurRows {
        tau,
        dim: n,
        x_row,
        y_row,
        c_x,
        c_y,
        c_x_variance,
        c_y_variance,
        bound: (c_x * c_y).sqrt(),
        c_x_closed: (2.0 / one_minus).powf(nh),
        c_y_closed: (one_minus / 2.0).powf(nh),
    })
}

/// Data at flow time `-1` for the kernel comparison.
#[derive(Debug, Clone, PartialEq)]
pub enum FlowInitial {
    /// `c0^{-n/2} exp(|x|^2/(4 c0))`, the reverse family at `τ = -1` with `c = c0 - 1`.
    Reverse { c0: f64, dim: usize },
    Polynomial(Poly),
}

impl FlowInitial {
    pub fn dim(&self) -> usize {
        match self {
            FlowInitial::Reverse { dim, .. } => *dim,
            FlowInitial::Polynomial(p) => p.dim(),
        }
    }

    /// Exact heat evolution to flow time `τ >= -1`, where known.
    pub fn exact(&self, tau: f64, x: &[f64]) -> Option<f64> {
        match self {
            FlowInitial::Reverse { c0, dim } => {
                Some(profile_flow_closed_form(ProfileFamily::Reverse, c0 - 1.0, *dim, tau, x))
            }
            FlowInitial::Polynomial(p) if p.degree() <= 1 => Some(p.eval(x)),
            FlowInitial::Polynomial(_) => None,
        }
    }
}

/// `(T u_0)(x) = ∫ K(x,y) u_0(y) dν_y`: heat evolution from `τ = -1` to `τ`.
pub fn heat_apply(u0: &FlowInitial, tau: f64, x: &[f64], order: usize) -> Result<f64> {
    if !(tau > -1.0 && tau < 1.0) {
        return Err(Error::Domain(format!("kernel time must lie in (-1, 1), got {tau}")));
    }
    let n = u0.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    let s = tau + 1.0;
    match u0 {
        FlowInitial::Reverse { c0, .. } => {
            if *c0 <= s {
                return Err(Error::Divergence {
                    reason: format!("kernel integral diverges for c0 = {c0} at elapsed time {s}"),
                    critical_gamma: f64::NAN,
                });
            }
            // Integrand exponent: -|x-y|^2/(4s) + |y|^2/(4 c0).
            let kappa = 1.0 / (4.0 * s) - 1.0 / (4.0 * c0);
            let center: Vec<f64> = x.iter().map(|xi| xi / (4.0 * s * kappa)).collect();
            let sigma = (0.5 / kappa).sqrt();
            let shifted: Vec<f64> = center.iter().map(|c| c + 0.1 * sigma).collect();
            let rule = QuadratureRule::new(n, order, 1.1 * sigma)?.with_center(shifted)?;
            let log_amp = -(n as f64 / 2.0) * c0.ln();
            Ok(rule.integrate_log(|y| {
                let y2: f64 = y.iter().map(|v| v * v).sum();
                log_kernel(x, y, tau) - y2 / 4.0 + log_amp + y2 / (4.0 * c0)
            }))
        }
        FlowInitial::Polynomial(p) => {
            let sigma = (2.0 * s).sqrt();
            let rule = QuadratureRule::new(n, order, sigma)?.with_center(x.to_vec())?;
            // K e^{-|y|^2/4} is the heat kernel, i.e. a normalised Gaussian in y.
            let norm = (2.0 * PI * sigma * sigma).powf(-(n as f64) / 2.0);
            Ok(norm * rule.integrate(|y| p.eval(y)))
        }
    }
}

/// Gap at `τ = 0` between the soliton-side flow solution approached from
/// below (`τ = -ε`) and the kernel evolution of its `τ = -1` data.
pub fn continuity_at_zero(c: f64, n: usize, x: &[f64], eps: f64) -> Result<(f64, f64)> {
    let profile = crate::spectral::GaussianProfile::new(ProfileFamily::Reverse, c, n)?;
    let from_left = to_flow(&InitialData::Profile(profile), -eps, x)?;
    let kernel = heat_apply(&FlowInitial::Reverse { c0: c + 1.0, dim: n }, 0.0, x, 48)?;
    Ok((from_left, kernel))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::soliton::SolitonModel;
    use crate::spectral::{GaussianProfile, HermiteField};
    use std::f64::consts::SQRT_2;

    fn linear(n: usize, c: &[f64]) -> InitialData {
        let m = SolitonModel::euclidean(n).unwrap();
        let terms = (0..n).map(|i| {
            let mut k = vec![0; n];
            k[i] = 1;
            (k, c[i] * SQRT_2)
        });
        InitialData::Field(HermiteField::from_terms(m, 1, terms).unwrap())
    }

    #[test]
    fn frame_round_trip() {
        let f = FlowFrame::from_tau(-1.0).unwrap();
        assert_eq!(f.t, 0.0);
        let g = FlowFrame::from_t(2.0).unwrap();
        assert!((FlowFrame::from_tau(g.tau).unwrap().t - 2.0).abs() < 1e-14);
        assert!(FlowFrame::from_tau(0.0).is_err());
        assert!(FlowFrame::from_tau(-1.5).is_err());
    }

    #[test]
    fn dictionary_rows() {
        let c = [0.5, -1.5];
        let v = linear(2, &c);
        let x = [0.7, 0.2];
        for tau in [-1.0, -0.6, -0.05] {
            let u = to_flow(&v, tau, &x).unwrap();
            assert!((u - (c[0] * x[0] + c[1] * x[1])).abs() < 1e-13);
        }
        // e^{-t}(|y|^2/4 - n/2) ↦ |x|^2/4 + nτ/2.
        let m = SolitonModel::euclidean(2).unwrap();
        let q = InitialData::Field(HermiteField::from_terms(m, 2, [(vec![2, 0], 0.5), (vec![0, 2], 0.5)]).unwrap());
        for tau in [-1.0, -0.3] {
            let u = to_flow(&q, tau, &x).unwrap();
            let want = (x[0] * x[0] + x[1] * x[1]) / 4.0 + tau;
            assert!((u - want).abs() < 1e-13);
        }
        for fam in [ProfileFamily::Reverse, ProfileFamily::Forward] {
            let p = InitialData::Profile(GaussianProfile::new(fam, 1.5, 2).unwrap());
            let u = to_flow(&p, -0.4, &x).unwrap();
            let want = profile_flow_closed_form(fam, 1.5, 2, -0.4, &x);
            assert!((u / want - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn flow_solutions_solve_heat_equation() {
        let p = InitialData::Profile(GaussianProfile::new(ProfileFamily::Reverse, 2.0, 2).unwrap());
        for tau in [-0.9, -0.5, -0.1] {
            assert!(heat_residual(&p, tau, &[0.3, -0.8]).unwrap() < 1e-5);
            assert!(heat_residual(&linear(2, &[1.0, 2.0]), tau, &[0.3, -0.8]).unwrap() < 1e-5);
        }
    }

    #[test]
    fn flow_norm_examples() {
        let one = InitialData::Field(HermiteField::constant(SolitonModel::euclidean(2).unwrap(), 1.0));
        for t in [0.0, 0.5, 3.0] {
            let c = flow_norm_identity(&one, t).unwrap();
            let want = 2.0 * PI * (1.0 + (-t).exp());
            assert!((c.soliton_side - want).abs() < 1e-12);
            assert!(c.residual < 1e-12);
        }
        let c = flow_norm_identity(&linear(1, &[1.0]), 1.0).unwrap();
        assert!(c.residual < 1e-10);
        let p = InitialData::Profile(GaussianProfile::new(ProfileFamily::Reverse, 2.0, 1).unwrap());
        let c = flow_norm_identity(&p, 1.0).unwrap();
        assert!(c.residual < 1e-8, "{c:?}");
        assert!(c.ratio_to_initial <= 1.0);
    }

    #[test]
    fn potential_is_stationary() {
        assert!((rescaled_potential(-1.0, &[1.2, 0.4]).unwrap() - (1.44 + 0.16) / 4.0).abs() < 1e-15);
        assert!((rescaled_potential(-0.25, &[2.0, 0.0]).unwrap() - 1.0).abs() < 1e-15);
        for i in 1..100 {
            let tau = -(i as f64) / 100.0;
            let x = [0.3 * i as f64 / 10.0, -1.7];
            let want = (x[0] * x[0] + x[1] * x[1]) / 4.0;
            assert!((rescaled_potential(tau, &x).unwrap() - want).abs() <= 4.0 * f64::EPSILON * want);
        }
    }

    #[test]
    fn schur_identity_cases() {
        assert!(schur_identity_residual(&[0.0], &[1.7], 0.3).unwrap() < 1e-15);
        assert!(schur_identity_residual(&[0.8, 1.0], &[0.8, 1.0], 0.0).unwrap() < 1e-14);
        assert!(schur_identity_sweep(3, 1000).unwrap() < 1e-10);
        assert!(schur_identity_residual(&[0.0], &[0.0], 1.0).is_err());
    }

    #[test]
    fn schur_rows_are_constant() {
        let samples: Vec<Vec<f64>> = (0..20).map(|i| vec![-3.0 + 6.0 * i as f64 / 19.0]).collect();
        let r = schur_row_constant(0.0, 1, &samples, 40).unwrap();
        assert!((r.c_x - SQRT_2).abs() < 1e-10);
        assert!((r.c_y - 1.0 / SQRT_2).abs() < 1e-10);
        assert!((r.bound - 1.0).abs() < 1e-10);
        assert!(r.c_x_variance < 1e-16);
        let samples2: Vec<Vec<f64>> = (0..20).map(|i| vec![-3.0 + 0.3 * i as f64, 1.0 - 0.1 * i as f64]).collect();
        let r = schur_row_constant(0.5, 2, &samples2, 40).unwrap();
        assert!((r.c_x - 4.0).abs() < 1e-8);
        assert!(schur_row_constant(1.0, 1, &samples, 40).is_err());
    }

    #[test]
    fn kernel_application() {
        let u0 = FlowInitial::Reverse { c0: 2.0, dim: 1 };
        let got = heat_apply(&u0, 0.5, &[0.0], 48).unwrap();
        let want = u0.exact(0.5, &[0.0]).unwrap();
        assert!((got - want).abs() < 1e-6, "{got} vs {want}");
        assert!((want - 2f64.sqrt()).abs() < 1e-14);
        let one = FlowInitial::Polynomial(Poly::constant(2, 1.0));
        assert!((heat_apply(&one, 0.3, &[1.0, -2.0], 4).unwrap() - 1.0).abs() < 1e-8);
        let x = FlowInitial::Polynomial(Poly::coordinate(1, 0));
        assert!((heat_apply(&x, 0.7, &[1.3], 4).unwrap() - 1.3).abs() < 1e-8);
    }

    #[test]
    fn continuity_through_zero() {
        let (left, kernel) = continuity_at_zero(1.0, 1, &[0.6], 1e-9).unwrap();
        assert!((left - kernel).abs() < 1e-7, "{left} {kernel}");
    }
}
