//! Pointwise checks of the differential identities behind the weighted
//! estimates, on flat `R^n` with analytically expanded jets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fd::{fd_evolve, FdGeometry, FdGrid};
use crate::poly::Poly;
use crate::soliton::ModelKind;
use crate::spectral::HermiteField;

/// Value, gradient, Hessian and optionally `∇Δ` of a scalar function at a point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarJet {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub hessian: Vec<Vec<f64>>,
    pub grad_laplacian: Option<Vec<f64>>,
}

impl ScalarJet {
    pub fn dim(&self) -> usize {
        self.gradient.len()
    }

    pub fn laplacian(&self) -> f64 {
        (0..self.dim()).map(|i| self.hessian[i][i]).sum()
    }

    /// Exact jet of a polynomial, including third-order data.
    pub fn from_poly(p: &Poly, point: &[f64]) -> Self {
        let n = p.dim();
        let grad = p.gradient();
        let hess: Vec<Vec<Poly>> = grad.iter().map(|g| g.gradient()).collect();
        let lap = p.laplacian();
        Self {
            value: p.eval(point),
            gradient: grad.iter().map(|g| g.eval(point)).collect(),
            hessian: (0..n).map(|i| (0..n).map(|j| hess[i][j].eval(point)).collect()).collect(),
            grad_laplacian: Some(lap.gradient().iter().map(|g| g.eval(point)).collect()),
        }
    }

    /// Second-order jet of an arbitrary function by central differences.
    pub fn from_closure<F: Fn(&[f64]) -> f64>(g: F, point: &[f64], h: f64) -> Self {
        let n = point.len();
        let at = |shift: &[(usize, f64)]| {
            let mut p = point.to_vec();
            for &(i, s) in shift {
                p[i] += s;
            }
            g(&p)
        };
        let v0 = g(point);
        let gradient = (0..n).map(|i| (at(&[(i, h)]) - at(&[(i, -h)])) / (2.0 * h)).collect();
        let mut hessian = vec![vec![0.0; n]; n];
        for i in 0..n {
            hessian[i][i] = (at(&[(i, h)]) - 2.0 * v0 + at(&[(i, -h)])) / (h * h);
            for j in (i + 1)..n {
                let x = (at(&[(i, h), (j, h)]) - at(&[(i, h), (j, -h)]) - at(&[(i, -h), (j, h)])
                    + at(&[(i, -h), (j, -h)]))
                    / (4.0 * h * h);
                hessian[i][j] = x;
                hessian[j][i] = x;
            }
        }
        Self {
            value: v0,
            gradient,
            hessian,
            grad_laplacian: None,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn quad_form(m: &[Vec<f64>], a: &[f64], b: &[f64]) -> f64 {
    m.iter().zip(a).map(|(row, ai)| ai * dot(row, b)).sum()
}

fn mat_vec(m: &[Vec<f64>], a: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dot(row, a)).collect()
}

/// Data for the pointwise identities: jets of `v` and `f` and the parameters
/// `α`, `γ`, `k`, `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JetInput {
    pub point: Vec<f64>,
    pub v: ScalarJet,
    pub f: ScalarJet,
    pub alpha: f64,
    pub gamma: f64,
    pub k: f64,
    pub t: f64,
    /// `∇(∂v/∂t)`. When absent it is derived from `∂v/∂t = Δ_f v`.
    pub v_time_gradient: Option<Vec<f64>>,
}

impl JetInput {
    pub fn new(point: Vec<f64>, v: ScalarJet, f: ScalarJet, alpha: f64, gamma: f64) -> Result<Self> {
        let n = point.len();
        for (name, jet) in [("v", &v), ("f", &f)] {
            if jet.dim() != n || jet.hessian.len() != n || jet.hessian.iter().any(|r| r.len() != n) {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: jet.dim(),
                });
            }
            for i in 0..n {
                for j in 0..i {
                    let (a, b) = (jet.hessian[i][j], jet.hessian[j][i]);
                    if (a - b).abs() > 1e-12 * (1.0 + a.abs()) {
                        return Err(Error::Domain(format!("Hessian of {name} is not symmetric")));
                    }
                }
            }
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::Domain(format!("gamma must be positive, got {gamma}")));
        }
        Ok(Self {
            point,
            v,
            f,
            alpha,
            gamma,
            k: 0.0,
            t: 0.0,
            v_time_gradient: None,
        })
    }

    pub fn with_curvature(mut self, k: f64, t: f64) -> Self {
        self.k = k;
        self.t = t;
        self
    }

    pub fn with_time_gradient(mut self, g: Vec<f64>) -> Self {
        self.v_time_gradient = Some(g);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs - rhs|`.
    pub residual: f64,
    /// `|lhs - rhs| e^{f/γ}`: the residual with the common weight factored out.
    pub unweighted_residual: f64,
}

/// Both sides of
/// `2vΔ_f v e + 2|dv - βv df|^2 e - {[½(1-α)^2 + γ^{-2}(½-γ)]|df|^2 + αΔf} v^2 e
///  = div[(2v dv - α v^2 df) e]`, with `e = e^{-f/γ}` and `β = (-1+α+1/γ)/2`.
pub fn divergence_identity(jet: &JetInput) -> DivergenceCheck {
    let (v, dv) = (jet.v.value, &jet.v.gradient);
    let df = &jet.f.gradient;
    let (a, g) = (jet.alpha, jet.gamma);
    let lap_v = jet.v.laplacian();
    let lap_f = jet.f.laplacian();
    let dvdf = dot(dv, df);
    let df2 = dot(df, df);
    let dv2 = dot(dv, dv);
    let beta = (-1.0 + a + 1.0 / g) / 2.0;
    let shifted: f64 = dv.iter().zip(df).map(|(x, y)| (x - beta * v * y).powi(2)).sum();
    let coeff = 0.5 * (1.0 - a).powi(2) + (0.5 - g) / (g * g);

    let lhs_u = 2.0 * v * (lap_v - dvdf) + 2.0 * shifted - (coeff * df2 + a * lap_f) * v * v;
    let rhs_u = 2.0 * dv2 + 2.0 * v * lap_v - a * (2.0 * v * dvdf + v * v * lap_f)
        - (2.0 * v * dvdf - a * v * v * df2) / g;
    let e = (-jet.f.value / g).exp();
    let (lhs, rhs) = (lhs_u * e, rhs_u * e);
    DivergenceCheck {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
        unweighted_residual: (lhs_u - rhs_u).abs(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BochnerCheck {
    /// `½[Δ_f - ∂_t](e^{-kt}|dv|^2)`.
    pub lhs: f64,
    /// `e^{-kt}{|Hess v|^2 + (Hess f + (k/2)g)(dv,dv)}`.
    pub rhs: f64,
    pub residual: f64,
    /// The same bracket with `k g` in place of `(k/2) g`.
    pub rhs_with_full_k: f64,
    /// Whether `Hess f + (k/2) g` is positive semidefinite at the point.
    pub curvature_nonnegative: bool,
}

/// Bochner computation for `e^{-kt}|dv|^2` along the drift heat flow on flat
/// `R^n` (so `Ric_f = Hess f`). Needs `∇Δv`.
pub fn bochner_identity(jet: &JetInput) -> Result<BochnerCheck> {
    let n = jet.point.len();
    let dv = &jet.v.gradient;
    let hv = &jet.v.hessian;
    let df = &jet.f.gradient;
    let hf = &jet.f.hessian;
    let grad_lap = jet
        .v
        .grad_laplacian
        .as_ref()
        .ok_or_else(|| Error::Config("the Bochner check needs third derivatives of v".into()))?;
    let time_grad = match &jet.v_time_gradient {
        Some(g) => g.clone(),
        None => {
            let a = mat_vec(hf, dv);
            let b = mat_vec(hv, df);
            (0..n).map(|i| grad_lap[i] - a[i] - b[i]).collect()
        }
    };
    let decay = (-jet.k * jet.t).exp();
    let dv2 = dot(dv, dv);
    let hess_sq: f64 = hv.iter().flatten().map(|x| x * x).sum();
    // Δ|dv|^2 = 2|Hess v|^2 + 2<dv, ∇Δv>; <df, ∇|dv|^2> = 2 Hess v(df, dv).
    let drift_lap = 2.0 * hess_sq + 2.0 * dot(dv, grad_lap) - 2.0 * quad_form(hv, df, dv);
    // ∂_t (e^{-kt}|dv|^2) = e^{-kt}(2<dv, ∇v_t> - k|dv|^2).
    let time = 2.0 * dot(dv, &time_grad) - jet.k * dv2;
    let lhs = 0.5 * decay * (drift_lap - time);
    let curv = quad_form(hf, dv, dv);
    let rhs = decay * (hess_sq + curv + 0.5 * jet.k * dv2);
    let rhs_with_full_k = decay * (hess_sq + curv + jet.k * dv2);
    Ok(BochnerCheck {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
        rhs_with_full_k,
        curvature_nonnegative: min_eigenvalue_shifted(hf, 0.5 * jet.k) >= -1e-14,
    })
}

/// Smallest eigenvalue of `m + s I` for symmetric `m` (n <= 3) by Jacobi sweeps.
fn min_eigenvalue_shifted(m: &[Vec<f64>], s: f64) -> f64 {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    for i in 0..n {
        a[i][i] += s;
    }
    for _ in 0..50 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p][q] * a[p][q];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for r in 0..n {
                    let (arp, arq) = (a[r][p], a[r][q]);
                    a[r][p] = c * arp - sn * arq;
                    a[r][q] = sn * arp + c * arq;
                }
                for r in 0..n {
                    let (apr, aqr) = (a[p][r], a[q][r]);
                    a[p][r] = c * apr - sn * aqr;
                    a[q][r] = sn * apr + c * aqr;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).fold(f64::INFINITY, f64::min)
}

/// `f = |y|^2/4` as a polynomial.
pub fn euclidean_potential(n: usize) -> Poly {
    let mut p = Poly::zero(n);
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = 2;
        p.add_term(e, 0.25);
    }
    p
}

/// Jet of `P_t v` for a Euclidean field, with `∇(∂_t v)` taken from the
/// spectral time derivative rather than from the equation.
pub fn jet_from_field(v: &HermiteField, t: f64, point: &[f64], alpha: f64, gamma: f64, k: f64) -> Result<JetInput> {
    if v.model().kind() != ModelKind::EuclideanGaussian {
        return Err(Error::Unsupported("jets are built on R^n".into()));
    }
    let vt = v.evolve(t)?;
    let p = vt.to_polynomial()?;
    let dt = vt.apply_drift_laplacian().to_polynomial()?;
    let f = euclidean_potential(v.dim());
    let time_grad: Vec<f64> = dt.gradient().iter().map(|g| g.eval(point)).collect();
    Ok(JetInput::new(
        point.to_vec(),
        ScalarJet::from_poly(&p, point),
        ScalarJet::from_poly(&f, point),
        alpha,
        gamma,
    )?
    .with_curvature(k, t)
    .with_time_gradient(time_grad))
}

/// Random polynomial of total degree `<= degree` with coefficients in `[-1, 1]`.
pub fn random_poly(rng: &mut ChaCha8Rng, n: usize, degree: u32) -> Poly {
    let mut p = Poly::zero(n);
    for e in crate::spectral::multi_indices(n, degree) {
        p.add_term(e, rng.gen_range(-1.0..=1.0));
    }
    p
}

/// A random jet: `n ∈ {1,2,3}`, cubic `v` and `f`, point in `[-1,1]^n`,
/// `α ∈ [-2,2]`, `γ ∈ [0.1,5]`.
pub fn random_jet(rng: &mut ChaCha8Rng) -> JetInput {
    let n = rng.gen_range(1..=3usize);
    let v = random_poly(rng, n, 3);
    let f = random_poly(rng, n, 3);
    let point: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let alpha = rng.gen_range(-2.0..=2.0);
    let gamma = rng.gen_range(0.1..=5.0);
    JetInput::new(point.clone(), ScalarJet::from_poly(&v, &point), ScalarJet::from_poly(&f, &point), alpha, gamma)
        .expect("polynomial jets are consistent")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub seed: u64,
    pub count: usize,
    /// Largest residual with the common weight `e^{-f/γ}` factored out.
    pub max_residual: f64,
    /// Largest residual including the weight.
    pub max_weighted_residual: f64,
}

pub fn divergence_sweep(seed: u64, count: usize) -> SweepSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_residual: f64 = 0.0;
    let mut max_weighted: f64 = 0.0;
    for _ in 0..count {
        let c = divergence_identity(&random_jet(&mut rng));
        max_residual = max_residual.max(c.unweighted_residual);
        max_weighted = max_weighted.max(c.residual);
    }
    SweepSummary {
        seed,
        count,
        max_residual,
        max_weighted_residual: max_weighted,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BochnerSweep {
    pub seed: u64,
    pub count: usize,
    pub max_residual: f64,
    /// Jets where `Hess f + (k/2) g ⪰ 0` but the right-hand side was negative.
    pub sign_failures: usize,
    pub curvature_nonnegative: usize,
}

/// Jets of random Euclidean fields (`n <= 3`, degree `<= 4`, coefficients in
/// `[-1, 1]`) evolved to `t ∈ [0, 3]`, with `k ∈ [0, 2]` and a point in
/// `[-2, 2]^n`. The time derivative comes from the spectral evolution.
pub fn bochner_sweep(seed: u64, count: usize) -> Result<BochnerSweep> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = BochnerSweep {
        seed,
        count,
        max_residual: 0.0,
        sign_failures: 0,
        curvature_nonnegative: 0,
    };
    for _ in 0..count {
        let n = rng.gen_range(1..=3usize);
        let model = crate::soliton::SolitonModel::euclidean(n)?;
        let terms: Vec<(Vec<u32>, f64)> = crate::spectral::multi_indices(n, 4)
            .into_iter()
            .map(|k| (k, rng.gen_range(-1.0..=1.0)))
            .collect();
        let v = HermiteField::from_terms(model, 4, terms)?;
        let point: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..=2.0)).collect();
        let k = rng.gen_range(0.0..=2.0);
        let t = rng.gen_range(0.0..=3.0);
        let jet = jet_from_field(&v, t, &point, 1.0, 1.0, k)?;
        let c = bochner_identity(&jet)?;
        let scale = 1.0 + c.lhs.abs().max(c.rhs.abs());
        out.max_residual = out.max_residual.max(c.residual / scale);
        if c.curvature_nonnegative {
            out.curvature_nonnegative += 1;
            if c.rhs < 0.0 {
                out.sign_failures += 1;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommuteCheck {
    /// `max_k |Δ_f(P_t v) - P_t(Δ_f v)|` over coefficients.
    pub coefficient_residual: f64,
    /// Largest coefficient magnitude of `Δ_f P_t v`, for scale.
    pub scale: f64,
}

/// Compares `Δ_f P_t v` with `P_t Δ_f v` coefficient by coefficient.
pub fn laplacian_commutes(v: &HermiteField, t: f64) -> Result<CommuteCheck> {
    let a = v.evolve(t)?.apply_drift_laplacian();
    let b = v.apply_drift_laplacian().evolve(t)?;
    let mut residual: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for ((ka, ca), (kb, cb)) in a.terms().zip(b.terms()) {
        debug_assert_eq!(ka, kb);
        residual = residual.max((ca - cb).abs());
        scale = scale.max(ca.abs());
    }
    Ok(CommuteCheck {
        coefficient_residual: residual,
        scale,
    })
}

/// `|Δ_f(P_t v)(y) - [FD evolution of Δ_f v](y)|` for a field on the line.
pub fn laplacian_commutes_fd(v: &HermiteField, t: f64, y: f64, grid: &FdGrid) -> Result<f64> {
    if v.model().kind() != ModelKind::EuclideanGaussian || v.dim() != 1 {
        return Err(Error::Unsupported("the FD comparison runs on the line".into()));
    }
    let spectral = v.evolve(t)?.drift_laplacian_at(&[y])?;
    let lv = v.apply_drift_laplacian();
    let sol = fd_evolve(|x| lv.eval(&[x]).unwrap_or(f64::NAN), t, grid, FdGeometry::Line)?;
    let fd = sol
        .value_at(y)
        .ok_or_else(|| Error::Config(format!("y = {y} is not a grid node")))?;
    Ok((spectral - fd).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::soliton::SolitonModel;

    #[test]
    fn hand_anchor() {
        let f = euclidean_potential(1);
        let one = Poly::constant(1, 1.0);
        let jet = JetInput::new(vec![1.0], ScalarJet::from_poly(&one, &[1.0]), ScalarJet::from_poly(&f, &[1.0]), 1.0, 2.0).unwrap();
        let c = divergence_identity(&jet);
        let want = -0.375 * (-0.125f64).exp();
        assert!((c.lhs - want).abs() < 1e-12);
        assert!((c.rhs - want).abs() < 1e-12);
        assert!((want + 0.330937).abs() < 1e-6);
    }

    #[test]
    fn zero_function() {
        let f = euclidean_potential(2);
        let z = Poly::zero(2);
        let p = [0.3, -0.8];
        let jet = JetInput::new(p.to_vec(), ScalarJet::from_poly(&z, &p), ScalarJet::from_poly(&f, &p), 0.4, 1.3).unwrap();
        let c = divergence_identity(&jet);
        assert_eq!(c.lhs, 0.0);
        assert_eq!(c.rhs, 0.0);
    }

    #[test]
    fn random_sweep() {
        let s = divergence_sweep(7, 300);
        assert!(s.max_residual < 1e-9, "{s:?}");
    }

    #[test]
    fn finite_difference_jets() {
        let v = |y: &[f64]| (0.7 * y[0]).sin() * (1.0 + y[1] * y[1]).ln();
        let f = |y: &[f64]| 0.25 * (y[0] * y[0] + y[1] * y[1]) + 0.1 * y[0] * y[1];
        let p = [0.4, -0.6];
        let jet = JetInput::new(p.to_vec(), ScalarJet::from_closure(v, &p, 1e-4), ScalarJet::from_closure(f, &p, 1e-4), 0.5, 1.7).unwrap();
        assert!(divergence_identity(&jet).residual < 1e-6);
    }

    #[test]
    fn bochner_linear_mode() {
        let m = SolitonModel::euclidean(1).unwrap();
        let v = HermiteField::from_terms(m, 1, [(vec![1], std::f64::consts::SQRT_2)]).unwrap();
        for t in [0.0, 0.5, 2.0] {
            let jet = jet_from_field(&v, t, &[0.7], 1.0, 1.0, 0.0).unwrap();
            let c = bochner_identity(&jet).unwrap();
            assert!((c.lhs - 0.5 * (-t).exp()).abs() < 1e-14);
            assert!(c.residual < 1e-12);
        }
    }

    #[test]
    fn bochner_quadratic_mode() {
        let m = SolitonModel::euclidean(2).unwrap();
        let v = HermiteField::from_terms(m, 2, [(vec![2, 0], 1.0), (vec![1, 1], -0.5)]).unwrap();
        let jet = jet_from_field(&v, 0.8, &[0.3, 1.9], 1.0, 1.0, 0.0).unwrap();
        let c = bochner_identity(&jet).unwrap();
        assert!(c.residual < 1e-10);
        assert!(c.curvature_nonnegative);
        assert!(c.rhs >= 0.0);
    }

    #[test]
    fn bochner_full_k_form_is_off_by_half_k() {
        let m = SolitonModel::euclidean(1).unwrap();
        let v = HermiteField::from_terms(m, 2, [(vec![1], 1.0), (vec![2], 0.3)]).unwrap();
        let (k, t) = (0.8, 0.6);
        let jet = jet_from_field(&v, t, &[0.4], 1.0, 1.0, k).unwrap();
        let c = bochner_identity(&jet).unwrap();
        assert!(c.residual < 1e-12);
        let dv2: f64 = jet.v.gradient.iter().map(|x| x * x).sum();
        let gap = c.rhs_with_full_k - c.lhs;
        assert!((gap - 0.5 * k * (-k * t).exp() * dv2).abs() < 1e-12);
    }

    #[test]
    fn bochner_negative_curvature_control() {
        // Fabricated f with Hess f = -I: equality still holds, sign may fail.
        let n = 2;
        let mut f = Poly::zero(n);
        f.add_term(vec![2, 0], -0.5);
        f.add_term(vec![0, 2], -0.5);
        let mut v = Poly::zero(n);
        v.add_term(vec![1, 0], 1.0);
        let p = [0.2, 0.1];
        let jet = JetInput::new(p.to_vec(), ScalarJet::from_poly(&v, &p), ScalarJet::from_poly(&f, &p), 1.0, 1.0)
            .unwrap()
            .with_curvature(0.0, 0.0);
        let c = bochner_identity(&jet).unwrap();
        assert!(c.residual < 1e-10);
        assert!(!c.curvature_nonnegative);
        assert!(c.rhs < 0.0);
    }

    #[test]
    fn bochner_random_sweep() {
        let s = bochner_sweep(11, 300).unwrap();
        assert!(s.max_residual < 1e-10, "{s:?}");
        assert_eq!(s.sign_failures, 0);
        assert!(s.curvature_nonnegative > 0);
    }

    #[test]
    fn eigenvalue_helper() {
        let m = vec![vec![2.0, 1.0], vec![1.0, 2.0]];
        assert!((min_eigenvalue_shifted(&m, 0.0) - 1.0).abs() < 1e-12);
        assert!((min_eigenvalue_shifted(&m, -1.5) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn commutation() {
        let m = SolitonModel::euclidean(2).unwrap();
        let v = HermiteField::from_terms(m, 4, [(vec![2, 0], 1.0), (vec![1, 3], -0.7), (vec![0, 1], 0.2)]).unwrap();
        let c = laplacian_commutes(&v, 1.3).unwrap();
        assert!(c.coefficient_residual <= 4.0 * f64::EPSILON * c.scale);
        let one = HermiteField::constant(SolitonModel::euclidean(1).unwrap(), 1.0);
        assert_eq!(laplacian_commutes(&one, 2.0).unwrap().coefficient_residual, 0.0);
    }

    #[test]
    fn commutation_against_fd() {
        let m = SolitonModel::euclidean(1).unwrap();
        let h2 = HermiteField::from_terms(m, 2, [(vec![2], 1.0)]).unwrap();
        let r = laplacian_commutes_fd(&h2, 1.0, 0.0, &FdGrid::default()).unwrap();
        assert!(r < 1e-3, "{r}");
    }
}
