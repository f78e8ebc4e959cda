//! Drift heat semigroup `P_t = e^{tΔ_f}` acting on truncated eigen-expansions
//! and on the closed-form Gaussian solution families.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::{factorial, h_jet, h_monomial_coeffs, h_values};
use crate::poly::Poly;
use crate::quadrature::QuadratureRule;
use crate::soliton::{ModelKind, SolitonModel};

/// Default truncation degree for projections.
pub const DEFAULT_MAX_DEGREE: u32 = 16;

/// Eigen-expansion `Σ a_k h_k` of a function on a model soliton.
///
/// On `R^n` the index `k` is a multi-index and `h_k(y) = Π He_{k_i}(y_i/√2)`.
/// On the cylinder the index is `[l, k]`: a degree-`l` spherical harmonic
/// (normalised to mean square one on the sphere) times `h_k(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteField {
    model: SolitonModel,
    max_degree: u32,
    coeffs: BTreeMap<Vec<u32>, f64>,
}

impl HermiteField {
    pub fn zero(model: SolitonModel, max_degree: u32) -> Self {
        Self {
            model,
            max_degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(model: SolitonModel, value: f64) -> Self {
        let len = index_len(&model);
        let mut field = Self::zero(model, 0);
        field.coeffs.insert(vec![0; len], value);
        field
    }

    pub fn from_terms<I>(model: SolitonModel, max_degree: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, f64)>,
    {
        let mut field = Self::zero(model, max_degree);
        for (idx, a) in terms {
            field.add(idx, a)?;
        }
        Ok(field)
    }

    /// Adds `a` to the coefficient of `idx`.
    pub fn add(&mut self, idx: Vec<u32>, a: f64) -> Result<()> {
        let len = index_len(&self.model);
        if idx.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                got: idx.len(),
            });
        }
        let degree: u32 = idx.iter().sum();
        if degree > self.max_degree {
            return Err(Error::Config(format!(
                "mode {idx:?} has degree {degree} above truncation {}",
                self.max_degree
            )));
        }
        if self.model.kind() == ModelKind::RoundCylinder && idx[0] > 0 && self.model.dim() < 3 {
            return Err(Error::Config("spherical modes need n >= 3".into()));
        }
        *self.coeffs.entry(idx).or_insert(0.0) += a;
        Ok(())
    }

    pub fn model(&self) -> &SolitonModel {
        &self.model
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn coeff(&self, idx: &[u32]) -> f64 {
        self.coeffs.get(idx).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, f64)> {
        self.coeffs.iter().map(|(k, a)| (k, *a))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Drift-Laplacian eigenvalue `λ` of the mode, so that `Δ_f e = -λ e`.
    pub fn eigenvalue(&self, idx: &[u32]) -> f64 {
        mode_eigenvalue(&self.model, idx)
    }

    /// `P_t` applied coefficientwise: `a_k ↦ e^{-λ(k) t} a_k`.
    pub fn evolve(&self, t: f64) -> Result<Self> {
        check_time(t)?;
        Ok(self.map_coeffs(|idx, a| (-mode_eigenvalue(&self.model, idx) * t).exp() * a))
    }

    /// `Δ_f` applied coefficientwise: `a_k ↦ -λ(k) a_k`.
    pub fn apply_drift_laplacian(&self) -> Self {
        self.map_coeffs(|idx, a| -mode_eigenvalue(&self.model, idx) * a)
    }

    fn map_coeffs(&self, f: impl Fn(&[u32], f64) -> f64) -> Self {
        Self {
            model: self.model.clone(),
            max_degree: self.max_degree,
            coeffs: self.coeffs.iter().map(|(k, a)| (k.clone(), f(k, *a))).collect(),
        }
    }

    /// Point value. On the cylinder only axisymmetric (`l = 0`) fields can be
    /// evaluated, as spherical harmonics are represented by their norms only.
    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        let n = self.dim();
        if point.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: point.len(),
            });
        }
        let nmax = self.max_degree as usize;
        match self.model.kind() {
            ModelKind::EuclideanGaussian => {
                let tables: Vec<Vec<f64>> = point.iter().map(|&y| h_values(nmax, y)).collect();
                Ok(self.sum_with_tables(&tables))
            }
            ModelKind::RoundCylinder => {
                self.require_axisymmetric()?;
                let h = h_values(nmax, point[n - 1]);
                Ok(self.coeffs.iter().map(|(k, a)| a * h[k[1] as usize]).sum())
            }
        }
    }

    fn require_axisymmetric(&self) -> Result<()> {
        if self.coeffs.keys().any(|k| k[0] > 0) {
            return Err(Error::Unsupported(
                "pointwise values of spherical harmonics are not represented".into(),
            ));
        }
        Ok(())
    }

    fn sum_with_tables(&self, tables: &[Vec<f64>]) -> f64 {
        self.coeffs
            .iter()
            .map(|(k, a)| {
                a * k
                    .iter()
                    .zip(tables)
                    .map(|(&ki, t)| t[ki as usize])
                    .product::<f64>()
            })
            .sum()
    }

    /// `Δ_f v` at a point, from derivatives of the Hermite factors (not from
    /// the eigenvalues).
    pub fn drift_laplacian_at(&self, point: &[f64]) -> Result<f64> {
        let n = self.dim();
        if point.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: point.len(),
            });
        }
        let nmax = self.max_degree as usize;
        let one_d = |k: usize, jet: &[Vec<f64>; 4], y: f64| jet[2][k] - y / 2.0 * jet[1][k];
        match self.model.kind() {
            ModelKind::EuclideanGaussian => {
                let jets: Vec<[Vec<f64>; 4]> = point.iter().map(|&y| h_jet(nmax, y)).collect();
                let mut acc = 0.0;
                for (k, a) in &self.coeffs {
                    for i in 0..n {
                        let mut term = one_d(k[i] as usize, &jets[i], point[i]);
                        for j in (0..n).filter(|&j| j != i) {
                            term *= jets[j][0][k[j] as usize];
                        }
                        acc += a * term;
                    }
                }
                Ok(acc)
            }
            ModelKind::RoundCylinder => {
                self.require_axisymmetric()?;
                let z = point[n - 1];
                let jet = h_jet(nmax, z);
                Ok(self.coeffs.iter().map(|(k, a)| a * one_d(k[1] as usize, &jet, z)).sum())
            }
        }
    }

    /// `Σ a_k^2 ||h_k||^2` in `L^2(e^{-f} dVol)`.
    pub fn parseval_norm_sq(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|(k, a)| a * a * mode_norm_sq(&self.model, k))
            .sum()
    }

    /// `∫ v^2 e^{-f/γ} dVol` by quadrature exact to the truncation degree.
    pub fn weighted_norm_sq(&self, gamma: f64) -> Result<f64> {
        self.weighted_square_integral(gamma, |_| 1.0)
    }

    /// `∫ m(f) v^2 e^{-f/γ} dVol` for a multiplier `m` that is at most linear
    /// in the potential value.
    pub fn weighted_square_integral<M: Fn(f64) -> f64>(&self, gamma: f64, mult: M) -> Result<f64> {
        self.weighted_square_integral_with(gamma, self.max_degree as usize + 2, mult)
    }

    pub fn weighted_square_integral_with<M: Fn(f64) -> f64>(
        &self,
        gamma: f64,
        order: usize,
        mult: M,
    ) -> Result<f64> {
        self.weighted_product_integral_with(self, gamma, order, mult)
    }

    /// `∫ m(f) v w e^{-f/γ} dVol` for two fields on the same model.
    pub fn weighted_product_integral_with<M: Fn(f64) -> f64>(
        &self,
        other: &HermiteField,
        gamma: f64,
        order: usize,
        mult: M,
    ) -> Result<f64> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::Domain(format!("gamma must be positive, got {gamma}")));
        }
        if self.model != other.model {
            return Err(Error::Config("fields live on different models".into()));
        }
        let nmax = self.max_degree.max(other.max_degree) as usize;
        match self.model.kind() {
            ModelKind::EuclideanGaussian => {
                let rule = QuadratureRule::for_gamma(self.dim(), order, gamma)?;
                let total = rule.integrate(|y| {
                    let tables: Vec<Vec<f64>> = y.iter().map(|&yi| h_values(nmax, yi)).collect();
                    let v = self.sum_with_tables(&tables);
                    let w = other.sum_with_tables(&tables);
                    mult(self.model.potential(y)) * v * w
                });
                Ok(total * (-self.model.potential_shift() / gamma).exp())
            }
            ModelKind::RoundCylinder => {
                // Distinct spherical modes are orthogonal on every slice, so
                // only matching sphere degrees contribute.
                let rule = QuadratureRule::for_gamma(1, order, gamma)?;
                let axial = |field: &HermiteField| {
                    let mut by_sphere: BTreeMap<u32, Vec<(usize, f64)>> = BTreeMap::new();
                    for (k, a) in &field.coeffs {
                        by_sphere.entry(k[0]).or_default().push((k[1] as usize, *a));
                    }
                    by_sphere
                };
                let mine = axial(self);
                let theirs = axial(other);
                let offset = self.model.potential_offset() + self.model.potential_shift();
                let mut total = 0.0;
                for (l, va) in &mine {
                    let Some(wa) = theirs.get(l) else { continue };
                    total += rule.integrate(|z| {
                        let h = h_values(nmax, z[0]);
                        let v: f64 = va.iter().map(|(k, a)| a * h[*k]).sum();
                        let w: f64 = wa.iter().map(|(k, a)| a * h[*k]).sum();
                        mult(z[0] * z[0] / 4.0 + offset) * v * w
                    });
                }
                let sphere = self.model.sphere_volume().unwrap_or(1.0);
                Ok(total * sphere * (-offset / gamma).exp())
            }
        }
    }

    /// `∫ |v|^q e^{-f/γ} dVol` by a γ-matched rule of the given order. Only
    /// axisymmetric fields are supported on the cylinder.
    pub fn weighted_power_integral(&self, q: f64, gamma: f64, order: usize) -> Result<f64> {
        if !(q >= 1.0) {
            return Err(Error::Domain(format!("L^q exponent must be >= 1, got {q}")));
        }
        match self.model.kind() {
            ModelKind::EuclideanGaussian => {
                let rule = QuadratureRule::for_gamma(self.dim(), order, gamma)?;
                let nmax = self.max_degree as usize;
                let total = rule.integrate(|y| {
                    let tables: Vec<Vec<f64>> = y.iter().map(|&yi| h_values(nmax, yi)).collect();
                    self.sum_with_tables(&tables).abs().powf(q)
                });
                Ok(total * (-self.model.potential_shift() / gamma).exp())
            }
            ModelKind::RoundCylinder => {
                self.require_axisymmetric()?;
                let rule = QuadratureRule::for_gamma(1, order, gamma)?;
                let nmax = self.max_degree as usize;
                let total = rule.integrate(|z| {
                    let h = h_values(nmax, z[0]);
                    let v: f64 = self.coeffs.iter().map(|(k, a)| a * h[k[1] as usize]).sum();
                    v.abs().powf(q)
                });
                let offset = self.model.potential_offset() + self.model.potential_shift();
                let sphere = self.model.sphere_volume().unwrap_or(1.0);
                Ok(total * sphere * (-offset / gamma).exp())
            }
        }
    }

    /// Monomial form of a Euclidean field.
    pub fn to_polynomial(&self) -> Result<Poly> {
        if self.model.kind() != ModelKind::EuclideanGaussian {
            return Err(Error::Unsupported(
                "monomial expansion is only available on R^n".into(),
            ));
        }
        let n = self.dim();
        let mut poly = Poly::zero(n);
        for (k, a) in &self.coeffs {
            let factors: Vec<Vec<f64>> = k.iter().map(|&ki| h_monomial_coeffs(ki as usize)).collect();
            let mut exps = vec![0u32; n];
            expand_product(&factors, 0, &mut exps, *a, &mut poly);
        }
        Ok(poly)
    }
}

fn expand_product(factors: &[Vec<f64>], axis: usize, exps: &mut Vec<u32>, acc: f64, out: &mut Poly) {
    if axis == factors.len() {
        out.add_term(exps.clone(), acc);
        return;
    }
    for (j, c) in factors[axis].iter().enumerate() {
        if *c == 0.0 {
            continue;
        }
        exps[axis] = j as u32;
        expand_product(factors, axis + 1, exps, acc * c, out);
    }
    exps[axis] = 0;
}

fn index_len(model: &SolitonModel) -> usize {
    match model.kind() {
        ModelKind::EuclideanGaussian => model.dim(),
        ModelKind::RoundCylinder => 2,
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Domain(format!("evolution time must be >= 0, got {t}")));
    }
    Ok(())
}

/// `λ = |k|/2` on `R^n`; `λ = l(l+n-2)/(2(n-2)) + k/2` on the cylinder.
pub fn mode_eigenvalue(model: &SolitonModel, idx: &[u32]) -> f64 {
    match model.kind() {
        ModelKind::EuclideanGaussian => idx.iter().sum::<u32>() as f64 / 2.0,
        ModelKind::RoundCylinder => {
            let n = model.dim() as f64;
            let l = idx[0] as f64;
            l * (l + n - 2.0) / (2.0 * (n - 2.0)) + idx[1] as f64 / 2.0
        }
    }
}

/// `||e_k||^2` in `L^2(e^{-f} dVol)`.
pub fn mode_norm_sq(model: &SolitonModel, idx: &[u32]) -> f64 {
    match model.kind() {
        ModelKind::EuclideanGaussian => {
            (-model.potential_shift()).exp()
                * (4.0 * PI).powf(model.dim() as f64 / 2.0)
                * idx.iter().map(|&k| factorial(k as usize)).product::<f64>()
        }
        ModelKind::RoundCylinder => {
            let offset = model.potential_offset() + model.potential_shift();
            model.sphere_volume().unwrap_or(1.0)
                * (-offset).exp()
                * (4.0 * PI).sqrt()
                * factorial(idx[1] as usize)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileFamily {
    /// `(c + e^{-t})^{-n/2} exp(|y|^2 / (4(c e^t + 1)))`, `c >= 0`.
    Reverse,
    /// `(c - e^{-t})^{-n/2} exp(-|y|^2 / (4(c e^t - 1)))`, `c >= 1`.
    Forward,
}

/// A member `A(t) exp(B(t) |y|^2)` of one of the Gaussian solution families
/// on `R^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianProfile {
    pub family: ProfileFamily,
    pub c: f64,
    pub t: f64,
    pub dim: usize,
}

impl GaussianProfile {
    pub fn new(family: ProfileFamily, c: f64, dim: usize) -> Result<Self> {
        Self::at_time(family, c, dim, 0.0)
    }

    pub fn at_time(family: ProfileFamily, c: f64, dim: usize, t: f64) -> Result<Self> {
        check_time(t)?;
        if dim == 0 {
            return Err(Error::Config("profile dimension must be >= 1".into()));
        }
        if !c.is_finite() {
            return Err(Error::Domain(format!("profile parameter must be finite, got {c}")));
        }
        match family {
            ProfileFamily::Reverse if c < 0.0 => {
                return Err(Error::Domain(format!("reverse profile needs c >= 0, got {c}")))
            }
            ProfileFamily::Forward if c < 1.0 => {
                return Err(Error::Domain(format!("forward profile needs c >= 1, got {c}")))
            }
            ProfileFamily::Forward if c * t.exp() - 1.0 <= 0.0 => {
                return Err(Error::Domain(format!(
                    "forward profile with c = {c} is singular at t = {t}"
                )))
            }
            _ => {}
        }
        Ok(Self { family, c, t, dim })
    }

    pub fn amplitude(&self) -> f64 {
        let e = (-self.t).exp();
        let base = match self.family {
            ProfileFamily::Reverse => self.c + e,
            ProfileFamily::Forward => self.c - e,
        };
        base.powf(-(self.dim as f64) / 2.0)
    }

    pub fn exponent(&self) -> f64 {
        let ce = self.c * self.t.exp();
        match self.family {
            ProfileFamily::Reverse => 1.0 / (4.0 * (ce + 1.0)),
            ProfileFamily::Forward => -1.0 / (4.0 * (ce - 1.0)),
        }
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        let r2: f64 = y.iter().map(|v| v * v).sum();
        self.amplitude() * (self.exponent() * r2).exp()
    }

    /// Advance by `s >= 0` along the family.
    pub fn evolve(&self, s: f64) -> Result<Self> {
        check_time(s)?;
        Self::at_time(self.family, self.c, self.dim, self.t + s)
    }

    /// `Δ_f v = Δv - (y/2)·∇v` in closed form.
    pub fn drift_laplacian_at(&self, y: &[f64]) -> f64 {
        let b = self.exponent();
        let r2: f64 = y.iter().map(|v| v * v).sum();
        let n = self.dim as f64;
        (2.0 * b * n + 4.0 * b * b * r2 - b * r2) * self.eval(y)
    }

    /// Decay rate `1/(4γ) - 2B` of `v^2 e^{-f/γ}`; errors when not positive.
    pub fn residual_decay(&self, gamma: f64) -> Result<f64> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::Domain(format!("gamma must be positive, got {gamma}")));
        }
        let b = self.exponent();
        let kappa = 1.0 / (4.0 * gamma) - 2.0 * b;
        if kappa <= 0.0 {
            return Err(Error::Divergence {
                reason: format!(
                    "{:?} profile (c = {}, t = {}) is not square integrable against e^(-f/{gamma})",
                    self.family, self.c, self.t
                ),
                critical_gamma: 1.0 / (8.0 * b),
            });
        }
        Ok(kappa)
    }

    /// `∫ v^2 e^{-|y|^2/(4γ)} dy` in closed form.
    pub fn weighted_norm_sq(&self, gamma: f64) -> Result<f64> {
        let kappa = self.residual_decay(gamma)?;
        let a = self.amplitude();
        Ok(a * a * (PI / kappa).powf(self.dim as f64 / 2.0))
    }

    /// `∫ |v|^q e^{-|y|^2/(4γ)} dy` in closed form.
    pub fn weighted_power_integral(&self, q: f64, gamma: f64) -> Result<f64> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::Domain(format!("gamma must be positive, got {gamma}")));
        }
        let b = self.exponent();
        let kappa = 1.0 / (4.0 * gamma) - q * b;
        if kappa <= 0.0 {
            return Err(Error::Divergence {
                reason: format!("|v|^{q} is not integrable against e^(-f/{gamma})"),
                critical_gamma: 1.0 / (4.0 * q * b),
            });
        }
        Ok(self.amplitude().powf(q) * (PI / kappa).powf(self.dim as f64 / 2.0))
    }

    /// `∫ m(f) v^2 e^{-f/γ} dy` by a rule matched to the residual Gaussian
    /// decay, after checking integrability.
    pub fn weighted_square_integral<M: Fn(f64) -> f64>(&self, gamma: f64, order: usize, mult: M) -> Result<f64> {
        let kappa = self.residual_decay(gamma)?;
        let rule = QuadratureRule::for_decay(self.dim, order, kappa)?;
        let inv4g = 1.0 / (4.0 * gamma);
        Ok(rule.integrate_log(|y| {
            let r2: f64 = y.iter().map(|v| v * v).sum();
            let v = self.eval(y);
            let m = mult(r2 / 4.0);
            (m * v * v).ln() - r2 * inv4g
        }))
    }

    /// `∫ v^2 e^{-f/γ} dy` with the γ-matched rule applied to `v^2` as a
    /// function. Converges as the order grows; used as an independent check
    /// of the closed form.
    pub fn weighted_norm_sq_quadrature(&self, gamma: f64, order: usize) -> Result<f64> {
        self.residual_decay(gamma)?;
        let rule = QuadratureRule::for_gamma(self.dim, order, gamma)?;
        Ok(rule.integrate(|y| {
            let v = self.eval(y);
            v * v
        }))
    }
}

/// Initial data accepted by the monitors.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    Field(HermiteField),
    Profile(GaussianProfile),
}

impl InitialData {
    pub fn dim(&self) -> usize {
        match self {
            InitialData::Field(f) => f.dim(),
            InitialData::Profile(p) => p.dim,
        }
    }

    pub fn evolve(&self, t: f64) -> Result<Self> {
        Ok(match self {
            InitialData::Field(f) => InitialData::Field(f.evolve(t)?),
            InitialData::Profile(p) => InitialData::Profile(p.evolve(t)?),
        })
    }

    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        match self {
            InitialData::Field(f) => f.eval(point),
            InitialData::Profile(p) => {
                if point.len() != p.dim {
                    return Err(Error::DimensionMismatch {
                        expected: p.dim,
                        got: point.len(),
                    });
                }
                Ok(p.eval(point))
            }
        }
    }

    pub fn weighted_norm_sq(&self, gamma: f64) -> Result<f64> {
        match self {
            InitialData::Field(f) => f.weighted_norm_sq(gamma),
            InitialData::Profile(p) => p.weighted_norm_sq(gamma),
        }
    }

    /// `∫ m(f) v^2 e^{-f/γ} dVol`.
    pub fn weighted_square_integral<M: Fn(f64) -> f64>(&self, gamma: f64, mult: M) -> Result<f64> {
        match self {
            InitialData::Field(f) => f.weighted_square_integral(gamma, mult),
            InitialData::Profile(p) => p.weighted_square_integral(gamma, 8, mult),
        }
    }

    pub fn is_closed_form(&self) -> bool {
        matches!(self, InitialData::Profile(_))
    }
}

/// Result of projecting a function onto the truncated eigenbasis.
#[derive(Debug, Clone)]
pub struct Projection {
    pub field: HermiteField,
    /// `||v||` in `L^2(e^{-f})`, by the same quadrature.
    pub norm: f64,
    /// Norm of the discarded tail, `sqrt(||v||^2 - Σ a_k^2 ||h_k||^2)`.
    pub residual_norm: f64,
}

/// Projects `v` onto the Euclidean modes of total degree `<= max_degree`,
/// using a tensor rule of the given order for `L^2(e^{-f})` inner products.
pub fn project<F: Fn(&[f64]) -> f64>(
    model: &SolitonModel,
    v: F,
    max_degree: u32,
    order: usize,
) -> Result<Projection> {
    if model.kind() != ModelKind::EuclideanGaussian {
        return Err(Error::Unsupported("projection is implemented on R^n".into()));
    }
    if order < max_degree as usize + 1 {
        return Err(Error::Config(format!(
            "quadrature order {order} cannot resolve modes of degree {max_degree} (need >= {})",
            max_degree + 1
        )));
    }
    let n = model.dim();
    let nmax = max_degree as usize;
    let rule = QuadratureRule::for_gamma(n, order, 1.0)?;
    let indices = multi_indices(n, max_degree);
    let mut inner = vec![0.0; indices.len()];
    let mut norm_sq = 0.0;
    for (y, w) in rule.nodes() {
        let vy = v(&y);
        norm_sq += w * vy * vy;
        let tables: Vec<Vec<f64>> = y.iter().map(|&yi| h_values(nmax, yi)).collect();
        for (slot, idx) in inner.iter_mut().zip(&indices) {
            let h: f64 = idx.iter().zip(&tables).map(|(&k, t)| t[k as usize]).product();
            *slot += w * vy * h;
        }
    }
    let mut field = HermiteField::zero(model.clone(), max_degree);
    let mut captured = 0.0;
    for (idx, ip) in indices.into_iter().zip(inner) {
        let hn = mode_norm_sq(model, &idx);
        let a = ip / hn;
        captured += a * a * hn;
        if a != 0.0 {
            field.add(idx, a)?;
        }
    }
    Ok(Projection {
        field,
        norm: norm_sq.sqrt(),
        residual_norm: (norm_sq - captured).max(0.0).sqrt(),
    })
}

/// All multi-indices of length `n` with total degree `<= max`, in
/// lexicographic order.
pub fn multi_indices(n: usize, max: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(n, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, max, &mut Vec::with_capacity(n), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line() -> SolitonModel {
        SolitonModel::euclidean(1).unwrap()
    }

    #[test]
    fn constant_is_stationary() {
        let one = HermiteField::constant(line(), 1.0);
        let later = one.evolve(3.7).unwrap();
        assert_eq!(later.eval(&[0.3]).unwrap(), 1.0);
        assert!(one.evolve(-1.0).is_err());
    }

    #[test]
    fn linear_mode_decays_at_half_rate() {
        let m = SolitonModel::euclidean(2).unwrap();
        // c·y with c = (1, -2); y_i = sqrt2 h_1(y_i).
        let s = std::f64::consts::SQRT_2;
        let v = HermiteField::from_terms(m, 1, [(vec![1, 0], s), (vec![0, 1], -2.0 * s)]).unwrap();
        let t = 0.8;
        let y = [0.4, -1.1];
        let got = v.evolve(t).unwrap().eval(&y).unwrap();
        let want = (-t / 2.0f64).exp() * (y[0] - 2.0 * y[1]);
        assert!((got - want).abs() < 1e-14);
    }

    #[test]
    fn centred_potential_decays_at_unit_rate() {
        // f - n/2 = ½ Σ h_2(y_i) on R^n.
        let n = 3;
        let m = SolitonModel::euclidean(n).unwrap();
        let terms = (0..n).map(|i| {
            let mut k = vec![0; n];
            k[i] = 2;
            (k, 0.5)
        });
        let v = HermiteField::from_terms(m, 2, terms).unwrap();
        let at_origin = v.evolve(1.0).unwrap().eval(&[0.0; 3]).unwrap();
        assert!((at_origin + 1.5 * (-1.0f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn weighted_norm_of_constant() {
        for n in 1..=3 {
            let m = SolitonModel::euclidean(n).unwrap();
            let one = HermiteField::constant(m, 1.0);
            for &g in &[0.5, 1.0, 2.7] {
                let want = (4.0 * PI * g).powf(n as f64 / 2.0);
                let got = one.weighted_norm_sq(g).unwrap();
                assert!((got / want - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn weighted_norm_of_linear_mode() {
        // 2^{n+1} π^{n/2} |c|^2 e^{-t} γ^{n/2+1}
        let n = 2;
        let m = SolitonModel::euclidean(n).unwrap();
        let s = std::f64::consts::SQRT_2;
        let c = [0.7, -0.2];
        let v = HermiteField::from_terms(m, 1, [(vec![1, 0], c[0] * s), (vec![0, 1], c[1] * s)]).unwrap();
        let (t, g) = (1.3, 2.2);
        let got = v.evolve(t).unwrap().weighted_norm_sq(g).unwrap();
        let c2 = c[0] * c[0] + c[1] * c[1];
        let want = 2f64.powi(n as i32 + 1) * PI.powf(n as f64 / 2.0) * c2 * (-t).exp() * g.powf(n as f64 / 2.0 + 1.0);
        assert!((got / want - 1.0).abs() < 1e-13);
    }

    #[test]
    fn reverse_profile_parameters() {
        let p = GaussianProfile::new(ProfileFamily::Reverse, 2.0, 1).unwrap();
        assert!((p.amplitude() - 3f64.powf(-0.5)).abs() < 1e-15);
        assert!((p.exponent() - 1.0 / 12.0).abs() < 1e-15);
        let q = p.evolve(2f64.ln()).unwrap();
        assert!((q.amplitude() - 2.5f64.powf(-0.5)).abs() < 1e-15);
        assert!((q.exponent() - 1.0 / 20.0).abs() < 1e-15);
    }

    #[test]
    fn forward_profile_singular_start() {
        assert!(GaussianProfile::new(ProfileFamily::Forward, 1.0, 1).is_err());
        assert!(GaussianProfile::at_time(ProfileFamily::Forward, 1.0, 1, 1e-3).is_ok());
        assert!(GaussianProfile::new(ProfileFamily::Forward, 1.2, 1).is_ok());
        assert!(GaussianProfile::new(ProfileFamily::Forward, 0.9, 1).is_err());
        assert!(GaussianProfile::new(ProfileFamily::Reverse, -0.1, 1).is_err());
    }

    #[test]
    fn reverse_profile_norm_matches_table_and_quadrature() {
        // (2π e^t / ([(c e^t + 1)/(2γ) - 1][c + e^{-t}]))^{n/2}
        for &(c, t, g, n) in &[(2.0, 0.0, 1.0, 1usize), (3.0, 0.7, 1.4, 2), (1.5, 2.0, 2.5, 1)] {
            let p = GaussianProfile::at_time(ProfileFamily::Reverse, c, n, t).unwrap();
            let et = f64::exp(t);
            let want = (2.0 * PI * et / (((c * et + 1.0) / (2.0 * g) - 1.0) * (c + 1.0 / et))).powf(n as f64 / 2.0);
            let closed = p.weighted_norm_sq(g).unwrap();
            assert!((closed / want - 1.0).abs() < 1e-12);
            let quad = p.weighted_square_integral(g, 8, |_| 1.0).unwrap();
            assert!((quad / want - 1.0).abs() < 1e-12);
        }
        let p = GaussianProfile::new(ProfileFamily::Reverse, 2.0, 1).unwrap();
        assert!((p.weighted_norm_sq(1.0).unwrap() - (4.0 * PI / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn divergence_reports_critical_gamma() {
        let p = GaussianProfile::new(ProfileFamily::Reverse, 2.0, 1).unwrap();
        match p.weighted_norm_sq(1.6) {
            Err(Error::Divergence { critical_gamma, .. }) => assert!((critical_gamma - 1.5).abs() < 1e-14),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn profile_solves_drift_heat_equation() {
        let h = 1e-4;
        for family in [ProfileFamily::Reverse, ProfileFamily::Forward] {
            let p = GaussianProfile::at_time(family, 1.7, 2, 0.6).unwrap();
            for y in [[0.0, 0.0], [1.2, -0.4], [2.5, 1.0]] {
                let dt = (p.evolve(h).unwrap().eval(&y)
                    - GaussianProfile::at_time(family, 1.7, 2, 0.6 - h).unwrap().eval(&y))
                    / (2.0 * h);
                assert!((dt - p.drift_laplacian_at(&y)).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn reverse_profile_quadrature_refines() {
        for c in [1.1, 1.5, 2.0, 3.0] {
            let p = GaussianProfile::new(ProfileFamily::Reverse, c, 1).unwrap();
            let exact = p.weighted_norm_sq(1.0).unwrap();
            let errs: Vec<f64> = [4, 8, 16, 32, 64, 128, 256]
                .iter()
                .map(|&m| (p.weighted_norm_sq_quadrature(1.0, m).unwrap() - exact).abs())
                .collect();
            let resolved: Vec<f64> = errs
                .windows(2)
                .filter(|w| w[1] > 1e-12 * exact)
                .map(|w| w[0] / w[1])
                .collect();
            assert!(resolved.len() >= 2, "c={c} {errs:?}");
            for r in &resolved[resolved.len() - 2..] {
                assert!(*r >= 10.0, "c={c} {errs:?}");
            }
            assert!(errs[6] < 1e-9 * exact);
        }
    }

    #[test]
    fn projection_of_square() {
        let pr = project(&line(), |y| y[0] * y[0], 2, 4).unwrap();
        assert!((pr.field.coeff(&[0]) - 2.0).abs() < 1e-13);
        assert!(pr.field.coeff(&[1]).abs() < 1e-13);
        assert!((pr.field.coeff(&[2]) - 2.0).abs() < 1e-13);
        assert!(pr.residual_norm < 1e-6);
        assert!(project(&line(), |y| y[0], 4, 4).is_err());
    }

    #[test]
    fn projection_residual_of_orthogonal_mode() {
        let h3 = |y: &[f64]| h_values(3, y[0])[3];
        let pr = project(&line(), h3, 2, 8).unwrap();
        for k in 0..=2u32 {
            assert!(pr.field.coeff(&[k]).abs() < 1e-13);
        }
        let want = (mode_norm_sq(&line(), &[3])).sqrt();
        assert!((pr.residual_norm - want).abs() < 1e-10);
        let one = project(&line(), |_| 1.0, 0, 2).unwrap();
        assert!((one.field.coeff(&[0]) - 1.0).abs() < 1e-14);
        assert!(one.residual_norm < 1e-6);
    }

    #[test]
    fn cylinder_eigenvalues_and_norms() {
        let m = SolitonModel::cylinder(3).unwrap();
        let v = HermiteField::from_terms(m.clone(), 3, [(vec![0, 0], 1.0), (vec![1, 1], 0.5), (vec![2, 0], -0.3)]).unwrap();
        // Spherical Laplacian on S^2 of radius sqrt 2: l(l+1)/2.
        assert_eq!(v.eigenvalue(&[1, 0]), 1.0);
        assert_eq!(v.eigenvalue(&[2, 1]), 3.5);
        let pars = v.parseval_norm_sq();
        let quad = v.weighted_norm_sq(1.0).unwrap();
        assert!((quad / pars - 1.0).abs() < 1e-12);
        assert!(v.eval(&[0.0, 0.0, 1.0]).is_err());
        let axial = HermiteField::from_terms(m, 2, [(vec![0, 2], 1.0)]).unwrap();
        assert!((axial.eval(&[0.1, 0.2, 2.0]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn monomial_form_matches_values() {
        let m = SolitonModel::euclidean(2).unwrap();
        let v = HermiteField::from_terms(m, 4, [(vec![2, 1], 0.3), (vec![0, 4], -1.2), (vec![1, 0], 2.0)]).unwrap();
        let p = v.to_polynomial().unwrap();
        for y in [[0.3, -0.7], [2.0, 1.5]] {
            assert!((p.eval(&y) - v.eval(&y).unwrap()).abs() < 1e-12);
            assert!((p.drift_laplacian().eval(&y) - v.drift_laplacian_at(&y).unwrap()).abs() < 1e-11);
        }
    }

    fn random_field(n: usize, max: u32, coeffs: &[f64]) -> HermiteField {
        let m = SolitonModel::euclidean(n).unwrap();
        let idx = multi_indices(n, max);
        HermiteField::from_terms(m, max, idx.into_iter().zip(coeffs.iter().copied())).unwrap()
    }

    proptest! {
        #[test]
        fn semigroup_law(coeffs in prop::collection::vec(-1.0f64..1.0, 10), s in 0.0f64..3.0, t in 0.0f64..3.0) {
            let v = random_field(2, 3, &coeffs);
            let a = v.evolve(s).unwrap().evolve(t).unwrap();
            let b = v.evolve(s + t).unwrap();
            for ((ka, ca), (kb, cb)) in a.terms().zip(b.terms()) {
                prop_assert_eq!(ka, kb);
                prop_assert!((ca - cb).abs() <= 1e-15 * (1.0 + cb.abs()));
            }
        }

        #[test]
        fn eigen_relation(n in 1usize..=3, y in prop::collection::vec(-3.0f64..3.0, 3)) {
            let m = SolitonModel::euclidean(n).unwrap();
            for idx in multi_indices(n, 5) {
                let e = HermiteField::from_terms(m.clone(), 5, [(idx.clone(), 1.0)]).unwrap();
                let lam = e.eigenvalue(&idx);
                let lhs = e.drift_laplacian_at(&y[..n]).unwrap();
                let rhs = -lam * e.eval(&y[..n]).unwrap();
                prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + rhs.abs()));
            }
        }

        #[test]
        fn parseval_matches_quadrature(coeffs in prop::collection::vec(-1.0f64..1.0, 15)) {
            let v = random_field(2, 4, &coeffs);
            let q = v.weighted_norm_sq(1.0).unwrap();
            prop_assert!((q / v.parseval_norm_sq() - 1.0).abs() < 1e-10);
        }

        #[test]
        fn classical_norm_nonincreasing(coeffs in prop::collection::vec(-1.0f64..1.0, 10), t in 0.0f64..4.0, dt in 0.0f64..1.0) {
            let v = random_field(2, 3, &coeffs);
            let a = v.evolve(t).unwrap().parseval_norm_sq();
            let b = v.evolve(t + dt).unwrap().parseval_norm_sq();
            prop_assert!(b <= a * (1.0 + 1e-14));
        }
    }
}
