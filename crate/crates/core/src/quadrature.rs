//! Tensorised Gauss–Hermite quadrature against scaled, shifted Gaussian weights.
//!
//! A [`QuadratureRule`] of order `m` integrates `g(y) e^{-|y-c|^2/(2σ^2)}`
//! over `R^n` exactly whenever `g` is a polynomial of degree `<= 2m-1` in
//! each variable. Node enumeration and summation order are fixed, so results
//! are bit-reproducible.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Nodes and weights for `∫ g(x) e^{-x^2} dx ≈ Σ w_i g(x_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Roots of the Jacobi matrix seed a Newton polish on the orthonormal
    /// Hermite recurrence; weights come from the derivative at each root, so
    /// tiny tail weights keep full relative accuracy.
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::Config("quadrature order must be >= 1".into()));
        }
        if order > 600 {
            return Err(Error::Config(format!("quadrature order {order} exceeds 600")));
        }
        let n = order;
        let nf = n as f64;
        let pim4 = PI.powf(-0.25);
        let mut diag = vec![0.0; n];
        let mut off: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
        tridiagonal_eigenvalues(&mut diag, &mut off)?;
        diag.sort_by(f64::total_cmp);
        let mut x = Vec::with_capacity(n);
        let mut w = Vec::with_capacity(n);
        for &guess in &diag {
            let mut z = guess;
            for _ in 0..20 {
                let (p1, p2) = orthonormal_hermite(n, z, pim4);
                let step = p1 / ((2.0 * nf).sqrt() * p2);
                z -= step;
                if step.abs() <= 2.0 * f64::EPSILON * z.abs().max(1.0) {
                    break;
                }
            }
            let (_, p2) = orthonormal_hermite(n, z, pim4);
            let pp = (2.0 * nf).sqrt() * p2;
            x.push(z);
            w.push(2.0 / (pp * pp));
        }
        // Enforce exact symmetry.
        for i in 0..n / 2 {
            let j = n - 1 - i;
            let z = 0.5 * (x[j] - x[i]);
            let wt = 0.5 * (w[i] + w[j]);
            x[i] = -z;
            x[j] = z;
            w[i] = wt;
            w[j] = wt;
        }
        if n % 2 == 1 {
            x[n / 2] = 0.0;
        }
        Ok(Self {
            nodes: x,
            weights: w,
        })
    }
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit QL with Wilkinson
/// shifts. `diag` is overwritten with the eigenvalues.
fn tridiagonal_eigenvalues(diag: &mut [f64], off: &mut Vec<f64>) -> Result<()> {
    let n = diag.len();
    off.push(0.0);
    let e = off;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Domain("tridiagonal eigenvalue iteration did not converge".into()));
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut early = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    e[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if early {
                continue;
            }
            diag[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Returns `(p_n(z), p_{n-1}(z))` for orthonormal Hermite functions.
fn orthonormal_hermite(n: usize, z: f64, pim4: f64) -> (f64, f64) {
    let mut p1 = pim4;
    let mut p2 = 0.0;
    for j in 1..=n {
        let jf = j as f64;
        let p3 = p2;
        p2 = p1;
        p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
    }
    (p1, p2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    dim: usize,
    order: usize,
    sigma: f64,
    center: Vec<f64>,
    /// Per-axis offsets from the center and weights (already scaled by σ).
    offsets: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// Rule for the weight `e^{-|y|^2/(2σ^2)}` on `R^dim`.
    pub fn new(dim: usize, order: usize, sigma: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("quadrature dimension must be >= 1".into()));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::Config(format!("quadrature scale must be positive, got {sigma}")));
        }
        let base = GaussHermite::new(order)?;
        let s = std::f64::consts::SQRT_2 * sigma;
        Ok(Self {
            dim,
            order,
            sigma,
            center: vec![0.0; dim],
            offsets: base.nodes.iter().map(|x| s * x).collect(),
            weights: base.weights.iter().map(|w| s * w).collect(),
        })
    }

    /// Rule for the pseudo-Gaussian weight `e^{-|y|^2/(4γ)}` (σ^2 = 2γ).
    pub fn for_gamma(dim: usize, order: usize, gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::Domain(format!("gamma must be positive, got {gamma}")));
        }
        Self::new(dim, order, (2.0 * gamma).sqrt())
    }

    /// Rule for the weight `e^{-κ|y|^2}` (σ^2 = 1/(2κ)).
    pub fn for_decay(dim: usize, order: usize, kappa: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::Domain(format!("decay rate must be positive, got {kappa}")));
        }
        Self::new(dim, order, (0.5 / kappa).sqrt())
    }

    pub fn with_center(mut self, center: Vec<f64>) -> Result<Self> {
        if center.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: center.len(),
            });
        }
        self.center = center;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    /// Largest polynomial degree (per axis) integrated exactly.
    pub fn exact_degree(&self) -> usize {
        2 * self.order - 1
    }

    /// Visit every tensor node with its weight, in a fixed order.
    fn for_each_node(&self, mut visit: impl FnMut(&[f64], f64)) {
        let m = self.order;
        let n = self.dim;
        let mut idx = vec![0usize; n];
        let mut point = vec![0.0; n];
        loop {
            let mut w = 1.0;
            for d in 0..n {
                point[d] = self.center[d] + self.offsets[idx[d]];
                w *= self.weights[idx[d]];
            }
            visit(&point, w);
            let mut d = 0;
            loop {
                if d == n {
                    return;
                }
                idx[d] += 1;
                if idx[d] < m {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
        }
    }

    /// All `(node, weight)` pairs in enumeration order.
    pub fn nodes(&self) -> Vec<(Vec<f64>, f64)> {
        let mut out = Vec::with_capacity(self.order.pow(self.dim as u32));
        self.for_each_node(|y, w| out.push((y.to_vec(), w)));
        out
    }

    /// `∫ g(y) e^{-|y-c|^2/(2σ^2)} dy`.
    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, g: F) -> f64 {
        let mut acc = 0.0;
        self.for_each_node(|y, w| acc += w * g(y));
        acc
    }

    /// Plain Lebesgue integral `∫ exp(log_g(y)) dy`, with the integrand
    /// supplied in log form so large cancelling exponents stay finite.
    pub fn integrate_log<F: Fn(&[f64]) -> f64>(&self, log_g: F) -> f64 {
        let inv = 1.0 / (2.0 * self.sigma * self.sigma);
        let mut acc = 0.0;
        self.for_each_node(|y, w| {
            let r2: f64 = y
                .iter()
                .zip(&self.center)
                .map(|(a, c)| (a - c) * (a - c))
                .sum();
            acc += w * (log_g(y) + r2 * inv).exp();
        });
        acc
    }

    /// `∫ g(y) e^{-κ|y|^2} dy` evaluated with this rule, whatever its own
    /// scale and center.
    pub fn integrate_against<F: Fn(&[f64]) -> f64>(&self, kappa: f64, g: F) -> f64 {
        let inv = 1.0 / (2.0 * self.sigma * self.sigma);
        let mut acc = 0.0;
        self.for_each_node(|y, w| {
            let mut r2c = 0.0;
            let mut r2 = 0.0;
            for (a, c) in y.iter().zip(&self.center) {
                r2c += (a - c) * (a - c);
                r2 += a * a;
            }
            acc += w * g(y) * (r2c * inv - kappa * r2).exp();
        });
        acc
    }
}

/// `(∫ |v|^q e^{-|y|^2/(4γ)} dy)^{1/q}` with the γ-matched rule of the given order.
pub fn lq_norm<F: Fn(&[f64]) -> f64>(
    v: F,
    q: f64,
    gamma: f64,
    dim: usize,
    order: usize,
) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::Domain(format!("L^q exponent must be >= 1, got {q}")));
    }
    let rule = QuadratureRule::for_gamma(dim, order, gamma)?;
    Ok(rule.integrate(|y| v(y).abs().powf(q)).powf(1.0 / q))
}

/// `∫ y^p e^{-y^2/(2σ^2)} dy` on the line.
pub fn gaussian_moment(p: usize, sigma: f64) -> f64 {
    if p % 2 == 1 {
        return 0.0;
    }
    let double_fact: f64 = (1..p).step_by(2).map(|i| i as f64).product();
    (2.0 * PI).sqrt() * sigma.powi(p as i32 + 1) * double_fact
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_symmetric_weights_positive() {
        for m in [1, 2, 5, 16, 33, 64, 150, 200, 256, 400] {
            let gh = GaussHermite::new(m).unwrap();
            assert_eq!(gh.nodes.len(), m);
            for i in 0..m {
                assert!(gh.weights[i] >= 0.0);
                assert!((gh.nodes[i] + gh.nodes[m - 1 - i]).abs() < 1e-12);
            }
            for w in gh.nodes.windows(2) {
                assert!(w[0] < w[1]);
            }
            let total: f64 = gh.weights.iter().sum();
            assert!((total - PI.sqrt()).abs() < 1e-13, "m={m} total={total}");
        }
    }

    #[test]
    fn polynomial_exactness() {
        for m in [3, 8, 20, 40] {
            for &sigma in &[0.5, 1.0, 2f64.sqrt(), 3.0] {
                let rule = QuadratureRule::new(1, m, sigma).unwrap();
                for p in 0..(2 * m) {
                    let got = rule.integrate(|y| y[0].powi(p as i32));
                    let want = gaussian_moment(p, sigma);
                    let scale = gaussian_moment(p + p % 2, sigma).max(1.0);
                    assert!(
                        (got - want).abs() <= 1e-12 * scale,
                        "m={m} σ={sigma} p={p}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn gaussian_integrals() {
        let rule = QuadratureRule::for_gamma(1, 4, 1.0).unwrap();
        let one = rule.integrate(|_| 1.0);
        assert!((one - (4.0 * PI).sqrt()).abs() < 1e-13);
        let second = rule.integrate(|y| y[0] * y[0]);
        assert!((second - 2.0 * (4.0 * PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn tensor_rule_in_three_dims() {
        let rule = QuadratureRule::for_gamma(3, 5, 0.7).unwrap();
        let got = rule.integrate(|y| y[0] * y[0] * y[1].powi(4) + y[2]);
        let s = (1.4f64).sqrt();
        let want = gaussian_moment(2, s) * gaussian_moment(4, s) * gaussian_moment(0, s);
        assert!((got - want).abs() < 1e-12 * want);
    }

    #[test]
    fn shifted_rule_and_log_form() {
        // ∫ e^{-(y-3)^2} dy = sqrt(π), evaluated in log form.
        let rule = QuadratureRule::for_decay(1, 6, 1.0)
            .unwrap()
            .with_center(vec![3.0])
            .unwrap();
        let got = rule.integrate_log(|y| -(y[0] - 3.0).powi(2));
        assert!((got - PI.sqrt()).abs() < 1e-13);
        let wide = QuadratureRule::for_decay(1, 60, 0.4)
            .unwrap()
            .with_center(vec![0.5])
            .unwrap();
        let got = wide.integrate_against(0.5, |_| 1.0);
        assert!((got - (2.0 * PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn lq_of_constant() {
        let q2 = lq_norm(|_| 1.0, 2.0, 1.0, 1, 4).unwrap();
        let q4 = lq_norm(|_| 1.0, 4.0, 1.0, 1, 4).unwrap();
        assert!((q2 - (4.0 * PI).powf(0.25)).abs() < 1e-13);
        // ∫ 1 e^{-y^2/4} = (4π)^{1/2}, so the q = 4 norm is (4π)^{1/8}.
        assert!((q4 - (4.0 * PI).powf(0.125)).abs() < 1e-13);
        assert!(lq_norm(|_| 1.0, 0.5, 1.0, 1, 4).is_err());
    }
}
