//! Sparse multivariate polynomials with exact differentiation.

use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    dim: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl Poly {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(vec![0; dim], c);
        p
    }

    /// The coordinate function `y_axis`.
    pub fn coordinate(dim: usize, axis: usize) -> Self {
        let mut e = vec![0; dim];
        e[axis] = 1;
        let mut p = Self::zero(dim);
        p.add_term(e, 1.0);
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: f64) {
        assert_eq!(exps.len(), self.dim, "exponent length");
        if c == 0.0 {
            return;
        }
        let slot = self.terms.entry(exps).or_insert(0.0);
        *slot += c;
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, f64)> {
        self.terms.iter().map(|(e, c)| (e, *c))
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c * e.iter().zip(y).map(|(&k, &x)| x.powi(k as i32)).product::<f64>())
            .sum()
    }

    pub fn derivative(&self, axis: usize) -> Self {
        let mut out = Self::zero(self.dim);
        for (e, c) in &self.terms {
            if e[axis] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[axis] -= 1;
            out.add_term(d, c * e[axis] as f64);
        }
        out
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.dim).map(|i| self.derivative(i)).collect()
    }

    pub fn laplacian(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for i in 0..self.dim {
            out = out.add(&self.derivative(i).derivative(i));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = Self::zero(self.dim);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    /// `Δp - (y/2)·∇p`, the Euclidean drift Laplacian.
    pub fn drift_laplacian(&self) -> Self {
        let mut out = self.laplacian();
        for i in 0..self.dim {
            let yi = Self::coordinate(self.dim, i);
            out = out.add(&yi.mul(&self.derivative(i)).scale(-0.5));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_of_quadratic() {
        // p = 3 x^2 y - y + 2
        let mut p = Poly::zero(2);
        p.add_term(vec![2, 1], 3.0);
        p.add_term(vec![0, 1], -1.0);
        p.add_term(vec![0, 0], 2.0);
        assert_eq!(p.degree(), 3);
        assert!((p.eval(&[1.0, 2.0]) - 6.0).abs() < 1e-15);
        let dx = p.derivative(0);
        assert!((dx.eval(&[1.0, 2.0]) - 12.0).abs() < 1e-15);
        let lap = p.laplacian();
        assert!((lap.eval(&[0.3, 2.0]) - 12.0).abs() < 1e-15);
    }

    #[test]
    fn drift_laplacian_of_quadratic() {
        // Δ_f (|y|^2) = 2n - |y|^2
        let n = 3;
        let mut r2 = Poly::zero(n);
        for i in 0..n {
            let mut e = vec![0; n];
            e[i] = 2;
            r2.add_term(e, 1.0);
        }
        let y = [0.5, -1.0, 2.0];
        let want = 2.0 * n as f64 - (0.25 + 1.0 + 4.0);
        assert!((r2.drift_laplacian().eval(&y) - want).abs() < 1e-14);
    }
}
