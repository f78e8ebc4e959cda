//! Scaled probabilists' Hermite polynomials `h_k(y) = He_k(y / sqrt 2)`.
//!
//! With this scaling `h_k'' - (y/2) h_k' = -(k/2) h_k`, so the `h_k` are the
//! eigenfunctions of the one-dimensional drift Laplacian for `f = y^2/4`, and
//! `∫ h_j h_k e^{-y^2/4} dy = sqrt(4π) k! δ_jk`.

use std::f64::consts::{PI, SQRT_2};

/// `He_0(x), .., He_max(x)` by the three-term recurrence.
pub fn he_values(max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(max + 1);
    out.push(1.0);
    if max >= 1 {
        out.push(x);
    }
    for k in 1..max {
        let next = x * out[k] - k as f64 * out[k - 1];
        out.push(next);
    }
    out
}

/// `h_0(y), .., h_max(y)`.
pub fn h_values(max: usize, y: f64) -> Vec<f64> {
    he_values(max, y / SQRT_2)
}

/// Values and first three derivatives of `h_0 .. h_max` at `y`.
///
/// Uses `d/dy h_k = (k / sqrt 2) h_{k-1}`.
pub fn h_jet(max: usize, y: f64) -> [Vec<f64>; 4] {
    let base = h_values(max, y);
    let shift = |vals: &Vec<f64>| -> Vec<f64> {
        (0..=max)
            .map(|k| {
                if k == 0 {
                    0.0
                } else {
                    k as f64 / SQRT_2 * vals[k - 1]
                }
            })
            .collect()
    };
    let d1 = shift(&base);
    let d2 = shift(&d1);
    let d3 = shift(&d2);
    [base, d1, d2, d3]
}

/// Monomial coefficients of `h_k` in `y`: `h_k(y) = Σ_j c_j y^j`.
pub fn h_monomial_coeffs(k: usize) -> Vec<f64> {
    // He_{k+1}(x) = x He_k(x) - k He_{k-1}(x), in monomials of x.
    let mut prev = vec![1.0];
    if k == 0 {
        return prev;
    }
    let mut cur = vec![0.0, 1.0];
    for j in 1..k {
        let mut next = vec![0.0; j + 2];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += c;
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= j as f64 * c;
        }
        prev = cur;
        cur = next;
    }
    // Substitute x = y / sqrt 2.
    cur.iter()
        .enumerate()
        .map(|(j, c)| c * SQRT_2.powi(-(j as i32)))
        .collect()
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `∫ h_k(y)^2 e^{-y^2/4} dy = sqrt(4π) k!`.
pub fn h_norm_sq_1d(k: usize) -> f64 {
    (4.0 * PI).sqrt() * factorial(k)
}
