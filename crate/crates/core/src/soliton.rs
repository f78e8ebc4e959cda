//! Model gradient shrinking solitons with soliton constant 1/2.
//!
//! Two closed-form shrinkers are provided:
//!
//! * the Gaussian shrinker on `R^n` with `f(y) = |y|^2 / 4`;
//! * the round cylinder `S^{n-1}(r) x R` with `r = sqrt(2(n-2))` and
//!   `f(theta, z) = z^2 / 4 + (n-1)/2`.
//!
//! In both cases the potential carries the normalisation under which
//! `R + Δf = n/2`, `R + |df|^2 = f` and `Δf - |df|^2 = n/2 - f` hold
//! identically.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    EuclideanGaussian,
    RoundCylinder,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolitonModel {
    kind: ModelKind,
    dim: usize,
    /// Constant added to the normalised potential. Always zero for models
    /// built by [`SolitonModel::new`]; only used to build negative controls.
    potential_shift: f64,
}

/// Pointwise jet of the potential and the scalar curvature.
///
/// For the cylinder, the point is `(theta_1, .., theta_{n-1}, z)` and all
/// vector and matrix data are expressed in an orthonormal frame whose last
/// vector is `d/dz`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointProbe {
    pub point: Vec<f64>,
    /// Normalised part of the potential.
    pub f_normalized: f64,
    /// Deviation from the normalised potential (zero for genuine models).
    pub f_shift: f64,
    pub f_gradient: Vec<f64>,
    pub f_hessian: Vec<Vec<f64>>,
    pub f_laplacian: f64,
    pub scalar_curvature: f64,
}

impl PointProbe {
    pub fn f_value(&self) -> f64 {
        self.f_normalized + self.f_shift
    }

    pub fn grad_f_sq(&self) -> f64 {
        self.f_gradient.iter().map(|g| g * g).sum()
    }
}

/// Residuals of the three soliton identities, maximised over a point set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityResiduals {
    pub trace_identity: f64,
    pub gradient_identity: f64,
    pub drift_identity: f64,
    pub min_scalar_curvature: f64,
    pub points: usize,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        self.trace_identity
            .max(self.gradient_identity)
            .max(self.drift_identity)
    }
}

impl SolitonModel {
    pub fn new(kind: ModelKind, dim: usize) -> Result<Self> {
        match kind {
            ModelKind::EuclideanGaussian if dim < 1 => Err(Error::Config(
                "Euclidean Gaussian shrinker needs dimension >= 1".into(),
            )),
            ModelKind::RoundCylinder if dim < 3 => Err(Error::Config(format!(
                "round cylinder needs dimension >= 3 (sphere factor of dimension >= 2), got {dim}"
            ))),
            _ => Ok(Self {
                kind,
                dim,
                potential_shift: 0.0,
            }),
        }
    }

    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::new(ModelKind::EuclideanGaussian, dim)
    }

    pub fn cylinder(dim: usize) -> Result<Self> {
        Self::new(ModelKind::RoundCylinder, dim)
    }

    /// Same model with its potential shifted by a constant, which breaks the
    /// normalisation. Used for negative controls only.
    pub fn with_potential_shift(mut self, shift: f64) -> Self {
        self.potential_shift = shift;
        self
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn potential_shift(&self) -> f64 {
        self.potential_shift
    }

    /// Soliton constant `k` in `Ric + Hess f = k g`. Fixed by normalisation.
    pub fn soliton_constant(&self) -> f64 {
        0.5
    }

    /// Radius of the sphere factor of the cylinder.
    pub fn sphere_radius(&self) -> Option<f64> {
        match self.kind {
            ModelKind::RoundCylinder => Some((2.0 * (self.dim as f64 - 2.0)).sqrt()),
            ModelKind::EuclideanGaussian => None,
        }
    }

    /// Riemannian volume of the sphere factor `S^{n-1}(r)`.
    pub fn sphere_volume(&self) -> Option<f64> {
        let r = self.sphere_radius()?;
        let m = self.dim - 1;
        Some(unit_sphere_area(m) * r.powi(m as i32))
    }

    /// Constant part of the potential on the cylinder, `(n-1)/2`.
    pub fn potential_offset(&self) -> f64 {
        match self.kind {
            ModelKind::EuclideanGaussian => 0.0,
            ModelKind::RoundCylinder => (self.dim as f64 - 1.0) / 2.0,
        }
    }

    /// Potential at a point.
    pub fn potential(&self, point: &[f64]) -> f64 {
        match self.kind {
            ModelKind::EuclideanGaussian => {
                point.iter().map(|y| y * y).sum::<f64>() / 4.0 + self.potential_shift
            }
            ModelKind::RoundCylinder => {
                let z = point[self.dim - 1];
                z * z / 4.0 + self.potential_offset() + self.potential_shift
            }
        }
    }

    pub fn probe(&self, point: &[f64]) -> Result<PointProbe> {
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: point.len(),
            });
        }
        let n = self.dim;
        let probe = match self.kind {
            ModelKind::EuclideanGaussian => {
                let mut hessian = vec![vec![0.0; n]; n];
                for (i, row) in hessian.iter_mut().enumerate() {
                    row[i] = 0.5;
                }
                PointProbe {
                    point: point.to_vec(),
                    f_normalized: point.iter().map(|y| y * y / 4.0).sum(),
                    f_shift: self.potential_shift,
                    f_gradient: point.iter().map(|y| y / 2.0).collect(),
                    f_hessian: hessian,
                    f_laplacian: n as f64 / 2.0,
                    scalar_curvature: 0.0,
                }
            }
            ModelKind::RoundCylinder => {
                let z = point[n - 1];
                let mut gradient = vec![0.0; n];
                gradient[n - 1] = z / 2.0;
                let mut hessian = vec![vec![0.0; n]; n];
                hessian[n - 1][n - 1] = 0.5;
                // S^{n-1}(r) with r^2 = 2(n-2) has R = (n-1)(n-2)/r^2 = (n-1)/2.
                let curvature = self.potential_offset();
                PointProbe {
                    point: point.to_vec(),
                    f_normalized: curvature + z * z / 4.0,
                    f_shift: self.potential_shift,
                    f_gradient: gradient,
                    f_hessian: hessian,
                    f_laplacian: 0.5,
                    scalar_curvature: curvature,
                }
            }
        };
        Ok(probe)
    }

    /// Maximum absolute residual of the three soliton identities over `points`.
    ///
    /// The potential enters as its normalised part plus the shift, so a
    /// constant perturbation of size `s` is reported as a residual of exactly
    /// `|s|`.
    pub fn check_identities(&self, points: &[Vec<f64>]) -> Result<IdentityResiduals> {
        if points.is_empty() {
            return Err(Error::Config("identity check needs at least one point".into()));
        }
        let half_n = self.dim as f64 / 2.0;
        let mut out = IdentityResiduals {
            trace_identity: 0.0,
            gradient_identity: 0.0,
            drift_identity: 0.0,
            min_scalar_curvature: f64::INFINITY,
            points: points.len(),
        };
        for p in points {
            let probe = self.probe(p)?;
            let r = probe.scalar_curvature;
            let grad_sq = probe.grad_f_sq();
            let trace = (r + probe.f_laplacian) - half_n;
            let gradient = (r + grad_sq - probe.f_normalized) - probe.f_shift;
            let drift =
                (probe.f_laplacian - half_n) - (grad_sq - probe.f_normalized) + probe.f_shift;
            out.trace_identity = out.trace_identity.max(trace.abs());
            out.gradient_identity = out.gradient_identity.max(gradient.abs());
            out.drift_identity = out.drift_identity.max(drift.abs());
            out.min_scalar_curvature = out.min_scalar_curvature.min(r);
        }
        Ok(out)
    }
}

/// Area of the unit sphere `S^m` in `R^{m+1}`, i.e. `2 pi^{(m+1)/2} / Gamma((m+1)/2)`.
pub fn unit_sphere_area(m: usize) -> f64 {
    use std::f64::consts::PI;
    // |S^0| = 2, |S^1| = 2 pi, |S^m| = 2 pi / (m - 1) |S^{m-2}|.
    match m {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (m as f64 - 1.0) * unit_sphere_area(m - 2),
    }
}
