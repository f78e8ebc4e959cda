//! Crank–Nicolson finite differences for `∂v/∂t = Δv - ∇f·∇v` on the
//! Euclidean shrinker, in one dimension or for radial data in `R^n`.
//!
//! Interior nodes use fourth-order five-point stencils; the two nodes next to
//! the artificial Dirichlet-zero boundary fall back to three-point stencils.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdGrid {
    /// Domain is `[-L, L]` on the line and `[0, L]` radially.
    pub half_width: f64,
    pub nodes: usize,
    pub dt: f64,
}

impl Default for FdGrid {
    fn default() -> Self {
        Self {
            half_width: 12.0,
            nodes: 2001,
            dt: 1e-3,
        }
    }
}

impl FdGrid {
    pub fn new(half_width: f64, nodes: usize, dt: f64) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::Config(format!("FD half width must be positive, got {half_width}")));
        }
        if nodes < 7 {
            return Err(Error::Config(format!("FD grid needs at least 7 nodes, got {nodes}")));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Config(format!("FD time step must be positive, got {dt}")));
        }
        Ok(Self {
            half_width,
            nodes,
            dt,
        })
    }

    /// Halves both the spacing and the time step.
    pub fn refined(&self) -> Self {
        Self {
            half_width: self.half_width,
            nodes: 2 * (self.nodes - 1) + 1,
            dt: self.dt / 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FdGeometry {
    /// `v_t = v_yy - (y/2) v_y` on the line.
    Line,
    /// `v_t = v_rr + ((n-1)/r - r/2) v_r` for radial functions on `R^n`.
    Radial { dim: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdSolution {
    pub grid: FdGrid,
    pub geometry: FdGeometry,
    pub t: f64,
    pub points: Vec<f64>,
    pub values: Vec<f64>,
    /// Largest weighted boundary flux `|v_y| e^{-f}` seen at the artificial
    /// boundary over all steps.
    pub boundary_flux: f64,
}

impl FdSolution {
    /// `max |v - exact|` over grid nodes with `|y| <= window`.
    pub fn sup_error<F: Fn(f64) -> f64>(&self, exact: F, window: f64) -> f64 {
        self.points
            .iter()
            .zip(&self.values)
            .filter(|(y, _)| y.abs() <= window + 1e-12)
            .map(|(&y, &v)| (v - exact(y)).abs())
            .fold(0.0, f64::max)
    }

    /// Value at a grid node, if `y` is one (to within a small fraction of the spacing).
    pub fn value_at(&self, y: f64) -> Option<f64> {
        let h = self.points[1] - self.points[0];
        let pos = (y - self.points[0]) / h;
        let i = pos.round();
        if (pos - i).abs() > 1e-6 || i < 0.0 || i as usize >= self.points.len() {
            return None;
        }
        Some(self.values[i as usize])
    }
}

/// Banded matrix with two sub- and two super-diagonals, stored row-major as
/// `band[i][j - i + 2]`.
#[derive(Debug, Clone)]
struct Band5 {
    band: Vec<[f64; 5]>,
}

impl Band5 {
    fn zeros(n: usize) -> Self {
        Self {
            band: vec![[0.0; 5]; n],
        }
    }

    fn add(&mut self, i: usize, j: usize, v: f64) {
        let off = j as isize - i as isize + 2;
        debug_assert!((0..5).contains(&off));
        self.band[i][off as usize] += v;
    }

    fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|i| {
                let mut acc = 0.0;
                for (o, a) in self.band[i].iter().enumerate() {
                    let j = i as isize + o as isize - 2;
                    if j >= 0 && (j as usize) < n {
                        acc += a * x[j as usize];
                    }
                }
                acc
            })
            .collect()
    }

    /// In-place Doolittle factorisation without pivoting.
    fn factor(mut self) -> Result<BandLu> {
        let n = self.band.len();
        for k in 0..n {
            let pivot = self.band[k][2];
            if pivot.abs() < 1e-300 {
                return Err(Error::Domain("singular Crank-Nicolson system".into()));
            }
            for i in (k + 1)..(k + 3).min(n) {
                let li = self.band[i][k + 2 - i] / pivot;
                self.band[i][k + 2 - i] = li;
                for j in (k + 1)..(k + 3).min(n) {
                    let u = self.band[k][j + 2 - k];
                    self.band[i][j + 2 - i] -= li * u;
                }
            }
        }
        Ok(BandLu { lu: self })
    }
}

struct BandLu {
    lu: Band5,
}

impl BandLu {
    fn solve(&self, rhs: &mut [f64]) {
        let n = rhs.len();
        let b = &self.lu.band;
        for i in 0..n {
            for j in i.saturating_sub(2)..i {
                rhs[i] -= b[i][j + 2 - i] * rhs[j];
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..(i + 3).min(n) {
                rhs[i] -= b[i][j + 2 - i] * rhs[j];
            }
            rhs[i] /= b[i][2];
        }
    }
}

/// Spatial operator `v ↦ v'' + b v'` as a banded matrix, with the last node
/// (and on the line also the first) held at zero.
fn operator(grid: &FdGrid, geometry: FdGeometry) -> (Vec<f64>, Band5) {
    let n = grid.nodes;
    let l = grid.half_width;
    let (points, h): (Vec<f64>, f64) = match geometry {
        FdGeometry::Line => {
            let h = 2.0 * l / (n - 1) as f64;
            ((0..n).map(|i| -l + i as f64 * h).collect(), h)
        }
        FdGeometry::Radial { .. } => {
            let h = l / (n - 1) as f64;
            ((0..n).map(|i| i as f64 * h).collect(), h)
        }
    };
    let h2 = h * h;
    let d2_4 = [-1.0, 16.0, -30.0, 16.0, -1.0].map(|c| c / (12.0 * h2));
    let d1_4 = [1.0, -8.0, 0.0, 8.0, -1.0].map(|c| c / (12.0 * h));
    let d2_2 = [1.0, -2.0, 1.0].map(|c| c / h2);
    let d1_2 = [-1.0, 0.0, 1.0].map(|c| c / (2.0 * h));
    let mut a = Band5::zeros(n);
    // Column of a stencil offset, reflecting through r = 0 for radial data.
    let col = |i: usize, off: isize| -> usize {
        let j = i as isize + off;
        match geometry {
            FdGeometry::Radial { .. } => j.unsigned_abs(),
            FdGeometry::Line => j as usize,
        }
    };
    let first_free = match geometry {
        FdGeometry::Line => 1,
        FdGeometry::Radial { .. } => 0,
    };
    for i in first_free..(n - 1) {
        let y = points[i];
        let near_edge = i + 2 >= n || (geometry == FdGeometry::Line && i < 2);
        match geometry {
            FdGeometry::Radial { dim } if i == 0 => {
                // v_t = n v_rr at the origin.
                for (k, c) in d2_4.iter().enumerate() {
                    a.add(0, col(0, k as isize - 2), dim as f64 * c);
                }
                continue;
            }
            _ => {}
        }
        let drift = match geometry {
            FdGeometry::Line => -y / 2.0,
            FdGeometry::Radial { dim } => (dim as f64 - 1.0) / y - y / 2.0,
        };
        if near_edge {
            for k in 0..3 {
                let j = col(i, k as isize - 1);
                a.add(i, j, d2_2[k] + drift * d1_2[k]);
            }
        } else {
            for k in 0..5 {
                let j = col(i, k as isize - 2);
                a.add(i, j, d2_4[k] + drift * d1_4[k]);
            }
        }
    }
    (points, a)
}

/// Advances `initial` to time `t` with Crank–Nicolson.
pub fn fd_evolve<F: Fn(f64) -> f64>(
    initial: F,
    t: f64,
    grid: &FdGrid,
    geometry: FdGeometry,
) -> Result<FdSolution> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Domain(format!("evolution time must be >= 0, got {t}")));
    }
    if let FdGeometry::Radial { dim } = geometry {
        if dim == 0 {
            return Err(Error::Config("radial FD needs dimension >= 1".into()));
        }
    }
    let grid = FdGrid::new(grid.half_width, grid.nodes, grid.dt)?;
    let n = grid.nodes;
    let (points, a) = operator(&grid, geometry);
    let steps = (t / grid.dt).ceil().max(0.0) as usize;
    let dt = if steps == 0 { 0.0 } else { t / steps as f64 };

    let mut lhs = Band5::zeros(n);
    let mut rhs = Band5::zeros(n);
    for i in 0..n {
        for o in 0..5 {
            let v = a.band[i][o];
            lhs.band[i][o] = -0.5 * dt * v;
            rhs.band[i][o] = 0.5 * dt * v;
        }
        lhs.band[i][2] += 1.0;
        rhs.band[i][2] += 1.0;
    }
    let lu = lhs.factor()?;

    let mut v: Vec<f64> = points.iter().map(|&y| initial(y)).collect();
    let pinned = |v: &mut Vec<f64>| {
        v[n - 1] = 0.0;
        if geometry == FdGeometry::Line {
            v[0] = 0.0;
        }
    };
    pinned(&mut v);
    let h = points[1] - points[0];
    let edge_weight = (-grid.half_width * grid.half_width / 4.0).exp();
    let flux = |v: &[f64]| -> f64 {
        let right = ((v[n - 1] - v[n - 2]) / h).abs();
        let left = match geometry {
            FdGeometry::Line => ((v[1] - v[0]) / h).abs(),
            FdGeometry::Radial { .. } => 0.0,
        };
        right.max(left) * edge_weight
    };
    let mut boundary_flux = flux(&v);
    for _ in 0..steps {
        let mut next = rhs.mul_vec(&v);
        pinned(&mut next);
        lu.solve(&mut next);
        pinned(&mut next);
        v = next;
        boundary_flux = boundary_flux.max(flux(&v));
    }
    Ok(FdSolution {
        grid,
        geometry,
        t,
        points,
        values: v,
        boundary_flux,
    })
}

/// Errors of a coarse run and of its refinement against an exact solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinementStudy {
    pub coarse_error: f64,
    pub fine_error: f64,
    /// `coarse_error / fine_error`.
    pub ratio: f64,
    /// Sup difference between the two runs on shared nodes, usable as an
    /// error estimate when no exact solution is known.
    pub self_estimate: f64,
    pub boundary_flux: f64,
}

pub fn refinement_study<F, E>(
    initial: F,
    exact: E,
    t: f64,
    grid: &FdGrid,
    geometry: FdGeometry,
    window: f64,
) -> Result<RefinementStudy>
where
    F: Fn(f64) -> f64,
    E: Fn(f64) -> f64,
{
    let coarse = fd_evolve(&initial, t, grid, geometry)?;
    let fine = fd_evolve(&initial, t, &grid.refined(), geometry)?;
    let coarse_error = coarse.sup_error(&exact, window);
    let fine_error = fine.sup_error(&exact, window);
    let self_estimate = coarse
        .points
        .iter()
        .zip(&coarse.values)
        .filter(|(y, _)| y.abs() <= window + 1e-12)
        .filter_map(|(&y, &v)| fine.value_at(y).map(|w| (v - w).abs()))
        .fold(0.0, f64::max);
    Ok(RefinementStudy {
        coarse_error,
        fine_error,
        ratio: coarse_error / fine_error,
        self_estimate,
        boundary_flux: coarse.boundary_flux.max(fine.boundary_flux),
    })
}
