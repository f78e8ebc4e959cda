//! One function per check name; each returns a verdict, a headline value
//! and the series written to CSV.

use driftheat::fd::{refinement_study, FdGeometry, FdGrid};
use driftheat::identities::{bochner_sweep, divergence_sweep, laplacian_commutes};
use driftheat::monitors::{
    ansatz_derivative, bakry_emery_bound, classical_bound, critical_bound, euclidean_constant,
    euclidean_constant_quadrature, hypercontractivity_probe, monitored_derivative, monitored_quantity,
    schedule_bound, sharpness_l, BoundReport, Schedule, Verdict,
};
use driftheat::tables::all_tables;
use driftheat::transfer::{
    continuity_at_zero, flow_norm_identity, heat_apply, schur_identity_sweep, schur_row_constant, FlowInitial,
};
use driftheat::{Error, HermiteField, InitialData, ModelKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{CheckName, Scenario};
use crate::error::CliError;

/// Largest admissible ansatz coefficient for the two vanishing schedules.
pub const ANSATZ_TOL: f64 = 1e-14;
pub const DIVERGENCE_TOL: f64 = 1e-9;
pub const BOCHNER_TOL: f64 = 1e-10;
pub const FD_TOL: f64 = 1e-3;
pub const FD_MIN_RATIO: f64 = 3.0;
pub const SCHUR_IDENTITY_TOL: f64 = 1e-10;
pub const SCHUR_ROW_TOL: f64 = 1e-6;
pub const SCHUR_VARIANCE_TOL: f64 = 1e-16;
pub const HEAT_KERNEL_TOL: f64 = 1e-6;
pub const FLOW_TIMES: [f64; 3] = [0.5, 1.0, 3.0];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub name: String,
    pub key: String,
    pub column: String,
    pub tolerance: f64,
    pub rows: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub check: String,
    pub verdict: Verdict,
    /// Headline number: largest ratio, residual or error, as named in `metric`.
    pub value: f64,
    pub metric: String,
    pub tolerance: f64,
    pub detail: Option<String>,
    #[serde(skip)]
    pub series: Vec<Series>,
}

impl CheckOutcome {
    fn new(check: CheckName, ok: bool, value: f64, metric: &str, tolerance: f64) -> Self {
        Self::named(check.as_str(), ok, value, metric, tolerance)
    }

    pub fn named(check: &str, ok: bool, value: f64, metric: &str, tolerance: f64) -> Self {
        Self {
            check: check.to_string(),
            verdict: if ok { Verdict::Pass } else { Verdict::Violation },
            value,
            metric: metric.to_string(),
            tolerance,
            detail: None,
            series: Vec::new(),
        }
    }

    pub fn with_detail(mut self, d: String) -> Self {
        self.detail = Some(d);
        self
    }

    pub fn with_series(mut self, name: &str, key: &str, column: &str, rows: Vec<(f64, f64)>) -> Self {
        self.series.push(Series {
            name: name.to_string(),
            key: key.to_string(),
            column: column.to_string(),
            tolerance: self.tolerance,
            rows,
        });
        self
    }
}

fn data(s: &Scenario) -> Result<InitialData, CliError> {
    s.initial_data()
}

fn field(s: &Scenario, check: CheckName) -> Result<HermiteField, CliError> {
    match data(s)? {
        InitialData::Field(f) => Ok(f),
        InitialData::Profile(_) => Err(CliError::Config(format!(
            "check {} needs Hermite-field data",
            check.as_str()
        ))),
    }
}

fn from_bound(check: CheckName, r: BoundReport) -> CheckOutcome {
    let mut out = CheckOutcome::new(check, true, r.max_ratio, "max_ratio", r.tolerance);
    out.verdict = r.verdict;
    let mut detail = format!("monotone = {}, max_increase = {:.3e}", r.monotone, r.max_increase);
    if let Some(d) = &r.detail {
        detail = format!("{detail}; {d}");
    }
    let rows = r.times.iter().copied().zip(r.ratios.iter().copied()).collect();
    out.with_detail(detail).with_series(check.as_str(), "t", "ratio", rows)
}

pub fn run_check(check: CheckName, s: &Scenario) -> Result<CheckOutcome, CliError> {
    let tol = s.tolerance;
    let times = s.times();
    let seed = s.seed();
    let out = match check {
        CheckName::SolitonIdentities => {
            let model = s.model()?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let points: Vec<Vec<f64>> = (0..25)
                .map(|_| (0..model.dim()).map(|_| rng.gen_range(-3.0..=3.0)).collect())
                .collect();
            let r = model.check_identities(&points)?;
            let v = r.max();
            CheckOutcome::new(check, v <= tol.closed_form, v, "max_residual", tol.closed_form).with_detail(format!(
                "trace = {:e}, gradient = {:e}, drift = {:e}, min R = {}",
                r.trace_identity, r.gradient_identity, r.drift_identity, r.min_scalar_curvature
            ))
        }
        CheckName::ClassicalBound => from_bound(check, classical_bound(&data(s)?, &times, tol.closed_form)?),
        CheckName::CriticalBound => from_bound(check, critical_bound(&data(s)?, &times, tol.closed_form)?),
        CheckName::ScheduleBound => {
            let schedule = s.schedule.expect("validated").to_schedule();
            from_bound(check, schedule_bound(&data(s)?, &schedule, &times, tol.closed_form)?)
        }
        CheckName::BakryEmeryBound => {
            let be = s.bakry_emery;
            let r = bakry_emery_bound(&data(s)?, be.t, be.gamma, tol.closed_form)?;
            from_bound(check, r)
        }
        CheckName::BakryEmeryConstant => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut worst: f64 = 0.0;
            let mut rows = Vec::new();
            for i in 0..20 {
                let t = rng.gen_range(0.2..=3.0);
                let q = 1.0 + f64::exp(t);
                let gamma = rng.gen_range(0.05..0.95) * q / 2.0;
                let n = rng.gen_range(1..=3usize);
                let c = euclidean_constant(t, gamma, n)?;
                let quad = euclidean_constant_quadrature(t, gamma, n, 60)?;
                let rel = (quad / c - 1.0).abs();
                worst = worst.max(rel);
                rows.push((i as f64, rel));
            }
            CheckOutcome::new(check, worst <= tol.closed_form, worst, "max_rel_error", tol.closed_form)
                .with_series(check.as_str(), "draw", "rel_error", rows)
        }
        CheckName::HypercontractivityProbe => {
            let v = data(s)?;
            let mut rows = Vec::new();
            let mut stated = Vec::new();
            for &t in times.iter().filter(|&&t| t > 0.0) {
                match hypercontractivity_probe(&v, t) {
                    Ok(p) => {
                        rows.push((t, p.ratio_used));
                        stated.push((t, p.ratio_stated));
                    }
                    Err(Error::Divergence { .. }) => break,
                    Err(e) => return Err(e.into()),
                }
            }
            let max = rows.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
            let mut out = CheckOutcome::new(check, true, max, "max_ratio_q_1_plus_e_t", f64::NAN)
                .with_detail(format!("{} times probed; never affects the exit code", rows.len()))
                .with_series("hypercontractivity_q_1_plus_e_t", "t", "ratio", rows)
                .with_series("hypercontractivity_q_half_1_plus_e_t", "t", "ratio", stated);
            out.verdict = Verdict::Probe;
            out
        }
        CheckName::AnsatzCoefficients => {
            let schedules = match s.schedule {
                Some(sp) => vec![sp.to_schedule()],
                None => vec![Schedule::classical(), Schedule::critical()],
            };
            let v = data(s)?;
            let mut worst: f64 = 0.0;
            let mut rows = Vec::new();
            for sch in &schedules {
                for &t in &times {
                    let a = ansatz_derivative(&v.evolve(t)?, sch, t)?;
                    let m = a.f_coefficient.abs().max(a.constant_coefficient.abs());
                    worst = worst.max(m);
                    rows.push((t, m));
                }
            }
            CheckOutcome::new(check, worst < ANSATZ_TOL, worst, "max_abs_coefficient", ANSATZ_TOL)
                .with_detail(format!("{} schedule(s)", schedules.len()))
                .with_series(check.as_str(), "t", "max_abs_coefficient", rows)
        }
        CheckName::MonitoredDerivative => {
            let f = field(s, check)?;
            let v = InitialData::Field(f.clone());
            let sch = s.schedule.map(|sp| sp.to_schedule()).unwrap_or_else(Schedule::critical);
            let h = 1e-4;
            let mut worst = f64::NEG_INFINITY;
            let mut worst_fd = f64::NEG_INFINITY;
            let mut rows = Vec::new();
            for &t in &times {
                let ansatz = ansatz_derivative(&v.evolve(t)?, &sch, t)?;
                let mu = sch.mu.value(t).powf(f.dim() as f64 / 2.0);
                let bound = mu * ansatz.functional;
                let exact = mu * monitored_derivative(&f, &sch, t)?;
                let lo = (t - h).max(0.0);
                let fd = (monitored_quantity(&v, &sch, t + h)? - monitored_quantity(&v, &sch, lo)?) / (t + h - lo);
                let scale = 1.0 + bound.abs();
                worst = worst.max((exact - bound) / scale);
                worst_fd = worst_fd.max((fd - bound) / scale);
                rows.push((t, (bound - exact) / scale));
            }
            let ok = worst <= tol.closed_form && worst_fd <= tol.numeric;
            CheckOutcome::new(check, ok, worst, "max_excess_over_ansatz", tol.closed_form)
                .with_detail(format!("finite-difference excess {worst_fd:.3e} (tolerance {:e})", tol.numeric))
                .with_series(check.as_str(), "t", "margin", rows)
        }
        CheckName::Sharpness => {
            let r = sharpness_l(&data(s)?)?;
            let err = (r.numeric_t20 - r.closed_form).abs();
            CheckOutcome::new(check, err <= tol.numeric, r.closed_form, "L", tol.numeric).with_detail(format!(
                "t=20: {:.10}, t=25: {:.10}, extrapolated: {:.10}, |t20 - limit| = {err:.3e}",
                r.numeric_t20, r.numeric_t25, r.richardson
            ))
        }
        CheckName::FdOracle => {
            let f = field(s, check)?;
            if f.model().kind() != ModelKind::EuclideanGaussian || f.dim() != 1 {
                return Err(CliError::Config("fd_oracle runs on the Euclidean model with dim = 1".into()));
            }
            let spec = s.fd();
            let grid = FdGrid::new(spec.half_width, spec.nodes, spec.dt)?;
            let mut worst: f64 = 0.0;
            let mut min_ratio = f64::INFINITY;
            let mut rows = Vec::new();
            let mut ok = true;
            for &t in &spec.times {
                let ft = f.evolve(t)?;
                let st = refinement_study(
                    |y| f.eval(&[y]).unwrap_or(f64::NAN),
                    |y| ft.eval(&[y]).unwrap_or(f64::NAN),
                    t,
                    &grid,
                    FdGeometry::Line,
                    spec.window,
                )?;
                // Data the scheme reproduces to rounding leaves no error to refine.
                let exact = st.coarse_error < 1e-11;
                ok &= st.coarse_error < FD_TOL && (exact || st.ratio >= FD_MIN_RATIO);
                worst = worst.max(st.coarse_error);
                if !exact {
                    min_ratio = min_ratio.min(st.ratio);
                }
                rows.push((t, st.coarse_error));
            }
            CheckOutcome::new(check, ok, worst, "max_sup_error", FD_TOL)
                .with_detail(format!("min refinement ratio {min_ratio:.3} (required {FD_MIN_RATIO})"))
                .with_series(check.as_str(), "t", "sup_error", rows)
        }
        CheckName::LaplacianCommutes => {
            let f = field(s, check)?;
            let mut worst: f64 = 0.0;
            let mut rows = Vec::new();
            for &t in &times {
                let c = laplacian_commutes(&f, t)?;
                let rel = c.coefficient_residual / c.scale.max(f64::MIN_POSITIVE);
                worst = worst.max(rel);
                rows.push((t, rel));
            }
            CheckOutcome::new(check, worst <= tol.closed_form, worst, "max_rel_residual", tol.closed_form)
                .with_series(check.as_str(), "t", "residual", rows)
        }
        CheckName::DivergenceIdentity => {
            let mut worst: f64 = 0.0;
            let mut rows = Vec::new();
            for b in 0..s.identities.batches {
                let r = divergence_sweep(seed + b as u64, s.identities.count);
                worst = worst.max(r.max_residual);
                rows.push(((seed + b as u64) as f64, r.max_residual));
            }
            CheckOutcome::new(check, worst < DIVERGENCE_TOL, worst, "max_residual", DIVERGENCE_TOL)
                .with_detail(format!("{} batches of {} jets", s.identities.batches, s.identities.count))
                .with_series(check.as_str(), "seed", "max_residual", rows)
        }
        CheckName::BochnerIdentity => {
            let mut worst: f64 = 0.0;
            let mut signs = 0;
            let mut rows = Vec::new();
            for b in 0..s.identities.batches {
                let r = bochner_sweep(seed + b as u64, s.identities.count)?;
                worst = worst.max(r.max_residual);
                signs += r.sign_failures;
                rows.push(((seed + b as u64) as f64, r.max_residual));
            }
            CheckOutcome::new(check, worst < BOCHNER_TOL && signs == 0, worst, "max_rel_residual", BOCHNER_TOL)
                .with_detail(format!("{signs} sign failures"))
                .with_series(check.as_str(), "seed", "max_residual", rows)
        }
        CheckName::FlowNormIdentity => {
            let v = data(s)?;
            let mut worst: f64 = 0.0;
            let mut max_ratio: f64 = 0.0;
            let mut rows = Vec::new();
            for t in FLOW_TIMES {
                let c = flow_norm_identity(&v, t)?;
                worst = worst.max(c.residual);
                max_ratio = max_ratio.max(c.ratio_to_initial);
                rows.push((t, c.residual));
            }
            let ok = worst < tol.closed_form && max_ratio <= 1.0 + tol.closed_form;
            CheckOutcome::new(check, ok, worst, "max_residual", tol.closed_form)
                .with_detail(format!("largest flow-side ratio {max_ratio:.12}"))
                .with_series(check.as_str(), "t", "residual", rows)
        }
        CheckName::HeatKernel => {
            let n = s.model.dim;
            let mut worst: f64 = 0.0;
            let mut rows = Vec::new();
            let profile = FlowInitial::Reverse { c0: 2.0, dim: n };
            let one = FlowInitial::Polynomial(driftheat::poly::Poly::constant(n, 1.0));
            let lin = FlowInitial::Polynomial(driftheat::poly::Poly::coordinate(n, 0));
            let x: Vec<f64> = (0..n).map(|i| 0.4 - 0.3 * i as f64).collect();
            for tau in [-0.5, 0.0, 0.5] {
                let mut e: f64 = 0.0;
                for (u0, order) in [(&profile, 48), (&one, 4), (&lin, 4)] {
                    let got = heat_apply(u0, tau, &x, order)?;
                    let want = u0.exact(tau, &x).expect("affine or profile data");
                    e = e.max((got - want).abs() / want.abs().max(1.0));
                }
                worst = worst.max(e);
                rows.push((tau, e));
            }
            let (left, kernel) = continuity_at_zero(1.0, n, &x, 1e-9)?;
            let gap = (left - kernel).abs();
            CheckOutcome::new(check, worst < HEAT_KERNEL_TOL && gap < HEAT_KERNEL_TOL, worst, "max_rel_error", HEAT_KERNEL_TOL)
                .with_detail(format!("gap at tau = 0: {gap:.3e}"))
                .with_series(check.as_str(), "tau", "rel_error", rows)
        }
        CheckName::SchurIdentity => {
            let r = schur_identity_sweep(seed, s.identities.count)?;
            CheckOutcome::new(check, r < SCHUR_IDENTITY_TOL, r, "max_residual", SCHUR_IDENTITY_TOL)
                .with_detail(format!("{} draws", s.identities.count))
        }
        CheckName::SchurRows => {
            let spec = &s.schur;
            let mut worst: f64 = 0.0;
            let mut worst_var: f64 = 0.0;
            let mut out_series = Vec::new();
            for &n in &spec.dims {
                let mut rng = ChaCha8Rng::seed_from_u64(seed + n as u64);
                let samples: Vec<Vec<f64>> = (0..spec.samples)
                    .map(|_| (0..n).map(|_| rng.gen_range(-3.0..=3.0)).collect())
                    .collect();
                let mut rows = Vec::new();
                for &tau in &spec.taus {
                    let r = schur_row_constant(tau, n, &samples, spec.order)?;
                    worst = worst.max((r.c_x - r.c_x_closed).abs()).max((r.c_y - r.c_y_closed).abs());
                    worst_var = worst_var.max(r.c_x_variance).max(r.c_y_variance);
                    rows.push((tau, r.c_x));
                }
                out_series.push((format!("schur_rows_n{n}"), rows));
            }
            let ok = worst < SCHUR_ROW_TOL && worst_var < SCHUR_VARIANCE_TOL;
            let mut out = CheckOutcome::new(check, ok, worst, "max_abs_error", SCHUR_ROW_TOL)
                .with_detail(format!("largest per-point variance {worst_var:.3e}"));
            for (name, rows) in out_series {
                out = out.with_series(&name, "tau", "c_x", rows);
            }
            out
        }
        CheckName::Tables => {
            let entries = all_tables()?;
            let failing = entries.iter().filter(|e| !e.pass).count();
            let worst = entries
                .iter()
                .map(|e| e.rel_error / e.path.tolerance())
                .fold(0.0, f64::max);
            CheckOutcome::new(check, failing == 0, worst, "max_error_over_tolerance", 1.0)
                .with_detail(format!("{} entries, {failing} failing", entries.len()))
        }
    };
    Ok(out)
}

/// Runs a check, turning a divergence into a `Diverged` verdict.
pub fn run_check_guarded(check: CheckName, s: &Scenario) -> Result<CheckOutcome, CliError> {
    match run_check(check, s) {
        Err(CliError::Core(Error::Divergence { reason, critical_gamma })) => Ok(CheckOutcome {
            check: check.as_str().to_string(),
            verdict: Verdict::Diverged,
            value: f64::NAN,
            metric: "critical_gamma".into(),
            tolerance: f64::NAN,
            detail: Some(format!("{reason} (critical gamma {critical_gamma})")),
            series: Vec::new(),
        }),
        other => other,
    }
}
