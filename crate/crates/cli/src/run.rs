//! Subcommand drivers. Work fans out over a private rayon pool; results are
//! collected in input order so reports do not depend on scheduling.

use std::f64::consts::PI;
use std::path::Path;
use std::time::{Duration, Instant};

use driftheat::battery::standard_battery;
use driftheat::monitors::{
    euclidean_constant, euclidean_constant_pow4n, euclidean_constant_quadrature, sharpness_l, GammaSchedule,
};
use driftheat::tables::{dictionary_table, integrals_table, sharpness_table};
use driftheat::transfer::{flow_norm_identity, schur_row_constant};
use driftheat::{GaussianProfile, InitialData, ProfileFamily};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::checks::{run_check_guarded, CheckOutcome, FLOW_TIMES, SCHUR_ROW_TOL};
use crate::config::{CheckName, Scenario, SweepParam, SweepSpec, SCHEMA_VERSION};
use crate::error::CliError;
use crate::report::{write_rows, RunReport};

/// Asymptote check tolerance for `e^{-t} C^{4/n}`.
pub const EPSILON_REL_TOL: f64 = 1e-2;

pub fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        if j == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        b = b.num_threads(j);
    }
    b.build().map_err(|e| CliError::Io(e.to_string()))
}

/// A scenario with no data and the given checks, for subcommands run without `--config`.
pub fn default_scenario(name: &str, checks: Vec<CheckName>) -> Scenario {
    let text = format!(
        "schema_version = {SCHEMA_VERSION}\nname = \"{name}\"\nchecks = [{}]\n",
        checks.iter().map(|c| format!("\"{}\"", c.as_str())).collect::<Vec<_>>().join(", ")
    );
    Scenario::from_toml(&text).expect("built-in scenario is valid")
}

fn timed<F: FnOnce() -> Result<CheckOutcome, CliError>>(f: F) -> Result<(CheckOutcome, Duration), CliError> {
    let start = Instant::now();
    let o = f()?;
    Ok((o, start.elapsed()))
}

fn assemble(s: &Scenario, results: Vec<(CheckOutcome, Duration)>) -> Result<RunReport, CliError> {
    let (outcomes, timings) = results.into_iter().unzip();
    Ok(RunReport {
        name: s.name.clone(),
        seed: s.seed(),
        scenario: serde_json::to_value(s)?,
        outcomes,
        timings,
    })
}

/// Runs every check listed in the scenario.
pub fn verify(s: &Scenario, jobs: Option<usize>) -> Result<RunReport, CliError> {
    let results: Vec<Result<(CheckOutcome, Duration), CliError>> =
        pool(jobs)?.install(|| s.checks.par_iter().map(|&c| timed(|| run_check_guarded(c, s))).collect());
    assemble(s, results.into_iter().collect::<Result<_, _>>()?)
}

/// Parameter sweep described by the scenario's `[sweep]` section.
pub fn sweep(s: &Scenario, jobs: Option<usize>) -> Result<RunReport, CliError> {
    let spec = s
        .sweep
        .clone()
        .ok_or_else(|| CliError::Config("sweep needs a [sweep] section".into()))?;
    let start = Instant::now();
    let outcome = pool(jobs)?.install(|| sweep_outcome(s, &spec))?;
    assemble(s, vec![(outcome, start.elapsed())])
}

fn sweep_outcome(s: &Scenario, spec: &SweepSpec) -> Result<CheckOutcome, CliError> {
    let n = s.model.dim;
    let mut values = spec.values.clone();
    values.sort_by(|a, b| a.total_cmp(b));
    match spec.param {
        SweepParam::C => {
            let tol = s.tolerance.numeric;
            let rows: Vec<(f64, f64, f64)> = values
                .par_iter()
                .map(|&c| {
                    let p = GaussianProfile::new(ProfileFamily::Reverse, c, n).map_err(CliError::from_config)?;
                    let r = sharpness_l(&InitialData::Profile(p))?;
                    Ok((c, r.closed_form, r.numeric_t20))
                })
                .collect::<Result<_, CliError>>()?;
            let err = rows.iter().map(|r| (r.1 - r.2).abs()).fold(0.0, f64::max);
            // Ascending c means descending L.
            let monotone = rows.windows(2).all(|w| w[1].1 < w[0].1);
            let closest = rows.first().map(|r| r.1).unwrap_or(f64::NAN);
            let listing: Vec<String> = rows.iter().map(|r| format!("c={}: L={:.10}", r.0, r.1)).collect();
            Ok(CheckOutcome::named("sweep_c", err <= tol && monotone, closest, "L_at_smallest_c", tol)
                .with_detail(format!("{}; max |t20 - limit| = {err:.3e}; monotone = {monotone}", listing.join(", ")))
                .with_series("sweep_c", "c", "L", rows.iter().map(|r| (r.0, r.1)).collect())
                .with_series("sweep_c_t20", "c", "L_t20", rows.iter().map(|r| (r.0, r.2)).collect()))
        }
        SweepParam::Gamma => {
            let t = spec.t.unwrap_or(1.0);
            let tol = s.tolerance.closed_form;
            let rows: Vec<(f64, f64, f64)> = values
                .par_iter()
                .map(|&g| {
                    let c = euclidean_constant(t, g, n)?;
                    let q = euclidean_constant_quadrature(t, g, n, 60)?;
                    Ok((g, c, (q / c - 1.0).abs()))
                })
                .collect::<Result<_, CliError>>()?;
            let worst = rows.iter().map(|r| r.2).fold(0.0, f64::max);
            Ok(CheckOutcome::named("sweep_gamma", worst <= tol, worst, "max_rel_error", tol)
                .with_detail(format!("t = {t}, n = {n}"))
                .with_series("sweep_gamma", "gamma", "constant", rows.iter().map(|r| (r.0, r.1)).collect()))
        }
        SweepParam::Epsilon => {
            let t = spec.t.unwrap_or(15.0);
            let rows: Vec<(f64, f64, f64)> = values
                .par_iter()
                .map(|&eps| {
                    if !(eps > 0.0 && eps < 1.0) {
                        return Err(CliError::Config(format!("epsilon must lie in (0, 1), got {eps}")));
                    }
                    let gamma = GammaSchedule::SubCritical(eps).value(t);
                    let scaled = (-t).exp() * euclidean_constant_pow4n(t, gamma)?;
                    let limit = 2.0 * PI * (1.0 - eps) / eps;
                    Ok((eps, scaled, (scaled / limit - 1.0).abs()))
                })
                .collect::<Result<_, CliError>>()?;
            let worst = rows.iter().map(|r| r.2).fold(0.0, f64::max);
            Ok(CheckOutcome::named("sweep_epsilon", worst <= EPSILON_REL_TOL, worst, "max_rel_gap_to_limit", EPSILON_REL_TOL)
                .with_detail(format!("t = {t}"))
                .with_series("sweep_epsilon", "epsilon", "scaled_constant", rows.iter().map(|r| (r.0, r.1)).collect()))
        }
        SweepParam::Tau => {
            let mut rng = ChaCha8Rng::seed_from_u64(s.seed());
            let samples: Vec<Vec<f64>> = (0..s.schur.samples)
                .map(|_| (0..n).map(|_| rng.gen_range(-3.0..=3.0)).collect())
                .collect();
            let rows: Vec<(f64, f64, f64)> = values
                .par_iter()
                .map(|&tau| {
                    let r = schur_row_constant(tau, n, &samples, s.schur.order)?;
                    let err = (r.c_x - r.c_x_closed).abs().max((r.c_y - r.c_y_closed).abs());
                    Ok((tau, r.c_x, err))
                })
                .collect::<Result<_, CliError>>()?;
            let worst = rows.iter().map(|r| r.2).fold(0.0, f64::max);
            Ok(CheckOutcome::named("sweep_tau", worst < SCHUR_ROW_TOL, worst, "max_abs_error", SCHUR_ROW_TOL)
                .with_series("sweep_tau", "tau", "c_x", rows.iter().map(|r| (r.0, r.1)).collect()))
        }
    }
}

/// The divergence and Bochner suites on seeded random jets.
pub fn identities(s: &Scenario, jobs: Option<usize>) -> Result<RunReport, CliError> {
    let mut s = s.clone();
    s.checks = vec![CheckName::DivergenceIdentity, CheckName::BochnerIdentity];
    verify(&s, jobs)
}

pub fn schur(s: &Scenario, jobs: Option<usize>) -> Result<RunReport, CliError> {
    let mut s = s.clone();
    s.checks = vec![CheckName::SchurIdentity, CheckName::SchurRows];
    verify(&s, jobs)
}

/// Flow-norm identity over the standard battery plus the heat-kernel checks.
pub fn transfer(s: &Scenario, jobs: Option<usize>) -> Result<RunReport, CliError> {
    let tol = s.tolerance.closed_form;
    let battery = standard_battery(s.seed(), 20)?;
    let p = pool(jobs)?;
    let start = Instant::now();
    let rows: Vec<(usize, f64, f64)> = p.install(|| {
        battery
            .par_iter()
            .enumerate()
            .map(|(i, (_, v))| {
                let mut worst: f64 = 0.0;
                let mut ratio: f64 = 0.0;
                for t in FLOW_TIMES {
                    let c = flow_norm_identity(v, t)?;
                    worst = worst.max(c.residual);
                    ratio = ratio.max(c.ratio_to_initial);
                }
                Ok((i, worst, ratio))
            })
            .collect::<Result<_, CliError>>()
    })?;
    let worst = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let ratio = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    let flow = CheckOutcome::named("flow_norm_identity", worst < tol && ratio <= 1.0 + tol, worst, "max_residual", tol)
        .with_detail(format!("{} inputs at t in {FLOW_TIMES:?}; largest flow-side ratio {ratio:.12}", battery.len()))
        .with_series("flow_norm_identity", "input", "max_residual", rows.iter().map(|r| (r.0 as f64, r.1)).collect());
    let flow_time = start.elapsed();
    let mut s2 = s.clone();
    s2.checks = vec![CheckName::HeatKernel];
    let mut report = verify(&s2, jobs)?;
    report.outcomes.insert(0, flow);
    report.timings.insert(0, flow_time);
    report.scenario = serde_json::to_value(s)?;
    Ok(report)
}

/// Writes the three tables as CSV into `dir` and reports whether every entry
/// was reproduced.
pub fn table(s: &Scenario, dir: &Path) -> Result<RunReport, CliError> {
    std::fs::create_dir_all(dir)?;
    write_rows(&dir.join("table_dictionary.csv"), &dictionary_table()?)?;
    write_rows(&dir.join("table_integrals.csv"), &integrals_table()?)?;
    write_rows(&dir.join("table_sharpness.csv"), &sharpness_table()?)?;
    let mut s2 = s.clone();
    s2.checks = vec![CheckName::Tables];
    verify(&s2, Some(1))
}
