//! End-to-end acceptance run. Prints one line per criterion, then fails if any
//! criterion did not pass or ran over its time budget.

use std::f64::consts::PI;
use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use driftheat::battery::{random_field, standard_battery};
use driftheat::fd::{refinement_study, FdGeometry, FdGrid};
use driftheat::identities::{divergence_identity, divergence_sweep, euclidean_potential, JetInput, ScalarJet};
use driftheat::monitors::{
    ansatz_derivative, critical_bound, default_time_grid, euclidean_constant, euclidean_constant_pow4n,
    euclidean_constant_quadrature, sharpness_l, GammaSchedule, Schedule, Verdict,
};
use driftheat::poly::Poly;
use driftheat::tables::{all_tables, PathKind, Table};
use driftheat::transfer::{flow_norm_identity, schur_identity_sweep, schur_row_constant};
use driftheat::{GaussianProfile, HermiteField, InitialData, ProfileFamily, SolitonModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20240601;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn battery() -> Result<Vec<(String, InitialData)>, String> {
    standard_battery(SEED, 50).map_err(fail)
}

fn critical_monitor() -> Outcome {
    let times = default_time_grid();
    ensure(times.len() == 40, format!("grid has {} points", times.len()))?;
    let entries = battery()?;
    let mut worst: f64 = 0.0;
    for (label, v) in &entries {
        let r = critical_bound(v, &times, 1e-8).map_err(fail)?;
        ensure(
            r.verdict == Verdict::Pass && r.max_ratio <= 1.0 + 1e-8 && r.monotone,
            format!("{label}: max ratio {} monotone {}", r.max_ratio, r.monotone),
        )?;
        worst = worst.max(r.max_ratio);
    }
    Ok(format!("{} inputs, max r(t) = {worst:.12}", entries.len()))
}

fn sharpness() -> Outcome {
    let mut worst_closed: f64 = 0.0;
    let mut worst_t20: f64 = 0.0;
    for n in [1usize, 2, 4] {
        let mut previous = 0.0;
        for c in [2.0, 1.5, 1.1, 1.01] {
            let p = GaussianProfile::new(ProfileFamily::Reverse, c, n).map_err(fail)?;
            let r = sharpness_l(&InitialData::Profile(p)).map_err(fail)?;
            let want = ((c + 1.0) / (2.0 * c)).powf(n as f64 / 4.0);
            worst_closed = worst_closed.max((r.closed_form - want).abs());
            worst_t20 = worst_t20.max((r.numeric_t20 - r.closed_form).abs());
            ensure(
                r.closed_form > previous && r.closed_form < 1.0,
                format!("n={n} c={c}: L = {} after {previous}", r.closed_form),
            )?;
            previous = r.closed_form;
        }
    }
    ensure(worst_closed < 1e-6, format!("closed form off by {worst_closed:e}"))?;
    ensure(worst_t20 < 1e-4, format!("t = 20 value off by {worst_t20:e}"))?;
    Ok(format!("|L - table| = {worst_closed:.1e}, |L(t=20) - L| = {worst_t20:.1e}"))
}

fn divergence() -> Outcome {
    let s = divergence_sweep(SEED, 1000);
    ensure(s.max_residual < 1e-9, format!("sweep residual {:e}", s.max_residual))?;
    let f = euclidean_potential(1);
    let one = Poly::constant(1, 1.0);
    let y = [1.0];
    let jet = JetInput::new(y.to_vec(), ScalarJet::from_poly(&one, &y), ScalarJet::from_poly(&f, &y), 1.0, 2.0)
        .map_err(fail)?;
    let c = divergence_identity(&jet);
    let want = -3.0 / 8.0 * (-1.0f64 / 8.0).exp();
    let gap = (c.lhs - want).abs().max((c.rhs - want).abs());
    ensure(gap < 1e-12, format!("anchor sides {} and {}, want {want}", c.lhs, c.rhs))?;
    Ok(format!("1000 jets, max residual {:.1e}; anchor = {:.9}", s.max_residual, c.lhs))
}

fn ansatz() -> Outcome {
    let v = InitialData::Field(HermiteField::constant(SolitonModel::euclidean(2).map_err(fail)?, 1.0));
    let mut worst: f64 = 0.0;
    for sch in [Schedule::classical(), Schedule::critical()] {
        for t in default_time_grid() {
            let a = ansatz_derivative(&v.evolve(t).map_err(fail)?, &sch, t).map_err(fail)?;
            worst = worst.max(a.f_coefficient.abs()).max(a.constant_coefficient.abs());
        }
    }
    ensure(worst < 1e-14, format!("largest coefficient {worst:e}"))?;
    Ok(format!("2 schedules x 40 times, max |coefficient| = {worst:.1e}"))
}

fn tables() -> Outcome {
    let entries = all_tables().map_err(fail)?;
    let mut seen = [false; 3];
    for e in &entries {
        let tol = match e.path {
            PathKind::ClosedForm => 1e-8,
            PathKind::Quadrature => 1e-5,
        };
        ensure(
            e.pass && e.rel_error <= tol && (e.dim == 1 || e.dim == 2 || e.table == Table::Dictionary),
            format!("{:?} row {} {} n={} {}: rel error {:e}", e.table, e.row, e.column, e.dim, e.params, e.rel_error),
        )?;
        seen[match e.table {
            Table::Dictionary => 0,
            Table::Integrals => 1,
            Table::Sharpness => 2,
        }] = true;
    }
    ensure(seen.iter().all(|&s| s), "a table produced no entries".into())?;
    let quad = entries.iter().filter(|e| e.path == PathKind::Quadrature).count();
    Ok(format!("{} entries ({quad} on quadrature paths), all reproduced", entries.len()))
}

/// `∫_R e^{-b y^2} dy` by the trapezoid rule on a wide uniform grid.
fn trapezoid_gaussian(b: f64) -> f64 {
    let half = 40.0 / b.sqrt();
    let m = 40_000;
    let h = 2.0 * half / m as f64;
    (0..=m)
        .map(|i| {
            let y = -half + i as f64 * h;
            let w = if i == 0 || i == m { 0.5 } else { 1.0 };
            w * (-b * y * y).exp()
        })
        .sum::<f64>()
        * h
}

fn bakry_emery() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let t = rng.gen_range(0.2..=3.0);
        let q = 1.0 + f64::exp(t);
        let gamma = rng.gen_range(0.05..0.95) * q / 2.0;
        let n = rng.gen_range(1..=3usize);
        let c = euclidean_constant(t, gamma, n).map_err(fail)?;
        let quad = euclidean_constant_quadrature(t, gamma, n, 60).map_err(fail)?;
        let p = q / (q - 2.0);
        let b = 0.25 * (1.0 / gamma - 2.0 / q) * p;
        let direct = trapezoid_gaussian(b).powi(n as i32).powf((q - 2.0) / (2.0 * q));
        worst = worst.max((quad / c - 1.0).abs()).max((direct / c - 1.0).abs());
    }
    ensure(worst < 1e-8, format!("constant vs quadrature rel error {worst:e}"))?;
    let (eps, t) = (0.1, 15.0);
    let gamma = GammaSchedule::SubCritical(eps).value(t);
    let scaled = (-t).exp() * euclidean_constant_pow4n(t, gamma).map_err(fail)?;
    let limit = 2.0 * PI * (1.0 - eps) / eps;
    let gap = (scaled / limit - 1.0).abs();
    ensure(gap < 1e-2, format!("asymptote gap {gap:e}"))?;
    Ok(format!("20 triples, max rel error {worst:.1e}; eps = 0.1 gap {gap:.1e}"))
}

fn fd_oracle() -> Outcome {
    let model = SolitonModel::euclidean(1).map_err(fail)?;
    let mut fields: Vec<HermiteField> = (1..=6)
        .map(|k| HermiteField::from_terms(model.clone(), k, [(vec![k], 1.0)]))
        .collect::<Result<_, _>>()
        .map_err(fail)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..4 {
        fields.push(random_field(&mut rng, 1, 6).map_err(fail)?);
    }
    let grid = FdGrid::default();
    let mut worst: f64 = 0.0;
    let mut min_ratio = f64::INFINITY;
    for v in &fields {
        for t in [0.5, 1.0] {
            let vt = v.evolve(t).map_err(fail)?;
            let s = refinement_study(
                |y| v.eval(&[y]).unwrap_or(f64::NAN),
                |y| vt.eval(&[y]).unwrap_or(f64::NAN),
                t,
                &grid,
                FdGeometry::Line,
                4.0,
            )
            .map_err(fail)?;
            ensure(
                s.coarse_error < 1e-3 && s.ratio >= 3.0,
                format!("degree {} t={t}: error {:e} ratio {}", v.max_degree(), s.coarse_error, s.ratio),
            )?;
            worst = worst.max(s.coarse_error);
            min_ratio = min_ratio.min(s.ratio);
        }
    }
    Ok(format!("{} fields, max error {worst:.2e}, min refinement ratio {min_ratio:.2}", fields.len()))
}

fn transfer() -> Outcome {
    let entries = battery()?;
    let mut worst: f64 = 0.0;
    for (label, v) in &entries {
        for t in [0.5, 1.0, 3.0] {
            let c = flow_norm_identity(v, t).map_err(fail)?;
            ensure(c.residual < 1e-8, format!("{label} t={t}: flow-norm residual {:e}", c.residual))?;
            worst = worst.max(c.residual);
        }
    }
    let schur = schur_identity_sweep(SEED, 1000).map_err(fail)?;
    ensure(schur < 1e-10, format!("schur identity residual {schur:e}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut row_err: f64 = 0.0;
    let mut variance: f64 = 0.0;
    for n in 1..=3usize {
        let samples: Vec<Vec<f64>> =
            (0..20).map(|_| (0..n).map(|_| rng.gen_range(-3.0..=3.0)).collect()).collect();
        for tau in [0.0, 0.25, 0.5, 0.9] {
            let r = schur_row_constant(tau, n, &samples, 40).map_err(fail)?;
            let want = (2.0 / (1.0 - tau)).powf(n as f64 / 2.0);
            row_err = row_err.max((r.c_x - want).abs());
            variance = variance.max(r.c_x_variance);
        }
    }
    ensure(row_err < 1e-6, format!("C_X off by {row_err:e}"))?;
    ensure(variance < 1e-16, format!("row variance {variance:e}"))?;
    Ok(format!(
        "flow residual {worst:.1e} on {} inputs; schur {schur:.1e}; C_X error {row_err:.1e}, variance {variance:.1e}",
        entries.len()
    ))
}

fn negative_controls() -> Outcome {
    let model = SolitonModel::euclidean(2).map_err(fail)?.with_potential_shift(0.1);
    let points = vec![vec![0.0, 0.0], vec![1.0, -2.0], vec![2.5, 0.5]];
    let r = model.check_identities(&points).map_err(fail)?;
    ensure(r.max() == 0.1, format!("shifted-potential residual {}", r.max()))?;
    let scenario = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/mu_constant_negative.toml");
    let out = tempfile::tempdir().map_err(fail)?;
    let status = Command::new(env!("CARGO_BIN_EXE_driftheat"))
        .args(["verify", "--config", scenario, "--out"])
        .arg(out.path())
        .output()
        .map_err(fail)?
        .status;
    ensure(status.code() == Some(2), format!("mu = 1 run exited with {:?}", status.code()))?;
    Ok("shifted residual = 0.1 exactly; mu = 1 run exits 2".into())
}

#[test]
fn acceptance() {
    let criteria: [(&str, u64, fn() -> Outcome); 9] = [
        ("critical monitor bounded and monotone", 60, critical_monitor),
        ("sharpness constant", 30, sharpness),
        ("divergence identity", 10, divergence),
        ("ansatz coefficients vanish", 5, ansatz),
        ("reference tables reproduced", 60, tables),
        ("Bakry-Emery constant", 30, bakry_emery),
        ("spectral vs finite differences", 120, fd_oracle),
        ("flow transfer and Schur test", 60, transfer),
        ("negative controls", 10, negative_controls),
    ];
    let mut failed = Vec::new();
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let in_budget = took <= Duration::from_secs(*budget);
        let (status, detail) = match (&outcome, in_budget) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("over budget; {d}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        let _ = writeln!(
            std::io::stderr().lock(),
            "criterion {} {status} {name} ({:.2} s of {budget} s): {detail}",
            i + 1,
            took.as_secs_f64()
        );
        if status == "FAIL" {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
