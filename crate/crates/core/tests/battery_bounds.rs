use driftheat::battery::{dictionary_row, standard_battery};
use driftheat::monitors::{
    ansatz_derivative, classical_bound, critical_bound, default_time_grid, schedule_bound, GammaSchedule, MuSchedule,
    Schedule, Verdict, CLOSED_FORM_TOL,
};

#[test]
fn critical_ratio_bounded_and_nonincreasing_on_battery() {
    let times = default_time_grid();
    for (name, v) in standard_battery(2024, 50).unwrap() {
        let r = critical_bound(&v, &times, CLOSED_FORM_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{name}: {:?}", r.detail);
        assert!(r.max_ratio <= 1.0 + 1e-8 && r.monotone, "{name}");
        assert_eq!(r.ratios[0], 1.0);
    }
}

#[test]
fn classical_ratio_on_battery() {
    let times = default_time_grid();
    for (name, v) in standard_battery(5, 10).unwrap() {
        let r = classical_bound(&v, &times, CLOSED_FORM_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{name}");
    }
}

#[test]
fn missing_normalisation_is_caught() {
    let schedule = Schedule {
        gamma: GammaSchedule::Critical,
        mu: MuSchedule::Constant,
        alpha: 1.0,
    };
    let v = dictionary_row(1, 1, None).unwrap();
    let r = schedule_bound(&v, &schedule, &default_time_grid(), CLOSED_FORM_TOL).unwrap();
    assert_eq!(r.verdict, Verdict::Violation);
    assert!(r.max_ratio > 2.0);
}

#[test]
fn ansatz_coefficients_vanish_for_both_schedules() {
    let v = dictionary_row(2, 2, None).unwrap();
    for schedule in [Schedule::classical(), Schedule::critical()] {
        for &t in &default_time_grid() {
            let a = ansatz_derivative(&v.evolve(t).unwrap(), &schedule, t).unwrap();
            assert!(a.f_coefficient.abs() < 1e-14 && a.constant_coefficient.abs() < 1e-14, "{a:?}");
        }
    }
}
