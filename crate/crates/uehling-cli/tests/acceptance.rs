//! Top-level acceptance suite.
//!
//! Each test covers one release criterion, prints a single
//! `acceptance criterion N [...]: PASS/FAIL` line (visible with
//! `cargo test --test acceptance -- --nocapture`), and then asserts.
//! Tolerances are pinned as literals next to each check.

use std::path::Path;
use std::process::Command;

use uehling::grid::log_grid;
use uehling::odecheck::{
    consistency_report, constant_coeff_bracket, constant_coeff_bracket_prime, ode_residual,
    ode_rhs, solve_ivp,
};
use uehling::potential::{evaluate_route, uehling_derivative_integral, Route};
use uehling::quadrature::AccuracyConfig;
use uehling::report::relative_deviation;
use uehling::specfun::bickley_ki;
use uehling::{PhysicalParams, UnitSystem, FINE_STRUCTURE_ALPHA};

fn unit_params() -> PhysicalParams {
    PhysicalParams::new(1.0, FINE_STRUCTURE_ALPHA, UnitSystem::Relativistic)
        .expect("valid parameters")
}

fn conclude(index: u32, name: &str, passed: bool, detail: &str) {
    let verdict = if passed { "PASS" } else { "FAIL" };
    println!("acceptance criterion {index} [{name}]: {verdict} — {detail}");
    assert!(passed, "acceptance criterion {index} [{name}] failed — {detail}");
}

/// Criterion 1: the four-kernel closed form agrees with direct quadrature
/// of the defining integral to 1e-9 relative on 60 log-spaced radii in
/// [1e-3, 20] (unit charge, relativistic units).
#[test]
fn criterion_1_closed_ki024_matches_integral_route() {
    const TOL: f64 = 1e-9;
    let params = unit_params();
    let cfg = AccuracyConfig::default();
    let grid = log_grid(1e-3, 20.0, 60).expect("valid grid");

    let mut max_rel: f64 = 0.0;
    for &r in &grid {
        let integral = evaluate_route(Route::Integral, r, &params, &cfg)
            .expect("integral route evaluates")
            .value;
        let closed = evaluate_route(Route::ClosedKi024, r, &params, &cfg)
            .expect("closed route evaluates")
            .value;
        max_rel = max_rel.max(relative_deviation(integral, closed));
    }
    conclude(
        1,
        "closed_ki024 vs integral",
        max_rel <= TOL,
        &format!("max relative deviation {max_rel:.3e} (tolerance {TOL:.0e}, 60 log points in [1e-3, 20])"),
    );
}

/// Criterion 2: the reduced three-kernel closed form agrees with the
/// four-kernel form to 1e-11 relative on the same grid.
#[test]
fn criterion_2_closed_reduced_matches_closed_ki024() {
    const TOL: f64 = 1e-11;
    let params = unit_params();
    let cfg = AccuracyConfig::default();
    let grid = log_grid(1e-3, 20.0, 60).expect("valid grid");

    let mut max_rel: f64 = 0.0;
    for &r in &grid {
        let ki024 = evaluate_route(Route::ClosedKi024, r, &params, &cfg)
            .expect("four-kernel route evaluates")
            .value;
        let reduced = evaluate_route(Route::ClosedReduced, r, &params, &cfg)
            .expect("reduced route evaluates")
            .value;
        max_rel = max_rel.max(relative_deviation(ki024, reduced));
    }
    conclude(
        2,
        "closed_reduced vs closed_ki024",
        max_rel <= TOL,
        &format!("max relative deviation {max_rel:.3e} (tolerance {TOL:.0e}, 60 log points in [1e-3, 20])"),
    );
}

/// Criterion 3: `k0` and `k1` reproduce the independent high-precision
/// reference table to 1e-10 relative over x in [1e-3, 50], and the
/// order-1..4 `Ki_n(0)` values match their exact closed forms to 1e-10
/// absolute.
#[test]
fn criterion_3_kernel_functions_match_reference_table() {
    const REL_TOL: f64 = 1e-10;
    const ABS_TOL: f64 = 1e-10;
    let cfg = AccuracyConfig::default();

    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../uehling/tests/fixtures/specfun_reference.txt");
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|err| panic!("cannot read {}: {err}", path.display()));

    let mut max_rel: f64 = 0.0;
    let mut checked = 0usize;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let x: f64 = fields[2].parse().expect("argument parses");
        let reference: f64 = fields[3].parse().expect("value parses");
        let computed = match fields[0] {
            "k0" => uehling::specfun::k0(x, &cfg).expect("k0 evaluates").value,
            "k1" => uehling::specfun::k1(x, &cfg).expect("k1 evaluates").value,
            _ => continue,
        };
        max_rel = max_rel.max((computed - reference).abs() / reference.abs());
        checked += 1;
    }

    let exact_at_zero = [
        (1u32, std::f64::consts::FRAC_PI_2),
        (2, 1.0),
        (3, std::f64::consts::FRAC_PI_4),
        (4, 2.0 / 3.0),
    ];
    let mut max_abs_at_zero: f64 = 0.0;
    for (n, exact) in exact_at_zero {
        let computed = bickley_ki(n, 0.0, &cfg).expect("ki at zero evaluates").value;
        max_abs_at_zero = max_abs_at_zero.max((computed - exact).abs());
    }

    let passed = checked == 126 && max_rel <= REL_TOL && max_abs_at_zero <= ABS_TOL;
    conclude(
        3,
        "k0/k1 vs oracle and ki_n(0) closed forms",
        passed,
        &format!(
            "{checked} table rows, max relative {max_rel:.3e} (tolerance {REL_TOL:.0e}); \
             ki_n(0) max absolute {max_abs_at_zero:.3e} (tolerance {ABS_TOL:.0e})"
        ),
    );
}

/// Criterion 4: finite differences of the closed-form bracket `F = r U`
/// reproduce its analytic first derivative and the equation's right-hand
/// side (`F'' = g`) to 1e-7 relative on r in [0.1, 5].
#[test]
fn criterion_4_bracket_derivative_chain() {
    const TOL: f64 = 1e-7;
    const FD_STEP_FIRST: f64 = 1e-5; // relative to r
    const FD_STEP_SECOND: f64 = 1e-3; // relative to r
    let params = unit_params();
    let grid = log_grid(0.1, 5.0, 20).expect("valid grid");

    let bracket = |r: f64| constant_coeff_bracket(r, &params).expect("bracket evaluates");
    let mut max_rel_first: f64 = 0.0;
    let mut max_rel_second: f64 = 0.0;
    for &r in &grid {
        let h1 = FD_STEP_FIRST * r;
        let fd_first = (bracket(r - 2.0 * h1) - 8.0 * bracket(r - h1) + 8.0 * bracket(r + h1)
            - bracket(r + 2.0 * h1))
            / (12.0 * h1);
        let analytic_first =
            constant_coeff_bracket_prime(r, &params).expect("derivative evaluates");
        max_rel_first = max_rel_first.max(relative_deviation(fd_first, analytic_first));

        let h2 = FD_STEP_SECOND * r;
        let fd_second = (-bracket(r - 2.0 * h2) + 16.0 * bracket(r - h2) - 30.0 * bracket(r)
            + 16.0 * bracket(r + h2)
            - bracket(r + 2.0 * h2))
            / (12.0 * h2 * h2);
        let analytic_second = ode_rhs(r, &params).expect("right-hand side evaluates");
        max_rel_second = max_rel_second.max(relative_deviation(fd_second, analytic_second));
    }

    let passed = max_rel_first <= TOL && max_rel_second <= TOL;
    conclude(
        4,
        "finite-difference derivative chain",
        passed,
        &format!(
            "d/dr max relative {max_rel_first:.3e}, d2/dr2 max relative {max_rel_second:.3e} \
             (tolerance {TOL:.0e}, 20 log points in [0.1, 5])"
        ),
    );
}

/// Criterion 5: integrating `w'' = g(r)` from closed-form initial data at
/// r0 = 0.5 reproduces the closed-form bracket on [0.5, 5] to
/// 1e-8 * max|F| with 2048 steps, and halving the step count scales the
/// error by 2^4 = 16 within 25 percent.
#[test]
fn criterion_5_ivp_round_trip_and_convergence_order() {
    const TOL_SCALE: f64 = 1e-8;
    const RATIO_LOW: f64 = 12.0; // 16 * 0.75
    const RATIO_HIGH: f64 = 20.0; // 16 * 1.25
    let params = unit_params();
    let r0 = 0.5;
    let r_end = 5.0;
    let w0 = constant_coeff_bracket(r0, &params).expect("initial value");
    let p0 = constant_coeff_bracket_prime(r0, &params).expect("initial slope");

    let max_deviation = |steps: usize| -> (f64, f64) {
        let trajectory =
            solve_ivp(r0, w0, p0, r_end, steps, &params).expect("trajectory integrates");
        let mut max_dev: f64 = 0.0;
        let mut max_f: f64 = 0.0;
        for point in &trajectory.points {
            let reference = constant_coeff_bracket(point.r, &params).expect("reference");
            max_dev = max_dev.max((point.w - reference).abs());
            max_f = max_f.max(reference.abs());
        }
        (max_dev, max_f)
    };

    let (dev_fine, max_f) = max_deviation(2048);
    let (dev_coarse, _) = max_deviation(1024);
    let budget = TOL_SCALE * max_f;
    let ratio = dev_coarse / dev_fine;

    let passed = dev_fine <= budget && (RATIO_LOW..=RATIO_HIGH).contains(&ratio);
    conclude(
        5,
        "IVP round trip and 4th-order convergence",
        passed,
        &format!(
            "max deviation {dev_fine:.3e} vs budget {budget:.3e} at 2048 steps; \
             coarse/fine error ratio {ratio:.2} (expected 16 +/- 25%)"
        ),
    );
}

/// Criterion 6: the three documented route gaps are computed, serialized,
/// and safely nonzero — their magnitudes are recorded here, not asserted.
#[test]
fn criterion_6_diagnostics_are_recorded_not_asserted() {
    let params = unit_params();
    let cfg = AccuracyConfig::default();
    let grid = uehling::grid::default_verification_grid();

    let report = consistency_report(&grid, &params, &cfg).expect("report builds");
    let diagnostic_names = [
        "ode_residual_integral",
        "derivative_integral_vs_finite_difference",
        "constant_coeff_vs_integral",
    ];

    let serialized = serde_json::to_string(&report).expect("report serializes");
    let mut passed = true;
    let mut magnitudes = String::new();
    for name in diagnostic_names {
        let check = report
            .checks
            .iter()
            .find(|check| check.check_name == name)
            .unwrap_or_else(|| panic!("missing diagnostic {name}"));
        passed &= check.diagnostic
            && check.passed // diagnostics never gate
            && check.tolerance.is_none()
            && check.max_abs.is_finite()
            && check.max_rel.is_finite()
            && check.max_abs > 0.0
            && serialized.contains(name);
        magnitudes.push_str(&format!("{name}: rel {:.3e}; ", check.max_rel));
    }
    conclude(
        6,
        "diagnostics computed, serialized, nonzero-safe",
        passed,
        magnitudes.trim_end_matches("; "),
    );
}

/// Criterion 7: zero charge produces *exactly* zero everywhere, and at
/// r = 1 (relativistic units) the reduced and constant-coefficient closed
/// forms coincide to machine precision.
#[test]
fn criterion_7_trivial_exactness() {
    const MACHINE_TOL: f64 = 1e-14;
    let cfg = AccuracyConfig::default();
    let zero_charge = PhysicalParams::new(0.0, FINE_STRUCTURE_ALPHA, UnitSystem::Relativistic)
        .expect("valid parameters");

    let mut all_zero = true;
    for &r in &[0.25, 1.0, 4.0] {
        for route in Route::ALL_POINTWISE {
            all_zero &= evaluate_route(route, r, &zero_charge, &cfg)
                .expect("route evaluates")
                .value
                == 0.0;
        }
        all_zero &=
            uehling_derivative_integral(r, &zero_charge, &cfg).expect("derivative") == 0.0;
        all_zero &= ode_rhs(r, &zero_charge).expect("right-hand side") == 0.0;
        all_zero &=
            ode_residual(Route::ClosedReduced, r, &zero_charge, &cfg).expect("residual") == 0.0;
    }
    let trajectory =
        solve_ivp(0.5, 0.0, 0.0, 5.0, 64, &zero_charge).expect("trajectory integrates");
    all_zero &= trajectory
        .points
        .iter()
        .all(|point| point.w == 0.0 && point.p == 0.0);

    let params = unit_params();
    let reduced = evaluate_route(Route::ClosedReduced, 1.0, &params, &cfg)
        .expect("reduced evaluates")
        .value;
    let constant_coeff = evaluate_route(Route::ConstantCoeff, 1.0, &params, &cfg)
        .expect("constant-coefficient evaluates")
        .value;
    let rel_at_one = relative_deviation(reduced, constant_coeff);

    let passed = all_zero && rel_at_one <= MACHINE_TOL;
    conclude(
        7,
        "zero-charge exactness and r = 1 coincidence",
        passed,
        &format!(
            "zero-charge outputs exactly zero: {all_zero}; reduced vs constant_coeff at r = 1: \
             relative {rel_at_one:.3e} (tolerance {MACHINE_TOL:.0e})"
        ),
    );
}

/// Criterion 8: `verify` is deterministic (byte-identical output for
/// identical flags) and honors the exit-code contract when a tolerance
/// override forces a failure.
#[test]
fn criterion_8_cli_determinism_and_exit_contract() {
    let exe = env!("CARGO_BIN_EXE_uehling");
    let run = |extra: &[&str]| {
        Command::new(exe)
            .args(["verify", "--grid-log", "2e-1:5:8"])
            .args(extra)
            .output()
            .expect("binary runs")
    };

    let first = run(&[]);
    let second = run(&[]);
    let json_first = run(&["--format", "json"]);
    let json_second = run(&["--format", "json"]);
    let forced_failure = run(&["--tol", "1e-30"]);

    let clean_exit = first.status.code() == Some(0) && json_first.status.code() == Some(0);
    let deterministic = first.stdout == second.stdout
        && json_first.stdout == json_second.stdout
        && !first.stdout.is_empty()
        && !json_first.stdout.is_empty();
    let forced_exit = forced_failure.status.code() == Some(1);

    let passed = clean_exit && deterministic && forced_exit;
    conclude(
        8,
        "CLI determinism and exit codes",
        passed,
        &format!(
            "clean exit 0: {clean_exit}; byte-identical csv+json reruns: {deterministic}; \
             --tol 1e-30 exits 1: {forced_exit}"
        ),
    );
}
