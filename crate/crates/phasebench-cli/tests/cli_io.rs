//! End-to-end sweep runs at desk scale: determinism, ordering across
//! methods, and the serialization contract.

use phasebench::report::{CutoffPolicy, EvalOptions, Method};
use phasebench_cli::{
    parse_results_json, run_sweep, serialize_results, FamilyKind, Format, SweepConfig,
};

fn small_eval() -> EvalOptions {
    EvalOptions {
        sdp_tol_large: 3e-5,
        ..Default::default()
    }
}

#[test]
fn qubit_sweep_pairs_analytic_with_sdp() {
    let mut config = SweepConfig::defaults(FamilyKind::Qubit);
    config.points = 5;
    config.from = 0.2;
    config.to = 1.0;
    let outcome = run_sweep(&config).unwrap();
    assert!(outcome.failures.is_empty());
    assert_eq!(outcome.results.len(), 10);
    for pair in outcome.results.chunks(2) {
        assert_eq!(pair[0].method, Method::Analytic);
        assert_eq!(pair[1].method, Method::Sdp);
        assert_eq!(pair[0].param_value, pair[1].param_value);
        assert!(
            (pair[0].fidelity - pair[1].fidelity).abs() < 1e-6,
            "analytic {} vs sdp {} at eta {}",
            pair[0].fidelity,
            pair[1].fidelity,
            pair[0].param_value
        );
    }
}

#[test]
fn coherent_origin_scores_one_for_all_methods() {
    let mut config = SweepConfig::defaults(FamilyKind::Coherent);
    config.points = 2;
    config.from = 0.0;
    config.to = 1.0;
    config.cutoff = CutoffPolicy::Fixed(10);
    config.eval = small_eval();
    let outcome = run_sweep(&config).unwrap();
    assert!(outcome.failures.is_empty());
    for r in outcome.results.iter().filter(|r| r.param_value == 0.0) {
        assert!(
            (r.fidelity - 1.0).abs() < 1e-4,
            "{} at origin: {}",
            r.method,
            r.fidelity
        );
    }
    // ordering at the interior point
    let interior: Vec<_> = outcome
        .results
        .iter()
        .filter(|r| r.param_value == 1.0)
        .collect();
    let get = |m: Method| {
        interior
            .iter()
            .find(|r| r.method == m)
            .map(|r| r.fidelity)
            .unwrap()
    };
    assert!(get(Method::RestrictedGuess) <= get(Method::PhaseMeasurement) + 1e-9);
    assert!(get(Method::PhaseMeasurement) <= get(Method::Sdp) + 1e-4);
}

#[test]
fn reruns_are_identical_modulo_wall_time() {
    let mut config = SweepConfig::defaults(FamilyKind::SqueezedVacuum);
    config.points = 3;
    config.from = 0.0;
    config.to = 0.4;
    config.cutoff = CutoffPolicy::Fixed(10);
    config.methods = vec![Method::PhaseMeasurement, Method::RestrictedGuess];
    let a = run_sweep(&config).unwrap();
    let b = run_sweep(&config).unwrap();
    assert_eq!(a.results.len(), b.results.len());
    for (x, y) in a.results.iter().zip(b.results.iter()) {
        let mut x = x.clone();
        let mut y = y.clone();
        x.wall_ms = 0.0;
        y.wall_ms = 0.0;
        assert_eq!(x, y);
    }
}

#[test]
fn csv_and_json_forms_agree() {
    let mut config = SweepConfig::defaults(FamilyKind::SqueezedVacuum);
    config.points = 2;
    config.from = 0.0;
    config.to = 0.3;
    config.cutoff = CutoffPolicy::Fixed(8);
    config.methods = vec![Method::RestrictedGuess];
    let outcome = run_sweep(&config).unwrap();

    let csv = String::from_utf8(serialize_results(&outcome.results, Format::Csv)).unwrap();
    assert_eq!(csv.lines().count(), outcome.results.len() + 1);

    let json = serialize_results(&outcome.results, Format::Json);
    let parsed = parse_results_json(&json).unwrap();
    assert_eq!(parsed, outcome.results);
    assert_eq!(serialize_results(&parsed, Format::Json), json);
}

#[test]
fn thermal_sweep_orders_by_purity() {
    // one displaced-thermal point, all four purities: lower purity, higher
    // threshold
    let mut config = SweepConfig::defaults(FamilyKind::DisplacedThermal);
    config.points = 1;
    config.from = 2.0;
    config.to = 2.0;
    config.cutoff = CutoffPolicy::Fixed(10);
    config.eval = small_eval();
    let outcome = run_sweep(&config).unwrap();
    assert!(outcome.failures.is_empty(), "{:?}", outcome.failures);
    let fids: Vec<f64> = outcome.results.iter().map(|r| r.fidelity).collect();
    assert_eq!(fids.len(), 4);
    for w in fids.windows(2) {
        assert!(w[1] > w[0], "purity ordering violated: {fids:?}");
    }
}
