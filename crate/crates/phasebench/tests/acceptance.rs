//! The acceptance gate: one test per criterion, each printing its
//! pass/fail line. Run with `--nocapture` to see every line as it lands:
//!
//! ```text
//! cargo test -p phasebench --test acceptance -- --nocapture
//! ```

use std::sync::Mutex;

use phasebench::acceptance::run_criterion;

/// Criteria carry wall-clock budgets, so they must not compete for the
/// worker pool; this serializes them even when the harness runs tests on
/// multiple threads.
static GATE_LOCK: Mutex<()> = Mutex::new(());

fn gate(id: usize) {
    let _serial = GATE_LOCK.lock().unwrap_or_else(|poisoned| poisoned.into_inner());
    let report = run_criterion(id);
    println!("{}", report.line());
    assert!(report.passed, "{}", report.line());
}

#[test]
fn criterion_01_qubit_closed_form_vs_sdp_grid() {
    gate(1);
}

#[test]
fn criterion_02_equatorial_pure_qubit_anchor() {
    gate(2);
}

#[test]
fn criterion_03_coherent_sdp_phase_agreement() {
    gate(3);
}

#[test]
fn criterion_04_restricted_coherent_asymptote() {
    gate(4);
}

#[test]
fn criterion_05_unrestricted_asymptote_determinants() {
    gate(5);
}

#[test]
fn criterion_06_squeezed_restricted_limit() {
    gate(6);
}

#[test]
fn criterion_07_mixed_purity_monotonicity() {
    gate(7);
}

#[test]
fn criterion_08_bound_ordering_suite() {
    gate(8);
}

#[test]
fn criterion_09_kernel_axioms_randomized() {
    gate(9);
}

#[test]
fn criterion_10_block_structure_equivalence() {
    gate(10);
}
