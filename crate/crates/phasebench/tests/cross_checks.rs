//! Cross-module consistency checks that pair independent computation
//! routes: the closed qubit form against the strategy program, the
//! phase-measurement program against the spectral bound, and the solved
//! strategy pushed back through the channel definition.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use phasebench::covariant::{
    a_operator, phase_measurement_bound, phase_measurement_seed,
};
use phasebench::linalg::{
    fidelity, partial_trace, tensor_product, FockOperator, Side, TwoModeOperator,
};
use phasebench::qubit::{optimal_qubit_k, qubit_benchmark};
use phasebench::sdp::{
    assemble_mixed_sdp, assemble_single_seed_sdp, solve_sdp, validate_feasibility, SolverOptions,
};
use phasebench::states::{qubit_seed, squeezed_vacuum, FamilySpec};
use std::f64::consts::PI;

#[test]
fn qubit_point_sdp_oracle() {
    // the closed form at one interior point against the full program
    let (eta, theta) = (0.8, PI / 3.0);
    let expect = qubit_benchmark(eta, theta).fidelity;
    let asm = assemble_mixed_sdp(&qubit_seed(eta, theta));
    let sol = solve_sdp(&asm.problem, &SolverOptions::with_tol(3e-8)).unwrap();
    assert!(sol.converged);
    assert!(
        (sol.value - expect).abs() < 1e-6,
        "SDP {} vs closed form {expect}",
        sol.value
    );
}

#[test]
fn optimal_qubit_k_validates_and_reproduces_value() {
    for (eta, theta) in [(0.8, PI / 3.0), (0.5, 1.2), (1.0, PI / 2.0)] {
        let k = optimal_qubit_k(eta, theta).embed();
        let report = validate_feasibility(&k, 1e-10);
        assert!(report.feasible(), "{report:?}");

        let rho = qubit_seed(eta, theta);
        let lifted = tensor_product(&rho, &FockOperator::identity(1));
        let prod = TwoModeOperator::new(2, 2, lifted.matrix() * k.matrix()).unwrap();
        let rho_av = partial_trace(&prod, Side::A).hermitized();
        let f = fidelity(&rho, &rho_av.sanitized_density(1e-9).unwrap()).unwrap();
        let expect = qubit_benchmark(eta, theta).fidelity;
        assert!(
            (f - expect).abs() < 1e-10,
            "round trip {f} vs closed form {expect} at ({eta}, {theta})"
        );
    }
}

#[test]
fn single_seed_program_matches_spectral_bound_on_squeezed_seed() {
    // For a pure seed the guess-restricted program must reproduce the top
    // eigenvalue of A; run it on the squeezed family where the seed has
    // nontrivial sign structure.
    let n = 14;
    let seed = squeezed_vacuum(0.45, n).unwrap();
    let a = a_operator(&seed, &phase_measurement_seed(n), 128).unwrap();
    let bound = phase_measurement_bound(&a).unwrap().fidelity;

    let asm = assemble_single_seed_sdp(&seed.outer());
    let sol = solve_sdp(&asm.problem, &SolverOptions::with_tol(1e-7)).unwrap();
    assert!(sol.converged);
    assert!(
        (sol.value - bound).abs() < 1e-5,
        "program {} vs spectral {bound}",
        sol.value
    );
}

#[test]
fn solved_strategy_round_trips_through_channel() {
    // Solve the pure program, embed K, build the channel output, and
    // recompute the fidelity from the definition.
    let psi = phasebench::states::coherent_state(0.9, 9).unwrap();
    let asm = phasebench::sdp::assemble_pure_sdp(&psi);
    let sol = solve_sdp(&asm.problem, &SolverOptions::with_tol(1e-5)).unwrap();
    assert!(sol.converged);
    let k = asm.k_block_operator(&sol).embed();

    let report = validate_feasibility(&k, 1e-4);
    assert!(report.feasible(), "{report:?}");

    let rho = psi.outer();
    let dim = psi.dim();
    let lifted = tensor_product(&rho, &FockOperator::identity(dim - 1));
    let prod = TwoModeOperator::new(dim, dim, lifted.matrix() * k.matrix()).unwrap();
    let rho_av = partial_trace(&prod, Side::A).hermitized();
    let f = fidelity(
        &rho.sanitized_density(1e-5).unwrap(),
        &rho_av.sanitized_density(1e-4).unwrap(),
    )
    .unwrap();
    assert!(
        (f - sol.value).abs() < 1e-4,
        "channel round trip {f} vs objective {}",
        sol.value
    );
}

#[test]
fn problem_serialization_survives_solve() {
    // serialize → parse → solve must give the identical value
    let psi = phasebench::states::coherent_state(0.7, 4).unwrap();
    let asm = phasebench::sdp::assemble_pure_sdp(&psi);
    let text = asm.problem.to_json();
    let back = phasebench::sdp::SdpProblem::from_json(&text).unwrap();
    let opts = SolverOptions::with_tol(1e-7);
    let a = solve_sdp(&asm.problem, &opts).unwrap();
    let b = solve_sdp(&back, &opts).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.iterations, b.iterations);
}

#[test]
fn family_enum_dispatch_matches_direct_constructors() {
    let spec = FamilySpec::SqueezedVacuum { lambda: 0.3 };
    match phasebench::states::seed_state(&spec, 12).unwrap() {
        phasebench::states::SeedState::Pure(v) => {
            let direct = squeezed_vacuum(0.3, 12).unwrap();
            for i in 0..=12 {
                assert_eq!(v.amp(i), direct.amp(i));
            }
        }
        _ => panic!("squeezed vacuum is pure"),
    }
}

#[test]
fn mixed_program_value_is_uhlmann_fidelity_at_fixed_k() {
    // Freeze the strategy at the product point K = 1 ⊗ ρ̄ and check that
    // the σ-lifted inner program reproduces F(ρ, ρ̄) computed by the
    // kernel: the lifting is exact, not just an upper bound.
    let rho = phasebench::states::gaussian_mixed(
        phasebench::states::GaussianKind::Displaced,
        0.9,
        0.8,
        8,
    )
    .unwrap();
    let trace = rho.trace_re();
    let rho_n = FockOperator::new(rho.matrix().unscale(trace), 0.0).hermitized();

    // phase-averaged seed: the diagonal
    let dim = rho_n.dim();
    let mut diag = DMatrix::<C64>::zeros(dim, dim);
    for i in 0..dim {
        diag[(i, i)] = rho_n.matrix()[(i, i)];
    }
    let rho_bar = FockOperator::new(diag, 0.0);
    let expect = fidelity(&rho_n, &rho_bar).unwrap();

    // the single-seed program with the guess pinned to ρ̄ by extra rows
    let mut asm = assemble_single_seed_sdp(&rho_n);
    for b in 0..dim {
        for bp in b..dim {
            let want = rho_bar.entry(b, bp);
            asm.problem.add_complex_eq(
                &[(asm.guess_var, b, bp, C64::new(1.0, 0.0))],
                want,
            );
        }
    }
    // A Fock-diagonal guess makes the single-seed channel output ρ̄ itself:
    // each diagonal weight multiplies the full diagonal sum of the seed.
    let sol = solve_sdp(&asm.problem, &SolverOptions::with_tol(1e-7)).unwrap();
    assert!(sol.converged);
    assert!(
        (sol.value - expect).abs() < 1e-5,
        "lifted {} vs kernel fidelity {expect}",
        sol.value
    );
}
