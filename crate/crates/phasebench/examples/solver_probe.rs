//! Timing probe for the ADMM solver on representative programs.

use phasebench::covariant::{coherent_a_matrix, phase_measurement_bound};
use phasebench::sdp::{
    assemble_mixed_sdp, assemble_pure_sdp, assemble_single_seed_sdp, solve_sdp, SolverOptions,
};
use phasebench::states::{coherent_state, gaussian_mixed, qubit_seed, GaussianKind};
use std::time::Instant;

fn run(label: &str, problem: &phasebench::sdp::SdpProblem, opts: &SolverOptions) {
    let t0 = Instant::now();
    match solve_sdp(problem, opts) {
        Ok(sol) => println!(
            "{label}: value {:.9} iters {} converged {} resid ({:.2e}, {:.2e}) in {:.2?}",
            sol.value,
            sol.iterations,
            sol.converged,
            sol.primal_residual,
            sol.dual_gap_estimate,
            t0.elapsed()
        ),
        Err(e) => println!("{label}: error {e}"),
    }
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(String::as_str).unwrap_or("all");
    let tol: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1e-7);
    let over_relax: f64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(1.6);
    let rho: f64 = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let opts = SolverOptions { tol, max_iters: 400_000, rho, over_relax };

    if which == "all" || which == "qubit" {
        let rho_s = qubit_seed(0.8, std::f64::consts::PI / 3.0);
        let asm = assemble_mixed_sdp(&rho_s);
        run("qubit mixed (0.8, pi/3)", &asm.problem, &opts);
        let expect = phasebench::qubit::qubit_benchmark(0.8, std::f64::consts::PI / 3.0).fidelity;
        println!("  closed form: {expect:.9}");
    }

    if which == "all" || which == "pure10" {
        let psi = coherent_state(1.0, 10).unwrap();
        let asm = assemble_pure_sdp(&psi);
        run("pure coherent alpha=1 N=10", &asm.problem, &opts);
        let a = coherent_a_matrix(1.0, 10);
        println!(
            "  phase bound: {:.9}",
            phase_measurement_bound(&a).unwrap().fidelity
        );
    }

    if which == "all" || which == "pure23" {
        let psi = coherent_state(2.0, 23).unwrap();
        let asm = assemble_pure_sdp(&psi);
        run("pure coherent alpha=2 N=23", &asm.problem, &opts);
        let a = coherent_a_matrix(2.0, 23);
        println!(
            "  phase bound: {:.9}",
            phase_measurement_bound(&a).unwrap().fidelity
        );
    }

    if which == "all" || which == "mixed" {
        let rho_s = gaussian_mixed(GaussianKind::Displaced, 2f64.sqrt(), 0.8, 12).unwrap();
        let asm = assemble_mixed_sdp(&rho_s);
        run("displaced thermal a2=2 mu=0.8 N=12", &asm.problem, &opts);
    }

    if which == "c10" {
        for n in [1usize, 2, 3] {
            let psi = coherent_state(0.8, n).unwrap();
            let blk = assemble_pure_sdp(&psi);
            run(&format!("block N={n}"), &blk.problem, &opts);
            let unstruct = phasebench::sdp::assemble_pure_sdp_unstructured(&psi);
            run(&format!("full  N={n}"), &unstruct.problem, &opts);
        }
    }

    if which == "all" || which == "single" {
        let rho_s = gaussian_mixed(GaussianKind::Displaced, 2f64.sqrt(), 0.8, 12).unwrap();
        let asm = assemble_single_seed_sdp(&rho_s);
        run("single-seed displaced thermal N=12", &asm.problem, &opts);
    }
}
