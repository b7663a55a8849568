//! The cross-method acceptance gate: ten criteria, each with a pinned
//! tolerance, runnable as a library call (`selftest` in the CLI) or through
//! the dedicated integration-test target.
//!
//! Heavy sweeps (the coherent strategy programs, the mixed-state purity
//! scan) are computed once and shared between criteria through process-wide
//! caches; points within a sweep run in parallel, with output order fixed
//! by the axis index.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::RngExt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::covariant::{
    a_operator, asymptotic_limits, cp_determinant, phase_measurement_bound,
    phase_measurement_seed, restricted_guess_fidelity, unrestricted_asymptote_order,
    RestrictedFamily,
};
use crate::linalg::{
    fidelity, partial_transpose, FockOperator, FockVector, TwoModeOperator,
};
use crate::qubit::qubit_benchmark;
use crate::sdp::{
    assemble_mixed_sdp, assemble_pure_sdp, assemble_pure_sdp_unstructured,
    assemble_single_seed_sdp, solve_sdp, SolverOptions,
};
use crate::states::{coherent_state, gaussian_mixed, lambda_from_r, qubit_seed, GaussianKind};

pub const CRITERIA_COUNT: usize = 10;

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub wall: Duration,
}

impl CriterionReport {
    /// The one-line pass/fail form printed by the suite.
    pub fn line(&self) -> String {
        format!(
            "criterion {:2} [{}] {} — {} ({:.1?})",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.wall
        )
    }
}

// --- shared sweeps -----------------------------------------------------------

/// One coherent sweep point at the standard cutoff: the three methods.
#[derive(Debug, Clone, Copy)]
pub struct CoherentPoint {
    pub alpha_sq: f64,
    pub restricted: f64,
    pub phase_bound: f64,
    pub sdp_value: f64,
    pub sdp_seconds: f64,
}

const COHERENT_CUTOFF: usize = 23;
const COHERENT_SDP_TOL: f64 = 1.5e-5;
const MIXED_CUTOFF: usize = 12;
const MIXED_SDP_TOL: f64 = 2e-5;
/// The single-seed programs are smaller (no transpose variable), and their
/// reported value may overshoot the optimum by O(residual); they get a
/// tighter target so the criterion-8 ordering compares real gaps, not
/// opposing solver biases.
const SINGLE_SEED_SDP_TOL: f64 = 3e-6;
/// Ordering slack of criterion 8 / agreement slack of criterion 3.
const CV_AGREEMENT_TOL: f64 = 1e-4;

fn coherent_sweep() -> &'static Vec<CoherentPoint> {
    static CACHE: OnceLock<Vec<CoherentPoint>> = OnceLock::new();
    CACHE.get_or_init(|| {
        let alpha_sqs: Vec<f64> = std::iter::once(0.5)
            .chain((1..=10).map(|k| k as f64))
            .collect();
        alpha_sqs
            .par_iter()
            .map(|&alpha_sq| {
                let alpha = alpha_sq.sqrt();
                let seed = coherent_state(alpha, COHERENT_CUTOFF).expect("alpha >= 0");
                let xi = phase_measurement_seed(COHERENT_CUTOFF);
                let a = a_operator(&seed, &xi, 128).expect("bounded bandwidth");
                let phase_bound = phase_measurement_bound(&a).expect("Hermitian A").fidelity;
                let restricted = restricted_guess_fidelity(RestrictedFamily::Coherent { alpha })
                    .expect("convergent quadrature")
                    .fidelity;
                let t0 = Instant::now();
                let asm = assemble_pure_sdp(&seed);
                let sol = solve_sdp(&asm.problem, &SolverOptions::with_tol(COHERENT_SDP_TOL))
                    .expect("feasible program");
                CoherentPoint {
                    alpha_sq,
                    restricted,
                    phase_bound,
                    sdp_value: sol.value,
                    sdp_seconds: t0.elapsed().as_secs_f64(),
                }
            })
            .collect()
    })
}

/// One mixed sweep point: the strategy program and the single-seed
/// (phase-measurement) program at the same seed.
#[derive(Debug, Clone, Copy)]
pub struct MixedPoint {
    pub mu: f64,
    pub sdp_value: f64,
    pub single_seed_value: f64,
}

pub const PURITY_GRID: [f64; 4] = [1.0, 0.95, 0.8, 0.7];

fn mixed_sweep(kind: GaussianKind, param: f64) -> Vec<MixedPoint> {
    PURITY_GRID
        .par_iter()
        .map(|&mu| {
            let rho = gaussian_mixed(kind, param, mu, MIXED_CUTOFF).expect("valid parameters");
            let asm = assemble_mixed_sdp(&rho);
            let sol = solve_sdp(&asm.problem, &SolverOptions::with_tol(MIXED_SDP_TOL))
                .expect("feasible program");
            let single = assemble_single_seed_sdp(&rho);
            let single_sol =
                solve_sdp(&single.problem, &SolverOptions::with_tol(SINGLE_SEED_SDP_TOL))
                    .expect("feasible program");
            MixedPoint {
                mu,
                sdp_value: sol.value,
                single_seed_value: single_sol.value,
            }
        })
        .collect()
}

fn displaced_sweep() -> &'static Vec<MixedPoint> {
    static CACHE: OnceLock<Vec<MixedPoint>> = OnceLock::new();
    CACHE.get_or_init(|| mixed_sweep(GaussianKind::Displaced, 2f64.sqrt()))
}

fn squeezed_thermal_sweep() -> &'static Vec<MixedPoint> {
    static CACHE: OnceLock<Vec<MixedPoint>> = OnceLock::new();
    CACHE.get_or_init(|| mixed_sweep(GaussianKind::Squeezed, 0.5))
}

// --- criteria ---------------------------------------------------------------

fn criterion_1() -> (bool, String) {
    let start = Instant::now();
    let grid: Vec<(f64, f64)> = (1..=10)
        .flat_map(|i| {
            (1..=9).map(move |j| {
                (
                    i as f64 / 10.0,
                    j as f64 / 10.0 * std::f64::consts::FRAC_PI_2,
                )
            })
        })
        .collect();
    let worst = grid
        .par_iter()
        .map(|&(eta, theta)| {
            let analytic = qubit_benchmark(eta, theta).fidelity;
            let asm = assemble_mixed_sdp(&qubit_seed(eta, theta));
            let sol = solve_sdp(&asm.problem, &SolverOptions::with_tol(3e-8))
                .expect("qubit program is feasible");
            (analytic - sol.value).abs()
        })
        .reduce(|| 0.0, f64::max);
    let elapsed = start.elapsed();
    let passed = worst <= 1e-6 && elapsed <= Duration::from_secs(10);
    (
        passed,
        format!(
            "max |closed form - SDP| = {worst:.2e} over 90 grid points in {elapsed:.2?} (limits: 1e-6, 10 s)"
        ),
    )
}

fn criterion_2() -> (bool, String) {
    let closed = qubit_benchmark(1.0, std::f64::consts::FRAC_PI_2).fidelity;
    let seed = FockVector::from_real(&[1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt()], 0.0);
    let a = a_operator(&seed, &phase_measurement_seed(1), 4).expect("4-node exactness");
    let spectral = phase_measurement_bound(&a).expect("2x2").fidelity;
    let passed = (closed - 0.75).abs() <= 1e-10 && (spectral - 0.75).abs() <= 1e-10;
    (
        passed,
        format!("closed form {closed:.12}, spectral oracle {spectral:.12} (target 0.75 ± 1e-10)"),
    )
}

fn criterion_3() -> (bool, String) {
    let sweep = coherent_sweep();
    let mut worst = 0.0f64;
    let mut slowest = 0.0f64;
    for p in sweep {
        worst = worst.max((p.sdp_value - p.phase_bound).abs());
        slowest = slowest.max(p.sdp_seconds);
    }
    let passed = worst <= CV_AGREEMENT_TOL && slowest <= 300.0;
    (
        passed,
        format!(
            "max |F^Γ - phase bound| = {worst:.2e} over α² ∈ {{0.5, 1..10}} at N=23; slowest solve {slowest:.1} s (limits: 1e-4, 300 s)"
        ),
    )
}

fn criterion_4() -> (bool, String) {
    let start = Instant::now();
    let f = restricted_guess_fidelity(RestrictedFamily::Coherent {
        alpha: 200f64.sqrt(),
    })
    .expect("convergent quadrature")
    .fidelity;
    let target = (2.0f64 / 3.0).sqrt();
    let elapsed = start.elapsed();
    let passed = (f - target).abs() <= 1e-2 && elapsed <= Duration::from_secs(10);
    (
        passed,
        format!("quadrature {f:.6} vs √(2/3) = {target:.6} in {elapsed:.2?} (limits: 1e-2, 10 s)"),
    )
}

fn criterion_5() -> (bool, String) {
    let d2 = cp_determinant(2);
    let d3 = cp_determinant(3);
    let f100 = unrestricted_asymptote_order(100);
    let det2_ok = (d2.explicit.unwrap() - 32.0).abs() < 1e-9;
    let det3_ok = (d3.explicit.unwrap() - 196.0).abs() < 1e-9;
    let asym_ok = (f100 - 0.82843).abs() <= 1e-3;
    (
        det2_ok && det3_ok && asym_ok,
        format!(
            "det C₂ = {} (32), det C₃ = {} (196), 2·det(C₁₀₀)^(-1/200) = {f100:.5} (0.82843 ± 1e-3)",
            d2.explicit.unwrap(),
            d3.explicit.unwrap()
        ),
    )
}

fn criterion_6() -> (bool, String) {
    let lim = asymptotic_limits().expect("convergent quadratures");
    let passed = (lim.restricted_squeezed - 0.58).abs() <= 0.01 && !lim.low_confidence;
    (
        passed,
        format!(
            "extrapolated λ→1 limit {:.4} ± {:.4} from {:?} (target 0.58 ± 0.01)",
            lim.restricted_squeezed, lim.restricted_squeezed_uncertainty, lim.squeezed_sequence
        ),
    )
}

fn criterion_7() -> (bool, String) {
    // Margin above combined solver noise; the physical steps are ~1e-2.
    let margin = 1e-4;
    let mut ok = true;
    let mut details = Vec::new();
    for (label, sweep) in [
        ("displaced α²=2", displaced_sweep()),
        ("squeezed r=0.5", squeezed_thermal_sweep()),
    ] {
        let values: Vec<f64> = sweep.iter().map(|p| p.sdp_value).collect();
        for w in values.windows(2) {
            // purity grid descends, so fidelity must strictly rise
            if w[1] <= w[0] + margin {
                ok = false;
            }
        }
        details.push(format!("{label}: {values:?}"));
    }
    (
        ok,
        format!("F^Γ along μ = {PURITY_GRID:?}: {}", details.join("; ")),
    )
}

fn criterion_8() -> (bool, String) {
    let mut ok = true;
    let mut notes = Vec::new();

    // coherent sweep: restricted ≤ phase ≤ SDP + tol, and the visible gap
    let mut min_gap = f64::INFINITY;
    for p in coherent_sweep() {
        if p.restricted > p.phase_bound + 1e-9 {
            ok = false;
            notes.push(format!("restricted > phase at α² = {}", p.alpha_sq));
        }
        if p.phase_bound > p.sdp_value + CV_AGREEMENT_TOL {
            ok = false;
            notes.push(format!("phase > SDP + tol at α² = {}", p.alpha_sq));
        }
        if p.alpha_sq >= 1.0 {
            min_gap = min_gap.min(p.phase_bound - p.restricted);
        }
    }
    if min_gap < 0.005 {
        ok = false;
        notes.push(format!("coherent gap {min_gap:.4} < 0.005"));
    }

    // mixed sweeps: single-seed value is a restricted strategy, so it must
    // stay below the program value up to tolerance
    for (label, sweep) in [
        ("displaced", displaced_sweep()),
        ("squeezed", squeezed_thermal_sweep()),
    ] {
        for p in sweep {
            if p.single_seed_value > p.sdp_value + CV_AGREEMENT_TOL {
                ok = false;
                notes.push(format!("{label} μ={}: phase > SDP + tol", p.mu));
            }
        }
    }

    // at the pure (μ = 1) edge of criterion 7's sweeps the in-family guess
    // is defined; it must sit below the single-seed bound
    let restricted_coh = restricted_guess_fidelity(RestrictedFamily::Coherent {
        alpha: 2f64.sqrt(),
    })
    .expect("convergent")
    .fidelity;
    let restricted_sq = restricted_guess_fidelity(RestrictedFamily::Squeezed {
        lambda: lambda_from_r(0.5),
    })
    .expect("convergent")
    .fidelity;
    let displaced_pure = displaced_sweep()[0];
    let squeezed_pure = squeezed_thermal_sweep()[0];
    if restricted_coh > displaced_pure.single_seed_value + CV_AGREEMENT_TOL {
        ok = false;
        notes.push("restricted > phase at displaced μ=1".to_string());
    }
    if restricted_sq > squeezed_pure.single_seed_value + CV_AGREEMENT_TOL {
        ok = false;
        notes.push("restricted > phase at squeezed μ=1".to_string());
    }

    let detail = if notes.is_empty() {
        format!("ordering holds at all sweep points; min coherent gap {min_gap:.4} (≥ 0.005)")
    } else {
        notes.join("; ")
    };
    (ok, detail)
}

fn criterion_9() -> (bool, String) {
    let tol = crate::linalg::tol::KERNEL_AXIOMS;
    let mut rng = ChaCha8Rng::seed_from_u64(20260808);
    let mut worst = 0.0f64;
    let mut failures = 0usize;
    let mut check = |dev: f64| {
        worst = worst.max(dev);
        if dev > tol {
            failures += 1;
        }
    };

    let random_density = |rng: &mut ChaCha8Rng, dim: usize| {
        let g = DMatrix::from_fn(dim, dim, |_, _| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let p = &g * g.adjoint();
        let tr: C64 = p.diagonal().iter().sum();
        FockOperator::new(p.unscale(tr.re), 0.0)
    };
    let random_unitary = |rng: &mut ChaCha8Rng, dim: usize| {
        let g = DMatrix::from_fn(dim, dim, |_, _| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        g.qr().q()
    };

    for _ in 0..1000 {
        let dim = rng.random_range(2..8);
        let rho = random_density(&mut rng, dim);
        let sig = random_density(&mut rng, dim);
        let fab = fidelity(&rho, &sig).expect("valid densities");
        let fba = fidelity(&sig, &rho).expect("valid densities");
        check((fab - fba).abs());
    }
    for _ in 0..1000 {
        let dim = rng.random_range(2..8);
        let rho = random_density(&mut rng, dim);
        let sig = random_density(&mut rng, dim);
        let u = random_unitary(&mut rng, dim);
        let f = fidelity(&rho, &sig).expect("valid");
        let ru = FockOperator::new(&u * rho.matrix() * u.adjoint(), 0.0).hermitized();
        let su = FockOperator::new(&u * sig.matrix() * u.adjoint(), 0.0).hermitized();
        let fu = fidelity(&ru, &su).expect("valid");
        check((f - fu).abs());
    }
    for _ in 0..1000 {
        let dim = rng.random_range(2..8);
        let rho = random_density(&mut rng, dim);
        check((fidelity(&rho, &rho).expect("valid") - 1.0).abs());
    }
    for _ in 0..1000 {
        let dim = rng.random_range(2..8);
        let mut a: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let na: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        a.iter_mut().for_each(|z| *z /= na);
        let mut b: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let nb: f64 = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        b.iter_mut().for_each(|z| *z /= nb);
        let va = FockVector::new(a, 0.0);
        let vb = FockVector::new(b, 0.0);
        let overlap = va.dot(&vb).norm_sqr();
        let f = fidelity(&va.outer(), &vb.outer()).expect("pure projectors");
        check((f - overlap).abs());
    }
    for _ in 0..1000 {
        let da = rng.random_range(2..4);
        let db = rng.random_range(2..4);
        let m = DMatrix::from_fn(da * db, da * db, |_, _| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let op = TwoModeOperator::new(da, db, m).expect("square");
        let back = partial_transpose(&partial_transpose(&op));
        let dev = (back.matrix() - op.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0f64, f64::max);
        check(dev);
    }

    (
        failures == 0,
        format!("5 axioms × 1000 randomized instances, worst deviation {worst:.2e} (tol 1e-9), {failures} failures"),
    )
}

fn criterion_10() -> (bool, String) {
    let mut worst = 0.0f64;
    for n in [1usize, 2, 3] {
        let psi = coherent_state(0.8, n).expect("alpha >= 0");
        let block = assemble_pure_sdp(&psi);
        let block_sol = solve_sdp(&block.problem, &SolverOptions::with_tol(2e-7))
            .expect("feasible");
        let full = assemble_pure_sdp_unstructured(&psi);
        let full_sol = solve_sdp(&full.problem, &SolverOptions::with_tol(2e-7))
            .expect("feasible");
        worst = worst.max((block_sol.value - full_sol.value).abs());
    }
    (
        worst <= 1e-6,
        format!("max |block - unstructured| = {worst:.2e} over N ∈ {{1,2,3}} (tol 1e-6)"),
    )
}

/// Run one criterion (1-based id).
pub fn run_criterion(id: usize) -> CriterionReport {
    let names: [&'static str; CRITERIA_COUNT] = [
        "qubit closed form vs SDP grid",
        "equatorial pure qubit anchor",
        "coherent SDP / phase-measurement agreement",
        "restricted coherent asymptote",
        "unrestricted asymptote determinants",
        "squeezed restricted limit",
        "mixed-state purity monotonicity",
        "bound-ordering property suite",
        "kernel axioms, randomized",
        "block-structure equivalence",
    ];
    let t0 = Instant::now();
    let (passed, detail) = match id {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(),
        7 => criterion_7(),
        8 => criterion_8(),
        9 => criterion_9(),
        10 => criterion_10(),
        _ => panic!("criterion id must be 1..=10"),
    };
    CriterionReport {
        id,
        name: names[id - 1],
        passed,
        detail,
        wall: t0.elapsed(),
    }
}

/// Run the whole gate in order, printing one line per criterion.
pub fn run_all(print: bool) -> Vec<CriterionReport> {
    (1..=CRITERIA_COUNT)
        .map(|id| {
            let report = run_criterion(id);
            if print {
                println!("{}", report.line());
            }
            report
        })
        .collect()
}
