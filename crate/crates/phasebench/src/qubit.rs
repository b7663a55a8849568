//! Closed-form benchmark for phase-covariant qubit families.
//!
//! The seed is a Bloch vector of length η at polar angle θ; the family is
//! its orbit under rotations about z. The best measure-and-prepare strategy
//! is a covariant POVM whose guess points at a polar angle ζ that generally
//! differs from θ, and the strategy operator is block diagonal over total
//! excitation: `K = blockdiag(a, B, c)` with `a = cos²(ζ/2)`,
//! `c = sin²(ζ/2)`, and `B₁₂ = √(ac)`, sitting on the boundary of the
//! positivity domain of the partial transpose.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::sdp::TwoModeBlockOperator;

/// Closed-form solution at one `(η, θ)` point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitBenchmark {
    pub eta: f64,
    pub theta: f64,
    /// Polar angle of the optimal pure guess.
    pub zeta: f64,
    /// Best measure-and-prepare fidelity, in `[1/2, 1]`.
    pub fidelity: f64,
    /// Strategy blocks `(a, B, c)` over total excitation 0, 1, 2.
    pub k_blocks: (f64, [[f64; 2]; 2], f64),
}

fn zeta_parts(eta: f64, theta: f64) -> (f64, f64) {
    let s2 = eta * eta * theta.sin().powi(2);
    let numerator = s2 + ((1.0 - eta * eta) * (4.0 - s2)).max(0.0).sqrt();
    let denominator = 2.0 * eta * theta.cos();
    (numerator, denominator)
}

/// Guess angle ζ via the two-argument arctangent, mapped to `[0, π]`.
///
/// The numerator is non-negative, so this branch keeps ζ (and the
/// benchmark) continuous across θ = π/2, where the one-argument form is
/// singular. η = 0 or θ = π/2 give ζ = π/2.
pub fn zeta_angle(eta: f64, theta: f64) -> f64 {
    let (num, den) = zeta_parts(eta, theta);
    if num == 0.0 && den >= 0.0 {
        return 0.0;
    }
    num.atan2(den)
}

/// Benchmark fidelity `F = (1 + η cosθ / cos ζ)/2`.
///
/// `η cosθ / cos ζ` equals `√(num² + den²)/2` identically for the ζ above,
/// which evaluates the removable singularities (θ = π/2, η = 0, θ = 0)
/// without case analysis.
pub fn qubit_benchmark(eta: f64, theta: f64) -> QubitBenchmark {
    let zeta = zeta_angle(eta, theta);
    let (num, den) = zeta_parts(eta, theta);
    let fidelity = 0.5 * (1.0 + num.hypot(den) / 2.0);
    let a = (zeta / 2.0).cos().powi(2);
    let c = (zeta / 2.0).sin().powi(2);
    let b12 = (a * c).sqrt();
    QubitBenchmark {
        eta,
        theta,
        zeta,
        fidelity: fidelity.min(1.0),
        k_blocks: (a, [[1.0 - a, b12], [b12, 1.0 - c]], c),
    }
}

/// The optimal strategy operator as a block operator on the 2 ⊗ 2 space.
///
/// Feasible for the benchmark program (PSD, PPT with `ac - B₁₂² = 0`
/// exactly, unit partial trace), with objective equal to
/// [`qubit_benchmark`]'s fidelity.
pub fn optimal_qubit_k(eta: f64, theta: f64) -> TwoModeBlockOperator {
    let bench = qubit_benchmark(eta, theta);
    let (a, b, c) = bench.k_blocks;
    let blocks = vec![
        DMatrix::from_row_slice(1, 1, &[C64::new(a, 0.0)]),
        DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(b[0][0], 0.0),
                C64::new(b[0][1], 0.0),
                C64::new(b[1][0], 0.0),
                C64::new(b[1][1], 0.0),
            ],
        ),
        DMatrix::from_row_slice(1, 1, &[C64::new(c, 0.0)]),
    ];
    TwoModeBlockOperator::new(1, blocks).expect("2x2 block layout")
}
