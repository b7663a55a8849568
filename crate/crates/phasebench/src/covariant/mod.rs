//! Single-seed (phase-measurement) benchmark bounds.
//!
//! For a pure phase-covariant family and a fixed covariant POVM seed, the
//! best achievable average fidelity is the largest eigenvalue of
//! `A = ∫ dφ/2π |⟨ξ|ψ_φ⟩|² |ψ_φ⟩⟨ψ_φ|`, attained by its top eigenvector as
//! the guess. This module assembles A two ways (closed form for coherent
//! seeds, spectrally accurate uniform quadrature in general), evaluates the
//! restricted strategy whose guess must stay inside the family, and pins
//! the three large-parameter limits the benchmarks approach.

pub mod cp;
mod fft;

pub use cp::{cp_determinant, cp_matrix, unrestricted_asymptote_order, CpDeterminant};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::linalg::{hermitian_eig, FockOperator, FockVector, LinalgError};

/// Node cap for the doubling quadrature in [`a_operator`].
pub const NODE_CAP: usize = 1 << 16;
/// Entrywise convergence target for A-operator quadrature.
pub const A_QUADRATURE_TOL: f64 = 1e-9;
/// Relative convergence target for restricted-guess quadratures.
pub const RESTRICTED_QUAD_TOL: f64 = 1e-8;
/// Grid cap for restricted-guess quadratures (the λ → 1 regime needs
/// bandwidth proportional to 1/(1-λ)).
pub const RESTRICTED_NODE_CAP: usize = 1 << 22;
/// Eigenvalue gap below which the top of the A spectrum counts as
/// degenerate.
pub const DEGENERACY_GAP: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum CovariantError {
    #[error("quadrature did not converge at {nodes} nodes (residual {residual:.3e})")]
    QuadratureNotConverged { nodes: usize, residual: f64 },
    #[error("nodes must be a power of two, at least 4 (got {got})")]
    BadNodeCount { got: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, CovariantError>;

/// How an [`AOperator`] was assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assembly {
    ClosedForm,
    Quadrature,
}

/// The measurement-averaged operator whose top eigenvalue is the
/// single-seed benchmark.
#[derive(Debug, Clone)]
pub struct AOperator {
    pub matrix: FockOperator,
    pub quadrature_nodes: usize,
    pub assembly: Assembly,
    /// Entrywise assembly error estimate (series tail or last refinement).
    pub est_error: f64,
}

/// Closed-form A for a coherent family at real amplitude α:
/// `A = e^{-2α²} Σ_n α^{2n}/n! |φ_n⟩⟨φ_n|`, `|φ_n⟩ = Σ_l √binom(n,l) |l⟩`,
/// truncated to the `(N+1)²` corner.
pub fn coherent_a_matrix(alpha: f64, cutoff: usize) -> AOperator {
    assert!(alpha >= 0.0, "alpha must be non-negative");
    let dim = cutoff + 1;
    let mut a = DMatrix::<f64>::zeros(dim, dim);
    let x = 2.0 * alpha * alpha;
    // t_n = e^{-2α²} α^{2n}/n!; contribution magnitude bounded by t_n 2ⁿ
    let mut t = (-x).exp();
    let mut weighted = t; // t_n · 2ⁿ
    let mut b = vec![0.0f64; dim];
    let mut n = 0usize;
    let tail = loop {
        let top = n.min(cutoff);
        b[0] = 1.0;
        for l in 0..top {
            b[l + 1] = b[l] * ((n - l) as f64 / (l + 1) as f64).sqrt();
        }
        for l in 0..=top {
            let tb = t * b[l];
            for lp in 0..=top {
                a[(l, lp)] += tb * b[lp];
            }
        }
        // geometric tail bound once the Poisson-like terms decay
        let q = x / (n + 2) as f64;
        if q < 0.5 {
            let bound = weighted * q * 2.0 / (1.0 - q);
            if bound < 1e-16 {
                break bound;
            }
        }
        n += 1;
        t *= alpha * alpha / n as f64;
        weighted = t * 2f64.powi(n as i32);
    };
    let mat = DMatrix::from_fn(dim, dim, |i, j| C64::new(a[(i, j)], 0.0));
    AOperator {
        matrix: FockOperator::new(mat, 0.0),
        quadrature_nodes: 0,
        assembly: Assembly::ClosedForm,
        est_error: tail,
    }
}

fn a_operator_at_nodes(seed: &FockVector, xi: &FockVector, nodes: usize) -> DMatrix<C64> {
    let dim = seed.dim();
    let mut acc = DMatrix::<C64>::zeros(dim, dim);
    for j in 0..nodes {
        let phi = 2.0 * std::f64::consts::PI * j as f64 / nodes as f64;
        let psi = seed.phase_rotated(phi);
        let overlap = xi.dot(&psi);
        let w = overlap.norm_sqr();
        for r in 0..dim {
            let wr = psi.amp(r) * w;
            for c in 0..dim {
                acc[(r, c)] += wr * psi.amp(c).conj();
            }
        }
    }
    acc.unscale(nodes as f64)
}

/// General A-operator assembly by uniform quadrature with node doubling.
///
/// The integrand is a trigonometric polynomial of bounded degree, so the
/// uniform rule is exact once the node count clears the bandwidth; the
/// doubling loop stops when successive refinements agree entrywise.
pub fn a_operator(seed: &FockVector, xi: &FockVector, nodes: usize) -> Result<AOperator> {
    if nodes < 4 || !nodes.is_power_of_two() {
        return Err(CovariantError::BadNodeCount { got: nodes });
    }
    let mut m = nodes;
    let mut prev = a_operator_at_nodes(seed, xi, m);
    loop {
        let next = a_operator_at_nodes(seed, xi, 2 * m);
        let change = (&next - &prev)
            .iter()
            .map(|z| z.norm())
            .fold(0.0f64, f64::max);
        if change < A_QUADRATURE_TOL {
            let herm = FockOperator::new(next, 0.0).hermitized();
            return Ok(AOperator {
                matrix: herm,
                quadrature_nodes: 2 * m,
                assembly: Assembly::Quadrature,
                est_error: change,
            });
        }
        m *= 2;
        if 2 * m > NODE_CAP {
            return Err(CovariantError::QuadratureNotConverged {
                nodes: m,
                residual: change,
            });
        }
        prev = next;
    }
}

/// Top of the A spectrum: the single-seed fidelity bound and its optimal
/// guess.
#[derive(Debug, Clone)]
pub struct PhaseMeasurementBound {
    pub fidelity: f64,
    pub guess: FockVector,
    /// Top eigenvalue closer than [`DEGENERACY_GAP`] to the next one.
    pub degenerate: bool,
}

pub fn phase_measurement_bound(a: &AOperator) -> Result<PhaseMeasurementBound> {
    let eig = hermitian_eig(&a.matrix)?;
    let last = eig.eigenvalues.len() - 1;
    let top = eig.eigenvalues[last];
    let degenerate = last > 0 && (top - eig.eigenvalues[last - 1]).abs() < DEGENERACY_GAP;
    Ok(PhaseMeasurementBound {
        fidelity: top,
        guess: eig.eigenvectors[last].clone(),
        degenerate,
    })
}

/// Pure family selector for the restricted-guess strategy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RestrictedFamily {
    Coherent { alpha: f64 },
    Squeezed { lambda: f64 },
}

/// Restricted-strategy value with its error budget.
#[derive(Debug, Clone, Copy)]
pub struct RestrictedGuess {
    pub fidelity: f64,
    /// Last refinement change of the doubling quadrature.
    pub quad_error: f64,
    /// Bound on the dropped series tail inside the integrand.
    pub series_tail: f64,
}

/// Strategy value when the guess is forced to stay in the family
/// (phase measurement, guess = phase-rotated seed).
///
/// Both cases integrate `|⟨ξ|ψ_φ⟩|² |⟨ψ₀|ψ_φ⟩|²` over the phase with the
/// normalized measure `dφ/2π`, evaluating the series factor on a uniform
/// grid via FFT and doubling the grid until the value is stable to
/// [`RESTRICTED_QUAD_TOL`] relative.
pub fn restricted_guess_fidelity(family: RestrictedFamily) -> Result<RestrictedGuess> {
    match family {
        RestrictedFamily::Coherent { alpha } => {
            assert!(alpha >= 0.0);
            // c_n = e^{-α²/2} αⁿ/√n!
            let mut coeffs = Vec::with_capacity(64);
            let mut c = (-alpha * alpha / 2.0).exp();
            let mut n = 0usize;
            let mut sum = 0.0;
            loop {
                coeffs.push(c);
                sum += c;
                n += 1;
                c *= alpha / (n as f64).sqrt();
                if (c < 1e-18 * sum && n > (alpha * alpha) as usize + 2) || n >= 1 << 20 {
                    break;
                }
            }
            let series_tail = if alpha > 0.0 {
                c * (n as f64).sqrt() / (alpha.max(1e-300))
            } else {
                0.0
            };
            let weight = |phi: f64| (-2.0 * alpha * alpha * (1.0 - phi.cos())).exp();
            let (fidelity, quad_error) = doubling_grid_average(&coeffs, weight)?;
            Ok(RestrictedGuess {
                fidelity: fidelity.min(1.0),
                quad_error,
                series_tail,
            })
        }
        RestrictedFamily::Squeezed { lambda } => {
            assert!((0.0..1.0).contains(&lambda));
            // On even levels only; with u = 2φ the integral covers one
            // period of Σ t_n e^{inu} with t_n = (λ/2)ⁿ √(2n)!/n!.
            let one_minus = 1.0 - lambda * lambda;
            let mut coeffs = Vec::with_capacity(256);
            let mut t = 1.0f64;
            let mut sum = 0.0f64;
            let mut n = 0usize;
            loop {
                coeffs.push(t);
                sum += t;
                let k = n as f64;
                t *= lambda * ((2.0 * k + 1.0) / (2.0 * k + 2.0)).sqrt();
                n += 1;
                if (t < 1e-15 * sum) || n >= 1 << 21 {
                    break;
                }
            }
            let series_tail = t * lambda / (1.0 - lambda);
            // |⟨λ|λ_φ⟩|² = (1-λ²)/√((1-λ²)² + 4λ² sin²φ), φ = u/2;
            // the remaining √(1-λ²) is the ξ-overlap normalization.
            let weight = move |u: f64| {
                let s = (u / 2.0).sin();
                one_minus.sqrt() * one_minus
                    / (one_minus * one_minus + 4.0 * lambda * lambda * s * s).sqrt()
            };
            let (fidelity, quad_error) = doubling_grid_average(&coeffs, weight)?;
            Ok(RestrictedGuess {
                fidelity: fidelity.min(1.0),
                quad_error,
                series_tail,
            })
        }
    }
}

/// `(1/M) Σ_j |Σ_n c_n e^{inu_j}|² w(u_j)` with grid doubling.
fn doubling_grid_average<W: Fn(f64) -> f64>(coeffs: &[f64], weight: W) -> Result<(f64, f64)> {
    let mut m = 64usize.max((2 * coeffs.len()).next_power_of_two());
    if m > RESTRICTED_NODE_CAP {
        return Err(CovariantError::QuadratureNotConverged {
            nodes: m,
            residual: f64::INFINITY,
        });
    }
    let eval = |m: usize| -> f64 {
        let vals = fft::series_on_grid(coeffs, m);
        let mut acc = 0.0;
        for (j, v) in vals.iter().enumerate() {
            let u = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
            acc += v.norm_sqr() * weight(u);
        }
        acc / m as f64
    };
    let mut prev = eval(m);
    loop {
        m *= 2;
        if m > RESTRICTED_NODE_CAP {
            return Err(CovariantError::QuadratureNotConverged {
                nodes: m / 2,
                residual: f64::NAN,
            });
        }
        let next = eval(m);
        let change = (next - prev).abs();
        if change <= RESTRICTED_QUAD_TOL * next.abs().max(1e-6) {
            return Ok((next, change));
        }
        prev = next;
    }
}

/// The three large-parameter limits with their supporting evidence.
///
/// The squeezed series has coefficients ~ n^{-1/4}, so at λ → 1 it
/// behaves like a polylogarithm of index 1/4 near the unit circle; that
/// series converges too slowly to evaluate directly, so the limit is
/// computed by quadrature at λ = 1 - ε with extrapolation in ε.
#[derive(Debug, Clone)]
pub struct AsymptoticLimits {
    /// `√(2/3)`: restricted coherent guess as α → ∞.
    pub restricted_coherent: f64,
    /// Quadrature of the restricted integral at α² = 200, as evidence.
    pub restricted_coherent_quadrature: f64,
    /// `2(√2 - 1)`: unrestricted guess as α → ∞.
    pub unrestricted_coherent: f64,
    /// `2·det(C_p)^{-1/(2p)}` along increasing p, converging to the above.
    pub cp_convergence: Vec<(usize, f64)>,
    /// Extrapolated restricted squeezed-vacuum limit at λ → 1.
    pub restricted_squeezed: f64,
    /// Magnitude of the extrapolation correction.
    pub restricted_squeezed_uncertainty: f64,
    /// Set when the extrapolation correction exceeds 0.02.
    pub low_confidence: bool,
    /// The three quadrature values at λ = 1 - ε, ε = 1e-2, 1e-3, 1e-4.
    pub squeezed_sequence: [(f64, f64); 3],
}

pub fn asymptotic_limits() -> Result<AsymptoticLimits> {
    let restricted_coherent = (2.0f64 / 3.0).sqrt();
    let restricted_coherent_quadrature = restricted_guess_fidelity(RestrictedFamily::Coherent {
        alpha: 200f64.sqrt(),
    })?
    .fidelity;
    let unrestricted_coherent = 2.0 * (2f64.sqrt() - 1.0);
    let cp_convergence: Vec<(usize, f64)> = [2usize, 3, 5, 10, 100]
        .iter()
        .map(|&p| (p, unrestricted_asymptote_order(p)))
        .collect();

    let eps = [1e-2, 1e-3, 1e-4];
    let mut seq = [(0.0, 0.0); 3];
    for (k, &e) in eps.iter().enumerate() {
        let f = restricted_guess_fidelity(RestrictedFamily::Squeezed { lambda: 1.0 - e })?;
        seq[k] = (e, f.fidelity);
    }
    // Aitken Δ² on the geometric-like tail
    let (f0, f1, f2) = (seq[0].1, seq[1].1, seq[2].1);
    let denom = f2 - 2.0 * f1 + f0;
    let extrapolated = if denom.abs() > 1e-14 {
        f2 - (f2 - f1) * (f2 - f1) / denom
    } else {
        f2
    };
    let uncertainty = (extrapolated - f2).abs();
    Ok(AsymptoticLimits {
        restricted_coherent,
        restricted_coherent_quadrature,
        unrestricted_coherent,
        cp_convergence,
        restricted_squeezed: extrapolated,
        restricted_squeezed_uncertainty: uncertainty,
        low_confidence: uncertainty > 0.02,
        squeezed_sequence: seq,
    })
}

/// The canonical phase-measurement seed `Σ |n⟩` (unnormalized, unit
/// phases) at a given cutoff.
pub fn phase_measurement_seed(cutoff: usize) -> FockVector {
    FockVector::from_real(&vec![1.0; cutoff + 1], 0.0)
}
