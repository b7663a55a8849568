//! Benchmark semidefinite programs and their operator-splitting solver.
//!
//! A strategy operator K that commutes with all bilateral phase rotations
//! `U_θ ⊗ U_θ` is block diagonal over total excitation `s = n_a + n_b`, and
//! its partial transpose is block diagonal over the difference
//! `d = n_a - n_b`. Both cones therefore split into small Hermitian blocks,
//! and the partial transpose itself is a pure re-sorting of entries:
//! `(K^Γ)_d[a, a'] = K_s[a, a']` with `s = a + a' - d`. The assemblers in
//! [`assemble`] exploit this; [`solver`] runs ADMM over the resulting
//! PSD-cone/affine splitting.

pub mod assemble;
pub mod problem;
pub mod solver;

pub use assemble::{
    assemble_mixed_sdp, assemble_pure_sdp, assemble_pure_sdp_unstructured,
    assemble_single_seed_sdp,
};
pub use problem::{ConstraintRow, EntryTerm, PsdVar, SdpProblem};
pub use solver::{solve_sdp, SdpError, SdpSolution, SolverOptions};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::linalg::{partial_trace, partial_transpose, LinalgError, Side, TwoModeOperator};

/// One total-excitation sector of the two-mode space at cutoff N.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sector {
    /// Total excitation `s = n_a + n_b`.
    pub total: usize,
    /// Smallest `n_a` present in the sector.
    pub a_min: usize,
    /// Matrix dimension of the sector.
    pub dim: usize,
}

/// Sector layout at cutoff N: `2N + 1` sectors whose dimensions sum to
/// `(N + 1)²`. Sector `s` covers `n_a ∈ [max(0, s - N), min(s, N)]`.
pub fn block_sectors(cutoff: usize) -> Vec<Sector> {
    (0..=2 * cutoff)
        .map(|s| {
            let a_min = s.saturating_sub(cutoff);
            let a_max = s.min(cutoff);
            Sector {
                total: s,
                a_min,
                dim: a_max - a_min + 1,
            }
        })
        .collect()
}

/// Strategy operator stored as Hermitian blocks indexed by total excitation.
///
/// Embedding into the full `(N+1)²`-dimensional space commutes with every
/// bilateral phase rotation by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeBlockOperator {
    cutoff: usize,
    blocks: Vec<DMatrix<C64>>,
}

impl TwoModeBlockOperator {
    pub fn new(cutoff: usize, blocks: Vec<DMatrix<C64>>) -> crate::linalg::Result<Self> {
        let layout = block_sectors(cutoff);
        if blocks.len() != layout.len() {
            return Err(LinalgError::DimensionMismatch {
                expected: layout.len(),
                got: blocks.len(),
            });
        }
        for (sec, b) in layout.iter().zip(blocks.iter()) {
            if b.nrows() != sec.dim || b.ncols() != sec.dim {
                return Err(LinalgError::DimensionMismatch {
                    expected: sec.dim,
                    got: b.nrows().max(b.ncols()),
                });
            }
        }
        Ok(Self { cutoff, blocks })
    }

    /// All-zero blocks at the given cutoff.
    pub fn zeros(cutoff: usize) -> Self {
        let blocks = block_sectors(cutoff)
            .iter()
            .map(|s| DMatrix::zeros(s.dim, s.dim))
            .collect();
        Self { cutoff, blocks }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn block(&self, s: usize) -> &DMatrix<C64> {
        &self.blocks[s]
    }

    pub fn block_mut(&mut self, s: usize) -> &mut DMatrix<C64> {
        &mut self.blocks[s]
    }

    pub fn blocks(&self) -> &[DMatrix<C64>] {
        &self.blocks
    }

    /// Embed into the full two-mode operator on the `(n_a, n_b)` basis.
    pub fn embed(&self) -> TwoModeOperator {
        let n = self.cutoff;
        let mut out = TwoModeOperator::zeros(n + 1, n + 1);
        for sec in block_sectors(n) {
            let b = &self.blocks[sec.total];
            for i in 0..sec.dim {
                for j in 0..sec.dim {
                    let a = sec.a_min + i;
                    let ap = sec.a_min + j;
                    let row = out.flat(a, sec.total - a);
                    let col = out.flat(ap, sec.total - ap);
                    out.matrix_mut()[(row, col)] = b[(i, j)];
                }
            }
        }
        out
    }

    /// Project a full two-mode operator onto the block structure, dropping
    /// any cross-sector entries.
    pub fn from_full(op: &TwoModeOperator) -> crate::linalg::Result<Self> {
        if op.dim_a() != op.dim_b() {
            return Err(LinalgError::DimensionMismatch {
                expected: op.dim_a(),
                got: op.dim_b(),
            });
        }
        let n = op.dim_a() - 1;
        let mut out = Self::zeros(n);
        for sec in block_sectors(n) {
            for i in 0..sec.dim {
                for j in 0..sec.dim {
                    let a = sec.a_min + i;
                    let ap = sec.a_min + j;
                    out.blocks[sec.total][(i, j)] = op.entry((a, sec.total - a), (ap, sec.total - ap));
                }
            }
        }
        Ok(out)
    }
}

/// Per-constraint residuals of a candidate strategy operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityReport {
    /// Most negative eigenvalue of K (0.0 when PSD).
    pub min_eigenvalue: f64,
    /// Most negative eigenvalue of the partial transpose.
    pub ppt_min_eigenvalue: f64,
    /// `‖tr_B K − 1‖_max`.
    pub completeness_residual: f64,
    /// Largest Hermiticity defect.
    pub asymmetry: f64,
    pub tol: f64,
}

impl FeasibilityReport {
    pub fn feasible(&self) -> bool {
        self.min_eigenvalue >= -self.tol
            && self.ppt_min_eigenvalue >= -self.tol
            && self.completeness_residual <= self.tol
            && self.asymmetry <= self.tol
    }
}

/// Check a strategy operator against the program constraints
/// (K ≥ 0, K^Γ ≥ 0, tr_B K = 1). Report-only; nothing is rejected here.
pub fn validate_feasibility(k: &TwoModeOperator, tol: f64) -> FeasibilityReport {
    let min_eigenvalue = k.min_eigenvalue().min(0.0);
    let ppt_min_eigenvalue = partial_transpose(k).min_eigenvalue().min(0.0);
    let trb = partial_trace(k, Side::B);
    let mut completeness_residual = 0.0f64;
    for i in 0..trb.dim() {
        for j in 0..trb.dim() {
            let want = if i == j {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            };
            completeness_residual = completeness_residual.max((trb.entry(i, j) - want).norm());
        }
    }
    FeasibilityReport {
        min_eigenvalue,
        ppt_min_eigenvalue,
        completeness_residual,
        asymmetry: k.max_asymmetry(),
        tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{tensor_product, FockOperator, FockVector, TwoModeVector};
    use crate::qubit::optimal_qubit_k;
    use std::f64::consts::PI;

    #[test]
    fn sector_layouts() {
        let dims: Vec<usize> = block_sectors(1).iter().map(|s| s.dim).collect();
        assert_eq!(dims, vec![1, 2, 1]);
        let dims: Vec<usize> = block_sectors(2).iter().map(|s| s.dim).collect();
        assert_eq!(dims, vec![1, 2, 3, 2, 1]);
        let total: usize = block_sectors(23).iter().map(|s| s.dim).sum();
        assert_eq!(total, 576);
    }

    #[test]
    fn embed_round_trip() {
        let k = optimal_qubit_k(0.7, 1.1);
        let full = k.embed();
        let back = TwoModeBlockOperator::from_full(&full).unwrap();
        assert_eq!(k, back);
    }

    #[test]
    fn optimal_qubit_k_is_feasible() {
        let k = optimal_qubit_k(0.8, PI / 3.0).embed();
        let rep = validate_feasibility(&k, 1e-10);
        assert!(rep.feasible(), "{rep:?}");
    }

    #[test]
    fn product_strategy_is_feasible() {
        // K = 1 ⊗ ρ has unit partial trace and trivially positive transpose.
        let n = 3;
        let mut rho = FockOperator::zeros(n);
        let w = [0.4, 0.3, 0.2, 0.1];
        for i in 0..=n {
            rho.matrix_mut()[(i, i)] = C64::new(w[i], 0.0);
        }
        let k = tensor_product(&FockOperator::identity(n), &rho);
        let rep = validate_feasibility(&k, 1e-12);
        assert!(rep.feasible(), "{rep:?}");
    }

    #[test]
    fn entangled_projector_fails_ppt() {
        let n = 1usize;
        let dim = n + 1;
        let mut amps = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            amps[i * dim + i] = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
        }
        let phi = TwoModeVector::new(dim, dim, amps).unwrap();
        let mut k = phi.outer();
        *k.matrix_mut() *= C64::new(dim as f64, 0.0);
        let rep = validate_feasibility(&k, 1e-10);
        assert!(!rep.feasible());
        assert!(rep.ppt_min_eigenvalue < -0.4);
        assert!(rep.completeness_residual < 1e-12);
    }

    #[test]
    fn from_full_rejects_rectangular() {
        let op = TwoModeOperator::zeros(2, 3);
        assert!(TwoModeBlockOperator::from_full(&op).is_err());
    }

    #[test]
    fn embed_commutes_with_bilateral_rotation() {
        let psi = FockVector::from_real(&[0.8, 0.6], 0.0);
        let _ = psi;
        let k = optimal_qubit_k(0.6, 0.9).embed();
        let theta = 0.73;
        let d = k.dim_a();
        let mut rotated = k.clone();
        for a in 0..d {
            for b in 0..d {
                for ap in 0..d {
                    for bp in 0..d {
                        let phase = C64::from_polar(
                            1.0,
                            theta * ((a + b) as f64 - (ap + bp) as f64),
                        );
                        let row = k.flat(a, b);
                        let col = k.flat(ap, bp);
                        rotated.matrix_mut()[(row, col)] = k.matrix()[(row, col)] * phase;
                    }
                }
            }
        }
        assert!((rotated.matrix() - k.matrix())
            .iter()
            .all(|z| z.norm() < 1e-15));
    }
}
