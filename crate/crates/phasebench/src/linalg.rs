//! Dense complex Hermitian linear algebra on truncated Fock spaces.
//!
//! Two-mode objects index the product basis as `(n_a, n_b)` row-major:
//! `flat = n_a * dim_b + n_b`. Partial traces and the partial transpose
//! depend on this convention; it is fixed here and used everywhere.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use thiserror::Error;

/// Numerical tolerances used by the kernels. Kept in one place so every
/// backend and test pins the same values.
pub mod tol {
    /// Maximum entrywise asymmetry for an operator to count as Hermitian.
    pub const HERMITICITY: f64 = 1e-12;
    /// Most negative eigenvalue a density operator may carry.
    pub const DENSITY_MIN_EIG: f64 = -1e-10;
    /// Eigenvalues in `[PSD_CLAMP_FLOOR, 0)` are clamped to zero by the PSD
    /// square root; anything below is an error. Solver outputs carry
    /// O(tolerance) negative tails, which this absorbs.
    pub const PSD_CLAMP_FLOOR: f64 = -1e-8;
    /// Relative reconstruction residual allowed for an eigendecomposition.
    pub const EIG_RECONSTRUCTION: f64 = 1e-10;
    /// Orthonormality defect allowed between eigenvectors.
    pub const EIG_ORTHONORMALITY: f64 = 1e-10;
    /// Relative residual allowed for `sqrt(M)^2 = M`.
    pub const SQRT_RESIDUAL: f64 = 1e-9;
    /// Eigenvalues below this fraction of the spectral radius count as
    /// numerically zero; the square root would otherwise amplify rounding
    /// noise from O(ε) to O(√ε).
    pub const RELATIVE_EIG_FLOOR: f64 = 1e-13;
    /// Window around 1 for the norm of a normalized state plus its deficit.
    pub const NORMALIZATION_WINDOW: f64 = 1e-9;
    /// Tolerance for identities that hold exactly up to rounding.
    pub const EXACT: f64 = 1e-12;
    /// Tolerance for randomized kernel axioms (fidelity symmetry, unitary
    /// invariance, involutions).
    pub const KERNEL_AXIOMS: f64 = 1e-9;
}

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("not Hermitian: |M[{row},{col}] - conj(M[{col},{row}])| = {asymmetry:.3e} exceeds {tol:.1e}")]
    NotHermitian {
        row: usize,
        col: usize,
        asymmetry: f64,
        tol: f64,
    },
    #[error("not positive semidefinite: min eigenvalue {min_eigenvalue:.3e} is below {floor:.1e}")]
    NotPsd { min_eigenvalue: f64, floor: f64 },
    #[error("cutoff mismatch: {left} vs {right}")]
    CutoffMismatch { left: usize, right: usize },
    #[error("malformed dimensions: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("trace {trace:.9} outside the density window [{lo:.9}, {hi:.9}]")]
    TraceOutOfRange { trace: f64, lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, LinalgError>;

/// Complex amplitude vector on a truncated Fock basis `|0⟩ .. |N⟩`.
///
/// `norm_deficit` is the probability weight lost above the cutoff, so a
/// normalized vector satisfies `‖ψ‖² + deficit ≈ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amps: DVector<C64>,
    norm_deficit: f64,
}

impl FockVector {
    pub fn new(amps: Vec<C64>, norm_deficit: f64) -> Self {
        assert!(!amps.is_empty(), "a Fock vector needs at least |0⟩");
        assert!(norm_deficit >= 0.0, "norm deficit must be non-negative");
        Self {
            amps: DVector::from_vec(amps),
            norm_deficit,
        }
    }

    pub fn from_real(amps: &[f64], norm_deficit: f64) -> Self {
        Self::new(amps.iter().map(|&a| C64::new(a, 0.0)).collect(), norm_deficit)
    }

    /// The basis state `|n⟩` on the given cutoff.
    pub fn basis_state(n: usize, cutoff: usize) -> Self {
        assert!(n <= cutoff);
        let mut amps = vec![C64::new(0.0, 0.0); cutoff + 1];
        amps[n] = C64::new(1.0, 0.0);
        Self::new(amps, 0.0)
    }

    pub fn cutoff(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amp(&self, n: usize) -> C64 {
        self.amps[n]
    }

    pub fn amps(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn norm_deficit(&self) -> f64 {
        self.norm_deficit
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn dot(&self, other: &Self) -> C64 {
        assert_eq!(self.dim(), other.dim(), "cutoff mismatch in dot product");
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn check_normalized(&self) -> Result<()> {
        let total = self.norm_sq() + self.norm_deficit;
        if (total - 1.0).abs() > tol::NORMALIZATION_WINDOW {
            return Err(LinalgError::TraceOutOfRange {
                trace: total,
                lo: 1.0 - tol::NORMALIZATION_WINDOW,
                hi: 1.0 + tol::NORMALIZATION_WINDOW,
            });
        }
        Ok(())
    }

    /// Rescale so that `‖ψ‖ = 1`; the deficit is dropped.
    pub fn normalized(&self) -> Self {
        let n = self.norm_sq().sqrt();
        assert!(n > 0.0, "cannot normalize the zero vector");
        Self {
            amps: self.amps.map(|a| a / n),
            norm_deficit: 0.0,
        }
    }

    /// Amplitudes multiplied by `e^{iφn}`.
    pub fn phase_rotated(&self, phi: f64) -> Self {
        let amps = DVector::from_iterator(
            self.dim(),
            self.amps
                .iter()
                .enumerate()
                .map(|(n, a)| a * C64::from_polar(1.0, phi * n as f64)),
        );
        Self {
            amps,
            norm_deficit: self.norm_deficit,
        }
    }

    /// `|ψ⟩⟨ψ|` with the squared norm deficit carried as trace deficit.
    pub fn outer(&self) -> FockOperator {
        let d = self.dim();
        let mat = DMatrix::from_fn(d, d, |i, j| self.amps[i] * self.amps[j].conj());
        FockOperator {
            mat,
            trace_deficit: (1.0 - self.norm_sq()).max(0.0),
        }
    }
}

/// Complex matrix on a truncated Fock space.
///
/// `trace_deficit` records probability weight of the represented state that
/// lies above the cutoff (zero for plain operators).
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    mat: DMatrix<C64>,
    trace_deficit: f64,
}

impl FockOperator {
    pub fn new(mat: DMatrix<C64>, trace_deficit: f64) -> Self {
        assert_eq!(mat.nrows(), mat.ncols(), "Fock operators are square");
        assert!(trace_deficit >= 0.0);
        Self { mat, trace_deficit }
    }

    pub fn from_real(entries: &[f64], dim: usize, trace_deficit: f64) -> Self {
        assert_eq!(entries.len(), dim * dim);
        let mat = DMatrix::from_row_slice(
            dim,
            dim,
            &entries.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>(),
        );
        Self::new(mat, trace_deficit)
    }

    pub fn identity(cutoff: usize) -> Self {
        Self::new(DMatrix::identity(cutoff + 1, cutoff + 1), 0.0)
    }

    pub fn zeros(cutoff: usize) -> Self {
        Self::new(DMatrix::zeros(cutoff + 1, cutoff + 1), 0.0)
    }

    pub fn cutoff(&self) -> usize {
        self.mat.nrows() - 1
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn matrix_mut(&mut self) -> &mut DMatrix<C64> {
        &mut self.mat
    }

    pub fn trace_deficit(&self) -> f64 {
        self.trace_deficit
    }

    pub fn with_trace_deficit(mut self, deficit: f64) -> Self {
        assert!(deficit >= 0.0);
        self.trace_deficit = deficit;
        self
    }

    pub fn trace(&self) -> C64 {
        self.mat.diagonal().iter().sum()
    }

    pub fn trace_re(&self) -> f64 {
        self.trace().re
    }

    /// `(M + M†)/2`.
    pub fn hermitized(&self) -> Self {
        let h = (&self.mat + self.mat.adjoint()).scale(0.5);
        Self::new(h, self.trace_deficit)
    }

    /// Largest `|M[i,j] - conj(M[j,i])|` with its location.
    pub fn max_asymmetry(&self) -> (usize, usize, f64) {
        let mut worst = (0, 0, 0.0);
        for i in 0..self.dim() {
            for j in i..self.dim() {
                let a = (self.mat[(i, j)] - self.mat[(j, i)].conj()).norm();
                if a > worst.2 {
                    worst = (i, j, a);
                }
            }
        }
        worst
    }

    pub fn check_hermitian(&self) -> Result<()> {
        let (row, col, asymmetry) = self.max_asymmetry();
        if asymmetry > tol::HERMITICITY {
            return Err(LinalgError::NotHermitian {
                row,
                col,
                asymmetry,
                tol: tol::HERMITICITY,
            });
        }
        Ok(())
    }

    /// Hermitian, PSD down to [`tol::DENSITY_MIN_EIG`], and trace within
    /// `[1 - deficit - window, 1 + window]`.
    pub fn check_density(&self) -> Result<()> {
        self.check_hermitian()?;
        let tr = self.trace_re();
        let lo = 1.0 - self.trace_deficit - tol::NORMALIZATION_WINDOW;
        let hi = 1.0 + tol::NORMALIZATION_WINDOW;
        if tr < lo || tr > hi {
            return Err(LinalgError::TraceOutOfRange { trace: tr, lo, hi });
        }
        let eig = hermitian_eig(self)?;
        let min = eig.eigenvalues[0];
        if min < tol::DENSITY_MIN_EIG {
            return Err(LinalgError::NotPsd {
                min_eigenvalue: min,
                floor: tol::DENSITY_MIN_EIG,
            });
        }
        Ok(())
    }

    /// Entries multiplied by `e^{iφ(n-m)}`; Fock-diagonal entries invariant.
    pub fn phase_rotated(&self, phi: f64) -> Self {
        let d = self.dim();
        let mat = DMatrix::from_fn(d, d, |i, j| {
            self.mat[(i, j)] * C64::from_polar(1.0, phi * (i as f64 - j as f64))
        });
        Self {
            mat,
            trace_deficit: self.trace_deficit,
        }
    }

    /// Clamp eigenvalues below `clamp_tol` in magnitude to zero and rescale
    /// to unit trace. Used to turn solver output with O(tolerance) noise
    /// back into a density operator before fidelity evaluation.
    pub fn sanitized_density(&self, clamp_tol: f64) -> Result<Self> {
        let h = self.hermitized();
        let eig = hermitian_eig(&h)?;
        let min = eig.eigenvalues[0];
        if min < -clamp_tol.abs() {
            return Err(LinalgError::NotPsd {
                min_eigenvalue: min,
                floor: -clamp_tol.abs(),
            });
        }
        let d = self.dim();
        let mut mat = DMatrix::zeros(d, d);
        let mut tr = 0.0;
        for (k, &lam) in eig.eigenvalues.iter().enumerate() {
            let lam = lam.max(0.0);
            tr += lam;
            let v = eig.eigenvectors[k].amps();
            for i in 0..d {
                for j in 0..d {
                    mat[(i, j)] += v[i] * v[j].conj() * C64::new(lam, 0.0);
                }
            }
        }
        assert!(tr > 0.0, "sanitized operator has zero trace");
        Ok(Self::new(mat.unscale(tr), 0.0))
    }

    /// `tr(ρ²)`, real for Hermitian input.
    pub fn purity(&self) -> f64 {
        let mut p = 0.0;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                p += (self.mat[(i, j)] * self.mat[(j, i)]).re;
            }
        }
        p
    }
}

/// Spectral decomposition of a Hermitian operator, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<FockVector>,
}

/// Eigendecomposition of a Hermitian operator.
///
/// Rejects non-Hermitian input naming the worst entry; eigenvectors come
/// back orthonormal with the ascending eigenvalue order, each scaled so its
/// largest component is real non-negative.
pub fn hermitian_eig(m: &FockOperator) -> Result<HermitianEig> {
    m.check_hermitian()?;
    let h = (m.matrix() + m.matrix().adjoint()).scale(0.5);
    let se = h.symmetric_eigen();
    let dim = m.dim();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let mut eigenvalues = Vec::with_capacity(dim);
    let mut eigenvectors = Vec::with_capacity(dim);
    for &k in &order {
        eigenvalues.push(se.eigenvalues[k]);
        let col = se.eigenvectors.column(k);
        // Fix the global phase: largest-magnitude component real non-negative.
        let mut pivot = C64::new(1.0, 0.0);
        let mut best = 0.0;
        for a in col.iter() {
            if a.norm() > best {
                best = a.norm();
                pivot = *a;
            }
        }
        let phase = if best > 0.0 {
            pivot.conj() / pivot.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let amps: Vec<C64> = col.iter().map(|a| a * phase).collect();
        eigenvectors.push(FockVector::new(amps, 0.0));
    }
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors,
    })
}

/// PSD square root together with a record of any eigenvalue clamping.
#[derive(Debug, Clone)]
pub struct PsdSqrt {
    pub op: FockOperator,
    /// Most negative eigenvalue that was clamped to zero (0.0 if none).
    pub clamped_min: f64,
}

/// Square root of a PSD Hermitian operator.
///
/// Eigenvalues in `[PSD_CLAMP_FLOOR, 0)` are clamped to zero and recorded;
/// anything below the floor is an error.
pub fn matrix_sqrt_psd(m: &FockOperator) -> Result<PsdSqrt> {
    let eig = hermitian_eig(m)?;
    let min = eig.eigenvalues[0];
    if min < tol::PSD_CLAMP_FLOOR {
        return Err(LinalgError::NotPsd {
            min_eigenvalue: min,
            floor: tol::PSD_CLAMP_FLOOR,
        });
    }
    let clamped_min = if min < 0.0 { min } else { 0.0 };
    let scale = eig.eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
    let floor = tol::RELATIVE_EIG_FLOOR * scale;
    let d = m.dim();
    let mut mat = DMatrix::zeros(d, d);
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam <= floor {
            continue;
        }
        let s = lam.sqrt();
        let v = eig.eigenvectors[k].amps();
        for i in 0..d {
            for j in 0..d {
                mat[(i, j)] += v[i] * v[j].conj() * C64::new(s, 0.0);
            }
        }
    }
    Ok(PsdSqrt {
        op: FockOperator::new(mat, m.trace_deficit),
        clamped_min,
    })
}

/// Uhlmann fidelity `F(ρ,σ) = (tr |√ρ √σ|)²`, clamped to `[0, 1]`.
///
/// Both operators must be density-like (Hermitian, PSD up to the clamp
/// floor) on the same cutoff.
pub fn fidelity(rho: &FockOperator, sigma: &FockOperator) -> Result<f64> {
    if rho.cutoff() != sigma.cutoff() {
        return Err(LinalgError::CutoffMismatch {
            left: rho.cutoff(),
            right: sigma.cutoff(),
        });
    }
    let sr = matrix_sqrt_psd(rho)?;
    let ss = matrix_sqrt_psd(sigma)?;
    let m = sr.op.matrix() * ss.op.matrix();
    let sv = m.svd(false, false);
    let root: f64 = sv.singular_values.iter().sum();
    Ok((root * root).clamp(0.0, 1.0))
}

/// Which factor of a two-mode product space an operation targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Pure state on a two-mode product space, `(n_a, n_b)` row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeVector {
    dim_a: usize,
    dim_b: usize,
    amps: DVector<C64>,
}

impl TwoModeVector {
    pub fn new(dim_a: usize, dim_b: usize, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != dim_a * dim_b {
            return Err(LinalgError::DimensionMismatch {
                expected: dim_a * dim_b,
                got: amps.len(),
            });
        }
        Ok(Self {
            dim_a,
            dim_b,
            amps: DVector::from_vec(amps),
        })
    }

    /// `|x⟩ ⊗ |y⟩`.
    pub fn product(x: &FockVector, y: &FockVector) -> Self {
        let mut amps = Vec::with_capacity(x.dim() * y.dim());
        for a in x.amps().iter() {
            for b in y.amps().iter() {
                amps.push(a * b);
            }
        }
        Self::new(x.dim(), y.dim(), amps).unwrap()
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn amp(&self, na: usize, nb: usize) -> C64 {
        self.amps[na * self.dim_b + nb]
    }

    pub fn amps(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn outer(&self) -> TwoModeOperator {
        let d = self.amps.len();
        let mat = DMatrix::from_fn(d, d, |i, j| self.amps[i] * self.amps[j].conj());
        TwoModeOperator {
            dim_a: self.dim_a,
            dim_b: self.dim_b,
            mat,
        }
    }
}

/// Operator on a two-mode product space, `(n_a, n_b)` row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeOperator {
    dim_a: usize,
    dim_b: usize,
    mat: DMatrix<C64>,
}

impl TwoModeOperator {
    pub fn new(dim_a: usize, dim_b: usize, mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != dim_a * dim_b || mat.ncols() != dim_a * dim_b {
            return Err(LinalgError::DimensionMismatch {
                expected: dim_a * dim_b,
                got: mat.nrows().max(mat.ncols()),
            });
        }
        Ok(Self { dim_a, dim_b, mat })
    }

    pub fn zeros(dim_a: usize, dim_b: usize) -> Self {
        Self {
            dim_a,
            dim_b,
            mat: DMatrix::zeros(dim_a * dim_b, dim_a * dim_b),
        }
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn matrix_mut(&mut self) -> &mut DMatrix<C64> {
        &mut self.mat
    }

    pub fn flat(&self, na: usize, nb: usize) -> usize {
        na * self.dim_b + nb
    }

    pub fn entry(&self, row: (usize, usize), col: (usize, usize)) -> C64 {
        self.mat[(self.flat(row.0, row.1), self.flat(col.0, col.1))]
    }

    pub fn trace(&self) -> C64 {
        self.mat.diagonal().iter().sum()
    }

    pub fn max_asymmetry(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitized operator.
    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.mat + self.mat.adjoint()).scale(0.5);
        let se = h.symmetric_eigen();
        se.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// `X ⊗ Y` on the `(n_a, n_b)` row-major product basis.
pub fn tensor_product(x: &FockOperator, y: &FockOperator) -> TwoModeOperator {
    let mat = x.matrix().kronecker(y.matrix());
    TwoModeOperator {
        dim_a: x.dim(),
        dim_b: y.dim(),
        mat,
    }
}

/// Trace out one side of a two-mode operator; the full trace is preserved.
pub fn partial_trace(m: &TwoModeOperator, side: Side) -> FockOperator {
    match side {
        Side::A => {
            let d = m.dim_b;
            let mut out = DMatrix::zeros(d, d);
            for b in 0..d {
                for bp in 0..d {
                    let mut s = C64::new(0.0, 0.0);
                    for a in 0..m.dim_a {
                        s += m.mat[(m.flat(a, b), m.flat(a, bp))];
                    }
                    out[(b, bp)] = s;
                }
            }
            FockOperator::new(out, 0.0)
        }
        Side::B => {
            let d = m.dim_a;
            let mut out = DMatrix::zeros(d, d);
            for a in 0..d {
                for ap in 0..d {
                    let mut s = C64::new(0.0, 0.0);
                    for b in 0..m.dim_b {
                        s += m.mat[(m.flat(a, b), m.flat(ap, b))];
                    }
                    out[(a, ap)] = s;
                }
            }
            FockOperator::new(out, 0.0)
        }
    }
}

/// Partial transpose on the B factor: `(K^Γ)[(a,b),(a',b')] = K[(a,b'),(a',b)]`.
pub fn partial_transpose(m: &TwoModeOperator) -> TwoModeOperator {
    let mut out = TwoModeOperator::zeros(m.dim_a, m.dim_b);
    for a in 0..m.dim_a {
        for b in 0..m.dim_b {
            for ap in 0..m.dim_a {
                for bp in 0..m.dim_b {
                    out.mat[(m.flat(a, b), m.flat(ap, bp))] =
                        m.mat[(m.flat(a, bp), m.flat(ap, b))];
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngExt;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    pub(crate) fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> FockOperator {
        let g = DMatrix::from_fn(dim, dim, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let h = (&g + g.adjoint()).scale(0.5);
        FockOperator::new(h, 0.0)
    }

    pub(crate) fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> FockOperator {
        let g = DMatrix::from_fn(dim, dim, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let p = &g * g.adjoint();
        let tr: C64 = p.diagonal().iter().sum();
        FockOperator::new(p.unscale(tr.re), 0.0)
    }

    pub(crate) fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> DMatrix<C64> {
        let g = DMatrix::from_fn(dim, dim, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let qr = g.qr();
        qr.q()
    }

    #[test]
    fn eig_pauli_x() {
        let m = FockOperator::from_real(&[0.0, 1.0, 1.0, 0.0], 2, 0.0);
        let e = hermitian_eig(&m).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_identity() {
        for n in [0usize, 3, 7] {
            let m = FockOperator::identity(n);
            let e = hermitian_eig(&m).unwrap();
            assert!(e.eigenvalues.iter().all(|&l| (l - 1.0).abs() < 1e-14));
        }
    }

    #[test]
    fn eig_quarter_three_quarter() {
        let m = FockOperator::from_real(&[0.5, 0.25, 0.25, 0.5], 2, 0.0);
        let e = hermitian_eig(&m).unwrap();
        assert!((e.eigenvalues[0] - 0.25).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 0.75).abs() < 1e-14);
    }

    #[test]
    fn eig_rejects_non_hermitian_with_location() {
        let mat = DMatrix::from_fn(3, 3, |i, j| {
            if (i, j) == (0, 2) {
                c(0.3, 0.0)
            } else if i == j {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let m = FockOperator::new(mat, 0.0);
        match hermitian_eig(&m) {
            Err(LinalgError::NotHermitian { row, col, .. }) => {
                assert_eq!((row, col), (0, 2));
            }
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn eig_reconstruction_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dim in [2usize, 5, 9] {
            let m = random_hermitian(&mut rng, dim);
            let e = hermitian_eig(&m).unwrap();
            let scale = m
                .matrix()
                .iter()
                .map(|x| x.norm())
                .fold(0.0f64, f64::max)
                .max(1.0);
            let mut recon = DMatrix::<C64>::zeros(dim, dim);
            for (k, &lam) in e.eigenvalues.iter().enumerate() {
                let v = e.eigenvectors[k].amps();
                for i in 0..dim {
                    for j in 0..dim {
                        recon[(i, j)] += v[i] * v[j].conj() * c(lam, 0.0);
                    }
                }
            }
            let resid = (recon - m.matrix())
                .iter()
                .map(|x| x.norm())
                .fold(0.0f64, f64::max);
            assert!(resid <= tol::EIG_RECONSTRUCTION * scale, "residual {resid}");
            for i in 0..dim {
                for j in 0..dim {
                    let d = e.eigenvectors[i].dot(&e.eigenvectors[j]);
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((d - c(want, 0.0)).norm() < tol::EIG_ORTHONORMALITY);
                }
            }
        }
    }

    #[test]
    fn sqrt_diagonal() {
        let m = FockOperator::from_real(&[4.0, 0.0, 0.0, 9.0], 2, 0.0);
        let s = matrix_sqrt_psd(&m).unwrap();
        assert!((s.op.entry(0, 0) - c(2.0, 0.0)).norm() < 1e-12);
        assert!((s.op.entry(1, 1) - c(3.0, 0.0)).norm() < 1e-12);
        assert_eq!(s.clamped_min, 0.0);
    }

    #[test]
    fn sqrt_identity_and_projector() {
        let id = FockOperator::identity(3);
        let s = matrix_sqrt_psd(&id).unwrap();
        assert!((s.op.matrix() - id.matrix())
            .iter()
            .all(|x| x.norm() < 1e-12));

        let psi = FockVector::from_real(&[0.6, 0.8], 0.0);
        let p = psi.outer();
        let s = matrix_sqrt_psd(&p).unwrap();
        assert!((s.op.matrix() - p.matrix())
            .iter()
            .all(|x| x.norm() < 1e-11));
    }

    #[test]
    fn sqrt_clamps_and_errors() {
        let m = FockOperator::from_real(&[1.0, 0.0, 0.0, -1e-9], 2, 0.0);
        let s = matrix_sqrt_psd(&m).unwrap();
        assert!(s.clamped_min < 0.0);
        let m = FockOperator::from_real(&[1.0, 0.0, 0.0, -1e-7], 2, 0.0);
        assert!(matches!(
            matrix_sqrt_psd(&m),
            Err(LinalgError::NotPsd { .. })
        ));
    }

    #[test]
    fn sqrt_square_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dim in [2usize, 4, 6] {
            let rho = random_density(&mut rng, dim);
            let s = matrix_sqrt_psd(&rho).unwrap();
            let sq = s.op.matrix() * s.op.matrix();
            let scale = rho.matrix().iter().map(|x| x.norm()).fold(0.0f64, f64::max);
            let resid = (sq - rho.matrix())
                .iter()
                .map(|x| x.norm())
                .fold(0.0f64, f64::max);
            assert!(resid <= tol::SQRT_RESIDUAL * scale.max(1e-30));
        }
    }

    #[test]
    fn fidelity_self_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for dim in [2usize, 5] {
            let rho = random_density(&mut rng, dim);
            let f = fidelity(&rho, &rho).unwrap();
            assert!((f - 1.0).abs() < 1e-10, "F(ρ,ρ) = {f}");
        }
    }

    #[test]
    fn fidelity_vacuum_vs_coherent() {
        // |⟨0|α⟩|² = e^{-α²}; the 0-amplitude of a truncated coherent state
        // is exact, so large N only suppresses the normalization deficit.
        let n = 30usize;
        let alpha = 1.0f64;
        let mut amps = vec![0.0f64; n + 1];
        amps[0] = (-alpha * alpha / 2.0).exp();
        for k in 0..n {
            amps[k + 1] = amps[k] * alpha / ((k + 1) as f64).sqrt();
        }
        let coh = FockVector::from_real(&amps, 0.0);
        let vac = FockVector::basis_state(0, n);
        let f = fidelity(&vac.outer(), &coh.outer()).unwrap();
        assert!((f - (-1.0f64).exp()).abs() < 1e-9, "got {f}");
        assert!((f - 0.367879).abs() < 1e-6);
    }

    #[test]
    fn fidelity_commuting_case_matches_closed_form() {
        let cases = [(0.5, 0.8), (0.7, 0.8), (0.13, 0.94)];
        for (p, q) in cases {
            let rho = FockOperator::from_real(&[p, 0.0, 0.0, 1.0 - p], 2, 0.0);
            let sig = FockOperator::from_real(&[q, 0.0, 0.0, 1.0 - q], 2, 0.0);
            let oracle = ((p * q).sqrt() + ((1.0 - p) * (1.0 - q)).sqrt()).powi(2);
            let f = fidelity(&rho, &sig).unwrap();
            assert!((f - oracle).abs() < 1e-12, "p={p} q={q}: {f} vs {oracle}");
        }
        // Frozen values from the commuting-case oracle above.
        let f = fidelity(
            &FockOperator::from_real(&[0.5, 0.0, 0.0, 0.5], 2, 0.0),
            &FockOperator::from_real(&[0.8, 0.0, 0.0, 0.2], 2, 0.0),
        )
        .unwrap();
        assert!((f - 0.9).abs() < 1e-12);
        let f = fidelity(
            &FockOperator::from_real(&[0.7, 0.0, 0.0, 0.3], 2, 0.0),
            &FockOperator::from_real(&[0.8, 0.0, 0.0, 0.2], 2, 0.0),
        )
        .unwrap();
        assert!((f - 0.986606).abs() < 1e-6);
    }

    #[test]
    fn fidelity_cutoff_mismatch() {
        let a = FockOperator::identity(1);
        let b = FockOperator::identity(2);
        assert!(matches!(
            fidelity(&a, &b),
            Err(LinalgError::CutoffMismatch { .. })
        ));
    }

    #[test]
    fn fidelity_symmetry_and_unitary_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..50 {
            let dim = rng.random_range(2..7);
            let rho = random_density(&mut rng, dim);
            let sig = random_density(&mut rng, dim);
            let fab = fidelity(&rho, &sig).unwrap();
            let fba = fidelity(&sig, &rho).unwrap();
            assert!((fab - fba).abs() < tol::KERNEL_AXIOMS);

            let u = random_unitary(&mut rng, dim);
            let ru = FockOperator::new(&u * rho.matrix() * u.adjoint(), 0.0).hermitized();
            let su = FockOperator::new(&u * sig.matrix() * u.adjoint(), 0.0).hermitized();
            let fu = fidelity(&ru, &su).unwrap();
            assert!((fu - fab).abs() < tol::KERNEL_AXIOMS, "{fu} vs {fab}");
        }
    }

    #[test]
    fn fidelity_concavity_spot_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..30 {
            let dim = rng.random_range(2..6);
            let rho = random_density(&mut rng, dim);
            let s1 = random_density(&mut rng, dim);
            let s2 = random_density(&mut rng, dim);
            let p: f64 = rng.random();
            let mix = FockOperator::new(
                s1.matrix().scale(p) + s2.matrix().scale(1.0 - p),
                0.0,
            );
            let f_mix = fidelity(&rho, &mix).unwrap();
            let f1 = fidelity(&rho, &s1).unwrap();
            let f2 = fidelity(&rho, &s2).unwrap();
            assert!(f_mix >= p * f1 + (1.0 - p) * f2 - tol::KERNEL_AXIOMS);
        }
    }

    #[test]
    fn partial_trace_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let x = random_hermitian(&mut rng, 3);
        let y = random_hermitian(&mut rng, 4);
        let xy = tensor_product(&x, &y);

        let tb = partial_trace(&xy, Side::B);
        let ty = y.trace();
        for i in 0..3 {
            for j in 0..3 {
                let want = x.entry(i, j) * ty;
                assert!((tb.entry(i, j) - want).norm() < tol::EXACT);
            }
        }
        let ta = partial_trace(&xy, Side::A);
        let tx = x.trace();
        for i in 0..4 {
            for j in 0..4 {
                let want = y.entry(i, j) * tx;
                assert!((ta.entry(i, j) - want).norm() < tol::EXACT);
            }
        }
        // trace preservation
        assert!((xy.trace() - ta.trace()).norm() < tol::EXACT);
    }

    #[test]
    fn partial_trace_maximally_entangled() {
        let amps = vec![
            c(1.0 / 2f64.sqrt(), 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(1.0 / 2f64.sqrt(), 0.0),
        ];
        let bell = TwoModeVector::new(2, 2, amps).unwrap();
        let proj = bell.outer();
        for side in [Side::A, Side::B] {
            let r = partial_trace(&proj, side);
            for i in 0..2 {
                for j in 0..2 {
                    let want = if i == j { 0.5 } else { 0.0 };
                    assert!((r.entry(i, j) - c(want, 0.0)).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn partial_trace_identity() {
        let n = 4usize;
        let id = tensor_product(&FockOperator::identity(n - 1), &FockOperator::identity(n - 1));
        let ta = partial_trace(&id, Side::B);
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { n as f64 } else { 0.0 };
                assert!((ta.entry(i, j) - c(want, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn partial_transpose_involution_and_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let x = random_hermitian(&mut rng, 3);
        let y = random_hermitian(&mut rng, 3);
        let xy = tensor_product(&x, &y);
        let pt = partial_transpose(&xy);
        // X ⊗ Yᵀ
        for a in 0..3 {
            for b in 0..3 {
                for ap in 0..3 {
                    for bp in 0..3 {
                        let want = x.entry(a, ap) * y.entry(bp, b);
                        assert!((pt.entry((a, b), (ap, bp)) - want).norm() < tol::EXACT);
                    }
                }
            }
        }
        let back = partial_transpose(&pt);
        assert!((back.matrix() - xy.matrix())
            .iter()
            .all(|d| d.norm() < tol::EXACT));
        // Hermiticity preserved
        assert!(pt.max_asymmetry() < tol::EXACT);
    }

    #[test]
    fn partial_transpose_bell_min_eigenvalue() {
        let amps = vec![
            c(1.0 / 2f64.sqrt(), 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(1.0 / 2f64.sqrt(), 0.0),
        ];
        let proj = TwoModeVector::new(2, 2, amps).unwrap().outer();
        let pt = partial_transpose(&proj);
        assert!((pt.min_eigenvalue() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn partial_transpose_diagonal_fixed() {
        let mut m = TwoModeOperator::zeros(2, 3);
        for k in 0..6 {
            m.matrix_mut()[(k, k)] = c(k as f64, 0.0);
        }
        let pt = partial_transpose(&m);
        assert_eq!(pt.matrix(), m.matrix());
    }

    #[test]
    fn tensor_identities() {
        let i2 = FockOperator::identity(1);
        let i4 = tensor_product(&i2, &i2);
        assert!((i4.matrix() - DMatrix::<C64>::identity(4, 4))
            .iter()
            .all(|d| d.norm() == 0.0));

        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let x = random_hermitian(&mut rng, 3);
        let y = random_hermitian(&mut rng, 5);
        let xy = tensor_product(&x, &y);
        assert!((xy.trace() - x.trace() * y.trace()).norm() < tol::EXACT);
        assert_eq!(xy.dim(), 15);

        let p0 = FockVector::basis_state(0, 1).outer();
        let p1 = FockVector::basis_state(1, 1).outer();
        let p01 = tensor_product(&p0, &p1);
        assert!((p01.entry((0, 1), (0, 1)) - c(1.0, 0.0)).norm() == 0.0);
        assert!((p01.trace() - c(1.0, 0.0)).norm() < tol::EXACT);
    }

    #[test]
    fn phase_rotation_basics() {
        let v = FockVector::from_real(&[0.5, 0.5, 0.5, 0.5], 0.0);
        let r0 = v.phase_rotated(0.0);
        assert_eq!(r0, v);
        let r2pi = v.phase_rotated(2.0 * std::f64::consts::PI);
        for n in 0..4 {
            assert!((r2pi.amp(n) - v.amp(n)).norm() < 1e-12);
        }
        let op = v.outer();
        let rot = op.phase_rotated(1.3);
        for n in 0..4 {
            assert!((rot.entry(n, n) - op.entry(n, n)).norm() < 1e-15);
        }
        assert!((rot.trace() - op.trace()).norm() < 1e-12);
        assert!((rot.purity() - op.purity()).abs() < 1e-12);
    }
}
