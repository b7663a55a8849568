//! Declarative affine-constrained PSD programs.
//!
//! A problem is a list of Hermitian PSD variables, a real linear objective,
//! and real linear equality constraints. Entry terms address matrix entries
//! directly; a term `(var, row, col, c)` contributes `Re(c · X[row, col])`,
//! with `X[row, col] = conj(X[col, row])` implied for lower-triangle
//! references. The whole structure round-trips through JSON so a solve can
//! be reproduced by an independent implementation.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// One Hermitian PSD matrix variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsdVar {
    pub name: String,
    pub dim: usize,
}

/// One coefficient on a matrix entry: contributes `Re(coeff · X[row, col])`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntryTerm {
    pub var: usize,
    pub row: usize,
    pub col: usize,
    pub re: f64,
    pub im: f64,
}

impl EntryTerm {
    pub fn new(var: usize, row: usize, col: usize, coeff: C64) -> Self {
        Self {
            var,
            row,
            col,
            re: coeff.re,
            im: coeff.im,
        }
    }

    pub fn coeff(&self) -> C64 {
        C64::new(self.re, self.im)
    }
}

/// One real equality `Σ Re(cᵢ · Xᵢ[rᵢ, cᵢ]) = rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintRow {
    pub terms: Vec<EntryTerm>,
    pub rhs: f64,
}

/// Affine-constrained PSD-cone maximization instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpProblem {
    pub psd_vars: Vec<PsdVar>,
    /// Maximized: `Σ Re(cᵢ · Xᵢ[rᵢ, cᵢ])`.
    pub objective: Vec<EntryTerm>,
    pub eq_constraints: Vec<ConstraintRow>,
    /// Family descriptor or other provenance, free-form.
    pub metadata: String,
    /// Optional initial iterate per variable, row-major `[re, im]` entries.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub initial: Vec<Option<Vec<[f64; 2]>>>,
    /// All data is real and a real optimal point exists (complex
    /// conjugation is a symmetry of the program), so imaginary parts may be
    /// pinned to zero and cone projections run on real symmetric matrices.
    #[serde(default)]
    pub real_symmetric: bool,
}

impl SdpProblem {
    pub fn new(metadata: impl Into<String>) -> Self {
        Self {
            psd_vars: Vec::new(),
            objective: Vec::new(),
            eq_constraints: Vec::new(),
            metadata: metadata.into(),
            initial: Vec::new(),
            real_symmetric: false,
        }
    }

    /// Declare a PSD variable, returning its index.
    pub fn add_var(&mut self, name: impl Into<String>, dim: usize) -> usize {
        self.psd_vars.push(PsdVar {
            name: name.into(),
            dim,
        });
        self.initial.push(None);
        self.psd_vars.len() - 1
    }

    pub fn set_initial(&mut self, var: usize, mat: &nalgebra::DMatrix<C64>) {
        let dim = self.psd_vars[var].dim;
        assert_eq!(mat.nrows(), dim);
        assert_eq!(mat.ncols(), dim);
        let mut flat = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                flat.push([mat[(i, j)].re, mat[(i, j)].im]);
            }
        }
        self.initial[var] = Some(flat);
    }

    pub fn initial_matrix(&self, var: usize) -> Option<nalgebra::DMatrix<C64>> {
        let dim = self.psd_vars[var].dim;
        self.initial.get(var)?.as_ref().map(|flat| {
            nalgebra::DMatrix::from_fn(dim, dim, |i, j| {
                let [re, im] = flat[i * dim + j];
                C64::new(re, im)
            })
        })
    }

    /// Add `Re` (and for off-diagonal functionals `Im`) rows enforcing a
    /// complex linear equality `Σ cᵢ Xᵢ[rᵢ,cᵢ] = rhs`.
    pub fn add_complex_eq(&mut self, terms: &[(usize, usize, usize, C64)], rhs: C64) {
        let re_terms: Vec<EntryTerm> = terms
            .iter()
            .map(|&(v, r, c, z)| EntryTerm::new(v, r, c, z))
            .collect();
        self.eq_constraints.push(ConstraintRow {
            terms: re_terms,
            rhs: rhs.re,
        });
        // Im(Σ c X) = Re(Σ (-i c) X)
        let im_terms: Vec<EntryTerm> = terms
            .iter()
            .map(|&(v, r, c, z)| EntryTerm::new(v, r, c, z * C64::new(0.0, -1.0)))
            .collect();
        self.eq_constraints.push(ConstraintRow {
            terms: im_terms,
            rhs: rhs.im,
        });
    }

    pub fn add_real_eq(&mut self, terms: Vec<EntryTerm>, rhs: f64) {
        self.eq_constraints.push(ConstraintRow { terms, rhs });
    }

    pub fn num_real_constraints(&self) -> usize {
        self.eq_constraints.len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("problem serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
