//! First-order operator-splitting solver for [`SdpProblem`].
//!
//! The problem is vectorized isometrically over the real space of Hermitian
//! matrices (diagonal entries, then `√2·Re` / `√2·Im` of the upper
//! triangle). Homogeneous two-term equality rows (in particular the
//! entry links between a strategy operator and its partial transpose) are
//! eliminated up front by a scale-carrying union-find, so the cone stage
//! sees every PSD variable while the affine stage solves a small
//! prefactored normal system. The iteration is ADMM with over-relaxation
//! and residual-balancing penalty updates; schedules are fixed, so a solve
//! is deterministic for identical inputs.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use thiserror::Error;

use super::problem::{EntryTerm, SdpProblem};

#[derive(Debug, Error)]
pub enum SdpError {
    #[error("malformed problem: {0}")]
    BadProblem(String),
    #[error("equality constraints are inconsistent (residual {residual:.3e})")]
    Infeasible { residual: f64 },
}

pub type Result<T> = std::result::Result<T, SdpError>;

/// Solver knobs. Defaults fit the benchmark programs at desk scale.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Absolute primal/dual residual target.
    pub tol: f64,
    pub max_iters: usize,
    /// Initial ADMM penalty.
    pub rho: f64,
    /// Over-relaxation factor in (1, 2).
    pub over_relax: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            max_iters: 200_000,
            rho: 1.0,
            over_relax: 1.6,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// Certified output of a solve.
#[derive(Debug, Clone)]
pub struct SdpSolution {
    /// Objective at the affine-feasible iterate.
    pub value: f64,
    /// Max-norm mismatch between the affine and cone iterates.
    pub primal_residual: f64,
    /// Penalty-scaled change of the cone iterate; estimates the duality gap
    /// contribution of early stopping.
    pub dual_gap_estimate: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Final cone-feasible variables, in declaration order.
    pub variables: Vec<DMatrix<C64>>,
}

impl SdpSolution {
    pub fn variable(&self, idx: usize) -> &DMatrix<C64> {
        &self.variables[idx]
    }

    /// JSON form for cross-implementation debugging: scalars plus each
    /// variable as a column-major `[re, im]` entry grid.
    pub fn to_json(&self) -> String {
        #[derive(serde::Serialize)]
        struct Flat {
            value: f64,
            primal_residual: f64,
            dual_gap_estimate: f64,
            iterations: usize,
            converged: bool,
            variables: Vec<Vec<[f64; 2]>>,
        }
        let variables = self
            .variables
            .iter()
            .map(|m| m.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        serde_json::to_string(&Flat {
            value: self.value,
            primal_residual: self.primal_residual,
            dual_gap_estimate: self.dual_gap_estimate,
            iterations: self.iterations,
            converged: self.converged,
            variables,
        })
        .expect("solution serialization is infallible")
    }
}

// --- svec layout -----------------------------------------------------------

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Coordinate layout of one Hermitian d×d variable: d diagonal entries,
/// then (√2 Re, √2 Im) pairs over the upper triangle in row-major order.
fn svec_len(d: usize) -> usize {
    d * d
}

fn upper_pair_index(d: usize, i: usize, j: usize) -> usize {
    // pairs (i,j), i<j, row-major: index = i*d - i(i+1)/2 + (j - i - 1)
    i * d - i * (i + 1) / 2 + (j - i - 1)
}

fn svec_from_mat(mat: &DMatrix<C64>, out: &mut [f64]) {
    let d = mat.nrows();
    for i in 0..d {
        out[i] = mat[(i, i)].re;
    }
    let mut k = d;
    for i in 0..d {
        for j in (i + 1)..d {
            out[k] = SQRT2 * mat[(i, j)].re;
            out[k + 1] = SQRT2 * mat[(i, j)].im;
            k += 2;
        }
    }
}

fn mat_from_svec(v: &[f64], d: usize) -> DMatrix<C64> {
    let mut m = DMatrix::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = C64::new(v[i], 0.0);
    }
    let mut k = d;
    for i in 0..d {
        for j in (i + 1)..d {
            let z = C64::new(v[k] / SQRT2, v[k + 1] / SQRT2);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            k += 2;
        }
    }
    m
}

/// Convert one entry term into (coordinate, coefficient) pairs within its
/// variable's svec block.
fn term_coords(d: usize, t: &EntryTerm) -> [(usize, f64); 2] {
    let (r, c) = (t.row, t.col);
    if r == c {
        return [(r, t.re), (usize::MAX, 0.0)];
    }
    let (i, j, sign) = if r < c { (r, c, -1.0) } else { (c, r, 1.0) };
    let p = upper_pair_index(d, i, j);
    // Re(z·X[r,c]) with X upper = x + iy, svec coords u = √2x, w = √2y:
    // r<c: Re(z)x − Im(z)y;  r>c: Re(z)x + Im(z)y
    [
        (d + 2 * p, t.re / SQRT2),
        (d + 2 * p + 1, sign * t.im / SQRT2),
    ]
}

// --- scaled union-find ------------------------------------------------------

struct Aliases {
    parent: Vec<usize>,
    scale: Vec<f64>, // x_i = scale[i] · x_parent[i]
    zero: Vec<bool>, // valid on roots
}

impl Aliases {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            scale: vec![1.0; n],
            zero: vec![false; n],
        }
    }

    fn find(&mut self, i: usize) -> (usize, f64) {
        if self.parent[i] == i {
            return (i, self.scale[i]);
        }
        let (root, s) = self.find(self.parent[i]);
        self.parent[i] = root;
        self.scale[i] *= s;
        (root, self.scale[i])
    }

    /// Impose `a·x_i + b·x_j = 0`.
    fn link(&mut self, i: usize, a: f64, j: usize, b: f64) {
        let (ri, si) = self.find(i);
        let (rj, sj) = self.find(j);
        let (ca, cb) = (a * si, b * sj);
        if ri == rj {
            if (ca + cb).abs() > 1e-9 * (ca.abs() + cb.abs()).max(1e-30) {
                self.zero[ri] = true;
            }
            return;
        }
        self.parent[ri] = rj;
        self.scale[ri] = -cb / ca;
        if self.zero[ri] {
            self.zero[rj] = true;
        }
    }

    fn pin_zero(&mut self, i: usize) {
        let (r, _) = self.find(i);
        self.zero[r] = true;
    }

    fn is_zero(&mut self, i: usize) -> bool {
        let (r, _) = self.find(i);
        self.zero[r]
    }
}

// --- semidefinite Cholesky with dependent-row skipping ----------------------

struct PivotedCholesky {
    l: DMatrix<f64>,
    active: Vec<bool>,
}

impl PivotedCholesky {
    fn factor(mut m: DMatrix<f64>, drop_tol: f64) -> Self {
        let n = m.nrows();
        let mut active = vec![true; n];
        for j in 0..n {
            let mut d = m[(j, j)];
            for k in 0..j {
                if active[k] {
                    d -= m[(j, k)] * m[(j, k)];
                }
            }
            if d <= drop_tol {
                active[j] = false;
                continue;
            }
            let ljj = d.sqrt();
            m[(j, j)] = ljj;
            for i in (j + 1)..n {
                let mut v = m[(i, j)];
                for k in 0..j {
                    if active[k] {
                        v -= m[(i, k)] * m[(j, k)];
                    }
                }
                m[(i, j)] = v / ljj;
            }
        }
        Self { l: m, active }
    }

    /// Solve `L Lᵀ x = rhs`, zeroing skipped (dependent) rows.
    fn solve(&self, rhs: &[f64], out: &mut [f64]) {
        let n = rhs.len();
        for i in 0..n {
            if !self.active[i] {
                out[i] = 0.0;
                continue;
            }
            let mut v = rhs[i];
            for k in 0..i {
                if self.active[k] {
                    v -= self.l[(i, k)] * out[k];
                }
            }
            out[i] = v / self.l[(i, i)];
        }
        for i in (0..n).rev() {
            if !self.active[i] {
                out[i] = 0.0;
                continue;
            }
            let mut v = out[i];
            for k in (i + 1)..n {
                if self.active[k] {
                    v -= self.l[(k, i)] * out[k];
                }
            }
            out[i] = v / self.l[(i, i)];
        }
    }
}

// --- the solver -------------------------------------------------------------

/// Penalty-balancing schedule.
const ADAPT_PERIOD: usize = 100;
const ADAPT_FACTOR: f64 = 2.0;
const BALANCE_RATIO: f64 = 10.0;

struct SparseRow {
    idx: Vec<usize>,
    coeff: Vec<f64>,
    rhs: f64,
}

struct Reduced {
    nfree: usize,
    /// Per original coordinate: free index (usize::MAX when pinned to zero)
    /// and the scale carrying it to its root.
    coord_free: Vec<(usize, f64)>,
    dweight: Vec<f64>,
    rows: Vec<SparseRow>,
    obj_free: Vec<f64>,
    var_offsets: Vec<usize>,
    dims: Vec<usize>,
    real_mode: bool,
}

fn validate(problem: &SdpProblem) -> Result<()> {
    let check_term = |t: &EntryTerm| -> Result<()> {
        let var = problem
            .psd_vars
            .get(t.var)
            .ok_or_else(|| SdpError::BadProblem(format!("term references variable {}", t.var)))?;
        if t.row >= var.dim || t.col >= var.dim {
            return Err(SdpError::BadProblem(format!(
                "entry ({}, {}) out of range for {} (dim {})",
                t.row, t.col, var.name, var.dim
            )));
        }
        Ok(())
    };
    for t in &problem.objective {
        check_term(t)?;
    }
    for row in &problem.eq_constraints {
        for t in &row.terms {
            check_term(t)?;
        }
    }
    Ok(())
}

fn reduce(problem: &SdpProblem) -> Result<Reduced> {
    let dims: Vec<usize> = problem.psd_vars.iter().map(|v| v.dim).collect();
    let mut var_offsets = Vec::with_capacity(dims.len());
    let mut total = 0usize;
    for &d in &dims {
        var_offsets.push(total);
        total += svec_len(d);
    }

    // Real sparse rows over global svec coordinates.
    let mut raw_rows: Vec<(Vec<(usize, f64)>, f64)> = Vec::new();
    for row in &problem.eq_constraints {
        let mut acc: std::collections::BTreeMap<usize, f64> = std::collections::BTreeMap::new();
        for t in &row.terms {
            for (local, coeff) in term_coords(dims[t.var], t) {
                if local == usize::MAX || coeff == 0.0 {
                    continue;
                }
                *acc.entry(var_offsets[t.var] + local).or_insert(0.0) += coeff;
            }
        }
        let max_c = acc.values().fold(0.0f64, |m, &v| m.max(v.abs()));
        let terms: Vec<(usize, f64)> = acc
            .into_iter()
            .filter(|(_, v)| v.abs() > 1e-14 * max_c.max(1.0))
            .collect();
        raw_rows.push((terms, row.rhs));
    }

    // Phase 1: absorb homogeneous two-term rows as aliases, one-term rows
    // as zero pins.
    let mut aliases = Aliases::new(total);
    if problem.real_symmetric {
        // imaginary svec coordinates: within each var, the second entry of
        // every off-diagonal pair
        for (vi, &d) in dims.iter().enumerate() {
            for p in 0..(d * (d - 1)) / 2 {
                aliases.pin_zero(var_offsets[vi] + d + 2 * p + 1);
            }
        }
    }
    let mut kept: Vec<(Vec<(usize, f64)>, f64)> = Vec::new();
    for (terms, rhs) in raw_rows {
        if rhs == 0.0 && terms.len() == 2 {
            aliases.link(terms[0].0, terms[0].1, terms[1].0, terms[1].1);
        } else if rhs == 0.0 && terms.len() == 1 {
            aliases.pin_zero(terms[0].0);
        } else if terms.is_empty() {
            if rhs.abs() > 1e-10 {
                return Err(SdpError::Infeasible { residual: rhs.abs() });
            }
        } else {
            kept.push((terms, rhs));
        }
    }

    // Enumerate free roots.
    let mut free_of_root: std::collections::BTreeMap<usize, usize> =
        std::collections::BTreeMap::new();
    let mut coord_free = vec![(usize::MAX, 0.0f64); total];
    for i in 0..total {
        if aliases.is_zero(i) {
            continue;
        }
        let (root, s) = aliases.find(i);
        let next = free_of_root.len();
        let f = *free_of_root.entry(root).or_insert(next);
        coord_free[i] = (f, s);
    }
    let nfree = free_of_root.len();

    let mut dweight = vec![0.0f64; nfree];
    for i in 0..total {
        let (f, s) = coord_free[i];
        if f != usize::MAX {
            dweight[f] += s * s;
        }
    }

    // Rewrite remaining rows over free coordinates, normalized.
    let mut rows = Vec::with_capacity(kept.len());
    for (terms, rhs) in kept {
        let mut acc: std::collections::BTreeMap<usize, f64> = std::collections::BTreeMap::new();
        for (coord, coeff) in terms {
            let (f, s) = coord_free[coord];
            if f != usize::MAX {
                *acc.entry(f).or_insert(0.0) += coeff * s;
            }
        }
        let norm: f64 = acc.values().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= 1e-13 {
            if rhs.abs() > 1e-10 {
                return Err(SdpError::Infeasible { residual: rhs.abs() });
            }
            continue;
        }
        let (idx, coeff): (Vec<usize>, Vec<f64>) =
            acc.into_iter().map(|(k, v)| (k, v / norm)).unzip();
        rows.push(SparseRow {
            idx,
            coeff,
            rhs: rhs / norm,
        });
    }

    let mut obj_free = vec![0.0f64; nfree];
    for t in &problem.objective {
        for (local, coeff) in term_coords(dims[t.var], t) {
            if local == usize::MAX || coeff == 0.0 {
                continue;
            }
            let (f, s) = coord_free[var_offsets[t.var] + local];
            if f != usize::MAX {
                obj_free[f] += coeff * s;
            }
        }
    }

    Ok(Reduced {
        nfree,
        coord_free,
        dweight,
        rows,
        obj_free,
        var_offsets,
        dims,
        real_mode: problem.real_symmetric,
    })
}

/// Project a Hermitian matrix (given as svec) onto the PSD cone in place.
fn project_psd(v: &mut [f64], d: usize, real_mode: bool) {
    if d == 1 {
        v[0] = v[0].max(0.0);
        return;
    }
    if real_mode {
        // imaginary coordinates are pinned to zero upstream
        let mut m = DMatrix::<f64>::zeros(d, d);
        for i in 0..d {
            m[(i, i)] = v[i];
        }
        let mut k = d;
        for i in 0..d {
            for j in (i + 1)..d {
                let x = v[k] / SQRT2;
                m[(i, j)] = x;
                m[(j, i)] = x;
                k += 2;
            }
        }
        let se = m.symmetric_eigen();
        let mut out = DMatrix::<f64>::zeros(d, d);
        for (kk, &lam) in se.eigenvalues.iter().enumerate() {
            if lam <= 0.0 {
                continue;
            }
            let col = se.eigenvectors.column(kk);
            for i in 0..d {
                for j in 0..d {
                    out[(i, j)] += col[i] * col[j] * lam;
                }
            }
        }
        for i in 0..d {
            v[i] = out[(i, i)];
        }
        let mut k = d;
        for i in 0..d {
            for j in (i + 1)..d {
                v[k] = SQRT2 * out[(i, j)];
                v[k + 1] = 0.0;
                k += 2;
            }
        }
        return;
    }
    let m = mat_from_svec(v, d);
    let se = m.symmetric_eigen();
    let mut out = DMatrix::<C64>::zeros(d, d);
    for (k, &lam) in se.eigenvalues.iter().enumerate() {
        if lam <= 0.0 {
            continue;
        }
        let col = se.eigenvectors.column(k);
        for i in 0..d {
            for j in 0..d {
                out[(i, j)] += col[i] * col[j].conj() * C64::new(lam, 0.0);
            }
        }
    }
    svec_from_mat(&out, v);
}

/// Solve an [`SdpProblem`] to the requested residual tolerance.
///
/// Deterministic for identical inputs and options. Hitting the iteration
/// cap returns the best iterate flagged `converged: false`; inconsistent
/// equality constraints are an explicit error.
pub fn solve_sdp(problem: &SdpProblem, opts: &SolverOptions) -> Result<SdpSolution> {
    validate(problem)?;
    let red = reduce(problem)?;
    let nvars = red.dims.len();
    let m = red.rows.len();

    // Prefactor the normal matrix of the affine projection.
    let chol = if m > 0 {
        let mut normal = DMatrix::<f64>::zeros(m, m);
        // coordinate → (row, coeff) incidence
        let mut incidence: Vec<Vec<(usize, f64)>> = vec![Vec::new(); red.nfree];
        for (ri, row) in red.rows.iter().enumerate() {
            for (k, &ci) in row.idx.iter().enumerate() {
                incidence[ci].push((ri, row.coeff[k]));
            }
        }
        for (ci, lists) in incidence.iter().enumerate() {
            let dw = red.dweight[ci];
            for (a, &(ri, va)) in lists.iter().enumerate() {
                for &(rj, vb) in lists.iter().skip(a) {
                    let contrib = va * vb / dw;
                    if ri <= rj {
                        normal[(rj, ri)] += contrib;
                    } else {
                        normal[(ri, rj)] += contrib;
                    }
                }
            }
        }
        for i in 0..m {
            for j in (i + 1)..m {
                normal[(i, j)] = normal[(j, i)];
            }
        }
        let scale = (0..m).map(|i| normal[(i, i)]).fold(0.0f64, f64::max);
        Some(PivotedCholesky::factor(normal, 1e-11 * scale.max(1.0)))
    } else {
        None
    };

    // Affine-consistency check at the origin point.
    let mut f = vec![0.0f64; red.nfree];
    let mut nu = vec![0.0f64; m];
    let mut resid = vec![0.0f64; m];
    if let Some(chol) = &chol {
        for (ri, row) in red.rows.iter().enumerate() {
            resid[ri] = -row.rhs;
        }
        chol.solve(&resid, &mut nu);
        // f = -D⁻¹ Aᵀ ν ; residual check
        for v in f.iter_mut() {
            *v = 0.0;
        }
        for (ri, row) in red.rows.iter().enumerate() {
            for (k, &ci) in row.idx.iter().enumerate() {
                f[ci] -= row.coeff[k] * nu[ri] / red.dweight[ci];
            }
        }
        let mut worst = 0.0f64;
        for row in red.rows.iter() {
            let mut s = -row.rhs;
            for (k, &ci) in row.idx.iter().enumerate() {
                s += row.coeff[k] * f[ci];
            }
            worst = worst.max(s.abs());
        }
        if worst > 1e-7 {
            return Err(SdpError::Infeasible { residual: worst });
        }
    }

    // Cone iterates per variable.
    let mut z: Vec<Vec<f64>> = Vec::with_capacity(nvars);
    let mut u: Vec<Vec<f64>> = Vec::with_capacity(nvars);
    for (vi, &d) in red.dims.iter().enumerate() {
        let mut zv = vec![0.0f64; svec_len(d)];
        if let Some(init) = problem.initial_matrix(vi) {
            svec_from_mat(&init, &mut zv);
        }
        z.push(zv);
        u.push(vec![0.0f64; svec_len(d)]);
    }

    let mut rho = opts.rho;
    let alpha = opts.over_relax;
    let mut xhat: Vec<Vec<f64>> = red.dims.iter().map(|&d| vec![0.0f64; svec_len(d)]).collect();
    let mut w = vec![0.0f64; red.nfree];

    let mut primal = f64::INFINITY;
    let mut dual = f64::INFINITY;
    let mut iterations = 0usize;
    let mut converged = false;

    for iter in 0..opts.max_iters {
        iterations = iter + 1;

        // x-step: weighted average of cone iterates plus objective tilt,
        // projected onto the affine subspace.
        for v in w.iter_mut() {
            *v = 0.0;
        }
        for vi in 0..nvars {
            let off = red.var_offsets[vi];
            let zv = &z[vi];
            let uv = &u[vi];
            for k in 0..zv.len() {
                let (fi, s) = red.coord_free[off + k];
                if fi != usize::MAX {
                    w[fi] += s * (zv[k] - uv[k]);
                }
            }
        }
        for (fi, v) in w.iter_mut().enumerate() {
            *v = (*v + red.obj_free[fi] / rho) / red.dweight[fi];
        }
        if let Some(chol) = &chol {
            for (ri, row) in red.rows.iter().enumerate() {
                let mut s = -row.rhs;
                for (k, &ci) in row.idx.iter().enumerate() {
                    s += row.coeff[k] * w[ci];
                }
                resid[ri] = s;
            }
            chol.solve(&resid, &mut nu);
            f.copy_from_slice(&w);
            for (ri, row) in red.rows.iter().enumerate() {
                for (k, &ci) in row.idx.iter().enumerate() {
                    f[ci] -= row.coeff[k] * nu[ri] / red.dweight[ci];
                }
            }
        } else {
            f.copy_from_slice(&w);
        }

        // gather, then z/u updates with over-relaxation
        let mut r_prim = 0.0f64;
        let mut r_dual = 0.0f64;
        for vi in 0..nvars {
            let off = red.var_offsets[vi];
            let xv = &mut xhat[vi];
            for k in 0..xv.len() {
                let (fi, s) = red.coord_free[off + k];
                xv[k] = if fi == usize::MAX { 0.0 } else { s * f[fi] };
            }
            let zv = &mut z[vi];
            let uv = &mut u[vi];
            for k in 0..xv.len() {
                r_prim = r_prim.max((xv[k] - zv[k]).abs());
            }
            // relaxed point, projected
            let d = red.dims[vi];
            let mut g: Vec<f64> = (0..xv.len())
                .map(|k| alpha * xv[k] + (1.0 - alpha) * zv[k] + uv[k])
                .collect();
            project_psd(&mut g, d, red.real_mode);
            for k in 0..xv.len() {
                let znew = g[k];
                r_dual = r_dual.max(rho * (znew - zv[k]).abs());
                uv[k] += alpha * xv[k] + (1.0 - alpha) * zv[k] - znew;
                zv[k] = znew;
            }
        }
        primal = r_prim;
        dual = r_dual;

        if r_prim <= opts.tol && r_dual <= opts.tol {
            converged = true;
            break;
        }

        // residual balancing, fixed schedule
        if (iter + 1) % ADAPT_PERIOD == 0 {
            if r_prim > BALANCE_RATIO * r_dual && rho < 1e8 {
                rho *= ADAPT_FACTOR;
                for uv in u.iter_mut() {
                    for v in uv.iter_mut() {
                        *v /= ADAPT_FACTOR;
                    }
                }
            } else if r_dual > BALANCE_RATIO * r_prim && rho > 1e-6 {
                rho /= ADAPT_FACTOR;
                for uv in u.iter_mut() {
                    for v in uv.iter_mut() {
                        *v *= ADAPT_FACTOR;
                    }
                }
            }
        }
    }

    let value: f64 = red
        .obj_free
        .iter()
        .zip(f.iter())
        .map(|(c, x)| c * x)
        .sum();

    let variables: Vec<DMatrix<C64>> = red
        .dims
        .iter()
        .enumerate()
        .map(|(vi, &d)| mat_from_svec(&z[vi], d))
        .collect();

    Ok(SdpSolution {
        value,
        primal_residual: primal,
        dual_gap_estimate: dual,
        iterations,
        converged,
        variables,
    })
}
