//! Assembly of the benchmark programs.
//!
//! `assemble_pure_sdp` builds the strategy-operator program for a pure seed:
//! maximize `⟨ψψ|K|ψψ⟩` over block-structured K with `K ⪰ 0`, `K^Γ ⪰ 0`
//! (a second PSD variable linked entrywise through the partial transpose)
//! and unit partial trace. `assemble_mixed_sdp` lifts a mixed seed through
//! a purification: the objective becomes `⟨Ψ₀|σ_av|Ψ₀⟩` with σ_av an
//! extension of the channel output, which turns the fidelity into a linear
//! functional. `assemble_single_seed_sdp` restricts the strategy to the
//! canonical phase measurement and optimizes the guess only.
//! `assemble_pure_sdp_unstructured` is the brute-force reference assembly
//! on the full product space, kept for cross-validation of the block
//! reduction.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::problem::{EntryTerm, SdpProblem};
use super::solver::SdpSolution;
use super::{block_sectors, Sector, TwoModeBlockOperator};
use crate::linalg::{hermitian_eig, FockOperator, FockVector, TwoModeVector};

/// Eigenvalues of the seed below this weight are dropped from the purifier.
pub const PURIFIER_RANK_TOL: f64 = 1e-12;

fn push_trace_objective(problem: &mut SdpProblem, var: usize, c: &DMatrix<C64>) {
    // tr(C X) = Σ_{ij} C[j,i] X[i,j]
    for i in 0..c.nrows() {
        for j in 0..c.ncols() {
            let z = c[(j, i)];
            if z.norm() > 0.0 {
                problem.objective.push(EntryTerm::new(var, i, j, z));
            }
        }
    }
}

/// Pure-seed program over total-excitation blocks.
pub struct PureAssembly {
    pub problem: SdpProblem,
    pub cutoff: usize,
    /// Variable index of `K_s` per sector s.
    pub k_vars: Vec<usize>,
    /// Variable index of the partial-transpose sector `d = idx - N`.
    pub y_vars: Vec<usize>,
}

/// Mixed-seed program: blocks of K plus the lifted output extension σ_av.
pub struct MixedAssembly {
    pub problem: SdpProblem,
    pub cutoff: usize,
    pub k_vars: Vec<usize>,
    pub y_vars: Vec<usize>,
    pub sigma_var: usize,
    pub purifier_rank: usize,
    /// The fixed purification of the (normalized) seed.
    pub psi0: TwoModeVector,
}

/// Phase-measurement-only program: guess seed G plus the lifted extension.
pub struct SingleSeedAssembly {
    pub problem: SdpProblem,
    pub cutoff: usize,
    pub guess_var: usize,
    pub sigma_var: usize,
    pub purifier_rank: usize,
    pub psi0: TwoModeVector,
}

/// Brute-force program on the full `(N+1)²` space, no block reduction.
pub struct UnstructuredAssembly {
    pub problem: SdpProblem,
    pub cutoff: usize,
    pub k_var: usize,
    pub y_var: usize,
}

fn declare_block_vars(
    problem: &mut SdpProblem,
    sectors: &[Sector],
    cutoff: usize,
) -> (Vec<usize>, Vec<usize>) {
    let k_vars: Vec<usize> = sectors
        .iter()
        .map(|s| problem.add_var(format!("K[s={}]", s.total), s.dim))
        .collect();
    let y_vars: Vec<usize> = (-(cutoff as isize)..=cutoff as isize)
        .map(|d| {
            let dim = cutoff + 1 - d.unsigned_abs();
            problem.add_var(format!("Kppt[d={d}]"), dim)
        })
        .collect();
    (k_vars, y_vars)
}

/// Row range of the partial-transpose sector `d`: `n_a ∈ [max(0, d), ...]`.
fn y_a_min(d: isize) -> usize {
    d.max(0) as usize
}

/// Entry links `Y_d[a, a'] = K_s[a, a']` with `s = a + a' - d`, plus the
/// unit-partial-trace rows on the diagonals of K.
fn add_block_constraints(
    problem: &mut SdpProblem,
    sectors: &[Sector],
    k_vars: &[usize],
    y_vars: &[usize],
    cutoff: usize,
) {
    let n = cutoff;
    for (yi, d) in (-(n as isize)..=n as isize).enumerate() {
        let a_min = y_a_min(d);
        let dim = n + 1 - d.unsigned_abs();
        for i in 0..dim {
            for j in i..dim {
                let a = a_min + i;
                let ap = a_min + j;
                let s = (a + ap) as isize - d;
                debug_assert!(s >= 0 && s <= 2 * n as isize);
                let s = s as usize;
                let k = a - sectors[s].a_min;
                let l = ap - sectors[s].a_min;
                problem.add_complex_eq(
                    &[
                        (y_vars[yi], i, j, C64::new(1.0, 0.0)),
                        (k_vars[s], k, l, C64::new(-1.0, 0.0)),
                    ],
                    C64::new(0.0, 0.0),
                );
            }
        }
    }
    // tr_B K = 1 is diagonal for block-structured K: for each n_a, the
    // diagonal entries across sectors n_a .. n_a + N sum to one.
    for na in 0..=n {
        let terms: Vec<EntryTerm> = (na..=na + n)
            .map(|s| {
                let idx = na - sectors[s].a_min;
                EntryTerm::new(k_vars[s], idx, idx, C64::new(1.0, 0.0))
            })
            .collect();
        problem.add_real_eq(terms, 1.0);
    }
}

/// The bilaterally invariant product point `K = 1 ⊗ ρ̄` (phase-averaged
/// seed on B), written into the initial iterate of every block variable.
fn set_product_initial(
    problem: &mut SdpProblem,
    sectors: &[Sector],
    k_vars: &[usize],
    y_vars: &[usize],
    cutoff: usize,
    diag_weights: &[f64],
) {
    let n = cutoff;
    for sec in sectors {
        let mut init = DMatrix::<C64>::zeros(sec.dim, sec.dim);
        for i in 0..sec.dim {
            let b = sec.total - (sec.a_min + i);
            init[(i, i)] = C64::new(diag_weights[b], 0.0);
        }
        problem.set_initial(k_vars[sec.total], &init);
    }
    for (yi, d) in (-(n as isize)..=n as isize).enumerate() {
        let a_min = y_a_min(d);
        let dim = n + 1 - d.unsigned_abs();
        let mut init = DMatrix::<C64>::zeros(dim, dim);
        for i in 0..dim {
            let b = (a_min + i) as isize - d;
            init[(i, i)] = C64::new(diag_weights[b as usize], 0.0);
        }
        problem.set_initial(y_vars[yi], &init);
    }
}

fn normalized_diag_weights(rho: &FockOperator) -> Vec<f64> {
    let tr = rho.trace_re();
    (0..rho.dim()).map(|i| rho.entry(i, i).re / tr).collect()
}

fn vector_is_real(psi: &FockVector) -> bool {
    psi.amps().iter().all(|a| a.im == 0.0)
}

fn operator_is_real(rho: &FockOperator) -> bool {
    rho.matrix().iter().all(|z| z.im == 0.0)
}

/// Program for a pure seed: maximize `⟨ψψ|K|ψψ⟩`.
///
/// The seed is used as given (its truncation deficit is tracked by the
/// caller, not renormalized away), matching the convention that truncation
/// lowers the reported curves.
pub fn assemble_pure_sdp(psi: &FockVector) -> PureAssembly {
    let n = psi.cutoff();
    let sectors = block_sectors(n);
    let mut problem = SdpProblem::new(format!("pure seed, cutoff {n}"));
    problem.real_symmetric = vector_is_real(psi);
    let (k_vars, y_vars) = declare_block_vars(&mut problem, &sectors, n);
    add_block_constraints(&mut problem, &sectors, &k_vars, &y_vars, n);

    // objective: Σ_s v_s v_s† with v_s[a] = ψ_a ψ_{s-a}
    for sec in &sectors {
        let v: Vec<C64> = (0..sec.dim)
            .map(|i| {
                let a = sec.a_min + i;
                psi.amp(a) * psi.amp(sec.total - a)
            })
            .collect();
        let p = DMatrix::from_fn(sec.dim, sec.dim, |i, j| v[i] * v[j].conj());
        push_trace_objective(&mut problem, k_vars[sec.total], &p);
    }

    let weights: Vec<f64> = {
        let total = psi.norm_sq();
        (0..=n).map(|i| psi.amp(i).norm_sqr() / total).collect()
    };
    set_product_initial(&mut problem, &sectors, &k_vars, &y_vars, n, &weights);

    PureAssembly {
        problem,
        cutoff: n,
        k_vars,
        y_vars,
    }
}

/// Purification `Σ √λᵢ |eᵢ⟩|i⟩` of the normalized seed, eigenvalues above
/// [`PURIFIER_RANK_TOL`] in descending order.
fn seed_purification(rho_normalized: &FockOperator) -> (TwoModeVector, usize) {
    let eig = hermitian_eig(rho_normalized).expect("seed must be Hermitian");
    let mut kept: Vec<(f64, usize)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, l)| **l > PURIFIER_RANK_TOL)
        .map(|(i, l)| (*l, i))
        .collect();
    kept.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let rank = kept.len();
    let dim = rho_normalized.dim();
    let mut amps = vec![C64::new(0.0, 0.0); dim * rank];
    for (p, (lam, idx)) in kept.iter().enumerate() {
        let s = lam.sqrt();
        let v = eig.eigenvectors[*idx].amps();
        for b in 0..dim {
            amps[b * rank + p] = v[b] * s;
        }
    }
    (TwoModeVector::new(dim, rank, amps).unwrap(), rank)
}

fn add_sigma_machinery(
    problem: &mut SdpProblem,
    rho: &FockOperator,
    sigma_name: &str,
) -> (usize, usize, TwoModeVector) {
    let n = rho.cutoff();
    let (psi0, rank) = seed_purification(rho);
    let sigma_var = problem.add_var(sigma_name, (n + 1) * rank);
    push_trace_objective(problem, sigma_var, psi0.outer().matrix());

    // tr σ_av = 1
    let trace_terms: Vec<EntryTerm> = (0..(n + 1) * rank)
        .map(|i| EntryTerm::new(sigma_var, i, i, C64::new(1.0, 0.0)))
        .collect();
    problem.add_real_eq(trace_terms, 1.0);

    // initial iterate: diag(ρ) ⊗ 1/rank
    let weights = normalized_diag_weights(rho);
    let mut init = DMatrix::<C64>::zeros((n + 1) * rank, (n + 1) * rank);
    for b in 0..=n {
        for p in 0..rank {
            init[(b * rank + p, b * rank + p)] = C64::new(weights[b] / rank as f64, 0.0);
        }
    }
    problem.set_initial(sigma_var, &init);

    (sigma_var, rank, psi0)
}

/// Uhlmann-lifted program for a mixed seed.
///
/// The seed is normalized to unit trace before assembly so the constraint
/// system is exactly consistent; the caller reports the truncation deficit
/// in its error budget. Reduces to the pure program when the seed has rank
/// one.
pub fn assemble_mixed_sdp(rho: &FockOperator) -> MixedAssembly {
    let n = rho.cutoff();
    let rho = FockOperator::new(rho.matrix().unscale(rho.trace_re()), 0.0).hermitized();
    let sectors = block_sectors(n);
    let mut problem = SdpProblem::new(format!("mixed seed, cutoff {n}"));
    problem.real_symmetric = operator_is_real(&rho);
    let (k_vars, y_vars) = declare_block_vars(&mut problem, &sectors, n);
    add_block_constraints(&mut problem, &sectors, &k_vars, &y_vars, n);
    let weights = normalized_diag_weights(&rho);
    set_product_initial(&mut problem, &sectors, &k_vars, &y_vars, n, &weights);

    let (sigma_var, rank, psi0) = add_sigma_machinery(&mut problem, &rho, "sigma_av");

    // coupling: tr_P σ_av = tr_A[(ρ ⊗ 1)K], entry by entry on (b, b').
    // ρ_av[b,b'] = Σ_a ρ[a, a''] K_s[a'', a] with a'' = a + b' - b, s = a + b'.
    for b in 0..=n {
        for bp in b..=n {
            let d = bp - b;
            let mut terms: Vec<(usize, usize, usize, C64)> = Vec::new();
            for p in 0..rank {
                terms.push((sigma_var, b * rank + p, bp * rank + p, C64::new(1.0, 0.0)));
            }
            for a in 0..=(n - d) {
                let a2 = a + d;
                let s = a + bp;
                let sec = &sectors[s];
                let coeff = -rho.entry(a, a2);
                if coeff.norm() > 0.0 {
                    terms.push((k_vars[s], a2 - sec.a_min, a - sec.a_min, coeff));
                }
            }
            problem.add_complex_eq(&terms, C64::new(0.0, 0.0));
        }
    }

    MixedAssembly {
        problem,
        cutoff: n,
        k_vars,
        y_vars,
        sigma_var,
        purifier_rank: rank,
        psi0,
    }
}

/// Phase-measurement (single-seed POVM) program for a mixed seed.
///
/// The strategy is pinned to the canonical phase measurement; only the
/// guess seed G (a density operator) is optimized. Its induced strategy
/// operator is separable by construction, so no transpose variable is
/// needed; the channel output is `ρ_av[b,b'] = G[b,b'] · Σ_a ρ[a, a+b'-b]`.
pub fn assemble_single_seed_sdp(rho: &FockOperator) -> SingleSeedAssembly {
    let n = rho.cutoff();
    let rho = FockOperator::new(rho.matrix().unscale(rho.trace_re()), 0.0).hermitized();
    let mut problem = SdpProblem::new(format!("single-seed phase measurement, cutoff {n}"));
    problem.real_symmetric = operator_is_real(&rho);
    let guess_var = problem.add_var("G", n + 1);

    // tr G = 1
    let trace_terms: Vec<EntryTerm> = (0..=n)
        .map(|i| EntryTerm::new(guess_var, i, i, C64::new(1.0, 0.0)))
        .collect();
    problem.add_real_eq(trace_terms, 1.0);

    let weights = normalized_diag_weights(&rho);
    let mut ginit = DMatrix::<C64>::zeros(n + 1, n + 1);
    for b in 0..=n {
        ginit[(b, b)] = C64::new(weights[b], 0.0);
    }
    problem.set_initial(guess_var, &ginit);

    let (sigma_var, rank, psi0) = add_sigma_machinery(&mut problem, &rho, "sigma_av");

    for b in 0..=n {
        for bp in b..=n {
            let d = bp - b;
            let mut m = C64::new(0.0, 0.0);
            for a in 0..=(n - d) {
                m += rho.entry(a, a + d);
            }
            let mut terms: Vec<(usize, usize, usize, C64)> = Vec::new();
            for p in 0..rank {
                terms.push((sigma_var, b * rank + p, bp * rank + p, C64::new(1.0, 0.0)));
            }
            if m.norm() > 0.0 {
                terms.push((guess_var, b, bp, -m));
            }
            problem.add_complex_eq(&terms, C64::new(0.0, 0.0));
        }
    }

    SingleSeedAssembly {
        problem,
        cutoff: n,
        guess_var,
        sigma_var,
        purifier_rank: rank,
        psi0,
    }
}

/// Reference program on the full product space with no block structure.
///
/// The objective is the phase-averaged `∫ dφ/2π ⟨ψ_φ ψ_φ|K|ψ_φ ψ_φ⟩`, which
/// the covariant reduction turns into the seed objective of the block
/// program; values must agree. Desk-scale cutoffs only.
pub fn assemble_pure_sdp_unstructured(psi: &FockVector) -> UnstructuredAssembly {
    let n = psi.cutoff();
    let dim = (n + 1) * (n + 1);
    let mut problem = SdpProblem::new(format!("unstructured pure seed, cutoff {n}"));
    problem.real_symmetric = vector_is_real(psi);
    let k_var = problem.add_var("K", dim);
    let y_var = problem.add_var("Kppt", dim);

    let flat = |a: usize, b: usize| a * (n + 1) + b;

    // phase-averaged objective
    let mut mavg = DMatrix::<C64>::zeros(dim, dim);
    for a in 0..=n {
        for b in 0..=n {
            for ap in 0..=n {
                for bp in 0..=n {
                    if a + b == ap + bp {
                        mavg[(flat(a, b), flat(ap, bp))] =
                            psi.amp(a) * psi.amp(b) * (psi.amp(ap) * psi.amp(bp)).conj();
                    }
                }
            }
        }
    }
    push_trace_objective(&mut problem, k_var, &mavg);

    // Y = K^Γ entrywise
    for i in 0..dim {
        for j in i..dim {
            let (a, b) = (i / (n + 1), i % (n + 1));
            let (ap, bp) = (j / (n + 1), j % (n + 1));
            problem.add_complex_eq(
                &[
                    (y_var, i, j, C64::new(1.0, 0.0)),
                    (k_var, flat(a, bp), flat(ap, b), C64::new(-1.0, 0.0)),
                ],
                C64::new(0.0, 0.0),
            );
        }
    }

    // tr_B K = 1_A on the full space
    for a in 0..=n {
        for ap in a..=n {
            let terms: Vec<(usize, usize, usize, C64)> = (0..=n)
                .map(|b| (k_var, flat(a, b), flat(ap, b), C64::new(1.0, 0.0)))
                .collect();
            let rhs = if a == ap {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            };
            problem.add_complex_eq(&terms, rhs);
        }
    }

    // product initial point
    let total = psi.norm_sq();
    let mut init = DMatrix::<C64>::zeros(dim, dim);
    for a in 0..=n {
        for b in 0..=n {
            init[(flat(a, b), flat(a, b))] = C64::new(psi.amp(b).norm_sqr() / total, 0.0);
        }
    }
    problem.set_initial(k_var, &init);
    problem.set_initial(y_var, &init);

    UnstructuredAssembly {
        problem,
        cutoff: n,
        k_var,
        y_var,
    }
}

impl PureAssembly {
    /// Rebuild the block strategy operator from a solution.
    pub fn k_block_operator(&self, sol: &SdpSolution) -> TwoModeBlockOperator {
        blocks_from_solution(self.cutoff, &self.k_vars, sol)
    }
}

impl MixedAssembly {
    pub fn k_block_operator(&self, sol: &SdpSolution) -> TwoModeBlockOperator {
        blocks_from_solution(self.cutoff, &self.k_vars, sol)
    }

    /// The solved output extension σ_av.
    pub fn sigma(&self, sol: &SdpSolution) -> DMatrix<C64> {
        sol.variable(self.sigma_var).clone()
    }
}

fn blocks_from_solution(
    cutoff: usize,
    k_vars: &[usize],
    sol: &SdpSolution,
) -> TwoModeBlockOperator {
    let blocks: Vec<DMatrix<C64>> = k_vars
        .iter()
        .map(|&v| sol.variable(v).clone())
        .collect();
    TwoModeBlockOperator::new(cutoff, blocks).expect("solution blocks match the sector layout")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{fidelity, partial_trace, tensor_product, Side, TwoModeOperator};
    use crate::sdp::solver::{solve_sdp, SolverOptions};
    use crate::sdp::validate_feasibility;
    use crate::states::coherent_state;

    #[test]
    fn trivial_vacuum_program() {
        let psi = FockVector::basis_state(0, 0);
        let asm = assemble_pure_sdp(&psi);
        let sol = solve_sdp(&asm.problem, &SolverOptions::with_tol(1e-9)).unwrap();
        assert!(sol.converged);
        assert!((sol.value - 1.0).abs() < 1e-7, "value {}", sol.value);
    }

    #[test]
    fn pure_qubit_program_matches_closed_form() {
        // Pure qubit seed at polar angle θ: benchmark from the closed form
        // with η = 1.
        let theta: f64 = 1.1;
        let psi = FockVector::from_real(&[(theta / 2.0).cos(), (theta / 2.0).sin()], 0.0);
        let asm = assemble_pure_sdp(&psi);
        let sol = solve_sdp(&asm.problem, &SolverOptions::with_tol(5e-9)).unwrap();
        assert!(sol.converged);
        let expect = crate::qubit::qubit_benchmark(1.0, theta).fidelity;
        assert!(
            (sol.value - expect).abs() < 1e-6,
            "sdp {} vs closed form {expect}",
            sol.value
        );
        // solution must be feasible
        let k = asm.k_block_operator(&sol).embed();
        let rep = validate_feasibility(&k, 1e-5);
        assert!(rep.feasible(), "{rep:?}");
    }

    #[test]
    fn round_trip_objective_consistency() {
        // push the solved K through the channel and recompute the fidelity
        let psi = coherent_state(1.0, 8).unwrap();
        let asm = assemble_pure_sdp(&psi);
        let sol = solve_sdp(&asm.problem, &SolverOptions::with_tol(1e-5)).unwrap();
        assert!(sol.converged);
        let k = asm.k_block_operator(&sol).embed();
        let rho = psi.outer();
        let lifted = tensor_product(&rho, &crate::linalg::FockOperator::identity(8));
        let prod = TwoModeOperator::new(9, 9, lifted.matrix() * k.matrix()).unwrap();
        let rho_av = partial_trace(&prod, Side::A).hermitized();
        let f = fidelity(
            &rho.sanitized_density(1e-6).unwrap(),
            &rho_av.sanitized_density(1e-6).unwrap(),
        )
        .unwrap();
        // fidelity of normalized states vs objective of the raw truncation:
        // the seed deficit is ~1e-6 at this cutoff, inside the slack.
        assert!((f - sol.value).abs() < 1e-4, "round trip {f} vs {}", sol.value);
    }

    #[test]
    fn mixed_reduces_to_pure_for_pure_seed() {
        let psi = coherent_state(0.6, 6).unwrap();
        let pure = assemble_pure_sdp(&psi);
        let pure_sol = solve_sdp(&pure.problem, &SolverOptions::with_tol(3e-6)).unwrap();

        let rho = psi.outer();
        let mixed = assemble_mixed_sdp(&rho);
        assert_eq!(mixed.purifier_rank, 1);
        let mixed_sol = solve_sdp(&mixed.problem, &SolverOptions::with_tol(3e-6)).unwrap();
        // the mixed program normalizes the seed; rescale the pure value
        let scale = psi.norm_sq().powi(2);
        assert!(
            (mixed_sol.value - pure_sol.value / scale).abs() < 1e-5,
            "mixed {} vs pure {}",
            mixed_sol.value,
            pure_sol.value
        );
    }

    #[test]
    fn mixed_phase_invariant_family_is_classical() {
        // thermal seed: the family is a single state, so preparing it
        // classically is perfect.
        let rho = crate::states::thermal_mixture(0.8, 6).unwrap();
        let asm = assemble_mixed_sdp(&rho);
        let sol = solve_sdp(&asm.problem, &SolverOptions::with_tol(1e-7)).unwrap();
        assert!(sol.converged);
        // the affine-side objective can sit a few residuals either side of
        // the exact optimum 1
        assert!((sol.value - 1.0).abs() < 2e-6, "value {}", sol.value);
    }

    #[test]
    fn single_seed_matches_spectral_bound_for_pure_seed() {
        let psi = coherent_state(0.9, 10).unwrap();
        let a = crate::covariant::coherent_a_matrix(0.9, 10);
        let bound = crate::covariant::phase_measurement_bound(&a).unwrap();

        let asm = assemble_single_seed_sdp(&psi.outer());
        let sol = solve_sdp(&asm.problem, &SolverOptions::with_tol(1e-7)).unwrap();
        assert!(sol.converged);
        // the single-seed program normalizes the seed; the spectral bound
        // uses the raw truncation. α = 0.9 at N = 10 leaves deficit ~1e-9.
        assert!(
            (sol.value - bound.fidelity).abs() < 1e-5,
            "single-seed {} vs spectral {}",
            sol.value,
            bound.fidelity
        );
    }
}
