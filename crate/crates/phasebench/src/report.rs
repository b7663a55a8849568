//! Benchmark evaluation dispatch: one family point, one method, one
//! result record with its error budget.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::covariant::{
    self, a_operator, coherent_a_matrix, phase_measurement_bound, phase_measurement_seed,
    restricted_guess_fidelity, RestrictedFamily,
};
use crate::linalg::LinalgError;
use crate::qubit::qubit_benchmark;
use crate::sdp::{
    assemble_mixed_sdp, assemble_single_seed_sdp, solve_sdp, SdpError, SolverOptions,
};
use crate::states::{self, FamilySpec, SeedState, StateError};

/// How a benchmark value was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Closed form; qubit families only.
    Analytic,
    /// Canonical phase measurement with the optimal guess: spectral bound
    /// for pure seeds, guess-restricted program for mixed seeds.
    PhaseMeasurement,
    /// Phase measurement with the guess forced into the family; pure
    /// coherent and squeezed-vacuum families only.
    RestrictedGuess,
    /// Full strategy program with the positivity-under-partial-transpose
    /// relaxation: the rigorous upper bound.
    Sdp,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::PhaseMeasurement => "phase_measurement",
            Method::RestrictedGuess => "restricted_guess",
            Method::Sdp => "sdp",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "analytic" => Some(Method::Analytic),
            "phase_measurement" => Some(Method::PhaseMeasurement),
            "restricted_guess" => Some(Method::RestrictedGuess),
            "sdp" => Some(Method::Sdp),
            _ => None,
        }
    }

    pub fn compatible_with(&self, family: &FamilySpec) -> bool {
        match (self, family) {
            (Method::Analytic, FamilySpec::Qubit { .. }) => true,
            (Method::Analytic, _) => false,
            (Method::RestrictedGuess, FamilySpec::Coherent { .. }) => true,
            (Method::RestrictedGuess, FamilySpec::SqueezedVacuum { .. }) => true,
            (Method::RestrictedGuess, _) => false,
            (Method::PhaseMeasurement, _) => true,
            (Method::Sdp, _) => true,
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Cutoff selection policy for a sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutoffPolicy {
    Fixed(usize),
    DeficitTol(f64),
}

impl CutoffPolicy {
    /// Default policy used by the CLI: the standard pure-state cutoff for
    /// pure continuous-variable families, the smaller mixed-program cutoff
    /// otherwise.
    pub fn default_for(family: &FamilySpec) -> Self {
        match family {
            FamilySpec::Qubit { .. } => CutoffPolicy::Fixed(1),
            FamilySpec::Coherent { .. } | FamilySpec::SqueezedVacuum { .. } => {
                CutoffPolicy::Fixed(23)
            }
            _ => CutoffPolicy::Fixed(12),
        }
    }
}

/// Knobs threaded through an evaluation.
#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    /// Solver tolerance for qubit-sized programs.
    pub sdp_tol_small: f64,
    /// Solver tolerance for continuous-variable programs.
    pub sdp_tol_large: f64,
    pub sdp_max_iters: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            sdp_tol_small: 1e-7,
            sdp_tol_large: 1e-5,
            sdp_max_iters: 200_000,
        }
    }
}

/// One benchmark value with its complete error budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkResult {
    pub family: String,
    pub param_name: String,
    pub param_value: f64,
    pub mu: Option<f64>,
    pub method: Method,
    pub fidelity: f64,
    /// Probability weight of the seed above the cutoff.
    pub trunc_deficit: f64,
    /// Quadrature / series assembly error, when a quadrature was involved.
    pub quad_error: f64,
    /// Final solver residual, when an SDP was solved.
    pub solver_residual: f64,
    pub wall_ms: f64,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("method {method} is not defined for family {family}")]
    IncompatibleMethod { method: String, family: String },
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Covariant(#[from] covariant::CovariantError),
    #[error(transparent)]
    Sdp(#[from] SdpError),
    #[error("solver did not converge (primal {primal:.2e}, dual {dual:.2e})")]
    NotConverged { primal: f64, dual: f64 },
}

pub type Result<T> = std::result::Result<T, ReportError>;

/// Axis parameter name used in serialized records for each family.
pub fn axis_name(family: &FamilySpec) -> &'static str {
    match family {
        FamilySpec::Qubit { .. } => "eta",
        FamilySpec::Coherent { .. } => "alpha_sq",
        FamilySpec::SqueezedVacuum { .. } => "lambda",
        FamilySpec::DisplacedThermal { .. } => "alpha_sq",
        FamilySpec::SqueezedThermal { .. } => "r",
    }
}

/// Axis value of a family point (α² for amplitude axes).
pub fn axis_value(family: &FamilySpec) -> f64 {
    match *family {
        FamilySpec::Qubit { eta, .. } => eta,
        FamilySpec::Coherent { alpha } => alpha * alpha,
        FamilySpec::SqueezedVacuum { lambda } => lambda,
        FamilySpec::DisplacedThermal { alpha, .. } => alpha * alpha,
        FamilySpec::SqueezedThermal { r, .. } => r,
    }
}

fn resolve_cutoff(family: &FamilySpec, policy: &CutoffPolicy) -> Result<usize> {
    match policy {
        CutoffPolicy::Fixed(n) => Ok(*n),
        CutoffPolicy::DeficitTol(tol) => Ok(states::auto_cutoff(family, *tol)?.cutoff),
    }
}

/// Evaluate one (family point, method) pair.
pub fn evaluate_point(
    family: &FamilySpec,
    method: Method,
    policy: &CutoffPolicy,
    opts: &EvalOptions,
) -> Result<BenchmarkResult> {
    if !method.compatible_with(family) {
        return Err(ReportError::IncompatibleMethod {
            method: method.name().to_string(),
            family: family.kind_name().to_string(),
        });
    }
    family.validate()?;
    let start = std::time::Instant::now();
    let cutoff = resolve_cutoff(family, policy)?;

    let mut quad_error = 0.0;
    let mut solver_residual = 0.0;
    let mut trunc_deficit = 0.0;

    let fidelity = match method {
        Method::Analytic => match *family {
            FamilySpec::Qubit { eta, theta } => qubit_benchmark(eta, theta).fidelity,
            _ => unreachable!("compatibility checked above"),
        },
        Method::RestrictedGuess => {
            let restricted = match *family {
                FamilySpec::Coherent { alpha } => {
                    trunc_deficit = states::coherent_state(alpha, cutoff)?.norm_deficit();
                    restricted_guess_fidelity(RestrictedFamily::Coherent { alpha })?
                }
                FamilySpec::SqueezedVacuum { lambda } => {
                    trunc_deficit = states::squeezed_vacuum(lambda, cutoff)?.norm_deficit();
                    restricted_guess_fidelity(RestrictedFamily::Squeezed { lambda })?
                }
                _ => unreachable!("compatibility checked above"),
            };
            quad_error = restricted.quad_error.max(restricted.series_tail);
            restricted.fidelity
        }
        Method::PhaseMeasurement => match states::seed_state(family, cutoff)? {
            SeedState::Pure(psi) => {
                trunc_deficit = psi.norm_deficit();
                let a = if let FamilySpec::Coherent { alpha } = *family {
                    coherent_a_matrix(alpha, cutoff)
                } else {
                    a_operator(&psi, &phase_measurement_seed(cutoff), 64)?
                };
                quad_error = a.est_error;
                phase_measurement_bound(&a)?.fidelity
            }
            SeedState::Mixed(rho) => {
                trunc_deficit = rho.trace_deficit();
                let asm = assemble_single_seed_sdp(&rho);
                let sol = solve_sdp(
                    &asm.problem,
                    &SolverOptions {
                        tol: opts.sdp_tol_large,
                        max_iters: opts.sdp_max_iters,
                        ..Default::default()
                    },
                )?;
                if !sol.converged {
                    return Err(ReportError::NotConverged {
                        primal: sol.primal_residual,
                        dual: sol.dual_gap_estimate,
                    });
                }
                solver_residual = sol.primal_residual.max(sol.dual_gap_estimate);
                sol.value
            }
        },
        Method::Sdp => {
            let seed = states::seed_state(family, cutoff)?;
            trunc_deficit = seed.deficit();
            let (problem, tol) = match &seed {
                SeedState::Pure(psi) => {
                    (crate::sdp::assemble_pure_sdp(psi).problem, opts.sdp_tol_large)
                }
                SeedState::Mixed(rho) => {
                    let tol = if rho.dim() <= 4 {
                        opts.sdp_tol_small
                    } else {
                        opts.sdp_tol_large
                    };
                    (assemble_mixed_sdp(rho).problem, tol)
                }
            };
            let sol = solve_sdp(
                &problem,
                &SolverOptions {
                    tol,
                    max_iters: opts.sdp_max_iters,
                    ..Default::default()
                },
            )?;
            if !sol.converged {
                return Err(ReportError::NotConverged {
                    primal: sol.primal_residual,
                    dual: sol.dual_gap_estimate,
                });
            }
            solver_residual = sol.primal_residual.max(sol.dual_gap_estimate);
            sol.value
        }
    };

    Ok(BenchmarkResult {
        family: family.kind_name().to_string(),
        param_name: axis_name(family).to_string(),
        param_value: axis_value(family),
        mu: family.mu(),
        method,
        // solver iterates can overshoot exact optima by O(residual)
        fidelity: fidelity.min(1.0),
        trunc_deficit,
        quad_error,
        solver_residual,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}
