//! Constructors for the benchmark test-state families on a truncated Fock
//! basis: coherent and squeezed-vacuum pure states, thermal mixtures, and
//! displaced / squeezed thermal states, plus phase rotation, purification
//! and automatic cutoff selection.
//!
//! Every constructor reports the probability weight lost above the cutoff.
//! Truncated displacement and squeezing operators are exponentiated at a
//! padded working cutoff and cropped back, since exponentiating directly at
//! the target cutoff distorts the edge rows.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    hermitian_eig, partial_trace, FockOperator, FockVector, LinalgError, Side,
    TwoModeVector,
};

/// Hard ceiling for automatic cutoff search.
pub const CUTOFF_CAP: usize = 512;
/// Extra levels used when exponentiating truncated ladder operators.
pub const EXP_PADDING: usize = 8;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("parameter {name} = {value} outside {allowed}")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        allowed: &'static str,
    },
    #[error("cutoff cap {cap} exceeded; best deficit achieved: {achieved:.3e}")]
    CutoffCapExceeded { cap: usize, achieved: f64 },
    #[error("cannot parse family spec {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, StateError>;

/// Which Gaussian unitary dresses the thermal core in [`gaussian_mixed`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaussianKind {
    Displaced,
    Squeezed,
}

/// Descriptor for one test-state family. Only the parameters relevant to
/// the kind are present; α and r are real non-negative by convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilySpec {
    /// Bloch vector of length η at polar angle θ, rotated about z.
    Qubit { eta: f64, theta: f64 },
    /// Coherent state |α⟩ with real α ≥ 0.
    Coherent { alpha: f64 },
    /// Squeezed vacuum parameterized by λ ∈ [0, 1) on even Fock levels.
    SqueezedVacuum { lambda: f64 },
    /// D(α) ρ_β D(α)† with thermal purity μ ∈ (0, 1].
    DisplacedThermal { alpha: f64, mu: f64 },
    /// S(r) ρ_β S(r)† with thermal purity μ ∈ (0, 1].
    SqueezedThermal { r: f64, mu: f64 },
}

impl FamilySpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            FamilySpec::Qubit { .. } => "qubit",
            FamilySpec::Coherent { .. } => "coherent",
            FamilySpec::SqueezedVacuum { .. } => "squeezed_vacuum",
            FamilySpec::DisplacedThermal { .. } => "displaced_thermal",
            FamilySpec::SqueezedThermal { .. } => "squeezed_thermal",
        }
    }

    pub fn mu(&self) -> Option<f64> {
        match self {
            FamilySpec::DisplacedThermal { mu, .. } | FamilySpec::SqueezedThermal { mu, .. } => {
                Some(*mu)
            }
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name: &'static str, value: f64, ok: bool, allowed: &'static str| {
            if ok && value.is_finite() {
                Ok(())
            } else {
                Err(StateError::ParameterOutOfRange {
                    name,
                    value,
                    allowed,
                })
            }
        };
        match *self {
            FamilySpec::Qubit { eta, theta } => {
                check("eta", eta, (0.0..=1.0).contains(&eta), "[0, 1]")?;
                check(
                    "theta",
                    theta,
                    (0.0..=std::f64::consts::PI).contains(&theta),
                    "[0, pi]",
                )
            }
            FamilySpec::Coherent { alpha } => check("alpha", alpha, alpha >= 0.0, "[0, inf)"),
            FamilySpec::SqueezedVacuum { lambda } => {
                check("lambda", lambda, (0.0..1.0).contains(&lambda), "[0, 1)")
            }
            FamilySpec::DisplacedThermal { alpha, mu } => {
                check("alpha", alpha, alpha >= 0.0, "[0, inf)")?;
                check("mu", mu, mu > 0.0 && mu <= 1.0, "(0, 1]")
            }
            FamilySpec::SqueezedThermal { r, mu } => {
                check("r", r, r >= 0.0, "[0, inf)")?;
                check("mu", mu, mu > 0.0 && mu <= 1.0, "(0, 1]")
            }
        }
    }

    /// Canonical plain-text form, e.g. `coherent alpha=2`,
    /// `squeezed_thermal r=0.5 mu=0.8`. `parse` inverts it.
    pub fn canonical(&self) -> String {
        match *self {
            FamilySpec::Qubit { eta, theta } => format!("qubit eta={eta} theta={theta}"),
            FamilySpec::Coherent { alpha } => format!("coherent alpha={alpha}"),
            FamilySpec::SqueezedVacuum { lambda } => format!("squeezed_vacuum lambda={lambda}"),
            FamilySpec::DisplacedThermal { alpha, mu } => {
                format!("displaced_thermal alpha={alpha} mu={mu}")
            }
            FamilySpec::SqueezedThermal { r, mu } => format!("squeezed_thermal r={r} mu={mu}"),
        }
    }

    pub fn parse(input: &str) -> Result<Self> {
        let err = |reason: &str| StateError::Parse {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        let mut words = input.split_whitespace();
        let kind = words.next().ok_or_else(|| err("empty spec"))?;
        let mut kv = std::collections::BTreeMap::new();
        for w in words {
            let (k, v) = w.split_once('=').ok_or_else(|| err("expected key=value"))?;
            let v: f64 = v
                .parse()
                .map_err(|e| err(&format!("bad value for {k}: {e}")))?;
            kv.insert(k.to_string(), v);
        }
        let get = |k: &str| {
            kv.get(k)
                .copied()
                .ok_or_else(|| err(&format!("missing {k}")))
        };
        let spec = match kind {
            "qubit" => FamilySpec::Qubit {
                eta: get("eta")?,
                theta: get("theta")?,
            },
            "coherent" => FamilySpec::Coherent {
                alpha: get("alpha")?,
            },
            "squeezed_vacuum" => FamilySpec::SqueezedVacuum {
                lambda: get("lambda")?,
            },
            "displaced_thermal" => FamilySpec::DisplacedThermal {
                alpha: get("alpha")?,
                mu: get("mu")?,
            },
            "squeezed_thermal" => FamilySpec::SqueezedThermal {
                r: get("r")?,
                mu: get("mu")?,
            },
            other => return Err(err(&format!("unknown family kind {other:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl std::fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.canonical())
    }
}

impl std::str::FromStr for FamilySpec {
    type Err = StateError;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// Outcome of a cutoff search: the chosen cutoff and the deficit left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationReport {
    pub cutoff: usize,
    pub deficit: f64,
}

/// `|α⟩ = e^{-α²/2} Σ αⁿ/√n! |n⟩` truncated at N, deficit tracked.
pub fn coherent_state(alpha: f64, cutoff: usize) -> Result<FockVector> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(StateError::ParameterOutOfRange {
            name: "alpha",
            value: alpha,
            allowed: "[0, inf)",
        });
    }
    let mut amps = vec![0.0f64; cutoff + 1];
    amps[0] = (-alpha * alpha / 2.0).exp();
    for n in 0..cutoff {
        amps[n + 1] = amps[n] * alpha / ((n + 1) as f64).sqrt();
    }
    let norm_sq: f64 = amps.iter().map(|a| a * a).sum();
    Ok(FockVector::from_real(&amps, (1.0 - norm_sq).max(0.0)))
}

/// Squeezed vacuum `(1-λ²)^{1/4} Σ (-λ/2)ⁿ √(2n)!/n! |2n⟩` truncated at N.
pub fn squeezed_vacuum(lambda: f64, cutoff: usize) -> Result<FockVector> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(StateError::ParameterOutOfRange {
            name: "lambda",
            value: lambda,
            allowed: "[0, 1)",
        });
    }
    let mut amps = vec![0.0f64; cutoff + 1];
    // t_n = (-λ/2)^n √(2n)!/n! on level 2n
    let mut t = (1.0 - lambda * lambda).powf(0.25);
    let mut n = 0usize;
    while 2 * n <= cutoff {
        amps[2 * n] = t;
        let k = n as f64;
        t *= -lambda / 2.0 * ((2.0 * k + 2.0) * (2.0 * k + 1.0)).sqrt() / (k + 1.0);
        n += 1;
    }
    let norm_sq: f64 = amps.iter().map(|a| a * a).sum();
    Ok(FockVector::from_real(&amps, (1.0 - norm_sq).max(0.0)))
}

/// β from purity via μ = tanh(β/2).
pub fn beta_from_purity(mu: f64) -> f64 {
    2.0 * mu.atanh()
}

/// λ = tanh r. Convention linking the pure squeezing parameter λ to the
/// squeezing strength r of the thermal family; used where the two
/// parameterizations meet (μ → 1 limits).
pub fn lambda_from_r(r: f64) -> f64 {
    r.tanh()
}

/// Thermal state `ρ_β = (1-e^{-β}) e^{-β a†a}` of purity μ, truncated at N.
pub fn thermal_mixture(mu: f64, cutoff: usize) -> Result<FockOperator> {
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(StateError::ParameterOutOfRange {
            name: "mu",
            value: mu,
            allowed: "(0, 1]",
        });
    }
    let q = (-beta_from_purity(mu)).exp(); // 0 at μ=1
    let mut mat = DMatrix::zeros(cutoff + 1, cutoff + 1);
    let mut w = 1.0 - q;
    let mut tr = 0.0;
    for n in 0..=cutoff {
        mat[(n, n)] = C64::new(w, 0.0);
        tr += w;
        w *= q;
    }
    Ok(FockOperator::new(mat, (1.0 - tr).max(0.0)))
}

/// Ladder operator `a` with `a[n-1, n] = √n` at the given dimension.
fn ladder(dim: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = (n as f64).sqrt();
    }
    a
}

/// `exp(G)` for real antisymmetric G, via the Hermitian eigenproblem of iG.
fn orthogonal_exp(g: &DMatrix<f64>) -> DMatrix<f64> {
    let dim = g.nrows();
    let h = DMatrix::from_fn(dim, dim, |i, j| C64::new(0.0, g[(i, j)]));
    let herm = FockOperator::new(h, 0.0).hermitized();
    let eig = hermitian_eig(&herm).expect("iG is Hermitian by construction");
    let mut out = DMatrix::<C64>::zeros(dim, dim);
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        let phase = C64::from_polar(1.0, -lam);
        let v = eig.eigenvectors[k].amps();
        for i in 0..dim {
            for j in 0..dim {
                out[(i, j)] += v[i] * v[j].conj() * phase;
            }
        }
    }
    DMatrix::from_fn(dim, dim, |i, j| out[(i, j)].re)
}

/// Displacement `D(α) = exp[α(a†-a)]` truncated at `dim`, built at a padded
/// cutoff elsewhere; this is the raw exponential at the stated dimension.
fn displacement_matrix(alpha: f64, dim: usize) -> DMatrix<f64> {
    let a = ladder(dim);
    let g = a.transpose() - &a;
    orthogonal_exp(&g.scale(alpha))
}

/// Squeezing `S(r) = exp[r/2 (a² - a†²)]` at the stated dimension.
fn squeezing_matrix(r: f64, dim: usize) -> DMatrix<f64> {
    let a = ladder(dim);
    let a2 = &a * &a;
    let g = &a2 - a2.transpose();
    orthogonal_exp(&g.scale(r / 2.0))
}

/// Displaced or squeezed thermal state, computed by exponentiating truncated
/// ladder operators at cutoff `N + EXP_PADDING` and cropping back to N.
pub fn gaussian_mixed(
    kind: GaussianKind,
    param: f64,
    mu: f64,
    cutoff: usize,
) -> Result<FockOperator> {
    if !(param >= 0.0) || !param.is_finite() {
        return Err(StateError::ParameterOutOfRange {
            name: "param",
            value: param,
            allowed: "[0, inf)",
        });
    }
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(StateError::ParameterOutOfRange {
            name: "mu",
            value: mu,
            allowed: "(0, 1]",
        });
    }
    let work = cutoff + EXP_PADDING;
    let dim = work + 1;
    let thermal = thermal_mixture(mu, work)?;
    let u = match kind {
        GaussianKind::Displaced => displacement_matrix(param, dim),
        GaussianKind::Squeezed => squeezing_matrix(param, dim),
    };
    let uc = DMatrix::from_fn(dim, dim, |i, j| C64::new(u[(i, j)], 0.0));
    let rho = &uc * thermal.matrix() * uc.transpose();
    let cropped = rho.view((0, 0), (cutoff + 1, cutoff + 1)).into_owned();
    let tr: f64 = cropped.diagonal().iter().map(|z| z.re).sum();
    Ok(FockOperator::new(cropped, (1.0 - tr).max(0.0)).hermitized())
}

/// Phase rotation of a state vector: amplitudes times `e^{iφn}`.
pub fn phase_rotate_vector(state: &FockVector, phi: f64) -> FockVector {
    state.phase_rotated(phi)
}

/// Phase rotation of an operator: entries times `e^{iφ(n-m)}`.
pub fn phase_rotate_operator(op: &FockOperator, phi: f64) -> FockOperator {
    op.phase_rotated(phi)
}

/// Spectral purification of a density operator.
///
/// The purifier dimension equals the number of eigenvalues above `rank_tol`;
/// tracing the purifier out recovers the operator up to that tail.
pub fn purify(rho: &FockOperator, rank_tol: f64) -> Result<TwoModeVector> {
    rho.check_hermitian()?;
    let eig = hermitian_eig(rho)?;
    let dim = rho.dim();
    let mut kept: Vec<(f64, &FockVector)> = eig
        .eigenvalues
        .iter()
        .zip(eig.eigenvectors.iter())
        .filter(|(l, _)| **l > rank_tol)
        .map(|(l, v)| (*l, v))
        .collect();
    // largest weight first so purifier index 0 carries the dominant branch
    kept.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    assert!(
        !kept.is_empty(),
        "purify: no eigenvalue above rank_tol = {rank_tol:e}"
    );
    let rank = kept.len();
    let mut amps = vec![C64::new(0.0, 0.0); dim * rank];
    for (i, (lam, v)) in kept.iter().enumerate() {
        let s = lam.sqrt();
        for n in 0..dim {
            amps[n * rank + i] = v.amp(n) * s;
        }
    }
    Ok(TwoModeVector::new(dim, rank, amps)?)
}

/// Round-trip check used by tests: `tr_P |Ψ⟩⟨Ψ|` as a Fock operator.
pub fn purifier_traced(psi: &TwoModeVector) -> FockOperator {
    partial_trace(&psi.outer(), Side::B)
}

fn pure_family_deficit(spec: &FamilySpec, cutoff: usize) -> Result<f64> {
    Ok(match *spec {
        FamilySpec::Coherent { alpha } => coherent_state(alpha, cutoff)?.norm_deficit(),
        FamilySpec::SqueezedVacuum { lambda } => squeezed_vacuum(lambda, cutoff)?.norm_deficit(),
        FamilySpec::Qubit { .. } => 0.0,
        _ => unreachable!("mixed families use the diagonal prefix path"),
    })
}

/// Smallest cutoff with truncation deficit at most `deficit_tol`.
///
/// The deficit is phase-invariant, so it is evaluated at the family seed.
/// Pure families are searched by doubling then bisection on the amplitude
/// series; mixed families take prefix sums of the photon-number weights
/// computed once at the cap.
pub fn auto_cutoff(spec: &FamilySpec, deficit_tol: f64) -> Result<TruncationReport> {
    assert!(deficit_tol > 0.0, "deficit tolerance must be positive");
    spec.validate()?;
    match *spec {
        FamilySpec::Qubit { .. } => Ok(TruncationReport {
            cutoff: 1,
            deficit: 0.0,
        }),
        FamilySpec::Coherent { .. } | FamilySpec::SqueezedVacuum { .. } => {
            let deficit_at = |n: usize| pure_family_deficit(spec, n);
            if deficit_at(0)? <= deficit_tol {
                return Ok(TruncationReport {
                    cutoff: 0,
                    deficit: deficit_at(0)?,
                });
            }
            // double until inside tolerance or capped
            let mut hi = 1usize;
            while deficit_at(hi)? > deficit_tol {
                if hi >= CUTOFF_CAP {
                    return Err(StateError::CutoffCapExceeded {
                        cap: CUTOFF_CAP,
                        achieved: deficit_at(CUTOFF_CAP)?,
                    });
                }
                hi = (hi * 2).min(CUTOFF_CAP);
            }
            let mut lo = hi / 2; // deficit(lo) > tol unless hi == 1
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                if deficit_at(mid)? <= deficit_tol {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Ok(TruncationReport {
                cutoff: hi,
                deficit: deficit_at(hi)?,
            })
        }
        FamilySpec::DisplacedThermal { alpha, mu } => {
            mixed_auto_cutoff(GaussianKind::Displaced, alpha, mu, deficit_tol)
        }
        FamilySpec::SqueezedThermal { r, mu } => {
            mixed_auto_cutoff(GaussianKind::Squeezed, r, mu, deficit_tol)
        }
    }
}

fn mixed_auto_cutoff(
    kind: GaussianKind,
    param: f64,
    mu: f64,
    deficit_tol: f64,
) -> Result<TruncationReport> {
    // Photon-number weights once at a generous working cutoff, then the
    // smallest prefix whose tail is inside tolerance.
    let work = 160.min(CUTOFF_CAP);
    let rho = gaussian_mixed(kind, param, mu, work)?;
    let mut tail = vec![0.0f64; work + 2];
    for n in (0..=work).rev() {
        tail[n] = tail[n + 1] + rho.entry(n, n).re;
    }
    let total: f64 = tail[0];
    for n in 0..=work {
        let deficit = (1.0 - (total - tail[n + 1])).max(0.0);
        if deficit <= deficit_tol {
            return Ok(TruncationReport { cutoff: n, deficit });
        }
    }
    Err(StateError::CutoffCapExceeded {
        cap: CUTOFF_CAP,
        achieved: (1.0 - total).max(0.0),
    })
}

/// Seed state of a family at a given cutoff: pure vector or density matrix.
#[derive(Debug, Clone)]
pub enum SeedState {
    Pure(FockVector),
    Mixed(FockOperator),
}

impl SeedState {
    pub fn deficit(&self) -> f64 {
        match self {
            SeedState::Pure(v) => v.norm_deficit(),
            SeedState::Mixed(m) => m.trace_deficit(),
        }
    }

    /// The seed as a density operator (outer product for pure seeds).
    pub fn density(&self) -> FockOperator {
        match self {
            SeedState::Pure(v) => v.outer().with_trace_deficit(v.norm_deficit()),
            SeedState::Mixed(m) => m.clone(),
        }
    }
}

/// Build the seed state of `spec` at cutoff N.
pub fn seed_state(spec: &FamilySpec, cutoff: usize) -> Result<SeedState> {
    spec.validate()?;
    Ok(match *spec {
        FamilySpec::Qubit { eta, theta } => SeedState::Mixed(qubit_seed(eta, theta)),
        FamilySpec::Coherent { alpha } => SeedState::Pure(coherent_state(alpha, cutoff)?),
        FamilySpec::SqueezedVacuum { lambda } => SeedState::Pure(squeezed_vacuum(lambda, cutoff)?),
        FamilySpec::DisplacedThermal { alpha, mu } => {
            SeedState::Mixed(gaussian_mixed(GaussianKind::Displaced, alpha, mu, cutoff)?)
        }
        FamilySpec::SqueezedThermal { r, mu } => {
            SeedState::Mixed(gaussian_mixed(GaussianKind::Squeezed, r, mu, cutoff)?)
        }
    })
}

/// Qubit seed density matrix: Bloch vector of length η at polar angle θ.
pub fn qubit_seed(eta: f64, theta: f64) -> FockOperator {
    let z = eta * theta.cos();
    let x = eta * theta.sin();
    FockOperator::from_real(
        &[
            0.5 * (1.0 + z),
            0.5 * x,
            0.5 * x,
            0.5 * (1.0 - z),
        ],
        2,
        0.0,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::fidelity;
    use proptest::prelude::*;

    #[test]
    fn coherent_vacuum_and_formula() {
        let v = coherent_state(0.0, 5).unwrap();
        assert_eq!(v.amp(0), C64::new(1.0, 0.0));
        assert_eq!(v.norm_deficit(), 0.0);

        let v = coherent_state(1.0, 23).unwrap();
        assert!((v.amp(0).re - (-0.5f64).exp()).abs() < 1e-15);
        assert!((v.amp(0).re - 0.60653).abs() < 1e-5);
    }

    #[test]
    fn coherent_alpha_sq_ten_deficit() {
        // Exact Poisson tail at α² = 10, N = 23: the probability weight
        // above the cutoff is 1.2012e-4; the amplitude-norm loss stays
        // below the 1e-4 policy.
        let v = coherent_state(10f64.sqrt(), 23).unwrap();
        assert!(v.norm_deficit() < 1.21e-4, "deficit {}", v.norm_deficit());
        assert!(v.norm_deficit() > 1.19e-4);
        assert!(1.0 - v.norm_sq().sqrt() < 1e-4);
    }

    #[test]
    fn coherent_rejects_negative() {
        assert!(coherent_state(-0.1, 5).is_err());
    }

    #[test]
    fn squeezed_basics() {
        let v = squeezed_vacuum(0.0, 6).unwrap();
        assert_eq!(v.amp(0), C64::new(1.0, 0.0));
        assert!(v.norm_sq() == 1.0);

        let v = squeezed_vacuum(0.5, 40).unwrap();
        for n in (1..=39).step_by(2) {
            assert_eq!(v.amp(n), C64::new(0.0, 0.0));
        }
        // amp₂/amp₀ = -(λ/2)√2 at λ = 0.5
        let ratio = v.amp(2).re / v.amp(0).re;
        assert!((ratio + 0.25 * 2f64.sqrt()).abs() < 1e-14, "ratio {ratio}");
        assert!((ratio + 0.35355).abs() < 1e-5);
        assert!(squeezed_vacuum(1.0, 6).is_err());
    }

    proptest! {
        #[test]
        fn squeezed_parity_exact(lambda in 0.0f64..0.95) {
            let v = squeezed_vacuum(lambda, 41).unwrap();
            for n in (1..=41).step_by(2) {
                prop_assert_eq!(v.amp(n), C64::new(0.0, 0.0));
            }
        }

        #[test]
        fn phase_rotation_preserves_norm(phi in -10.0f64..10.0) {
            let v = coherent_state(1.3, 25).unwrap();
            let r = phase_rotate_vector(&v, phi);
            prop_assert!((r.norm_sq() - v.norm_sq()).abs() < 1e-12);
        }
    }

    #[test]
    fn thermal_values() {
        let rho = thermal_mixture(1.0, 8).unwrap();
        assert!((rho.entry(0, 0).re - 1.0).abs() < 1e-15);
        assert!(rho.trace_deficit() < 1e-15);

        // μ = 0.8: β = 2 artanh(0.8) = ln 9, weights (1 - 1/9)(1/9)^n
        let rho = thermal_mixture(0.8, 40).unwrap();
        assert!((beta_from_purity(0.8) - 2.19722).abs() < 1e-5);
        assert!((rho.entry(0, 0).re - 0.8889).abs() < 1e-4);

        let rho = thermal_mixture(0.7, 60).unwrap();
        assert!((rho.purity() - 0.7).abs() < 1e-6, "purity {}", rho.purity());

        assert!(thermal_mixture(0.0, 5).is_err());
        assert!(thermal_mixture(1.2, 5).is_err());
    }

    #[test]
    fn gaussian_mixed_reduces_to_thermal_at_zero_param() {
        let a = gaussian_mixed(GaussianKind::Displaced, 0.0, 0.6, 12).unwrap();
        let b = thermal_mixture(0.6, 12).unwrap();
        for i in 0..=12 {
            for j in 0..=12 {
                assert!((a.entry(i, j) - b.entry(i, j)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn gaussian_mixed_pure_limits_match_pure_constructors() {
        let rho = gaussian_mixed(GaussianKind::Displaced, 1.0, 1.0, 25).unwrap();
        let coh = coherent_state(1.0, 25).unwrap().outer();
        let f = fidelity(&rho.sanitized_density(1e-8).unwrap(), &coh.sanitized_density(1e-8).unwrap()).unwrap();
        assert!(f >= 1.0 - 1e-6, "fidelity {f}");

        let r = 0.3f64;
        let rho = gaussian_mixed(GaussianKind::Squeezed, r, 1.0, 40).unwrap();
        let sv = squeezed_vacuum(lambda_from_r(r), 40).unwrap().outer();
        let f = fidelity(&rho.sanitized_density(1e-8).unwrap(), &sv.sanitized_density(1e-8).unwrap()).unwrap();
        assert!(f >= 1.0 - 1e-6, "fidelity {f}");
    }

    #[test]
    fn gaussian_mixed_purity_preserved_by_unitaries() {
        let rho = gaussian_mixed(GaussianKind::Squeezed, 0.3, 0.8, 30).unwrap();
        assert!((rho.purity() - 0.8).abs() < 1e-4, "purity {}", rho.purity());
        let rho = gaussian_mixed(GaussianKind::Displaced, 0.8, 0.9, 30).unwrap();
        assert!((rho.purity() - 0.9).abs() < 1e-4, "purity {}", rho.purity());
    }

    #[test]
    fn purify_pure_and_rank_two() {
        let psi = coherent_state(0.7, 10).unwrap().normalized();
        let p = purify(&psi.outer(), 1e-12).unwrap();
        assert_eq!(p.dim_b(), 1);
        let mut overlap = C64::new(0.0, 0.0);
        for n in 0..=10 {
            overlap += psi.amp(n).conj() * p.amp(n, 0);
        }
        assert!((overlap.norm() - 1.0).abs() < 1e-10);

        let rho = FockOperator::from_real(&[0.3, 0.0, 0.0, 0.7], 2, 0.0);
        let p = purify(&rho, 1e-12).unwrap();
        assert_eq!(p.dim_b(), 2);
        assert!((p.amp(1, 0).norm_sqr() - 0.7).abs() < 1e-12);
        assert!((p.amp(0, 1).norm_sqr() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn purify_round_trip_thermal() {
        let rho = thermal_mixture(0.8, 20).unwrap();
        let p = purify(&rho, 1e-14).unwrap();
        let back = purifier_traced(&p);
        for i in 0..=20 {
            for j in 0..=20 {
                assert!((back.entry(i, j) - rho.entry(i, j)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn auto_cutoff_examples() {
        let spec = FamilySpec::Coherent {
            alpha: 10f64.sqrt(),
        };
        // Independent prefix-sum oracle for the smallest adequate cutoff.
        let direct_smallest = |tol: f64| {
            let mut n = 0usize;
            loop {
                if coherent_state(10f64.sqrt(), n).unwrap().norm_deficit() <= tol {
                    break n;
                }
                n += 1;
            }
        };
        let rep = auto_cutoff(&spec, 1e-4).unwrap();
        assert_eq!(rep.cutoff, direct_smallest(1e-4));
        assert!(rep.deficit <= 1e-4);
        // The N = 23 policy corresponds to the weight tail 1.2012e-4.
        assert!(rep.cutoff <= 24, "N = {}", rep.cutoff);
        let rep = auto_cutoff(&spec, 1.21e-4).unwrap();
        assert!(rep.cutoff <= 23, "N = {}", rep.cutoff);

        let rep = auto_cutoff(&FamilySpec::Coherent { alpha: 0.0 }, 1e-6).unwrap();
        assert_eq!(rep.cutoff, 0);

        // Frozen from direct tail summation of the amplitude series: the
        // smallest even support cutoff with deficit ≤ 1e-6 at λ = 0.9.
        let rep = auto_cutoff(&FamilySpec::SqueezedVacuum { lambda: 0.9 }, 1e-6).unwrap();
        let direct = {
            let mut n = 0usize;
            loop {
                let v = squeezed_vacuum(0.9, n).unwrap();
                if v.norm_deficit() <= 1e-6 {
                    break n;
                }
                n += 1;
            }
        };
        assert_eq!(rep.cutoff, direct);
    }

    #[test]
    fn auto_cutoff_monotone_deficit() {
        let spec = FamilySpec::SqueezedVacuum { lambda: 0.8 };
        let mut last = f64::INFINITY;
        for n in 0..80 {
            let d = squeezed_vacuum(0.8, n).unwrap().norm_deficit();
            assert!(d <= last + 1e-15);
            last = d;
        }
        let _ = spec;
    }

    #[test]
    fn family_spec_roundtrip_and_validation() {
        let specs = [
            FamilySpec::Qubit {
                eta: 0.5,
                theta: 1.0,
            },
            FamilySpec::Coherent { alpha: 2.0 },
            FamilySpec::SqueezedVacuum { lambda: 0.35 },
            FamilySpec::DisplacedThermal {
                alpha: 1.5,
                mu: 0.8,
            },
            FamilySpec::SqueezedThermal { r: 0.5, mu: 0.7 },
        ];
        for s in specs {
            let text = s.canonical();
            let back = FamilySpec::parse(&text).unwrap();
            assert_eq!(s, back, "{text}");
        }
        assert!(FamilySpec::parse("coherent alpha=-1").is_err());
        assert!(FamilySpec::parse("nonsense x=1").is_err());
        assert!(FamilySpec::parse("squeezed_vacuum lambda=1.0").is_err());
    }
}
