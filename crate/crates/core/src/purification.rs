//! Purifications, the coherence of purification and residual quantumness.
//!
//! Two readings of the coherence of purification are exposed:
//!
//! * **fixed basis** ([`cop_fixed_basis`]): the least relative entropy of
//!   coherence of `(I ⊗ U_B)|Ψ⟩` over ancilla unitaries `U_B`, dephasing in
//!   the product computational basis `{|i⟩_A|j⟩_B}`. This is the canonical
//!   value used everywhere an inequality is checked.
//! * **adapted** ([`cop_adapted`]): the closed form `H(p_j) + Σ_j p_j H(f^(j))`
//!   for a given decomposition `{p_j, ψ_j}`, `f_i^(j) = |⟨i|ψ_j⟩|²`, with no
//!   minimisation.
//!
//! Rotating the ancilla of a purification is the same as choosing another
//! decomposition of `ρ` with at most `d_B` elements, so the fixed-basis value
//! is the minimum of the adapted form over those decompositions. In
//! particular `fixed ≤ adapted(eigendecomposition)`.

use serde::{Deserialize, Serialize};

use crate::coherence::spectral_coefficients;
use crate::entropy::{entropy_of_weights, shannon_entropy};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::optim::{minimize_over_unitaries, OptimizerConfig, UnitarySearchResult};
use crate::state::{DensityOperator, PureState};

/// Cap on `dim · ancilla_dim` for the fixed-basis search.
pub const MAX_JOINT_DIM: usize = 64;
/// Slack tolerated on a negative residual quantumness before it is treated as
/// an optimizer failure.
pub const RESIDUAL_SLACK: f64 = 1e-6;

/// A pure state on `A ⊗ B` whose reduction to `A` is `source`.
#[derive(Debug, Clone)]
pub struct Purification {
    pub state: PureState,
    pub source: DensityOperator,
    pub ancilla_dim: usize,
}

impl Purification {
    /// Amplitudes as a `d_A × d_B` matrix.
    pub fn coefficients(&self) -> CMatrix {
        let (da, db) = (self.source.dim(), self.ancilla_dim);
        CMatrix::from_fn(da, db, |i, j| self.state.vector()[i * db + j])
    }

    /// `(I ⊗ U)|Ψ⟩`.
    pub fn rotate_ancilla(&self, u: &CMatrix) -> Result<Purification> {
        if u.nrows() != self.ancilla_dim {
            return Err(Error::DimensionMismatch { expected: self.ancilla_dim, got: u.nrows() });
        }
        let rotated = self.coefficients() * u.transpose();
        Ok(Purification {
            state: state_from_coefficients(&rotated)?,
            source: self.source.clone(),
            ancilla_dim: self.ancilla_dim,
        })
    }
}

fn state_from_coefficients(m: &CMatrix) -> Result<PureState> {
    let (da, db) = m.shape();
    let v = CVector::from_fn(da * db, |k, _| m[(k / db, k % db)]);
    PureState::normalized(v, Some(vec![da, db]))
}

/// `Σ_k √λ_k |e_k⟩|k⟩` from the eigendecomposition of `ρ`, dropping
/// eigenvalues below 1e-12. The ancilla defaults to `rank(ρ)` and may be
/// enlarged (extra levels stay unpopulated).
pub fn canonical_purification(rho: &DensityOperator, ancilla_dim: Option<usize>) -> Result<Purification> {
    let rank = rho.rank().max(1);
    let db = ancilla_dim.unwrap_or(rank);
    if db < rank {
        return Err(Error::validation(format!("ancilla dimension {db} is below rank {rank}")));
    }
    let coeffs = spectral_coefficients(rho, db);
    Ok(Purification {
        state: state_from_coefficients(&coeffs)?,
        source: rho.clone(),
        ancilla_dim: db,
    })
}

/// Dephased entropy of a coefficient matrix, i.e. `C_R` of the pure state.
fn dephased_entropy(coeffs: &CMatrix) -> f64 {
    entropy_of_weights(coeffs.iter().map(|z| z.norm_sqr()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CopResult {
    pub value_fixed_basis: f64,
    pub value_adapted: f64,
    pub optimizer: UnitarySearchResult,
    pub ancilla_dim: usize,
}

impl CopResult {
    /// The purification that attains `value_fixed_basis`.
    pub fn optimal_purification(&self, rho: &DensityOperator) -> Result<Purification> {
        canonical_purification(rho, Some(self.ancilla_dim))?.rotate_ancilla(&self.optimizer.best_unitary())
    }
}

/// Fixed-basis coherence of purification with the default ancilla `rank(ρ)`.
pub fn cop_fixed_basis(rho: &DensityOperator, config: &OptimizerConfig) -> Result<CopResult> {
    cop_fixed_basis_with_ancilla(rho, rho.rank().max(1), config)
}

pub fn cop_fixed_basis_with_ancilla(
    rho: &DensityOperator,
    ancilla_dim: usize,
    config: &OptimizerConfig,
) -> Result<CopResult> {
    let joint = rho.dim() * ancilla_dim;
    if joint > MAX_JOINT_DIM {
        return Err(Error::Unsupported(format!(
            "system × ancilla dimension {joint} exceeds {MAX_JOINT_DIM}"
        )));
    }
    let base = canonical_purification(rho, Some(ancilla_dim))?.coefficients();
    let objective = |u: &CMatrix| dephased_entropy(&(&base * u.transpose()));
    let optimizer = minimize_over_unitaries(ancilla_dim, objective, config)?;
    Ok(CopResult {
        value_fixed_basis: optimizer.best_value,
        value_adapted: cop_adapted(rho),
        optimizer,
        ancilla_dim,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AncillaSweep {
    /// `(ancilla_dim, fixed-basis value)` for each dimension tried.
    pub per_dim: Vec<(usize, f64)>,
    pub best: CopResult,
}

/// Fixed-basis value for every ancilla dimension from `rank(ρ)` to
/// `d · rank(ρ)` (capped by [`MAX_JOINT_DIM`]); reports the minimum.
pub fn cop_sweep_ancilla(rho: &DensityOperator, config: &OptimizerConfig) -> Result<AncillaSweep> {
    let rank = rho.rank().max(1);
    let top = (rho.dim() * rank).min(MAX_JOINT_DIM / rho.dim()).max(rank);
    let mut per_dim = Vec::new();
    let mut best: Option<CopResult> = None;
    for db in rank..=top {
        let r = cop_fixed_basis_with_ancilla(rho, db, config)?;
        per_dim.push((db, r.value_fixed_basis));
        if best.as_ref().is_none_or(|b| r.value_fixed_basis < b.value_fixed_basis) {
            best = Some(r);
        }
    }
    Ok(AncillaSweep { per_dim, best: best.expect("at least one ancilla dimension") })
}

/// Adapted closed form for the eigendecomposition of `ρ`.
pub fn cop_adapted(rho: &DensityOperator) -> f64 {
    let (weights, states): (Vec<f64>, Vec<PureState>) = rho
        .support()
        .into_iter()
        .map(|(w, v)| (w, PureState::normalized(v, None).expect("eigenvector is nonzero")))
        .unzip();
    let total: f64 = weights.iter().sum();
    let weights: Vec<f64> = weights.iter().map(|w| w / total).collect();
    cop_adapted_decomposition(&weights, &states).expect("spectral decomposition is valid")
}

/// `H(p_j) + Σ_j p_j H(f^(j))` with `f_i^(j) = |⟨i|ψ_j⟩|²`.
pub fn cop_adapted_decomposition(weights: &[f64], states: &[PureState]) -> Result<f64> {
    if weights.len() != states.len() || states.is_empty() {
        return Err(Error::validation("decomposition needs one weight per state"));
    }
    let dim = states[0].dim();
    if states.iter().any(|s| s.dim() != dim) {
        return Err(Error::validation("decomposition states have different dimensions"));
    }
    let mut value = shannon_entropy(weights)?;
    for (p, psi) in weights.iter().zip(states) {
        value += p * shannon_entropy(&psi.probabilities())?;
    }
    Ok(value)
}

/// Coherence of purification of `Δ[ρ]`: Shannon entropy of the diagonal.
pub fn cop_of_dephased(rho: &DensityOperator) -> f64 {
    entropy_of_weights(rho.diagonal().into_iter())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualResult {
    pub value: f64,
    pub cop: f64,
    pub cop_dephased: f64,
}

/// `C_P(ρ) − C_P(Δ[ρ])`. Values in `[−1e-6, 0)` are optimizer slack and
/// clamp to zero; anything lower is reported as an optimizer failure.
pub fn residual_quantumness(rho: &DensityOperator, config: &OptimizerConfig) -> Result<ResidualResult> {
    let cop = cop_fixed_basis(rho, config)?.value_fixed_basis;
    let cop_dephased = cop_of_dephased(rho);
    let raw = cop - cop_dephased;
    if raw < -RESIDUAL_SLACK {
        return Err(Error::Optimizer(format!(
            "residual quantumness {raw:.3e} is negative beyond slack"
        )));
    }
    Ok(ResidualResult { value: raw.max(0.0), cop, cop_dephased })
}
