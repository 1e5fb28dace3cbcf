//! Entropies (in bits) and distances between density operators.

use crate::error::{Error, Result};
use crate::linalg;
use crate::state::DensityOperator;

#[inline]
fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

/// `−Σ λ log₂ λ` over the (clipped) spectrum.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    rho.eigenvalues().into_iter().map(plogp).sum::<f64>().max(0.0)
}

/// Shannon entropy of a probability vector. Entries down to −1e-12 are
/// clipped; a sum off by more than 1e-9 is renormalized, more than 1e-6 is
/// rejected.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    if let Some(bad) = p.iter().find(|&&x| !(x >= -1e-12)) {
        return Err(Error::validation(format!("probability entry {bad} is negative")));
    }
    let clipped: Vec<f64> = p.iter().map(|&x| x.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::validation(format!("probabilities sum to {total}")));
    }
    if (total - 1.0).abs() > 1e-9 {
        return Ok(entropy_of_weights(clipped.iter().map(|&x| x / total)));
    }
    Ok(entropy_of_weights(clipped.into_iter()))
}

/// Raw `−Σ p log₂ p` with no validation; nonpositive entries contribute 0
/// and round-off below zero is clamped. Used on hot optimisation paths where
/// the input is normalized by construction.
pub fn entropy_of_weights(p: impl Iterator<Item = f64>) -> f64 {
    p.map(plogp).sum::<f64>().max(0.0)
}

/// `h(x) = −x log₂ x − (1−x) log₂(1−x)`; arguments are clamped to [0, 1].
pub fn binary_entropy(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    plogp(x) + plogp(1.0 - x)
}

fn check_dims(a: &DensityOperator, b: &DensityOperator) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    Ok(())
}

/// `W` with `ρ = W W†`, built from the support of `ρ`.
fn support_factor(rho: &DensityOperator) -> linalg::CMatrix {
    let support = rho.support();
    linalg::CMatrix::from_fn(rho.dim(), support.len().max(1), |i, k| {
        support.get(k).map_or(linalg::ZERO, |(lam, v)| v[i] * lam.sqrt())
    })
}

/// Squared Uhlmann fidelity `(Tr √(√a b √a))²`, evaluated as
/// `‖W_a† W_b‖₁²` with `a = W_a W_a†`, `b = W_b W_b†`. Working on the supports
/// avoids square roots of round-off-level eigenvalues.
pub fn uhlmann_fidelity(a: &DensityOperator, b: &DensityOperator) -> Result<f64> {
    check_dims(a, b)?;
    let overlap = support_factor(a).adjoint() * support_factor(b);
    let nuclear: f64 = overlap.singular_values().iter().sum();
    Ok((nuclear * nuclear).clamp(0.0, 1.0))
}

/// Half the trace norm of `a − b`.
pub fn trace_distance(a: &DensityOperator, b: &DensityOperator) -> Result<f64> {
    check_dims(a, b)?;
    let diff = a.matrix() - b.matrix();
    let t: f64 = linalg::hermitian_eigenvalues(&diff).into_iter().map(f64::abs).sum();
    Ok((0.5 * t).clamp(0.0, 1.0))
}
