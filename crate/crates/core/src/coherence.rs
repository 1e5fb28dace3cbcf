//! Coherence measures and the channel classes of the resource theory.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelClass, KrausChannel};
use crate::entropy::{entropy_of_weights, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix};
use crate::optim::{minimize_over_unitaries, OptimizerConfig, UnitarySearchResult};
use crate::random::{complex_normal, Seed};
use crate::state::{DensityOperator, PureState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceBasis {
    #[default]
    Computational,
}

/// A coherence quantity in bits, with the basis it refers to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceValue {
    pub value: f64,
    pub basis: ReferenceBasis,
}

impl CoherenceValue {
    fn computational(value: f64) -> Self {
        CoherenceValue { value: value.max(0.0), basis: ReferenceBasis::Computational }
    }
}

/// `S(Δ[ρ]) − S(ρ)`.
pub fn relative_entropy_coherence(rho: &DensityOperator) -> CoherenceValue {
    let dephased = entropy_of_weights(rho.diagonal().into_iter());
    CoherenceValue::computational(dephased - von_neumann_entropy(rho))
}

/// Relative entropy of coherence of a pure state: entropy of `|ψ_i|²`.
pub fn pure_coherence(psi: &PureState) -> f64 {
    entropy_of_weights(psi.probabilities().into_iter())
}

/// Largest dimension accepted by [`coherence_of_formation`].
pub const FORMATION_MAX_DIM: usize = 8;

#[derive(Debug, Clone)]
pub struct FormationResult {
    pub value: CoherenceValue,
    /// Absent when the decomposition is unique (pure input).
    pub optimizer: Option<UnitarySearchResult>,
}

/// Average pure-state coherence `Σ_j p_j C_R(ψ_j)` of the decomposition read
/// off the columns of a purification coefficient matrix (rows: system,
/// columns: ancilla).
pub(crate) fn decomposition_coherence(coeffs: &CMatrix) -> f64 {
    let mut total = 0.0;
    for col in coeffs.column_iter() {
        let p: f64 = col.iter().map(|z| z.norm_sqr()).sum();
        if p > 0.0 {
            total += p * entropy_of_weights(col.iter().map(|z| z.norm_sqr() / p));
        }
    }
    total
}

/// Coefficient matrix `Σ_k √λ_k |e_k⟩⟨k|` of the spectral purification, padded
/// to `ancilla_dim` columns.
pub(crate) fn spectral_coefficients(rho: &DensityOperator, ancilla_dim: usize) -> CMatrix {
    let support = rho.support();
    let mut m = CMatrix::zeros(rho.dim(), ancilla_dim);
    for (k, (lambda, v)) in support.iter().enumerate() {
        m.set_column(k, &v.scale(lambda.sqrt()));
    }
    m
}

/// Coherence of formation: the least average pure-state coherence over all
/// decompositions of `ρ`. Decompositions are generated by rotating the
/// ancilla of the spectral purification (ancilla dimension `d²`) and reading
/// off the ancilla basis.
pub fn coherence_of_formation(rho: &DensityOperator, config: &OptimizerConfig) -> Result<FormationResult> {
    let d = rho.dim();
    if d > FORMATION_MAX_DIM {
        return Err(Error::Unsupported(format!(
            "coherence of formation is limited to dimension {FORMATION_MAX_DIM}, got {d}"
        )));
    }
    if rho.is_pure() {
        return Ok(FormationResult { value: relative_entropy_coherence(rho), optimizer: None });
    }
    let ancilla = d * d;
    let base = spectral_coefficients(rho, ancilla);
    let objective = |u: &CMatrix| decomposition_coherence(&(&base * u.transpose()));
    let optimizer = minimize_over_unitaries(ancilla, objective, config)?;
    Ok(FormationResult {
        value: CoherenceValue::computational(optimizer.best_value),
        optimizer: Some(optimizer),
    })
}

/// Random genuinely incoherent channel: `K_n = Σ_i λ_i^(n) |i⟩⟨i|` where each
/// column `(λ_i^(n))_n` is uniform on the unit sphere of `ℂ^{n_kraus}`.
pub fn make_gio_channel(dim: usize, n_kraus: usize, seed: Seed) -> Result<KrausChannel> {
    if n_kraus == 0 {
        return Err(Error::validation("n_kraus must be at least 1"));
    }
    let mut rng = seed.rng();
    let mut ops = vec![CMatrix::zeros(dim, dim); n_kraus];
    for i in 0..dim {
        let amps: Vec<_> = (0..n_kraus).map(|_| complex_normal(&mut rng)).collect();
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for (k, a) in ops.iter_mut().zip(amps) {
            k[(i, i)] = a / norm;
        }
    }
    KrausChannel::new(ops, ChannelClass::GenuinelyIncoherent)
}

/// Random incoherent channel.
///
/// Each of the `n_kraus` base operators sends column `i` to a random row
/// `σ_n(i)` with amplitude `√w_{n,i}` and a random phase, where the weights
/// are positive and sum to one per column. Columns colliding on the same row
/// are split into phase-twirled copies `K_n D_s` (with `D_s` diagonal
/// roots of unity), which cancels the cross terms of `K_n†K_n` exactly. The
/// returned channel therefore has at least `n_kraus` operators.
pub fn make_incoherent_channel(dim: usize, n_kraus: usize, seed: Seed) -> Result<KrausChannel> {
    if n_kraus == 0 {
        return Err(Error::validation("n_kraus must be at least 1"));
    }
    let mut rng = seed.rng();
    let mut weights = vec![vec![0.0; dim]; n_kraus];
    for i in 0..dim {
        let raw: Vec<f64> = (0..n_kraus).map(|_| rng.random::<f64>() + 1e-3).collect();
        let total: f64 = raw.iter().sum();
        for n in 0..n_kraus {
            weights[n][i] = raw[n] / total;
        }
    }
    let mut ops = Vec::new();
    for w in &weights {
        let rows: Vec<usize> = (0..dim).map(|_| rng.random_range(0..dim)).collect();
        // Position of each column among those sharing its row.
        let mut slot = vec![0usize; dim];
        let mut count = vec![0usize; dim];
        for i in 0..dim {
            slot[i] = count[rows[i]];
            count[rows[i]] += 1;
        }
        let copies = count.iter().copied().max().unwrap_or(1).max(1);
        let phases: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        for s in 0..copies {
            let mut k = CMatrix::zeros(dim, dim);
            for i in 0..dim {
                let twirl = std::f64::consts::TAU * (s * slot[i]) as f64 / copies as f64;
                let amp = (w[i] / copies as f64).sqrt();
                let angle = phases[i] + twirl;
                k[(rows[i], i)] = c(amp * angle.cos(), amp * angle.sin());
            }
            ops.push(k);
        }
    }
    KrausChannel::new(ops, ChannelClass::Incoherent)
}

/// Complete dephasing `Π_k = |k⟩⟨k|`.
pub fn make_dephasing_channel(dim: usize) -> KrausChannel {
    let ops = (0..dim)
        .map(|k| {
            let mut p = CMatrix::zeros(dim, dim);
            p[(k, k)] = c(1.0, 0.0);
            p
        })
        .collect();
    KrausChannel::new(ops, ChannelClass::Dephasing).expect("projectors are complete")
}

/// `ρ ↦ I/d` with Kraus operators `|i⟩⟨j|/√d`.
pub fn make_randomizing_channel(dim: usize) -> KrausChannel {
    let s = 1.0 / (dim as f64).sqrt();
    let mut ops = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            let mut k = CMatrix::zeros(dim, dim);
            k[(i, j)] = c(s, 0.0);
            ops.push(k);
        }
    }
    KrausChannel::new(ops, ChannelClass::Randomizing).expect("randomizing channel is complete")
}

/// `U|i⟩|j⟩ = |i⟩|(i + j) mod d_target⟩`, control factor first.
pub fn generalized_cnot(d_control: usize, d_target: usize) -> Result<CMatrix> {
    if d_target < d_control {
        return Err(Error::validation(format!(
            "target dimension {d_target} must be at least the control dimension {d_control}"
        )));
    }
    let n = d_control * d_target;
    let mut u = CMatrix::zeros(n, n);
    for i in 0..d_control {
        for j in 0..d_target {
            u[(i * d_target + (i + j) % d_target, i * d_target + j)] = c(1.0, 0.0);
        }
    }
    Ok(u)
}
