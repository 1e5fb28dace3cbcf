//! Minimisation of real objectives over the unitary group `U(d)`.
//!
//! Each restart runs a simplex descent in the `d²` generator coordinates of
//! [`UnitaryParams`]. Restart 0 always starts at the identity; the others
//! start from random generators. Restarts run in parallel and are aggregated
//! by index, so the result depends only on the seed.

mod simplex;
mod unitary;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::random::{self, Seed};

pub use simplex::{nelder_mead, NonFinite, SimplexOptions, SimplexResult};
pub use unitary::{exp_map, param_count, UnitaryParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub f_tol: f64,
    pub x_tol: f64,
    pub seed: Seed,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig { restarts: 16, max_iters: 2000, f_tol: 1e-9, x_tol: 1e-10, seed: Seed(0) }
    }
}

impl OptimizerConfig {
    pub fn with_seed(mut self, seed: Seed) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::validation("restarts must be at least 1"));
        }
        if self.max_iters == 0 {
            return Err(Error::validation("max_iters must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnitarySearchResult {
    pub best_params: UnitaryParams,
    pub best_value: f64,
    /// One entry per restart; aborted restarts are recorded as `+inf`.
    pub per_restart_values: Vec<f64>,
    pub best_restart: usize,
    pub converged: bool,
    pub failed_restarts: Vec<usize>,
}

impl UnitarySearchResult {
    pub fn best_unitary(&self) -> CMatrix {
        self.best_params.unitary()
    }
}

struct RestartOutcome {
    params: Vec<f64>,
    value: f64,
    converged: bool,
}

fn start_point(dim: usize, restart: usize, seed: Seed) -> Vec<f64> {
    let n = param_count(dim);
    if restart == 0 {
        return vec![0.0; n];
    }
    let mut rng = seed.split(restart as u64).rng();
    (0..n).map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)).collect()
}

/// Multi-start minimisation of `objective` over `U(dim)`.
///
/// Ties between restarts go to the lowest restart index. A restart whose
/// objective becomes non-finite is abandoned and listed in `failed_restarts`;
/// if every restart fails an optimizer error is returned.
pub fn minimize_over_unitaries<F>(dim: usize, objective: F, config: &OptimizerConfig) -> Result<UnitarySearchResult>
where
    F: Fn(&CMatrix) -> f64 + Sync,
{
    config.validate()?;
    if dim == 0 {
        return Err(Error::validation("unitary dimension must be positive"));
    }
    let opts = SimplexOptions {
        max_iters: config.max_iters,
        f_tol: config.f_tol,
        x_tol: config.x_tol,
        initial_step: 0.5,
    };
    let flat = |p: &[f64]| objective(&exp_map(dim, p));
    let outcomes: Vec<std::result::Result<RestartOutcome, NonFinite>> = (0..config.restarts)
        .into_par_iter()
        .map(|r| {
            let x0 = start_point(dim, r, config.seed);
            nelder_mead(&flat, &x0, &opts)
                .map(|s| RestartOutcome { params: s.x, value: s.value, converged: s.converged })
        })
        .collect();

    let mut per_restart_values = Vec::with_capacity(outcomes.len());
    let mut failed_restarts = Vec::new();
    let mut best: Option<(usize, &RestartOutcome)> = None;
    for (r, o) in outcomes.iter().enumerate() {
        match o {
            Ok(out) => {
                per_restart_values.push(out.value);
                if best.is_none_or(|(_, b)| out.value < b.value) {
                    best = Some((r, out));
                }
            }
            Err(_) => {
                per_restart_values.push(f64::INFINITY);
                failed_restarts.push(r);
            }
        }
    }
    let (best_restart, out) =
        best.ok_or_else(|| Error::Optimizer("objective was non-finite in every restart".into()))?;
    Ok(UnitarySearchResult {
        best_params: UnitaryParams::from_vec(dim, out.params.clone()),
        best_value: out.value,
        per_restart_values,
        best_restart,
        converged: out.converged,
        failed_restarts,
    })
}

const ORACLE_BLOCK: usize = 1024;

/// Minimum of `objective` over the identity and `n_samples` Haar-random
/// unitaries. Independent of the simplex path; used only as a cross-check.
pub fn grid_oracle<F>(dim: usize, objective: F, n_samples: usize, seed: Seed) -> f64
where
    F: Fn(&CMatrix) -> f64 + Sync,
{
    let at_identity = objective(&linalg::identity(dim));
    let blocks = n_samples.div_ceil(ORACLE_BLOCK);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = seed.split(b as u64).rng();
            let count = ORACLE_BLOCK.min(n_samples - b * ORACLE_BLOCK);
            (0..count)
                .map(|_| objective(&random::sample_unitary(dim, &mut rng)))
                .filter(|v| v.is_finite())
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min)
        .min(at_identity)
}
