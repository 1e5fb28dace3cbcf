//! Assisted optimal state discrimination (AOSD) with a qubit auxiliary.
//!
//! Two preparations `|ψ±⟩` with overlap `α = ⟨ψ₊|ψ₋⟩ = α₊* α₋` are coupled to
//! an auxiliary qubit; only the images of the two branches are needed:
//!
//! `U|ψ±⟩|A⟩ = √(1 − |α±|²) |±⟩|0⟩ + α± |0⟩|1⟩`.
//!
//! The joint unitary itself is never built.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entanglement::concurrence;
use crate::entropy::binary_entropy;
use crate::error::{Error, Result};
use crate::linalg::{c, CVector, C64};
use crate::optim::OptimizerConfig;
use crate::purification::{cop_fixed_basis, cop_of_dephased};
use crate::random::Seed;
use crate::state::{DensityOperator, PureState};

const AMPLITUDE_TOL: f64 = 1e-12;
const PRIOR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AosdConfig {
    pub alpha: C64,
    pub alpha_plus: C64,
    pub alpha_minus: C64,
    pub p_plus: f64,
    pub p_minus: f64,
}

fn check_priors(p_plus: f64, p_minus: f64) -> Result<()> {
    let ok = (0.0..=1.0).contains(&p_plus)
        && (0.0..=1.0).contains(&p_minus)
        && (p_plus + p_minus - 1.0).abs() <= PRIOR_TOL;
    if !ok {
        return Err(Error::validation(format!("priors {p_plus}, {p_minus} do not form a distribution")));
    }
    Ok(())
}

impl AosdConfig {
    /// Configuration from the overlap and `α₊`; `α₋ = α / α₊*`. When
    /// `α₊ = 0` the overlap must vanish and `α₋` is taken as 0.
    pub fn new(alpha: C64, alpha_plus: C64, p_plus: f64) -> Result<Self> {
        let alpha_minus = if alpha_plus.norm() > AMPLITUDE_TOL {
            alpha / alpha_plus.conj()
        } else if alpha.norm() <= AMPLITUDE_TOL {
            c(0.0, 0.0)
        } else {
            return Err(Error::validation("alpha_plus = 0 requires alpha = 0"));
        };
        let cfg = AosdConfig { alpha, alpha_plus, alpha_minus, p_plus, p_minus: 1.0 - p_plus };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Configuration from both branch amplitudes; `α = α₊* α₋`.
    pub fn from_branches(alpha_plus: C64, alpha_minus: C64, p_plus: f64) -> Result<Self> {
        let cfg = AosdConfig {
            alpha: alpha_plus.conj() * alpha_minus,
            alpha_plus,
            alpha_minus,
            p_plus,
            p_minus: 1.0 - p_plus,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        check_priors(self.p_plus, self.p_minus)?;
        for (name, a) in [("alpha", self.alpha), ("alpha_plus", self.alpha_plus), ("alpha_minus", self.alpha_minus)] {
            if !(a.re.is_finite() && a.im.is_finite()) || a.norm() > 1.0 + AMPLITUDE_TOL {
                return Err(Error::validation(format!("|{name}| = {} must lie in [0, 1]", a.norm())));
            }
        }
        if (self.alpha_plus.conj() * self.alpha_minus - self.alpha).norm() > 1e-10 {
            return Err(Error::validation("alpha must equal conj(alpha_plus) * alpha_minus"));
        }
        Ok(())
    }
}

/// Branch-amplitude choices for which the joint state is separable at equal
/// priors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AosdCondition {
    /// `|α₊| = |α₋| = √|α|`, giving `p_s = 1 − |α|` at equal priors.
    Optimal,
    /// `|α±|² = (1 ± √(1 − 4|α|²))/2`, giving `p_s = 1/2`; needs `|α| ≤ 1/2`.
    Constant { plus_root: bool },
}

impl AosdCondition {
    /// Builds the configuration for overlap `alpha` with the given `α₊` phase.
    pub fn config(self, alpha: C64, phase_plus: f64, p_plus: f64) -> Result<AosdConfig> {
        let a = alpha.norm();
        if a > 1.0 + AMPLITUDE_TOL {
            return Err(Error::validation(format!("|alpha| = {a} exceeds 1")));
        }
        let (m_plus, m_minus) = match self {
            AosdCondition::Optimal => (a.sqrt(), a.sqrt()),
            AosdCondition::Constant { plus_root } => {
                if a > 0.5 + AMPLITUDE_TOL {
                    return Err(Error::validation(format!(
                        "constant-success condition needs |alpha| <= 1/2, got {a}"
                    )));
                }
                let s = (1.0 - 4.0 * a * a).max(0.0).sqrt();
                let (hi, lo) = (((1.0 + s) / 2.0).sqrt(), ((1.0 - s) / 2.0).sqrt());
                if plus_root { (hi, lo) } else { (lo, hi) }
            }
        };
        let theta = alpha.arg();
        let alpha_plus = C64::from_polar(m_plus.min(1.0), phase_plus);
        let alpha_minus = C64::from_polar(m_minus.min(1.0), phase_plus + theta);
        let cfg = AosdConfig { alpha, alpha_plus, alpha_minus, p_plus, p_minus: 1.0 - p_plus };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// `p_s = 1 − p₊|α₊|² − p₋|α₋|²`.
pub fn success_probability(cfg: &AosdConfig) -> f64 {
    (1.0 - cfg.p_plus * cfg.alpha_plus.norm_sqr() - cfg.p_minus * cfg.alpha_minus.norm_sqr()).clamp(0.0, 1.0)
}

/// Post-unitary image of one branch, factors `[S, A]`.
pub fn branch_state(cfg: &AosdConfig, plus: bool) -> PureState {
    let (a, sign) = if plus { (cfg.alpha_plus, 1.0) } else { (cfg.alpha_minus, -1.0) };
    let r = (1.0 - a.norm_sqr()).max(0.0).sqrt() * std::f64::consts::FRAC_1_SQRT_2;
    // Basis order |S A⟩: |00⟩, |01⟩, |10⟩, |11⟩.
    let v = CVector::from_vec(vec![c(r, 0.0), a, c(sign * r, 0.0), c(0.0, 0.0)]);
    PureState::normalized(v, Some(vec![2, 2])).expect("branch amplitudes are normalised")
}

/// `ρ_SA = p₊ |b₊⟩⟨b₊| + p₋ |b₋⟩⟨b₋|`.
pub fn joint_state(cfg: &AosdConfig) -> DensityOperator {
    let plus = branch_state(cfg, true).to_density();
    let minus = branch_state(cfg, false).to_density();
    DensityOperator::mixture(&[(cfg.p_plus, &plus), (cfg.p_minus, &minus)])
        .expect("priors validated")
        .with_factor_dims(vec![2, 2])
        .expect("two qubits")
}

/// `ρ_S = Tr_A ρ_SA`.
pub fn reduced_system_state(cfg: &AosdConfig) -> DensityOperator {
    joint_state(cfg).partial_trace(&[0]).expect("factor 0 exists")
}

/// The closed-form equal-prior system state: diagonal `(1 − p_s/2, p_s/2)`
/// with off-diagonal `(|α|²/|α₊|² − |α₊|²)/4` (written as `(|α₋|² − |α₊|²)/4`,
/// which is also defined at `α₊ = 0`).
pub fn reduced_system_closed_form(cfg: &AosdConfig) -> Result<[[f64; 2]; 2]> {
    if (cfg.p_plus - 0.5).abs() > PRIOR_TOL {
        return Err(Error::Unsupported("closed form requires equal priors".into()));
    }
    let ps = success_probability(cfg);
    let off = (cfg.alpha_minus.norm_sqr() - cfg.alpha_plus.norm_sqr()) / 4.0;
    Ok([[1.0 - ps / 2.0, off], [off, ps / 2.0]])
}

/// `n` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n).map(|i| start + (stop - start) * i as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub ps: f64,
    pub concurrence: f64,
    pub cop: f64,
    pub cop_dephased: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub condition: AosdCondition,
    pub p_plus: f64,
    /// When set, each grid point draws a random common phase for `α₊` and
    /// `α₋` (the overlap `α` stays real). The overlap's own phase is not a
    /// gauge freedom: a complex `α` at the same `|α±|` entangles `S` and `A`.
    pub random_phases: Option<Seed>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { condition: AosdCondition::Optimal, p_plus: 0.5, random_phases: None }
    }
}

/// One row per `|α|` in `grid`: success probability, concurrence of `ρ_SA`,
/// and `C_P` of `ρ_S` and of its dephased version.
pub fn sweep(grid: &[f64], opts: &SweepOptions, config: &OptimizerConfig) -> Result<Vec<SweepRow>> {
    check_priors(opts.p_plus, 1.0 - opts.p_plus)?;
    grid.par_iter()
        .enumerate()
        .map(|(i, &a)| {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::validation(format!("|alpha| = {a} outside [0, 1]")));
            }
            let phase = match opts.random_phases {
                Some(seed) => seed.split(i as u64).rng().random_range(0.0..std::f64::consts::TAU),
                None => 0.0,
            };
            let cfg = opts.condition.config(c(a, 0.0), phase, opts.p_plus)?;
            let rho_s = reduced_system_state(&cfg);
            Ok(SweepRow {
                alpha: a,
                ps: success_probability(&cfg),
                concurrence: concurrence(&joint_state(&cfg))?,
                cop: cop_fixed_basis(&rho_s, config)?.value_fixed_basis,
                cop_dephased: cop_of_dephased(&rho_s),
            })
        })
        .collect()
}

/// `h(p_s/2)`, the coherence of purification predicted at the optimal
/// condition with equal priors.
pub fn predicted_cop(ps: f64) -> f64 {
    binary_entropy(ps / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;

    fn optimal(a: f64) -> AosdConfig {
        AosdCondition::Optimal.config(c(a, 0.0), 0.0, 0.5).unwrap()
    }

    #[test]
    fn success_probability_examples() {
        let orth = AosdConfig::new(c(0.0, 0.0), c(0.0, 0.0), 0.3).unwrap();
        assert_eq!(success_probability(&orth), 1.0);
        for a in [0.0, 0.2, 0.5, 0.9, 1.0] {
            assert!((success_probability(&optimal(a)) - (1.0 - a)).abs() < 1e-12);
        }
        let same = AosdConfig::new(c(1.0, 0.0), c(1.0, 0.0), 0.5).unwrap();
        assert!(success_probability(&same).abs() < 1e-12);
    }

    #[test]
    fn invalid_configs() {
        assert!(AosdConfig::new(c(0.5, 0.0), c(0.0, 0.0), 0.5).is_err());
        assert!(AosdConfig::new(c(0.9, 0.0), c(0.5, 0.0), 0.5).is_err()); // |α₋| = 1.8
        assert!(AosdConfig::new(c(0.3, 0.0), c(0.6, 0.0), 1.2).is_err());
        assert!(AosdCondition::Constant { plus_root: true }.config(c(0.6, 0.0), 0.0, 0.5).is_err());
    }

    #[test]
    fn overlap_survives_the_coupling() {
        for (k, a) in [0.1, 0.4, 0.8].into_iter().enumerate() {
            let alpha = C64::from_polar(a, 0.7 * k as f64);
            let cfg = AosdConfig::new(alpha, C64::from_polar(0.8, 1.3), 0.5).unwrap();
            let ov = branch_state(&cfg, true).overlap(&branch_state(&cfg, false));
            assert!((ov - alpha).norm() < 1e-10, "{ov} vs {alpha}");
        }
    }

    #[test]
    fn no_flag_branch_is_separable() {
        let cfg = AosdConfig::new(c(0.0, 0.0), c(0.0, 0.0), 0.4).unwrap();
        let rho = joint_state(&cfg);
        let expected = DensityOperator::mixture(&[
            (0.4, &PureState::plus().tensor(&PureState::basis(2, 0)).to_density()),
            (0.6, &PureState::minus().tensor(&PureState::basis(2, 0)).to_density()),
        ])
        .unwrap();
        assert!(max_abs(&(rho.matrix() - expected.matrix())) < 1e-12);
        assert!(concurrence(&rho).unwrap() < 1e-12);
    }

    #[test]
    fn optimal_condition_is_diagonal_and_separable() {
        for a in linspace(0.0, 1.0, 21) {
            let cfg = optimal(a);
            let closed = reduced_system_closed_form(&cfg).unwrap();
            let ps = success_probability(&cfg);
            assert!((closed[0][0] - (1.0 - ps / 2.0)).abs() < 1e-12);
            assert!(closed[0][1].abs() < 1e-12);
            assert!(concurrence(&joint_state(&cfg)).unwrap() < 1e-8, "a = {a}");
        }
    }

    #[test]
    fn constant_condition_is_separable_at_half_success() {
        for plus_root in [true, false] {
            for a in linspace(0.0, 0.5, 11) {
                let cfg = AosdCondition::Constant { plus_root }.config(c(a, 0.0), 0.0, 0.5).unwrap();
                assert!((success_probability(&cfg) - 0.5).abs() < 1e-12);
                assert!(concurrence(&joint_state(&cfg)).unwrap() < 1e-8, "a = {a}, {plus_root}");
            }
        }
    }

    #[test]
    fn complex_overlap_is_not_a_gauge_phase() {
        let cfg = AosdCondition::Optimal.config(C64::from_polar(0.2, 3.0), 0.0, 0.5).unwrap();
        assert!(concurrence(&joint_state(&cfg)).unwrap() > 0.1);
    }

    #[test]
    fn generic_amplitudes_can_entangle() {
        let cfg = AosdConfig::new(c(0.3, 0.0), c(0.9, 0.0), 0.5).unwrap();
        assert!(concurrence(&joint_state(&cfg)).unwrap() > 1e-3);
    }

    #[test]
    fn closed_form_matches_partial_trace() {
        let seed = Seed(5);
        for k in 0..20u64 {
            let mut rng = seed.split(k).rng();
            let a = rng.random_range(0.0..1.0f64);
            let ap = rng.random_range(a..=1.0f64).sqrt().max(a); // keeps |α₋| ≤ 1
            let cfg = AosdConfig::new(
                C64::from_polar(a, rng.random_range(0.0..6.28)),
                C64::from_polar(ap, rng.random_range(0.0..6.28)),
                0.5,
            )
            .unwrap();
            let closed = reduced_system_closed_form(&cfg).unwrap();
            let m = reduced_system_state(&cfg);
            for i in 0..2 {
                for j in 0..2 {
                    assert!((m.matrix()[(i, j)] - c(closed[i][j], 0.0)).norm() < 1e-10);
                }
            }
        }
        assert!(reduced_system_closed_form(&AosdConfig::new(c(0.0, 0.0), c(0.0, 0.0), 0.3).unwrap()).is_err());
    }

    #[test]
    fn sweep_reproduces_binary_entropy_curve() {
        let grid = linspace(0.0, 1.0, 21);
        let rows = sweep(&grid, &SweepOptions::default(), &OptimizerConfig::default()).unwrap();
        assert_eq!(rows.len(), 21);
        assert!((rows[0].ps - 1.0).abs() < 1e-12 && (rows[0].cop - 1.0).abs() < 1e-6);
        assert!(rows[20].ps.abs() < 1e-12 && rows[20].cop.abs() < 1e-6);
        for r in &rows {
            assert!((r.cop - predicted_cop(r.ps)).abs() < 1e-4);
            assert!((r.cop_dephased - predicted_cop(r.ps)).abs() < 1e-12);
        }
        // |α| increasing ⇒ p_s decreasing ⇒ C_P decreasing.
        assert!(rows.windows(2).all(|w| w[1].ps < w[0].ps && w[1].cop < w[0].cop));
    }

    #[test]
    fn random_phases_change_nothing_observable() {
        let grid = linspace(0.0, 1.0, 6);
        let cfg = OptimizerConfig { restarts: 4, ..Default::default() };
        let plain = sweep(&grid, &SweepOptions::default(), &cfg).unwrap();
        let opts = SweepOptions { random_phases: Some(Seed(3)), ..Default::default() };
        let phased = sweep(&grid, &opts, &cfg).unwrap();
        for (a, b) in plain.iter().zip(&phased) {
            assert!((a.ps - b.ps).abs() < 1e-12);
            assert!((a.concurrence - b.concurrence).abs() < 1e-8);
            assert!((a.cop_dephased - b.cop_dephased).abs() < 1e-12);
        }
    }
}
