//! Randomized sample-by-sample checks of the structural properties of the
//! coherence of purification.
//!
//! Every sample is generated from its own [`Seed`], derived from the suite
//! seed by `(property, dim, index)`, and evaluated independently; replaying
//! [`run_sample`] with a reported seed reproduces the exact sample. A sample
//! whose margin falls below tolerance is re-evaluated once with four times as
//! many optimizer restarts before it is counted as a failure, since an
//! under-minimized `C_P` is the usual cause of a spurious violation.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aosd::{self, AosdCondition};
use crate::coherence::{
    coherence_of_formation, make_gio_channel, make_incoherent_channel, make_randomizing_channel,
    relative_entropy_coherence,
};
use crate::entanglement::{check_prop7, check_prop8};
use crate::entropy::{binary_entropy, uhlmann_fidelity, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::linalg::c;
use crate::optim::OptimizerConfig;
use crate::purification::{cop_fixed_basis, cop_fixed_basis_with_ancilla, cop_of_dephased};
use crate::random::{random_state, Seed};
use crate::state::DensityOperator;

/// Slack for inequalities that only involve `C_P` and closed forms.
pub const COP_TOL: f64 = 1e-6;
/// Slack for the `C_f + S` upper bound.
pub const FORMATION_TOL: f64 = 1e-4;
/// AOSD: `|C_P − h(p_s/2)|` bound.
pub const AOSD_COP_TOL: f64 = 1e-4;
/// AOSD: concurrence bound at the zero-entanglement condition.
pub const AOSD_CONCURRENCE_TOL: f64 = 1e-8;
/// Largest trace-distance proxy `√(1 − F)` for continuity pairs.
pub const CONTINUITY_MAX_T: f64 = 0.5;
/// Dimension cap for sampled single-system properties.
pub const MAX_SUITE_DIM: usize = 4;
/// Restart multiplier for the re-run of a failing sample.
pub const RERUN_FACTOR: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PropId {
    /// `C_P ≥ C_R`, with equality on pure states.
    P1,
    /// `C_P(ρ) ≥ C_P(Δ[ρ])`.
    P2,
    /// `C_P(Λ(ρ)) ≤ C_P(ρ)` for genuinely incoherent `Λ`.
    P3,
    /// `Σ_n p_n C_P(ρ_n) ≤ C_P(ρ)` for selective incoherent operations.
    P4,
    /// Continuity in fidelity.
    P5,
    /// `C_P ≤ C_f + S`.
    P6,
    /// Generalized-CNOT conversion into entanglement of purification.
    P7,
    /// `C_P(ρ_AB) ≥ E_P(ρ_AB)`.
    P8,
    /// Residual quantumness is nonnegative and vanishes on pure states.
    QR,
    /// AOSD: `C_P(ρ_S) = h(p_s/2)` with a separable joint state.
    AOSD,
}

impl PropId {
    pub const ALL: [PropId; 10] = [
        PropId::P1,
        PropId::P2,
        PropId::P3,
        PropId::P4,
        PropId::P5,
        PropId::P6,
        PropId::P7,
        PropId::P8,
        PropId::QR,
        PropId::AOSD,
    ];

    fn index(self) -> u64 {
        PropId::ALL.iter().position(|&p| p == self).expect("listed") as u64
    }

    /// Properties defined on a fixed system size; the `dims` argument of
    /// [`run_suite`] does not apply to them.
    pub fn fixed_dim(self) -> Option<usize> {
        match self {
            PropId::P7 | PropId::AOSD => Some(2),
            PropId::P8 => Some(4),
            _ => None,
        }
    }

    pub fn tolerance(self) -> f64 {
        match self {
            PropId::P5 => 0.0,
            PropId::P6 => FORMATION_TOL,
            PropId::AOSD => AOSD_COP_TOL,
            _ => COP_TOL,
        }
    }

    /// Parses a comma-separated list; `all` selects every property.
    pub fn parse_list(text: &str) -> Result<Vec<PropId>> {
        if text.trim().eq_ignore_ascii_case("all") {
            return Ok(PropId::ALL.to_vec());
        }
        let mut out: Vec<PropId> = text.split(',').map(|s| s.trim().parse()).collect::<Result<_>>()?;
        out.sort();
        out.dedup();
        Ok(out)
    }
}

impl fmt::Display for PropId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for PropId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PropId::ALL
            .into_iter()
            .find(|p| p.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::validation(format!("unknown property `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailingSample {
    pub index: usize,
    pub seed: Seed,
    pub cause: String,
}

/// A report-only quantity tracked alongside a property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub name: String,
    pub n_evaluated: usize,
    pub n_hold: usize,
    pub worst_margin: Option<f64>,
    pub violating_seeds: Vec<Seed>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub prop: PropId,
    pub dim: usize,
    pub n_samples: usize,
    pub n_pass: usize,
    /// Most negative slack over all evaluated samples (after re-runs).
    pub worst_margin: Option<f64>,
    pub tolerance: f64,
    pub n_reruns: usize,
    pub failing_seeds: Vec<FailingSample>,
    pub diagnostics: Vec<Diagnostic>,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.n_pass == self.n_samples
    }
}

#[derive(Debug, Clone, PartialEq)]
struct DiagValue {
    name: &'static str,
    margin: f64,
    holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
struct Evaluation {
    margin: f64,
    /// Extra failure condition beyond `margin ≥ −tol` (AOSD concurrence).
    side_failure: Option<String>,
    detail: String,
    diagnostics: Vec<DiagValue>,
}

impl Evaluation {
    fn new(margin: f64, detail: String) -> Self {
        Evaluation { margin, side_failure: None, detail, diagnostics: Vec::new() }
    }

    fn passes(&self, tol: f64) -> bool {
        self.margin >= -tol && self.side_failure.is_none()
    }
}

/// Outcome of a single sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleOutcome {
    pub margin: Option<f64>,
    pub pass: bool,
    pub rerun: bool,
    pub cause: Option<String>,
    #[serde(skip)]
    diagnostics: Vec<DiagValue>,
}

// Stream indices below a sample seed.
const STATE_STREAM: u64 = 0;
const AUX_STREAM: u64 = 1;
const OPTIMIZER_STREAM: u64 = 2;
const RERUN_STREAM: u64 = 3;

fn sample_rank(dim: usize, seed: Seed) -> usize {
    seed.split(AUX_STREAM).split(0).rng().random_range(1..=dim)
}

fn sample_state(dim: usize, seed: Seed) -> Result<DensityOperator> {
    random_state(dim, sample_rank(dim, seed), seed.split(STATE_STREAM))
}

fn cop(rho: &DensityOperator, cfg: &OptimizerConfig) -> Result<f64> {
    Ok(cop_fixed_basis(rho, cfg)?.value_fixed_basis)
}

fn evaluate(prop: PropId, dim: usize, seed: Seed, cfg: &OptimizerConfig) -> Result<Evaluation> {
    let aux = seed.split(AUX_STREAM);
    match prop {
        PropId::P1 => {
            let rho = sample_state(dim, seed)?;
            let (cp, cr) = (cop(&rho, cfg)?, relative_entropy_coherence(&rho).value);
            let margin = if rho.is_pure() { -(cp - cr).abs() } else { cp - cr };
            Ok(Evaluation::new(margin, format!("rank {}: C_P = {cp:.9}, C_R = {cr:.9}", rho.rank())))
        }
        PropId::P2 | PropId::QR => {
            let rho = sample_state(dim, seed)?;
            let (cp, cd) = (cop(&rho, cfg)?, cop_of_dephased(&rho));
            let margin = if prop == PropId::QR && rho.is_pure() { -(cp - cd).abs() } else { cp - cd };
            Ok(Evaluation::new(margin, format!("rank {}: C_P = {cp:.9}, C_P(Δρ) = {cd:.9}", rho.rank())))
        }
        PropId::P3 => {
            let rho = sample_state(dim, seed)?;
            let n_kraus = aux.split(1).rng().random_range(2..=dim + 1);
            let channel = make_gio_channel(dim, n_kraus, aux.split(2))?;
            let out = channel.apply(&rho)?;
            let (before, after) = (cop(&rho, cfg)?, cop(&out, cfg)?);
            Ok(Evaluation::new(
                before - after,
                format!("{n_kraus} Kraus: C_P(ρ) = {before:.9}, C_P(Λρ) = {after:.9}"),
            ))
        }
        PropId::P4 => {
            let rho = sample_state(dim, seed)?;
            let n_kraus = aux.split(1).rng().random_range(2..=dim + 1);
            let channel = make_incoherent_channel(dim, n_kraus, aux.split(2))?;
            let parent = cop_fixed_basis(&rho, cfg)?;
            let mut average = 0.0;
            for (p, branch) in channel.apply_selective(&rho)? {
                average += p * cop_fixed_basis_with_ancilla(&branch, parent.ancilla_dim, cfg)?.value_fixed_basis;
            }
            Ok(Evaluation::new(
                parent.value_fixed_basis - average,
                format!(
                    "{} Kraus: C_P(ρ) = {:.9}, Σ p C_P(ρ_n) = {average:.9}",
                    channel.operators().len(),
                    parent.value_fixed_basis
                ),
            ))
        }
        PropId::P5 => {
            let (rho, sigma, t) = continuity_pair(dim, seed)?;
            let a = cop_fixed_basis_with_ancilla(&rho, dim, cfg)?.value_fixed_basis;
            let b = cop_fixed_basis_with_ancilla(&sigma, dim, cfg)?.value_fixed_basis;
            let diff = (a - b).abs();
            let d = dim as f64;
            let proof_bound = 2.0 * t * (d * d).log2() + binary_entropy(t);
            let stated_bound = 2.0 * t * d.log2() + binary_entropy(t);
            let mut e = Evaluation::new(
                proof_bound - diff,
                format!("T = {t:.6}: |ΔC_P| = {diff:.9}, bound = {proof_bound:.9}"),
            );
            e.diagnostics.push(DiagValue {
                name: "stated_bound",
                margin: stated_bound - diff,
                holds: stated_bound - diff >= 0.0,
            });
            Ok(e)
        }
        PropId::P6 => {
            let rho = sample_state(dim, seed)?;
            let cp = cop(&rho, cfg)?;
            let cf = coherence_of_formation(&rho, cfg)?.value.value;
            let s = von_neumann_entropy(&rho);
            Ok(Evaluation::new(
                cf + s - cp,
                format!("rank {}: C_P = {cp:.9}, C_f = {cf:.9}, S = {s:.9}", rho.rank()),
            ))
        }
        PropId::P7 => {
            let rho = sample_state(2, seed)?;
            let r = check_prop7(&rho, cfg)?;
            Ok(Evaluation::new(
                (-r.equality_gap).min(r.eop_margin),
                format!(
                    "C_P = {:.9}, E(AA':BB') = {:.9}, E_P = {:.9}",
                    r.cop, r.cnot_entanglement, r.eop
                ),
            ))
        }
        PropId::P8 => {
            let rho = sample_state(4, seed)?.with_factor_dims(vec![2, 2])?;
            let r = check_prop8(&rho, cfg)?;
            let mut e = Evaluation::new(r.margin, format!("C_P = {:.9}, E_P = {:.9}", r.cop, r.eop));
            e.diagnostics.push(DiagValue {
                name: "optimizer_coincidence",
                margin: -r.coincidence_gap.abs(),
                holds: r.optimizers_coincide,
            });
            e.diagnostics.push(DiagValue {
                name: "additivity_equality",
                margin: -r.additivity_gap.abs(),
                holds: r.additivity_holds,
            });
            Ok(e)
        }
        PropId::AOSD => {
            let mut rng = aux.rng();
            let a: f64 = rng.random_range(0.0..=1.0);
            let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let cond = AosdCondition::Optimal.config(c(a, 0.0), phase, 0.5)?;
            let ps = aosd::success_probability(&cond);
            let rho_s = aosd::reduced_system_state(&cond);
            let cp = cop(&rho_s, cfg)?;
            let conc = crate::entanglement::concurrence(&aosd::joint_state(&cond))?;
            let predicted = aosd::predicted_cop(ps);
            let mut e = Evaluation::new(
                -(cp - predicted).abs(),
                format!("|α| = {a:.6}: p_s = {ps:.9}, C_P = {cp:.9}, h(p_s/2) = {predicted:.9}, C = {conc:.3e}"),
            );
            if conc >= AOSD_CONCURRENCE_TOL {
                e.side_failure = Some(format!("concurrence {conc:.3e} ≥ {AOSD_CONCURRENCE_TOL:e}"));
            }
            Ok(e)
        }
    }
}

/// A pair `(ρ, σ)` with `T = √(1 − F(ρ, σ)) ≤ 1/2`: `σ` is a random mixture
/// of `ρ` with another random state, with the mixing weight halved until
/// the pair is close enough.
fn continuity_pair(dim: usize, seed: Seed) -> Result<(DensityOperator, DensityOperator, f64)> {
    let rho = sample_state(dim, seed)?;
    let other = random_state(dim, dim, seed.split(AUX_STREAM).split(3))?;
    let mut w: f64 = seed.split(AUX_STREAM).split(4).rng().random_range(0.0..=1.0);
    loop {
        let sigma = DensityOperator::mixture(&[(1.0 - w, &rho), (w, &other)])?;
        let t = (1.0 - uhlmann_fidelity(&rho, &sigma)?).max(0.0).sqrt();
        if t <= CONTINUITY_MAX_T {
            return Ok((rho, sigma, t));
        }
        w /= 2.0;
    }
}

fn sample_dim(prop: PropId, dim: usize) -> usize {
    prop.fixed_dim().unwrap_or(dim)
}

/// Evaluates one sample, re-running with [`RERUN_FACTOR`]× restarts if it
/// fails at the configured effort.
pub fn run_sample(prop: PropId, dim: usize, seed: Seed, config: &OptimizerConfig) -> SampleOutcome {
    let dim = sample_dim(prop, dim);
    let tol = prop.tolerance();
    let first = evaluate(prop, dim, seed, &config.with_seed(seed.split(OPTIMIZER_STREAM)));
    let (result, rerun) = match first {
        Ok(e) if e.passes(tol) => (Ok(e), false),
        _ => {
            let bigger = config
                .with_restarts(config.restarts * RERUN_FACTOR)
                .with_seed(seed.split(RERUN_STREAM));
            (evaluate(prop, dim, seed, &bigger), true)
        }
    };
    match result {
        Ok(e) => {
            let pass = e.passes(tol);
            let cause = (!pass).then(|| match &e.side_failure {
                Some(s) => format!("{s}; {}", e.detail),
                None => format!("margin {:.3e} below −{tol:e}; {}", e.margin, e.detail),
            });
            SampleOutcome { margin: Some(e.margin), pass, rerun, cause, diagnostics: e.diagnostics }
        }
        Err(err) => SampleOutcome {
            margin: None,
            pass: false,
            rerun,
            cause: Some(format!("error: {err}")),
            diagnostics: Vec::new(),
        },
    }
}

/// Seed of sample `index` for `prop` at `dim` under the suite seed.
pub fn sample_seed(suite: Seed, prop: PropId, dim: usize, index: usize) -> Seed {
    suite.split_path(&[prop.index(), dim as u64, index as u64])
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() {
        return Err(Error::validation("at least one dimension is required"));
    }
    if let Some(&d) = dims.iter().find(|&&d| !(2..=MAX_SUITE_DIM).contains(&d)) {
        return Err(Error::validation(format!("dimension {d} outside 2..={MAX_SUITE_DIM}")));
    }
    Ok(())
}

/// Runs `n_samples` samples of each property at each dimension (properties
/// with a fixed size run once). Deterministic given `seed` and `config`.
pub fn run_suite(
    props: &[PropId],
    n_samples: usize,
    dims: &[usize],
    seed: Seed,
    config: &OptimizerConfig,
) -> Result<Vec<VerificationReport>> {
    if n_samples == 0 {
        return Err(Error::validation("n_samples must be at least 1"));
    }
    check_dims(dims)?;
    config.validate()?;
    let mut reports = Vec::new();
    for &prop in props {
        let mut prop_dims: Vec<usize> = match prop.fixed_dim() {
            Some(d) => vec![d],
            None => dims.to_vec(),
        };
        prop_dims.dedup();
        for dim in prop_dims {
            reports.push(run_property(prop, dim, n_samples, seed, config));
        }
    }
    Ok(reports)
}

fn run_property(prop: PropId, dim: usize, n_samples: usize, seed: Seed, config: &OptimizerConfig) -> VerificationReport {
    let seeds: Vec<Seed> = (0..n_samples).map(|i| sample_seed(seed, prop, dim, i)).collect();
    let outcomes: Vec<SampleOutcome> = seeds.par_iter().map(|&s| run_sample(prop, dim, s, config)).collect();

    let mut diagnostics: Vec<Diagnostic> = Vec::new();
    let mut failing_seeds = Vec::new();
    for (index, (o, &s)) in outcomes.iter().zip(&seeds).enumerate() {
        if let Some(cause) = &o.cause {
            failing_seeds.push(FailingSample { index, seed: s, cause: cause.clone() });
        }
        for d in &o.diagnostics {
            let entry = match diagnostics.iter_mut().position(|x| x.name == d.name) {
                Some(k) => &mut diagnostics[k],
                None => {
                    diagnostics.push(Diagnostic {
                        name: d.name.to_string(),
                        n_evaluated: 0,
                        n_hold: 0,
                        worst_margin: None,
                        violating_seeds: Vec::new(),
                    });
                    diagnostics.last_mut().expect("just pushed")
                }
            };
            entry.n_evaluated += 1;
            entry.worst_margin = Some(entry.worst_margin.map_or(d.margin, |w| w.min(d.margin)));
            if d.holds {
                entry.n_hold += 1;
            } else {
                entry.violating_seeds.push(s);
            }
        }
    }
    let worst_margin = outcomes.iter().filter_map(|o| o.margin).reduce(f64::min);
    VerificationReport {
        prop,
        dim,
        n_samples,
        n_pass: outcomes.iter().filter(|o| o.pass).count(),
        worst_margin,
        tolerance: prop.tolerance(),
        n_reruns: outcomes.iter().filter(|o| o.rerun).count(),
        failing_seeds,
        diagnostics,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityWitness {
    pub p0: f64,
    /// `C_P(p₀|0⟩⟨0| + p₁|1⟩⟨1|)`.
    pub cop_mixture: f64,
    /// `p₀ C_P(|0⟩⟨0|) + p₁ C_P(|1⟩⟨1|)`.
    pub weighted_sum: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomizingWitness {
    pub probs: Vec<f64>,
    pub cop_before: f64,
    pub cop_after: f64,
    pub increased: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub convexity: Vec<ConvexityWitness>,
    pub randomizing: Vec<RandomizingWitness>,
}

impl WitnessReport {
    /// At least one convexity violation and one randomizing-channel increase
    /// are exhibited, and the uniform control case shows no increase.
    pub fn exhibited(&self) -> bool {
        let uniform_ok = self
            .randomizing
            .iter()
            .filter(|w| w.probs.windows(2).all(|p| p[0] == p[1]))
            .all(|w| !w.increased);
        self.convexity.iter().any(|w| w.violated) && self.randomizing.iter().any(|w| w.increased) && uniform_ok
    }
}

const WITNESS_TOL: f64 = 1e-9;

/// The two explicit constructions showing that `C_P` is not convex and can
/// increase under the randomizing channel `ρ ↦ I/d`.
pub fn witness_checks(config: &OptimizerConfig) -> Result<WitnessReport> {
    let zero = DensityOperator::from_diagonal(&[1.0, 0.0])?;
    let one = DensityOperator::from_diagonal(&[0.0, 1.0])?;
    let mut convexity = Vec::new();
    for p0 in [0.3, 0.5] {
        let mix = DensityOperator::from_diagonal(&[p0, 1.0 - p0])?;
        let cop_mixture = cop(&mix, config)?;
        let weighted_sum = p0 * cop(&zero, config)? + (1.0 - p0) * cop(&one, config)?;
        convexity.push(ConvexityWitness {
            p0,
            cop_mixture,
            weighted_sum,
            violated: cop_mixture > weighted_sum + WITNESS_TOL,
        });
    }
    let mut randomizing = Vec::new();
    for probs in [vec![0.9, 0.1], vec![0.5, 0.5], vec![0.6, 0.3, 0.1], vec![1.0 / 3.0; 3]] {
        let rho = DensityOperator::from_diagonal(&probs)?;
        let after = make_randomizing_channel(probs.len()).apply(&rho)?;
        let (cop_before, cop_after) = (cop(&rho, config)?, cop(&after, config)?);
        randomizing.push(RandomizingWitness {
            probs,
            cop_before,
            cop_after,
            increased: cop_after > cop_before + WITNESS_TOL,
        });
    }
    Ok(WitnessReport { convexity, randomizing })
}
