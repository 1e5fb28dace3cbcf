//! Entanglement entropy, two-qubit concurrence, entanglement of purification
//! and the link between coherence of purification and entanglement of
//! purification.

use serde::{Deserialize, Serialize};

use crate::coherence::{generalized_cnot, relative_entropy_coherence, spectral_coefficients};
use crate::entropy::{binary_entropy, entropy_of_weights, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix};
use crate::optim::{minimize_over_unitaries, OptimizerConfig, UnitarySearchResult};
use crate::purification::cop_fixed_basis;
use crate::state::{DensityOperator, PureState};

/// Equality/inequality tolerance for the purification-link checks.
pub const LINK_TOL: f64 = 1e-6;
/// Cap on `d_A · d_B` for [`check_prop8`].
pub const PROP8_MAX_DIM: usize = 16;

/// A split of tensor factors into two disjoint groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteCut {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
}

impl BipartiteCut {
    pub fn new(first: Vec<usize>, second: Vec<usize>) -> Result<Self> {
        if first.iter().any(|k| second.contains(k)) {
            return Err(Error::structure("cut groups overlap"));
        }
        Ok(BipartiteCut { first, second })
    }

    pub fn swapped(&self) -> Self {
        BipartiteCut { first: self.second.clone(), second: self.first.clone() }
    }

    fn check(&self, n_factors: usize) -> Result<()> {
        let mut all: Vec<usize> = self.first.iter().chain(&self.second).copied().collect();
        all.sort_unstable();
        if all != (0..n_factors).collect::<Vec<_>>() {
            return Err(Error::structure(format!(
                "cut {:?}:{:?} does not partition {n_factors} factors",
                self.first, self.second
            )));
        }
        Ok(())
    }
}

/// Von Neumann entropy of the reduction onto `cut.first`.
pub fn entanglement_entropy(psi: &PureState, cut: &BipartiteCut) -> Result<f64> {
    cut.check(psi.factor_dims().len())?;
    Ok(von_neumann_entropy(&psi.reduced(&cut.first)?))
}

fn require_two_qubits(rho: &DensityOperator) -> Result<()> {
    let ok = rho.dim() == 4 && rho.factor_dims().is_none_or(|f| f == [2, 2]);
    if !ok {
        return Err(Error::structure("two-qubit state with factor_dims [2, 2] required"));
    }
    Ok(())
}

/// Wootters concurrence `max(0, μ₁ − μ₂ − μ₃ − μ₄)`, where `μ_i` are the
/// decreasing square roots of the spectrum of `ρ ρ̃` with
/// `ρ̃ = (σ_y ⊗ σ_y) ρ* (σ_y ⊗ σ_y)`.
///
/// Writing `ρ = W W†` on its support, the `μ_i` are the singular values of
/// `W† (σ_y ⊗ σ_y) W*`; this avoids square roots of round-off-level
/// eigenvalues, which would otherwise leave a spurious `~1e-8` concurrence on
/// separable states.
pub fn concurrence(rho: &DensityOperator) -> Result<f64> {
    require_two_qubits(rho)?;
    let sy = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
    let yy = linalg::kron(&sy, &sy);
    let support = rho.support();
    let w = CMatrix::from_fn(4, support.len(), |i, k| support[k].1[i] * support[k].0.sqrt());
    let b = w.adjoint() * yy * w.conjugate();
    let mut mu: Vec<f64> = b.singular_values().iter().copied().collect();
    mu.resize(4, 0.0);
    mu.sort_by(|a, b| b.total_cmp(a));
    Ok((mu[0] - mu[1] - mu[2] - mu[3]).max(0.0))
}

/// Two-qubit entanglement of formation `h((1 + √(1 − C²))/2)`.
pub fn eof_two_qubit(rho: &DensityOperator) -> Result<f64> {
    let conc = concurrence(rho)?;
    Ok(binary_entropy((1.0 + (1.0 - conc * conc).max(0.0).sqrt()) / 2.0))
}

/// Smallest balanced `(d_A′, d_B′)` with `d_A′ · d_B′ ≥ rank`.
pub fn balanced_split(rank: usize) -> (usize, usize) {
    let rank = rank.max(1);
    let a = (rank as f64).sqrt().ceil() as usize;
    (a, rank.div_ceil(a))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EopResult {
    pub value: f64,
    pub split: (usize, usize),
    pub optimizer: UnitarySearchResult,
}

/// Geometry of a purification of `ρ_AB` with ancilla `A′ ⊗ B′`, stored as the
/// `(d_A d_B) × (d_A′ d_B′)` coefficient matrix of the spectral purification.
struct SplitPurification {
    dims: (usize, usize),
    split: (usize, usize),
    base: CMatrix,
}

impl SplitPurification {
    fn new(rho: &DensityOperator, split: Option<(usize, usize)>) -> Result<Self> {
        let dims = match rho.factor_dims() {
            Some([a, b]) => (*a, *b),
            _ => return Err(Error::structure("bipartite state with two factors required")),
        };
        let rank = rho.rank().max(1);
        let split = split.unwrap_or_else(|| balanced_split(rank));
        if split.0 * split.1 < rank || split.0 == 0 || split.1 == 0 {
            return Err(Error::validation(format!(
                "ancilla split {}x{} cannot hold rank {rank}",
                split.0, split.1
            )));
        }
        let base = spectral_coefficients(rho, split.0 * split.1);
        Ok(SplitPurification { dims, split, base })
    }

    /// Reshapes rotated coefficients into the `(A A′) × (B B′)` matrix.
    fn cut_matrix(&self, coeffs: &CMatrix) -> CMatrix {
        let (da, db) = self.dims;
        let (pa, pb) = self.split;
        let mut x = CMatrix::zeros(da * pa, db * pb);
        for a in 0..da {
            for b in 0..db {
                for a2 in 0..pa {
                    for b2 in 0..pb {
                        x[(a * pa + a2, b * pb + b2)] = coeffs[(a * db + b, a2 * pb + b2)];
                    }
                }
            }
        }
        x
    }

    fn cut_entropy(&self, coeffs: &CMatrix) -> f64 {
        let x = self.cut_matrix(coeffs);
        let gram = if x.nrows() <= x.ncols() { &x * x.adjoint() } else { x.adjoint() * &x };
        entropy_of_weights(linalg::hermitian_eigenvalues(&gram).into_iter().map(|v| v.max(0.0)))
    }

    fn rotated(&self, u: &CMatrix) -> CMatrix {
        &self.base * u.transpose()
    }

    /// The rotated purification as a state on factors `[A, A′, B, B′]`.
    fn state(&self, u: &CMatrix) -> Result<PureState> {
        let x = self.cut_matrix(&self.rotated(u));
        let v = crate::linalg::CVector::from_iterator(x.len(), x.transpose().iter().copied());
        PureState::normalized(v, Some(vec![self.dims.0, self.split.0, self.dims.1, self.split.1]))
    }
}

/// Entanglement of purification: least `S(ρ_{AA′})` over purifications of
/// `ρ_AB` with ancilla `A′ ⊗ B′`, searched by rotating the ancilla of the
/// spectral purification. `split` defaults to [`balanced_split`] of the rank.
pub fn entanglement_of_purification(
    rho: &DensityOperator,
    config: &OptimizerConfig,
    split: Option<(usize, usize)>,
) -> Result<EopResult> {
    let sp = SplitPurification::new(rho, split)?;
    let r = sp.split.0 * sp.split.1;
    let optimizer = minimize_over_unitaries(r, |u| sp.cut_entropy(&sp.rotated(u)), config)?;
    Ok(EopResult { value: optimizer.best_value, split: sp.split, optimizer })
}

/// Coherence of purification of a bipartite state, treating `AB` as one
/// system in the product computational basis.
pub fn cop_bipartite(rho: &DensityOperator, config: &OptimizerConfig) -> Result<f64> {
    Ok(cop_fixed_basis(rho, config)?.value_fixed_basis)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Prop7Report {
    /// `C_P(ρ_A)`.
    pub cop: f64,
    /// Entanglement across `AA′:BB′` after the generalized CNOT.
    pub cnot_entanglement: f64,
    /// `E_P` of the produced `ρ_AB`.
    pub eop: f64,
    pub equality_gap: f64,
    /// `C_P − E_P`.
    pub eop_margin: f64,
}

impl Prop7Report {
    pub fn holds(&self, tol: f64) -> bool {
        self.equality_gap <= tol && self.eop_margin >= -tol
    }
}

/// Builds the `C_P`-optimal purification `|Ψ⟩_{AA′}` of `ρ_A`, copies it onto
/// an incoherent ancilla `|0⟩_{BB′}` with the generalized CNOT, and compares
/// the created `AA′:BB′` entanglement with `C_P(ρ_A)` and with `E_P` of the
/// resulting `ρ_AB`.
pub fn check_prop7(rho_a: &DensityOperator, config: &OptimizerConfig) -> Result<Prop7Report> {
    let cop = cop_fixed_basis(rho_a, config)?;
    let psi = cop.optimal_purification(rho_a)?.state;
    let (da, dp) = (rho_a.dim(), cop.ancilla_dim);
    let n = da * dp;
    let target = PureState::basis(n, 0).with_factor_dims(vec![da, dp])?;
    let joint = psi.tensor(&target);
    let out = joint.apply(&generalized_cnot(n, n)?)?.with_factor_dims(vec![da, dp, da, dp])?;
    let e = entanglement_entropy(&out, &BipartiteCut::new(vec![0, 1], vec![2, 3])?)?;
    let rho_ab = out.reduced(&[0, 2])?;
    let eop = entanglement_of_purification(&rho_ab, config, None)?.value;
    Ok(Prop7Report {
        cop: cop.value_fixed_basis,
        cnot_entanglement: e,
        eop,
        equality_gap: (e - cop.value_fixed_basis).abs(),
        eop_margin: cop.value_fixed_basis - eop,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Prop8Report {
    pub cop: f64,
    pub eop: f64,
    /// `C_P − E_P`; asserted nonnegative (within tolerance).
    pub margin: f64,
    /// `C_R` of the `E_P`-optimal purification minus `C_P`. Reported only.
    pub coincidence_gap: f64,
    pub optimizers_coincide: bool,
    /// `C_R(Φ) − [C_R(ρ_{AA′}) + C_R(ρ_{BB′}) + S(ρ_{AA′})]` for the
    /// `E_P`-optimal purification `Φ`. Reported only.
    pub additivity_gap: f64,
    pub additivity_holds: bool,
}

/// `C_P(ρ_AB) ≥ E_P(ρ_AB)` plus the two report-only diagnostics.
pub fn check_prop8(rho_ab: &DensityOperator, config: &OptimizerConfig) -> Result<Prop8Report> {
    if rho_ab.dim() > PROP8_MAX_DIM {
        return Err(Error::Unsupported(format!(
            "dimension {} exceeds the cap {PROP8_MAX_DIM}",
            rho_ab.dim()
        )));
    }
    let cop = cop_fixed_basis(rho_ab, config)?.value_fixed_basis;
    let sp = SplitPurification::new(rho_ab, None)?;
    let r = sp.split.0 * sp.split.1;
    let opt = minimize_over_unitaries(r, |u| sp.cut_entropy(&sp.rotated(u)), config)?;
    let eop = opt.best_value;

    let u = opt.best_unitary();
    let phi = sp.state(&u)?;
    let cr_phi = entropy_of_weights(phi.probabilities().into_iter());
    let rho_aa = phi.reduced(&[0, 1])?;
    let rho_bb = phi.reduced(&[2, 3])?;
    let predicted = relative_entropy_coherence(&rho_aa).value
        + relative_entropy_coherence(&rho_bb).value
        + von_neumann_entropy(&rho_aa);
    let coincidence_gap = cr_phi - cop;
    let additivity_gap = cr_phi - predicted;
    Ok(Prop8Report {
        cop,
        eop,
        margin: cop - eop,
        coincidence_gap,
        optimizers_coincide: coincidence_gap.abs() <= LINK_TOL,
        additivity_gap,
        additivity_holds: additivity_gap.abs() <= LINK_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CVector;
    use crate::random::{random_pure, random_state, Seed};

    fn bell() -> PureState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(
            CVector::from_vec(vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]),
            Some(vec![2, 2]),
        )
        .unwrap()
    }

    fn cut11() -> BipartiteCut {
        BipartiteCut::new(vec![0], vec![1]).unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert!((entanglement_entropy(&bell(), &cut11()).unwrap() - 1.0).abs() < 1e-12);
        let prod = PureState::plus().tensor(&PureState::basis(2, 1));
        assert!(entanglement_entropy(&prod, &cut11()).unwrap().abs() < 1e-12);
        let p: f64 = 0.3;
        let v = PureState::plus().tensor(&PureState::basis(2, 0)).vector().scale(p.sqrt())
            + PureState::minus().tensor(&PureState::basis(2, 1)).vector().scale((1.0 - p).sqrt());
        let psi = PureState::new(v, Some(vec![2, 2])).unwrap();
        assert!((entanglement_entropy(&psi, &cut11()).unwrap() - binary_entropy(p)).abs() < 1e-12);
    }

    #[test]
    fn bad_cuts_rejected() {
        assert!(BipartiteCut::new(vec![0, 1], vec![1]).is_err());
        let cut = BipartiteCut::new(vec![0], vec![2]).unwrap();
        assert!(entanglement_entropy(&bell(), &cut).is_err());
    }

    #[test]
    fn concurrence_examples() {
        assert!((concurrence(&bell().to_density()).unwrap() - 1.0).abs() < 1e-9);
        let prod = random_pure(2, Seed(1)).tensor(&random_pure(2, Seed(2))).to_density();
        assert!(concurrence(&prod).unwrap() < 1e-7);
        assert!((eof_two_qubit(&bell().to_density()).unwrap() - 1.0).abs() < 1e-9);
        assert!(concurrence(&DensityOperator::maximally_mixed(3)).is_err());
    }

    #[test]
    fn concurrence_of_pure_states_matches_schmidt_formula() {
        // For pure two-qubit states C = 2|ad − bc|.
        for s in 0..10 {
            let psi = random_pure(4, Seed(s)).with_factor_dims(vec![2, 2]).unwrap();
            let v = psi.vector();
            let expected = 2.0 * (v[0] * v[3] - v[1] * v[2]).norm();
            let got = concurrence(&psi.to_density()).unwrap();
            assert!((got - expected).abs() < 1e-7, "{got} vs {expected}");
            let eof = eof_two_qubit(&psi.to_density()).unwrap();
            assert!((eof - entanglement_entropy(&psi, &cut11()).unwrap()).abs() < 1e-6);
        }
    }

    #[test]
    fn balanced_splits() {
        assert_eq!(balanced_split(1), (1, 1));
        assert_eq!(balanced_split(2), (2, 1));
        assert_eq!(balanced_split(3), (2, 2));
        assert_eq!(balanced_split(4), (2, 2));
        assert_eq!(balanced_split(5), (3, 2));
    }

    #[test]
    fn eop_of_pure_and_product_states() {
        let cfg = OptimizerConfig { restarts: 4, ..Default::default() };
        let psi = random_pure(4, Seed(9)).with_factor_dims(vec![2, 2]).unwrap();
        let e = entanglement_of_purification(&psi.to_density().with_factor_dims(vec![2, 2]).unwrap(), &cfg, None)
            .unwrap();
        assert!((e.value - entanglement_entropy(&psi, &cut11()).unwrap()).abs() < 1e-9);

        let a = DensityOperator::from_diagonal(&[0.3, 0.7]).unwrap();
        let b = DensityOperator::from_diagonal(&[0.6, 0.4]).unwrap();
        let prod = a.tensor(&b);
        let e = entanglement_of_purification(&prod, &cfg, None).unwrap();
        assert!(e.value < 1e-6, "{}", e.value);
    }

    #[test]
    fn eop_bounds_eof_on_random_two_qubit_states() {
        let cfg = OptimizerConfig { restarts: 8, ..Default::default() };
        for s in 0..4 {
            let rho = random_state(4, 2, Seed(s)).unwrap().with_factor_dims(vec![2, 2]).unwrap();
            let ep = entanglement_of_purification(&rho, &cfg, None).unwrap().value;
            assert!(ep >= eof_two_qubit(&rho).unwrap() - 1e-6);
        }
    }

    #[test]
    fn infeasible_split() {
        let rho = DensityOperator::maximally_mixed(4).with_factor_dims(vec![2, 2]).unwrap();
        assert!(entanglement_of_purification(&rho, &OptimizerConfig::default(), Some((1, 2))).is_err());
    }

    #[test]
    fn prop7_on_maximally_mixed_qubit() {
        let r = check_prop7(&DensityOperator::maximally_mixed(2), &OptimizerConfig::default()).unwrap();
        assert!((r.cop - 1.0).abs() < 1e-9);
        assert!((r.cnot_entanglement - 1.0).abs() < 1e-9);
        assert!(r.holds(LINK_TOL));
    }

    #[test]
    fn prop8_on_product_basis_state() {
        let zz = PureState::basis(4, 0).with_factor_dims(vec![2, 2]).unwrap().to_density();
        let r = check_prop8(&zz, &OptimizerConfig::default()).unwrap();
        assert!(r.cop.abs() < 1e-12 && r.eop.abs() < 1e-12);
    }

    #[test]
    fn additivity_counterexample_state() {
        // (|0+⟩ + |1−⟩)/√2: dephased entropy 2, while C_R(A) + C_R(B) + S(A) = 0 + 0 + 1.
        let v = PureState::basis(2, 0).tensor(&PureState::plus()).vector()
            + PureState::basis(2, 1).tensor(&PureState::minus()).vector();
        let psi = PureState::normalized(v, Some(vec![2, 2])).unwrap();
        let cr = entropy_of_weights(psi.probabilities().into_iter());
        let a = psi.reduced(&[0]).unwrap();
        let b = psi.reduced(&[1]).unwrap();
        let sum = relative_entropy_coherence(&a).value + relative_entropy_coherence(&b).value + von_neumann_entropy(&a);
        assert!((cr - 2.0).abs() < 1e-12);
        assert!((sum - 1.0).abs() < 1e-12);
    }
}
