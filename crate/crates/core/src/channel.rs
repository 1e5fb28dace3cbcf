//! Completely positive trace-preserving maps in Kraus form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::state::DensityOperator;

pub const COMPLETENESS_TOL: f64 = 1e-9;
pub const STRUCTURE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelClass {
    General,
    Incoherent,
    #[serde(rename = "gio", alias = "genuinely_incoherent")]
    GenuinelyIncoherent,
    Dephasing,
    Randomizing,
}

#[derive(Debug, Clone)]
pub struct KrausChannel {
    operators: Vec<CMatrix>,
    class: ChannelClass,
}

fn column_is_incoherent(k: &CMatrix) -> bool {
    (0..k.ncols()).all(|j| k.column(j).iter().filter(|z| z.norm() > STRUCTURE_TOL).count() <= 1)
}

fn is_diagonal(k: &CMatrix) -> bool {
    k.is_square()
        && (0..k.nrows()).all(|i| (0..k.ncols()).all(|j| i == j || k[(i, j)].norm() < STRUCTURE_TOL))
}

impl KrausChannel {
    /// Validates completeness `Σ K†K = I` and the structural promise of
    /// `class`.
    pub fn new(operators: Vec<CMatrix>, class: ChannelClass) -> Result<Self> {
        let first = operators
            .first()
            .ok_or_else(|| Error::validation("channel needs at least one Kraus operator"))?;
        let (dout, din) = first.shape();
        if operators.iter().any(|k| k.shape() != (dout, din)) {
            return Err(Error::validation("Kraus operators have inconsistent shapes"));
        }
        let mut sum = CMatrix::zeros(din, din);
        for k in &operators {
            sum += k.adjoint() * k;
        }
        let dev = linalg::max_abs(&(sum - linalg::identity(din)));
        if dev > COMPLETENESS_TOL {
            return Err(Error::validation(format!("Kraus completeness violated by {dev:.3e}")));
        }
        match class {
            ChannelClass::Incoherent | ChannelClass::Dephasing => {
                if !operators.iter().all(column_is_incoherent) {
                    return Err(Error::validation(
                        "incoherent Kraus operator has a column with several nonzero entries",
                    ));
                }
            }
            ChannelClass::GenuinelyIncoherent => {
                if !operators.iter().all(is_diagonal) {
                    return Err(Error::validation("genuinely incoherent Kraus operator is not diagonal"));
                }
            }
            ChannelClass::General | ChannelClass::Randomizing => {}
        }
        Ok(KrausChannel { operators, class })
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn class(&self) -> ChannelClass {
        self.class
    }

    pub fn input_dim(&self) -> usize {
        self.operators[0].ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.operators[0].nrows()
    }

    fn check_input(&self, rho: &DensityOperator) -> Result<()> {
        if rho.dim() != self.input_dim() {
            return Err(Error::DimensionMismatch { expected: self.input_dim(), got: rho.dim() });
        }
        Ok(())
    }

    /// `Σ K ρ K†`.
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        self.check_input(rho)?;
        let d = self.output_dim();
        let mut out = CMatrix::zeros(d, d);
        for k in &self.operators {
            out += k * rho.matrix() * k.adjoint();
        }
        Ok(DensityOperator::from_trusted(out, None))
    }

    /// Outcome probabilities `p_n = Tr K_n ρ K_n†` with post-measurement
    /// states; outcomes below 1e-12 are dropped.
    pub fn apply_selective(&self, rho: &DensityOperator) -> Result<Vec<(f64, DensityOperator)>> {
        self.check_input(rho)?;
        Ok(self
            .operators
            .iter()
            .filter_map(|k| {
                let m = k * rho.matrix() * k.adjoint();
                let p = m.trace().re;
                (p >= 1e-12).then(|| (p, DensityOperator::from_trusted(m.unscale(p), None)))
            })
            .collect())
    }

    pub fn identity(dim: usize) -> Self {
        KrausChannel { operators: vec![linalg::identity(dim)], class: ChannelClass::GenuinelyIncoherent }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, max_abs};
    use crate::state::PureState;

    #[test]
    fn rejects_incomplete_and_misclassified() {
        let half = linalg::identity(2).scale(0.5);
        assert!(KrausChannel::new(vec![half.clone()], ChannelClass::General).is_err());
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = CMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)]);
        assert!(KrausChannel::new(vec![h.clone()], ChannelClass::General).is_ok());
        assert!(KrausChannel::new(vec![h.clone()], ChannelClass::Incoherent).is_err());
        assert!(KrausChannel::new(vec![h], ChannelClass::GenuinelyIncoherent).is_err());
    }

    #[test]
    fn identity_selective_single_outcome() {
        let rho = PureState::plus().to_density();
        let out = KrausChannel::identity(2).apply_selective(&rho).unwrap();
        assert_eq!(out.len(), 1);
        assert!((out[0].0 - 1.0).abs() < 1e-15);
        assert!(max_abs(&(out[0].1.matrix() - rho.matrix())) < 1e-15);
    }

    #[test]
    fn selective_omits_zero_outcomes() {
        let p0 = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let p1 = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let ch = KrausChannel::new(vec![p0, p1], ChannelClass::Dephasing).unwrap();
        let out = ch.apply_selective(&PureState::basis(2, 0).to_density()).unwrap();
        assert_eq!(out.len(), 1);
    }
}
