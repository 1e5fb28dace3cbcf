use serde::{Deserialize, Serialize};

use crate::linalg::{self, c, CMatrix};

/// `d²` real coordinates of an anti-Hermitian generator `A = iH`.
///
/// Layout: the first `d` entries are the diagonal of `H`; each following pair
/// `(re, im)` is the upper-triangular entry `H_jk` for `j < k` in row-major
/// order. The realised unitary is `exp(iH)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitaryParams {
    pub dim: usize,
    pub params: Vec<f64>,
}

impl UnitaryParams {
    pub fn zeros(dim: usize) -> Self {
        UnitaryParams { dim, params: vec![0.0; dim * dim] }
    }

    pub fn from_vec(dim: usize, params: Vec<f64>) -> Self {
        assert_eq!(params.len(), dim * dim, "expected {} parameters", dim * dim);
        UnitaryParams { dim, params }
    }

    pub fn generator(&self) -> CMatrix {
        hermitian_from_params(self.dim, &self.params)
    }

    pub fn unitary(&self) -> CMatrix {
        exp_map(self.dim, &self.params)
    }
}

pub fn param_count(dim: usize) -> usize {
    dim * dim
}

fn hermitian_from_params(dim: usize, p: &[f64]) -> CMatrix {
    debug_assert_eq!(p.len(), dim * dim);
    let mut h = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        h[(i, i)] = c(p[i], 0.0);
    }
    let mut k = dim;
    for i in 0..dim {
        for j in (i + 1)..dim {
            let z = c(p[k], p[k + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            k += 2;
        }
    }
    h
}

/// `exp(iH)` through the eigendecomposition of `H`; exact unitarity up to the
/// eigensolver's orthogonality.
pub fn exp_map(dim: usize, params: &[f64]) -> CMatrix {
    if params.iter().all(|&x| x == 0.0) {
        return linalg::identity(dim);
    }
    let h = hermitian_from_params(dim, params);
    linalg::hermitian_map(&h, |lambda| c(lambda.cos(), lambda.sin()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, unitarity_deviation};

    #[test]
    fn zero_params_is_identity() {
        for d in 1..5 {
            assert_eq!(UnitaryParams::zeros(d).unitary(), linalg::identity(d));
        }
    }

    #[test]
    fn realised_unitary_is_unitary() {
        let p: Vec<f64> = (0..16).map(|i| (i as f64 * 0.37).sin() * 2.0).collect();
        let u = exp_map(4, &p);
        assert!(unitarity_deviation(&u) < 1e-12);
    }

    #[test]
    fn diagonal_generator_gives_phases() {
        let u = exp_map(2, &[0.3, -1.1, 0.0, 0.0]);
        assert!((u[(0, 0)] - c(0.3f64.cos(), 0.3f64.sin())).norm() < 1e-14);
        assert!((u[(1, 1)] - c((-1.1f64).cos(), (-1.1f64).sin())).norm() < 1e-14);
        assert!(max_abs(&CMatrix::from_row_slice(1, 2, &[u[(0, 1)], u[(1, 0)]])) < 1e-14);
    }

    #[test]
    fn real_rotation_from_imaginary_offdiagonal() {
        // H = θ σ_y  →  exp(iθσ_y) = [[cos, sin], [−sin, cos]]
        let th = 0.4f64;
        let u = exp_map(2, &[0.0, 0.0, 0.0, -th]);
        assert!((u[(0, 0)].re - th.cos()).abs() < 1e-14);
        assert!((u[(0, 1)].re - th.sin()).abs() < 1e-14);
        assert!((u[(1, 0)].re + th.sin()).abs() < 1e-14);
    }
}
