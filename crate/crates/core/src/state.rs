//! Density operators and pure states with optional tensor-factor structure.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, C64};

/// Hermiticity, trace and positivity tolerance applied at ingestion.
pub const STATE_TOL: f64 = 1e-10;
/// Eigenvalues below this are treated as zero when counting rank.
pub const RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
struct Spectrum {
    values: Vec<f64>,
    vectors: CMatrix,
}

/// A trace-one positive semidefinite operator.
///
/// The eigendecomposition is computed lazily on first use and cached; the
/// operator is immutable after construction so the cache never goes stale.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    matrix: CMatrix,
    factor_dims: Option<Vec<usize>>,
    spectrum: OnceLock<Spectrum>,
}

fn check_factors(dim: usize, factor_dims: &Option<Vec<usize>>) -> Result<()> {
    if let Some(f) = factor_dims {
        if f.is_empty() || f.iter().any(|&d| d == 0) {
            return Err(Error::structure("factor dimensions must be positive"));
        }
        let prod: usize = f.iter().product();
        if prod != dim {
            return Err(Error::structure(format!(
                "factor dimensions {f:?} multiply to {prod}, expected {dim}"
            )));
        }
    }
    Ok(())
}

impl DensityOperator {
    /// Validates and ingests a matrix. Hermiticity deviations up to 1e-10 are
    /// accepted and symmetrised away; the trace must be 1 within 1e-10 and no
    /// eigenvalue may fall below −1e-10.
    pub fn new(matrix: CMatrix, factor_dims: Option<Vec<usize>>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::validation(format!(
                "density matrix must be square and non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::validation("density matrix has non-finite entries"));
        }
        check_factors(matrix.nrows(), &factor_dims)?;
        let dev = linalg::hermitian_deviation(&matrix);
        if dev > STATE_TOL {
            return Err(Error::validation(format!(
                "matrix is not Hermitian (max deviation {dev:.3e})"
            )));
        }
        let matrix = linalg::hermitize(&matrix);
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::validation(format!("trace is {tr}, expected 1")));
        }
        let rho = Self::from_trusted(matrix, factor_dims);
        let min = rho.spectrum().values.first().copied().unwrap_or(0.0);
        if min < -STATE_TOL {
            return Err(Error::validation(format!(
                "matrix is not positive semidefinite (eigenvalue {min:.3e})"
            )));
        }
        Ok(rho)
    }

    /// Wraps a matrix produced by an operation that preserves the invariants
    /// up to round-off. Only symmetrisation is applied.
    pub(crate) fn from_trusted(matrix: CMatrix, factor_dims: Option<Vec<usize>>) -> Self {
        DensityOperator {
            matrix: linalg::hermitize(&matrix),
            factor_dims,
            spectrum: OnceLock::new(),
        }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self::from_trusted(linalg::outer(psi.vector()), Some(psi.factor_dims().to_vec()))
    }

    /// Diagonal state from a probability vector (entries ≥ 0, sum 1).
    pub fn from_diagonal(probs: &[f64]) -> Result<Self> {
        let d = probs.len();
        let diag = CVector::from_iterator(d, probs.iter().map(|&p| c(p, 0.0)));
        Self::new(CMatrix::from_diagonal(&diag), None)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_trusted(linalg::identity(dim).scale(1.0 / dim as f64), None)
    }

    /// Convex combination `Σ w_i ρ_i`. Weights must be nonnegative and sum to 1.
    pub fn mixture(parts: &[(f64, &DensityOperator)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::validation("empty mixture"))?;
        let dim = first.1.dim();
        let mut acc = CMatrix::zeros(dim, dim);
        let mut total = 0.0;
        for (w, rho) in parts {
            if rho.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: rho.dim() });
            }
            if *w < 0.0 {
                return Err(Error::validation("negative mixture weight"));
            }
            acc += rho.matrix().scale(*w);
            total += w;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::validation(format!("mixture weights sum to {total}")));
        }
        Ok(Self::from_trusted(acc, first.1.factor_dims.clone()))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn factor_dims(&self) -> Option<&[usize]> {
        self.factor_dims.as_deref()
    }

    pub fn with_factor_dims(mut self, factor_dims: Vec<usize>) -> Result<Self> {
        let f = Some(factor_dims);
        check_factors(self.dim(), &f)?;
        self.factor_dims = f;
        Ok(self)
    }

    fn spectrum(&self) -> &Spectrum {
        self.spectrum.get_or_init(|| {
            let (values, vectors) = linalg::hermitian_eigen(&self.matrix);
            Spectrum { values, vectors }
        })
    }

    /// Eigenvalues in ascending order, clipped at zero.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.spectrum().values.iter().map(|&v| v.max(0.0)).collect()
    }

    /// Eigenvectors as columns, matching [`Self::eigenvalues`].
    pub fn eigenvectors(&self) -> &CMatrix {
        &self.spectrum().vectors
    }

    /// Eigenpairs with eigenvalue above [`RANK_TOL`], largest first.
    pub fn support(&self) -> Vec<(f64, CVector)> {
        let sp = self.spectrum();
        (0..self.dim())
            .rev()
            .filter(|&k| sp.values[k] > RANK_TOL)
            .map(|k| (sp.values[k], sp.vectors.column(k).into_owned()))
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.spectrum().values.iter().filter(|&&v| v > RANK_TOL).count()
    }

    pub fn is_pure(&self) -> bool {
        self.rank() == 1
    }

    /// Real diagonal in the computational basis.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| i == j || self.matrix[(i, j)].norm() <= tol))
    }

    /// Kronecker product; factor lists are concatenated (a missing list counts
    /// as a single factor).
    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        let mut dims = self.factor_dims.clone().unwrap_or_else(|| vec![self.dim()]);
        dims.extend(other.factor_dims.clone().unwrap_or_else(|| vec![other.dim()]));
        Self::from_trusted(linalg::kron(&self.matrix, &other.matrix), Some(dims))
    }

    /// Reduced operator on the factors listed in `keep`. The result's factors
    /// follow ascending index order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityOperator> {
        let dims = self
            .factor_dims
            .as_ref()
            .ok_or_else(|| Error::structure("partial trace needs factor dimensions"))?;
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.iter().any(|&k| k >= dims.len()) {
            return Err(Error::structure(format!(
                "keep indices {keep:?} out of range for {} factors",
                dims.len()
            )));
        }
        let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
        let keep_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
        let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
        let nk: usize = keep_dims.iter().product();
        let nt: usize = traced_dims.iter().product();
        let st = linalg::strides(dims);
        let offset = |idx: usize, which: &[usize], wdims: &[usize]| -> usize {
            linalg::digits(idx, wdims)
                .iter()
                .zip(which)
                .map(|(&d, &k)| d * st[k])
                .sum()
        };
        let keep_off: Vec<usize> = (0..nk).map(|i| offset(i, &keep, &keep_dims)).collect();
        let trace_off: Vec<usize> = (0..nt).map(|t| offset(t, &traced, &traced_dims)).collect();
        let mut out = CMatrix::zeros(nk, nk);
        for r in 0..nk {
            for col in 0..nk {
                let mut acc = C64::new(0.0, 0.0);
                for &t in &trace_off {
                    acc += self.matrix[(keep_off[r] + t, keep_off[col] + t)];
                }
                out[(r, col)] = acc;
            }
        }
        let out_dims = if keep_dims.is_empty() { vec![1] } else { keep_dims };
        Ok(Self::from_trusted(out, Some(out_dims)))
    }

    /// Complete dephasing in the computational basis, or in the column basis of
    /// `basis` when given.
    pub fn dephase(&self, basis: Option<&CMatrix>) -> Result<DensityOperator> {
        let diag_only = |m: &CMatrix| {
            CMatrix::from_diagonal(&m.diagonal())
        };
        let out = match basis {
            None => diag_only(&self.matrix),
            Some(u) => {
                if u.nrows() != self.dim() {
                    return Err(Error::DimensionMismatch { expected: self.dim(), got: u.nrows() });
                }
                let dev = linalg::unitarity_deviation(u);
                if dev > 1e-9 {
                    return Err(Error::validation(format!(
                        "dephasing basis is not unitary (deviation {dev:.3e})"
                    )));
                }
                let rotated = u.adjoint() * &self.matrix * u;
                u * diag_only(&rotated) * u.adjoint()
            }
        };
        Ok(Self::from_trusted(out, self.factor_dims.clone()))
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }
}

/// A normalized state vector with a tensor-factor structure.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    vector: CVector,
    factor_dims: Vec<usize>,
}

impl PureState {
    /// Norm must be 1 within 1e-10.
    pub fn new(vector: CVector, factor_dims: Option<Vec<usize>>) -> Result<Self> {
        let norm = vector.norm();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::validation(format!("state vector norm is {norm}, expected 1")));
        }
        Self::build(vector, factor_dims)
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(vector: CVector, factor_dims: Option<Vec<usize>>) -> Result<Self> {
        let norm = vector.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::validation("cannot normalize a zero or non-finite vector"));
        }
        Self::build(vector.unscale(norm), factor_dims)
    }

    fn build(vector: CVector, factor_dims: Option<Vec<usize>>) -> Result<Self> {
        let dim = vector.len();
        if dim == 0 {
            return Err(Error::validation("empty state vector"));
        }
        let dims = factor_dims.unwrap_or_else(|| vec![dim]);
        check_factors(dim, &Some(dims.clone()))?;
        Ok(PureState { vector, factor_dims: dims })
    }

    /// Computational basis state `|k⟩` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = CVector::zeros(dim);
        v[k] = linalg::ONE;
        PureState { vector: v, factor_dims: vec![dim] }
    }

    /// `(|0⟩ + |1⟩)/√2`.
    pub fn plus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState { vector: CVector::from_vec(vec![c(s, 0.0), c(s, 0.0)]), factor_dims: vec![2] }
    }

    /// `(|0⟩ − |1⟩)/√2`.
    pub fn minus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState { vector: CVector::from_vec(vec![c(s, 0.0), c(-s, 0.0)]), factor_dims: vec![2] }
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }

    pub fn vector(&self) -> &CVector {
        &self.vector
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn with_factor_dims(mut self, factor_dims: Vec<usize>) -> Result<Self> {
        check_factors(self.dim(), &Some(factor_dims.clone()))?;
        self.factor_dims = factor_dims;
        Ok(self)
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut dims = self.factor_dims.clone();
        dims.extend_from_slice(&other.factor_dims);
        PureState { vector: linalg::kron_vec(&self.vector, &other.vector), factor_dims: dims }
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &PureState) -> C64 {
        self.vector.dotc(&other.vector)
    }

    pub fn to_density(&self) -> DensityOperator {
        DensityOperator::from_pure(self)
    }

    /// Squared moduli of the amplitudes.
    pub fn probabilities(&self) -> Vec<f64> {
        self.vector.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Reduced density operator on the factors in `keep`, computed directly
    /// from the amplitudes.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityOperator> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.iter().any(|&k| k >= self.factor_dims.len()) {
            return Err(Error::structure(format!("keep indices {keep:?} out of range")));
        }
        let m = linalg::bipartite_matrix(&self.vector, &self.factor_dims, &keep);
        let dims: Vec<usize> = keep.iter().map(|&k| self.factor_dims[k]).collect();
        let dims = if dims.is_empty() { vec![1] } else { dims };
        Ok(DensityOperator::from_trusted(&m * m.adjoint(), Some(dims)))
    }

    /// Applies a unitary (or any operator) to the whole vector and renormalizes.
    pub fn apply(&self, op: &CMatrix) -> Result<PureState> {
        if op.ncols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: op.ncols() });
        }
        let dims = if op.nrows() == self.dim() { Some(self.factor_dims.clone()) } else { None };
        PureState::normalized(op * &self.vector, dims)
    }
}
