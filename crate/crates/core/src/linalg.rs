//! Dense complex linear-algebra helpers shared by every module.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
pub use num_complex::Complex64 as C64;

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    a.kronecker(b)
}

/// Largest elementwise modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// `‖U†U − I‖_max`.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    max_abs(&(u.adjoint() * u - identity(u.nrows())))
}

pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// Eigendecomposition of a Hermitian matrix. The input is symmetrised first so
/// round-off asymmetry never reaches the solver. Eigenvalues are returned in
/// ascending order with matching eigenvector columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 1 {
        return (vec![m[(0, 0)].re], identity(1));
    }
    let eig = SymmetricEigen::new(hermitize(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    hermitian_eigen(m).0
}

/// Applies `f` to the spectrum of a Hermitian matrix: `V f(Λ) V†`.
pub fn hermitian_map(m: &CMatrix, f: impl Fn(f64) -> C64) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let mut scaled = vectors.clone();
    for (j, &lambda) in values.iter().enumerate() {
        let fj = f(lambda);
        for i in 0..scaled.nrows() {
            scaled[(i, j)] *= fj;
        }
    }
    scaled * vectors.adjoint()
}

/// Square root of a positive semidefinite matrix; tiny negative eigenvalues
/// are treated as zero.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    hermitian_map(m, |x| c(x.max(0.0).sqrt(), 0.0))
}

/// Row-major strides for a list of subsystem dimensions.
pub fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Splits a flat row-major index into per-factor digits.
pub fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
    out
}

/// Reshapes a multipartite amplitude vector into a matrix whose rows run over
/// the factors in `rows` (in the given order) and whose columns run over the
/// remaining factors (in their natural order).
pub fn bipartite_matrix(vector: &CVector, dims: &[usize], rows: &[usize]) -> CMatrix {
    let cols: Vec<usize> = (0..dims.len()).filter(|k| !rows.contains(k)).collect();
    let row_dims: Vec<usize> = rows.iter().map(|&k| dims[k]).collect();
    let col_dims: Vec<usize> = cols.iter().map(|&k| dims[k]).collect();
    let nr: usize = row_dims.iter().product();
    let nc: usize = col_dims.iter().product();
    let st = strides(dims);
    let mut m = CMatrix::zeros(nr, nc);
    for r in 0..nr {
        let rd = digits(r, &row_dims);
        let base: usize = rows.iter().zip(&rd).map(|(&k, &d)| d * st[k]).sum();
        for cidx in 0..nc {
            let cd = digits(cidx, &col_dims);
            let off: usize = cols.iter().zip(&cd).map(|(&k, &d)| d * st[k]).sum();
            m[(r, cidx)] = vector[base + off];
        }
    }
    m
}
