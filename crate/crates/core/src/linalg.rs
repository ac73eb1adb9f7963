//! Dense SVD and symmetric eigen helpers.
//!
//! nalgebra's SVD of a rank-deficient matrix can return singular vectors that
//! are off by far more than rounding, so rank and null-space decisions go
//! through faer instead; symmetric eigenproblems follow for consistency.

use faer::Mat;
use nalgebra::{DMatrix, DVector, Dim, Matrix, RawStorage};

/// Full SVD `a = u diag(s) v_t` with `s` sorted in decreasing order.
#[derive(Debug, Clone)]
pub struct FullSvd {
    /// `m x m`.
    pub u: DMatrix<f64>,
    /// `min(m, n)` values.
    pub s: DVector<f64>,
    /// `n x n`.
    pub v_t: DMatrix<f64>,
}

impl FullSvd {
    pub fn left(&self, k: usize) -> DVector<f64> {
        self.u.column(k).into_owned()
    }

    pub fn right(&self, k: usize) -> DVector<f64> {
        self.v_t.row(k).transpose()
    }

    pub fn rank(&self, threshold: f64) -> usize {
        self.s.iter().filter(|x| **x > threshold).count()
    }

    /// Orthonormal basis of the null space as the columns of an `n x r` matrix.
    pub fn null_space(&self, threshold: f64) -> DMatrix<f64> {
        let n = self.v_t.nrows();
        let r = self.rank(threshold);
        self.v_t.rows(r, n - r).transpose()
    }

    pub fn recompose(&self) -> DMatrix<f64> {
        let (m, n) = (self.u.nrows(), self.v_t.nrows());
        let mut sigma = DMatrix::zeros(m, n);
        for (i, x) in self.s.iter().enumerate() {
            sigma[(i, i)] = *x;
        }
        &self.u * sigma * &self.v_t
    }
}

pub fn svd<R: Dim, C: Dim, S: RawStorage<f64, R, C>>(a: &Matrix<f64, R, C, S>) -> FullSvd {
    let (m, n) = a.shape();
    let f = Mat::<f64>::from_fn(m, n, |i, j| a[(i, j)]);
    let d = f.svd().expect("SVD of a small finite matrix converges");
    let (u, v, s) = (d.U(), d.V(), d.S().column_vector());
    let k = m.min(n);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));
    // columns past k carry no singular value and keep their place
    let perm_u: Vec<usize> = order.iter().copied().chain(k..m).collect();
    let perm_v: Vec<usize> = order.iter().copied().chain(k..n).collect();
    FullSvd {
        u: DMatrix::from_fn(m, m, |i, j| u[(i, perm_u[j])]),
        s: DVector::from_iterator(k, order.iter().map(|&i| s[i])),
        v_t: DMatrix::from_fn(n, n, |i, j| v[(j, perm_v[i])]),
    }
}

/// Eigenpairs of a symmetric matrix, eigenvalues ascending, eigenvectors as
/// columns.
pub fn sym_eigen<R: Dim, C: Dim, S: RawStorage<f64, R, C>>(a: &Matrix<f64, R, C, S>) -> (DVector<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let f = Mat::<f64>::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
    let d = f
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("symmetric eigenproblem of a small finite matrix converges");
    let (u, s) = (d.U(), d.S().column_vector());
    (DVector::from_fn(n, |i, _| s[i]), DMatrix::from_fn(n, n, |i, j| u[(i, j)]))
}
