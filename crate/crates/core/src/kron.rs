//! Kronecker products and sums, the vec operator, the perfect shuffle, the
//! rearrangement operator and the two partial traces on `M_m ⊗ M_n`.
//!
//! `vec` stacks ROWS: `vec(E_jv) = e_j ⊗ e_v`, i.e. `vec(X)[j * cols + v] = X[j, v]`.
//! Under this convention `vec(L X R) = (L ⊗ R^T) vec(X)`, and every other
//! module builds on it.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{check_square, ComplexMatrix, ONE, ZERO};

/// Block structure `(m, n)` of an `mn x mn` matrix: `m x m` blocks, each `n x n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BlockDims {
    pub m: usize,
    pub n: usize,
}

impl BlockDims {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(Self { m, n })
    }

    pub fn size(&self) -> usize {
        self.m * self.n
    }

    pub fn swapped(&self) -> Self {
        Self {
            m: self.n,
            n: self.m,
        }
    }

    pub(crate) fn check(&self, op: &'static str, x: &ComplexMatrix) -> Result<()> {
        let size = self.size();
        if x.rows() != size || x.cols() != size {
            return Err(Error::BlockShape {
                op,
                m: self.m,
                n: self.n,
                size,
                rows: x.rows(),
                cols: x.cols(),
            });
        }
        Ok(())
    }

    /// The `n x n` block `X_ij`.
    pub fn block(&self, x: &ComplexMatrix, i: usize, j: usize) -> ComplexMatrix {
        x.submatrix(i * self.n, j * self.n, self.n, self.n)
    }
}

impl std::fmt::Display for BlockDims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.m, self.n)
    }
}

pub fn kron_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = b.shape();
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}

/// `a ⊗ I_n + I_m ⊗ b`, assembled directly without forming either product.
pub fn kron_sum(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let m = check_square("kron_sum", a)?;
    let n = check_square("kron_sum", b)?;
    Ok(ComplexMatrix::from_fn(m * n, m * n, |r, c| {
        let (i, k) = (r / n, r % n);
        let (j, l) = (c / n, c % n);
        let mut z = ZERO;
        if k == l {
            z += a[(i, j)];
        }
        if i == j {
            z += b[(k, l)];
        }
        z
    }))
}

/// Row-stacking vec as a column vector.
pub fn vec(a: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_raw(a.rows() * a.cols(), 1, a.data().to_vec())
}

/// Inverse of [`vec`].
pub fn unvec(v: &ComplexMatrix, rows: usize, cols: usize) -> Result<ComplexMatrix> {
    if v.cols() != 1 || v.rows() != rows * cols {
        return Err(Error::ShapeMismatch {
            op: "unvec",
            left: v.shape(),
            right: (rows * cols, 1),
        });
    }
    ComplexMatrix::new(rows, cols, v.data().to_vec())
}

/// The vec-permutation matrix `P` (size `mn`) with `P^T (A ⊗ B) P = B ⊗ A`
/// for `A ∈ M_m`, `B ∈ M_n`. It sends `e_j ⊗ e_i` (`j < n`, `i < m`) to
/// `e_i ⊗ e_j`.
pub fn perfect_shuffle(m: usize, n: usize) -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(m * n, m * n);
    for i in 0..m {
        for j in 0..n {
            p[(i * n + j, j * m + i)] = ONE;
        }
    }
    p
}

/// Applies `P^T x P` with `P = perfect_shuffle(m, n)` by index permutation.
/// The result carries block dims `(n, m)`.
pub fn shuffle_conjugate(x: &ComplexMatrix, dims: BlockDims) -> Result<ComplexMatrix> {
    dims.check("shuffle_conjugate", x)?;
    let BlockDims { m, n } = dims;
    // row r = j*m + i of the result corresponds to row i*n + j of x
    let src = |r: usize| (r % m) * n + r / m;
    Ok(ComplexMatrix::from_fn(m * n, m * n, |r, c| x[(src(r), src(c))]))
}

/// The rearrangement operator on `M_m ⊗ M_n`: the linear map with
/// `R(A ⊗ B) = vec(A) vec(B)^T`. Output is `m^2 x n^2`.
pub fn rearrange(x: &ComplexMatrix, dims: BlockDims) -> Result<ComplexMatrix> {
    dims.check("rearrange", x)?;
    let BlockDims { m, n } = dims;
    // x[(a n + c, b n + e)] is the coefficient of E_ab ⊗ E_ce
    Ok(ComplexMatrix::from_fn(m * m, n * n, |r, s| {
        let (a, b) = (r / m, r % m);
        let (c, e) = (s / n, s % n);
        x[(a * n + c, b * n + e)]
    }))
}

/// Inverse of [`rearrange`]: rebuilds the `mn x mn` matrix from its `m^2 x n^2`
/// rearrangement.
pub fn unrearrange(r: &ComplexMatrix, dims: BlockDims) -> Result<ComplexMatrix> {
    let BlockDims { m, n } = dims;
    if r.shape() != (m * m, n * n) {
        return Err(Error::ShapeMismatch {
            op: "unrearrange",
            left: r.shape(),
            right: (m * m, n * n),
        });
    }
    Ok(ComplexMatrix::from_fn(m * n, m * n, |row, col| {
        let (a, c) = (row / n, row % n);
        let (b, e) = (col / n, col % n);
        r[(a * m + b, c * n + e)]
    }))
}

/// `tr_1(X) = Σ_j X_jj ∈ M_n`, the sum of the diagonal blocks.
pub fn partial_trace_1(x: &ComplexMatrix, dims: BlockDims) -> Result<ComplexMatrix> {
    dims.check("partial_trace_1", x)?;
    let BlockDims { m, n } = dims;
    Ok(ComplexMatrix::from_fn(n, n, |k, l| {
        (0..m).map(|j| x[(j * n + k, j * n + l)]).sum::<Complex64>()
    }))
}

/// `tr_2(X) = (tr X_ij)_ij ∈ M_m`, each block replaced by its trace.
pub fn partial_trace_2(x: &ComplexMatrix, dims: BlockDims) -> Result<ComplexMatrix> {
    dims.check("partial_trace_2", x)?;
    let BlockDims { m, n } = dims;
    Ok(ComplexMatrix::from_fn(m, m, |i, j| {
        (0..n).map(|k| x[(i * n + k, j * n + k)]).sum::<Complex64>()
    }))
}
