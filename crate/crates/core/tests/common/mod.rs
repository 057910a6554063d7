//! Brute-force reference implementations, written from the definitions and
//! sharing no code with the library routines they check.

#![allow(dead_code)]

use kronsum::{ComplexMatrix, ComplexScalar};
use num_complex::Complex64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn unit(n: usize, i: usize, j: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |r, s| if r == i && s == j { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!(a.cols(), b.rows());
    ComplexMatrix::from_fn(a.rows(), b.cols(), |i, j| (0..a.cols()).map(|k| a[(i, k)] * b[(k, j)]).sum())
}

pub fn tr(a: &ComplexMatrix) -> Complex64 {
    (0..a.rows()).map(|i| a[(i, i)]).sum()
}

/// Laplace expansion along the first row.
pub fn cofactor_det(a: &ComplexMatrix) -> ComplexScalar {
    let n = a.rows();
    assert!(n == a.cols() && n <= 5);
    if n == 1 {
        return a[(0, 0)];
    }
    (0..n)
        .map(|j| {
            let minor = ComplexMatrix::from_fn(n - 1, n - 1, |r, s| a[(r + 1, if s < j { s } else { s + 1 })]);
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            a[(0, j)] * cofactor_det(&minor) * sign
        })
        .sum()
}

/// `(a_ij B)` entry by entry.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (p, q) = b.shape();
    ComplexMatrix::from_fn(a.rows() * p, a.cols() * q, |r, s| a[(r / p, s / q)] * b[(r % p, s % q)])
}

pub fn ksum(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (m, n) = (a.rows(), b.rows());
    &kron(a, &ComplexMatrix::identity(n)) + &kron(&ComplexMatrix::identity(m), b)
}

/// Sum of the diagonal `n x n` blocks.
pub fn ptr1(x: &ComplexMatrix, m: usize, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |k, l| (0..m).map(|i| x[(i * n + k, i * n + l)]).sum())
}

/// Each `n x n` block replaced by its trace.
pub fn ptr2(x: &ComplexMatrix, m: usize, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(m, m, |i, j| (0..n).map(|k| x[(i * n + k, j * n + k)]).sum())
}

/// Truncated Taylor series; accurate for small norms only.
pub fn taylor_exp(a: &ComplexMatrix, terms: usize) -> ComplexMatrix {
    let n = a.rows();
    let mut sum = ComplexMatrix::identity(n);
    let mut power = ComplexMatrix::identity(n);
    for k in 1..terms {
        power = matmul(&power, a).scale_real(1.0 / k as f64);
        sum = &sum + &power;
    }
    sum
}

/// Matrix of `M ↦ Σ L M R` acting on row-stacked vectors, column by column
/// from the images of the matrix units.
pub fn superop_by_basis(terms: &[(ComplexMatrix, ComplexMatrix)], d: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(d * d, d * d);
    for p in 0..d {
        for q in 0..d {
            let e = unit(d, p, q);
            let image = terms
                .iter()
                .fold(ComplexMatrix::zeros(d, d), |acc, (l, r)| &acc + &matmul(&matmul(l, &e), r));
            for j in 0..d {
                for v in 0..d {
                    out[(j * d + v, p * d + q)] = image[(j, v)];
                }
            }
        }
    }
    out
}

pub fn apply_terms(terms: &[(ComplexMatrix, ComplexMatrix)], x: &ComplexMatrix) -> ComplexMatrix {
    let d = x.rows();
    terms
        .iter()
        .fold(ComplexMatrix::zeros(d, d), |acc, (l, r)| &acc + &matmul(&matmul(l, x), r))
}

/// `max_{A, B} |tr φ(A ⊕ B) − tr(A ⊕ B)|` over the basis, evaluating `φ`
/// through its terms.
pub fn basis_trace_defect(terms: &[(ComplexMatrix, ComplexMatrix)], m: usize, n: usize) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            let a = unit(m, i, j);
            let x = ksum(&a, &ComplexMatrix::zeros(n, n));
            worst = worst.max((tr(&apply_terms(terms, &x)) - tr(&x)).norm());
        }
    }
    for k in 0..n {
        for l in 0..n {
            let b = unit(n, k, l);
            let x = ksum(&ComplexMatrix::zeros(m, m), &b);
            worst = worst.max((tr(&apply_terms(terms, &x)) - tr(&x)).norm());
        }
    }
    worst
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

pub fn permutation_matrix(perm: &[usize]) -> ComplexMatrix {
    let n = perm.len();
    ComplexMatrix::from_fn(n, n, |r, s| if perm[s] == r { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

/// All permutation matrices `P` with `P^T (E ⊗ F) P = F ⊗ E` for every pair
/// of matrix units.
pub fn shuffle_by_search(m: usize, n: usize) -> Vec<ComplexMatrix> {
    let mut found = Vec::new();
    'perm: for perm in permutations(m * n) {
        let p = permutation_matrix(&perm);
        let pt = p.transpose();
        for (i, j, k, l) in (0..m * m * n * n).map(|t| (t / (m * n * n), (t / (n * n)) % m, (t / n) % n, t % n)) {
            let lhs = matmul(&matmul(&pt, &kron(&unit(m, i, j), &unit(n, k, l))), &p);
            if lhs != kron(&unit(n, k, l), &unit(m, i, j)) {
                continue 'perm;
            }
        }
        found.push(p);
    }
    found
}
