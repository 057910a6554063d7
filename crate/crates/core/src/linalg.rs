//! LU factorization, determinant, inverse, matrix exponential and principal
//! logarithm.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{check_square, ComplexMatrix, ComplexScalar, ZERO};

/// Row-pivoted LU factors packed in one matrix (unit lower triangle implied).
#[derive(Clone, Debug)]
pub struct Lu {
    lu: ComplexMatrix,
    perm: Vec<usize>,
    odd_swaps: bool,
    singular: bool,
}

impl Lu {
    pub fn factor(a: &ComplexMatrix) -> Result<Self> {
        let n = check_square("lu", a)?;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut odd_swaps = false;
        let threshold = f64::EPSILON * n as f64 * a.max_abs();
        let mut singular = a.max_abs() == 0.0;

        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| lu[(x, k)].norm().total_cmp(&lu[(y, k)].norm()))
                .unwrap_or(k);
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                perm.swap(k, p);
                odd_swaps = !odd_swaps;
            }
            let pivot = lu[(k, k)];
            if pivot.norm() <= threshold {
                singular = true;
                if pivot == ZERO {
                    continue;
                }
            }
            for i in k + 1..n {
                let l = lu[(i, k)] / pivot;
                lu[(i, k)] = l;
                if l == ZERO {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= l * u;
                }
            }
        }
        Ok(Self {
            lu,
            perm,
            odd_swaps,
            singular,
        })
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn determinant(&self) -> ComplexScalar {
        let n = self.lu.rows();
        let prod: Complex64 = (0..n).map(|i| self.lu[(i, i)]).product();
        if self.odd_swaps {
            -prod
        } else {
            prod
        }
    }

    /// Solves `A X = B`.
    pub fn solve(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.lu.rows();
        if b.rows() != n {
            return Err(Error::ShapeMismatch {
                op: "solve",
                left: self.lu.shape(),
                right: b.shape(),
            });
        }
        if self.singular {
            return Err(Error::Singular { op: "solve" });
        }
        let cols = b.cols();
        let mut x = ComplexMatrix::from_fn(n, cols, |i, j| b[(self.perm[i], j)]);
        for c in 0..cols {
            for i in 0..n {
                let mut s = x[(i, c)];
                for k in 0..i {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in i + 1..n {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s / self.lu[(i, i)];
            }
        }
        Ok(x)
    }
}

/// Determinant through LU with partial pivoting. A singular matrix yields
/// (numerically) zero rather than an error.
pub fn determinant(a: &ComplexMatrix) -> Result<ComplexScalar> {
    Ok(Lu::factor(a)?.determinant())
}

pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let lu = Lu::factor(a)?;
    if lu.is_singular() {
        return Err(Error::Singular { op: "inverse" });
    }
    lu.solve(&ComplexMatrix::identity(a.rows()))
}

/// `a^{-1} b`.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    Lu::factor(a)?.solve(b)
}

// Degree-13 diagonal Pade coefficients and the matching scaling threshold.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA_13: f64 = 5.371920351148152;

fn add_scaled(terms: &[(f64, &ComplexMatrix)], n: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(n, n);
    for (c, m) in terms {
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += m[(i, j)] * *c;
            }
        }
    }
    out
}

/// Matrix exponential by scaling and squaring around a [13/13] Pade
/// approximant.
pub fn mat_exp(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = check_square("mat_exp", a)?;
    let norm = a.norm_1();
    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let x = a.scale_real(2f64.powi(-squarings));
    let ident = ComplexMatrix::identity(n);
    let x2 = &x * &x;
    let x4 = &x2 * &x2;
    let x6 = &x4 * &x2;
    let b = &PADE13;

    let u_inner = add_scaled(&[(b[13], &x6), (b[11], &x4), (b[9], &x2)], n);
    let u_sum = &(&x6 * &u_inner)
        + &add_scaled(&[(b[7], &x6), (b[5], &x4), (b[3], &x2), (b[1], &ident)], n);
    let u = &x * &u_sum;
    let v_inner = add_scaled(&[(b[12], &x6), (b[10], &x4), (b[8], &x2)], n);
    let v = &(&x6 * &v_inner)
        + &add_scaled(&[(b[6], &x6), (b[4], &x4), (b[2], &x2), (b[0], &ident)], n);

    let mut r = solve(&(&v - &u), &(&v + &u))?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    Ok(r)
}

const SQRT_MAX_ITER: usize = 100;

/// Principal square root by the Denman-Beavers iteration. Fails with
/// `BranchBoundary` when the iteration does not settle, which is what happens
/// for eigenvalues on the closed negative real axis.
pub fn sqrt_denman_beavers(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = check_square("sqrtm", a)?;
    let mut y = a.clone();
    let mut z = ComplexMatrix::identity(n);
    let mut prev_step = f64::INFINITY;
    for it in 1..=SQRT_MAX_ITER {
        let y_inv = inverse(&y).map_err(|_| Error::BranchBoundary { iterations: it })?;
        let z_inv = inverse(&z).map_err(|_| Error::BranchBoundary { iterations: it })?;
        let y_next = (&y + &z_inv).scale_real(0.5);
        let z_next = (&z + &y_inv).scale_real(0.5);
        let step = y_next.max_abs_diff(&y);
        let size = y_next.max_abs();
        if !size.is_finite() {
            return Err(Error::BranchBoundary { iterations: it });
        }
        y = y_next;
        z = z_next;
        // quadratic convergence: either the step hits rounding level or it
        // stops shrinking once already small
        let small = 1e-14 * n as f64 * size;
        if step <= small || (step <= 1e-10 * size && step >= prev_step) {
            return Ok(y);
        }
        prev_step = step;
    }
    Err(Error::BranchBoundary {
        iterations: SQRT_MAX_ITER,
    })
}

const LOG_SERIES_RADIUS: f64 = 0.25;
const LOG_MAX_SQRTS: usize = 64;

/// Principal matrix logarithm by inverse scaling and squaring: repeated
/// principal square roots bring the argument near the identity, then
/// `log X = 2 atanh((X - I)(X + I)^{-1})` is summed as a series and scaled back.
pub fn principal_log(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = check_square("principal_log", a)?;
    if Lu::factor(a)?.is_singular() {
        return Err(Error::Singular { op: "principal_log" });
    }
    let ident = ComplexMatrix::identity(n);
    let mut x = a.clone();
    let mut roots = 0usize;
    while (&x - &ident).norm_1() > LOG_SERIES_RADIUS {
        if roots == LOG_MAX_SQRTS {
            return Err(Error::BranchBoundary { iterations: roots });
        }
        x = sqrt_denman_beavers(&x)?;
        roots += 1;
    }

    let z = solve(&(&x + &ident), &(&x - &ident))?;
    let z2 = &z * &z;
    let mut power = z.clone();
    let mut sum = z;
    for k in 1..200 {
        power = &power * &z2;
        let term = power.scale_real(1.0 / (2 * k + 1) as f64);
        sum = &sum + &term;
        if term.max_abs() <= f64::EPSILON * 1e-2 * sum.max_abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Ok(sum.scale_real(2.0 * 2f64.powi(roots as i32)))
}
