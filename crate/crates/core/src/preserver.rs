//! Characterizations of linear maps `φ` on `M_{mn}` with
//! `tr φ(A ⊕ B) = tr(A ⊕ B)` for all `A ∈ M_m`, `B ∈ M_n`.
//!
//! Each check returns a [`PreserverReport`] carrying two independent verdicts:
//! the closed-form partial-trace condition and the brute-force oracle. The
//! oracle eliminates the quantifier over `A, B` exactly by linearity: it is
//! enough to test `E_ij ⊗ I_n` and `I_m ⊗ E_kl`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kron::{kron_product, partial_trace_1, partial_trace_2, vec, BlockDims};
use crate::linalg::inverse;
use crate::matrix::{anticommutator, commutator, trace, ComplexMatrix};
use crate::sample::{MatrixKind, MatrixSampler, Seed};
use crate::superop::{KroneckerTerm, SuperOperator};

#[derive(Clone, Debug, PartialEq)]
pub struct PreserverReport {
    pub holds_oracle: bool,
    pub holds_condition: bool,
    /// Defect of the `tr_1` condition (in `M_n`).
    pub residual_1: ComplexMatrix,
    /// Defect of the `tr_2` condition (in `M_m`).
    pub residual_2: ComplexMatrix,
    pub max_defect: f64,
}

impl PreserverReport {
    fn new(holds_oracle: bool, residual_1: ComplexMatrix, residual_2: ComplexMatrix, tol: f64) -> Self {
        let max_defect = residual_1.max_abs().max(residual_2.max_abs());
        Self {
            holds_oracle,
            holds_condition: residual_1.max_abs() <= tol && residual_2.max_abs() <= tol,
            residual_1,
            residual_2,
            max_defect,
        }
    }

    /// Whether condition and oracle reach the same verdict.
    pub fn agrees(&self) -> bool {
        self.holds_oracle == self.holds_condition
    }
}

fn check_map_dims(phi: &SuperOperator, dims: BlockDims) -> Result<()> {
    if phi.dim() != dims.size() {
        let d = phi.dim();
        return Err(Error::BlockShape {
            op: "preserver",
            m: dims.m,
            n: dims.n,
            size: dims.size(),
            rows: d,
            cols: d,
        });
    }
    Ok(())
}

/// Largest violation of `tr φ(E_ij ⊗ I_n) = n δ_ij` and
/// `tr φ(I_m ⊗ E_kl) = m δ_kl` over the basis.
pub fn trace_defect(phi: &SuperOperator, dims: BlockDims) -> Result<f64> {
    check_map_dims(phi, dims)?;
    let BlockDims { m, n } = dims;
    let mut worst = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            let x = kron_product(&ComplexMatrix::unit(m, i, j), &ComplexMatrix::identity(n));
            let want = if i == j { n as f64 } else { 0.0 };
            let got = trace(&phi.apply(&x)?)?;
            worst = worst.max((got - want).norm());
        }
    }
    for k in 0..n {
        for l in 0..n {
            let x = kron_product(&ComplexMatrix::identity(m), &ComplexMatrix::unit(n, k, l));
            let want = if k == l { m as f64 } else { 0.0 };
            let got = trace(&phi.apply(&x)?)?;
            worst = worst.max((got - want).norm());
        }
    }
    Ok(worst)
}

/// Brute-force verdict: does `φ` preserve `tr(A ⊕ B)` for every `A`, `B`?
pub fn oracle_preserves_trace(phi: &SuperOperator, dims: BlockDims, tol: f64) -> Result<bool> {
    Ok(trace_defect(phi, dims)? <= tol)
}

fn identity_residuals(
    x: &ComplexMatrix,
    dims: BlockDims,
    sign: f64,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let BlockDims { m, n } = dims;
    let r1 = &partial_trace_1(x, dims)? - &ComplexMatrix::identity(n).scale_real(sign * m as f64);
    let r2 = &partial_trace_2(x, dims)? - &ComplexMatrix::identity(m).scale_real(sign * n as f64);
    Ok((r1, r2))
}

/// `M ↦ P M` preserves iff `tr_1(P) = m I_n` and `tr_2(P) = n I_m`.
pub fn check_left_mult(p: &ComplexMatrix, dims: BlockDims, tol: f64) -> Result<PreserverReport> {
    dims.check("check_left_mult", p)?;
    let (r1, r2) = identity_residuals(p, dims, 1.0)?;
    let oracle = oracle_preserves_trace(&SuperOperator::left_mult(p)?, dims, tol)?;
    Ok(PreserverReport::new(oracle, r1, r2, tol))
}

/// `P = I_{mn} + Σ_j A_j ⊗ B_j` together with its traceless factors.
#[derive(Clone, Debug)]
pub struct SynthesizedPreserver {
    pub p: ComplexMatrix,
    pub factors: Vec<(ComplexMatrix, ComplexMatrix)>,
}

pub fn synth_left_mult_factors(dims: BlockDims, r: usize, seed: Seed) -> SynthesizedPreserver {
    let mut s = MatrixSampler::new(seed);
    let factors: Vec<_> = (0..r)
        .map(|_| (s.matrix(dims.m, MatrixKind::Traceless), s.matrix(dims.n, MatrixKind::Traceless)))
        .collect();
    let p = factors
        .iter()
        .fold(ComplexMatrix::identity(dims.size()), |acc, (a, b)| &acc + &kron_product(a, b));
    SynthesizedPreserver { p, factors }
}

/// A left-multiplication preserver `I_{mn} + Σ_{j<r} A_j ⊗ B_j` with traceless
/// random factors.
pub fn synth_left_mult_preserver(dims: BlockDims, r: usize, seed: Seed) -> ComplexMatrix {
    synth_left_mult_factors(dims, r, seed).p
}

const RANK_RATIO: f64 = 1e-8;

/// Numerical rank of the columns by Gram-Schmidt with column pivoting; a
/// column counts while its residual norm exceeds `RANK_RATIO` times the first.
pub fn numerical_rank(columns: &[Vec<Complex64>]) -> usize {
    let mut cols: Vec<Vec<Complex64>> = columns.to_vec();
    let norm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut first = None;
    while !cols.is_empty() {
        let (k, best) = cols
            .iter()
            .enumerate()
            .map(|(k, c)| (k, norm(c)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty");
        let lead = *first.get_or_insert(best);
        if lead == 0.0 || best <= RANK_RATIO * lead {
            break;
        }
        let q: Vec<Complex64> = cols.swap_remove(k).iter().map(|z| z / best).collect();
        for c in cols.iter_mut() {
            // two passes of projection keep the basis orthogonal
            for _ in 0..2 {
                let proj: Complex64 = q.iter().zip(c.iter()).map(|(a, b)| a.conj() * b).sum();
                for (ci, qi) in c.iter_mut().zip(&q) {
                    *ci -= proj * qi;
                }
            }
        }
        basis.push(q);
    }
    basis.len()
}

/// Outcome of the traceless-factor criterion for `P = I + Σ A_j ⊗ B_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TracelessVerdict {
    pub factors_traceless: bool,
    pub preserves: bool,
    /// Whether `{A_j}` and `{B_j}` were each found linearly independent. The
    /// equivalence is only claimed when this holds.
    pub independent: bool,
}

impl TracelessVerdict {
    pub fn agrees(&self) -> bool {
        self.factors_traceless == self.preserves
    }
}

pub fn corollary_traceless_iff(
    terms: &[(ComplexMatrix, ComplexMatrix)],
    dims: BlockDims,
    tol: f64,
) -> Result<TracelessVerdict> {
    let mut p = ComplexMatrix::identity(dims.size());
    let mut traceless = true;
    for (a, b) in terms {
        for (mat, size) in [(a, dims.m), (b, dims.n)] {
            if mat.shape() != (size, size) {
                return Err(Error::ShapeMismatch {
                    op: "corollary_traceless_iff",
                    left: mat.shape(),
                    right: (size, size),
                });
            }
        }
        traceless &= trace(a)?.norm() <= tol && trace(b)?.norm() <= tol;
        p = &p + &kron_product(a, b);
    }
    let vecs = |pick: fn(&(ComplexMatrix, ComplexMatrix)) -> &ComplexMatrix| -> Vec<Vec<Complex64>> {
        terms.iter().map(|t| vec(pick(t)).into_data()).collect()
    };
    let independent =
        numerical_rank(&vecs(|t| &t.0)) == terms.len() && numerical_rank(&vecs(|t| &t.1)) == terms.len();
    let preserves = oracle_preserves_trace(&SuperOperator::left_mult(&p)?, dims, tol)?;
    Ok(TracelessVerdict {
        factors_traceless: traceless,
        preserves,
        independent,
    })
}

pub(crate) type Bracket = fn(&ComplexMatrix, &ComplexMatrix) -> Result<ComplexMatrix>;

pub(crate) fn lemma_check(terms: &[KroneckerTerm], dims: BlockDims, tol: f64, bracket: Bracket) -> Result<PreserverReport> {
    let phi = SuperOperator::from_kronecker_terms(terms, dims)?;
    let size = dims.size();
    let defect = &phi.apply(&ComplexMatrix::identity(size))? - &ComplexMatrix::identity(size);
    let mut rhs_1 = ComplexMatrix::zeros(dims.n, dims.n);
    let mut rhs_2 = ComplexMatrix::zeros(dims.m, dims.m);
    for t in terms {
        let ab = trace(&(&t.a * &t.b))?;
        let cd = trace(&(&t.c * &t.d))?;
        rhs_1 = &rhs_1 + &bracket(&t.c, &t.d)?.scale(ab);
        rhs_2 = &rhs_2 + &bracket(&t.a, &t.b)?.scale(cd);
    }
    let r1 = &partial_trace_1(&defect, dims)? - &rhs_1;
    let r2 = &partial_trace_2(&defect, dims)? - &rhs_2;
    let oracle = oracle_preserves_trace(&phi, dims, tol)?;
    Ok(PreserverReport::new(oracle, r1, r2, tol))
}

/// For `φ(M) = M + Σ (A_j ⊗ C_j) M (B_j ⊗ D_j)`: preserves iff
/// `tr_1(φ(I) − I) = Σ tr(A_j B_j) [C_j, D_j]` and
/// `tr_2(φ(I) − I) = Σ tr(C_j D_j) [A_j, B_j]`.
pub fn lemma_commutator_check(terms: &[KroneckerTerm], dims: BlockDims, tol: f64) -> Result<PreserverReport> {
    lemma_check(terms, dims, tol, commutator)
}

/// As [`lemma_commutator_check`] with anticommutators in place of commutators.
pub fn lemma_anticommutator_check(
    terms: &[KroneckerTerm],
    dims: BlockDims,
    tol: f64,
) -> Result<PreserverReport> {
    lemma_check(terms, dims, tol, anticommutator)
}

/// Any linear `φ` preserves iff `tr_1 φ'(I) = m I_n` and `tr_2 φ'(I) = n I_m`.
pub fn theorem_phiprime_check(phi: &SuperOperator, dims: BlockDims, tol: f64) -> Result<PreserverReport> {
    check_map_dims(phi, dims)?;
    let image = phi.prime().apply(&ComplexMatrix::identity(dims.size()))?;
    let (r1, r2) = identity_residuals(&image, dims, 1.0)?;
    let oracle = oracle_preserves_trace(phi, dims, tol)?;
    Ok(PreserverReport::new(oracle, r1, r2, tol))
}

/// For RT-symmetric (or RT-Hermitian) `φ`: preserves iff `tr_1 φ(I) = m I_n`
/// and `tr_2 φ(I) = n I_m`. With `skew` set, for skew RT-symmetric (or skew
/// RT-Hermitian) `φ` the targets become `-m I_n` and `-n I_m`.
pub fn corollary_rt_check(phi: &SuperOperator, dims: BlockDims, tol: f64, skew: bool) -> Result<PreserverReport> {
    check_map_dims(phi, dims)?;
    let in_class = if skew {
        phi.is_rt_skew(tol) || phi.is_rt_skew_hermitian(tol)
    } else {
        phi.is_rt_symmetric(tol) || phi.is_rt_hermitian(tol)
    };
    if !in_class {
        return Err(Error::SymmetryClass {
            expected: if skew {
                "skew RT-symmetric or skew RT-Hermitian"
            } else {
                "RT-symmetric or RT-Hermitian"
            },
            tol,
        });
    }
    let image = phi.apply(&ComplexMatrix::identity(dims.size()))?;
    let (r1, r2) = identity_residuals(&image, dims, if skew { -1.0 } else { 1.0 })?;
    let oracle = oracle_preserves_trace(phi, dims, tol)?;
    Ok(PreserverReport::new(oracle, r1, r2, tol))
}

/// Random operator-sum pairs `(P_i, Q_i)` with `Σ Q_i P_i = p`, so the map
/// `M ↦ Σ P_i M Q_i` has the same trace behaviour as `M ↦ p M`.
///
/// Built as `Q_i = T_i G_i`, `P_i = G_i^{-1} S_i` with random invertible `G_i`
/// and `Σ T_i S_i = p`.
pub fn operator_sum_factorization(
    p: &ComplexMatrix,
    count: usize,
    seed: Seed,
) -> Result<Vec<(ComplexMatrix, ComplexMatrix)>> {
    let d = crate::matrix::check_square("operator_sum_factorization", p)?;
    let count = count.max(1);
    let mut s = MatrixSampler::new(seed);
    let mut rest = p.clone();
    let mut pairs = Vec::with_capacity(count);
    for i in 0..count {
        let (t, sm) = if i + 1 == count {
            (ComplexMatrix::identity(d), rest.clone())
        } else {
            let (t, sm) = (s.rect(d, d), s.rect(d, d));
            rest = &rest - &(&t * &sm);
            (t, sm)
        };
        // shift keeps G comfortably invertible
        let g = &s.rect(d, d) + &ComplexMatrix::identity(d).scale_real(2.0 * d as f64);
        let q = &t * &g;
        let left = &inverse(&g)? * &sm;
        pairs.push((left, q));
    }
    Ok(pairs)
}
