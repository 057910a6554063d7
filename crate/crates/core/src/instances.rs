//! Random instance families for the agreement censuses: maps inside a given
//! RT-symmetry class, with and without the trace-preserving property, and
//! operator-sum term lists with controlled structure.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::kron::{kron_product, partial_trace_1, partial_trace_2, vec, BlockDims};
use crate::matrix::{trace, ComplexMatrix};
use crate::sample::{MatrixKind, MatrixSampler};
use crate::superop::{KroneckerTerm, SuperOperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MapClass {
    General,
    RtSymmetric,
    RtHermitian,
    RtSkew,
    RtSkewHermitian,
}

impl MapClass {
    pub fn is_skew(self) -> bool {
        matches!(self, MapClass::RtSkew | MapClass::RtSkewHermitian)
    }

    pub fn contains(self, phi: &SuperOperator, tol: f64) -> bool {
        match self {
            MapClass::General => true,
            MapClass::RtSymmetric => phi.is_rt_symmetric(tol),
            MapClass::RtHermitian => phi.is_rt_hermitian(tol),
            MapClass::RtSkew => phi.is_rt_skew(tol),
            MapClass::RtSkewHermitian => phi.is_rt_skew_hermitian(tol),
        }
    }
}

/// `Σ_{i<k} L_i M R_i` with random complex factors.
pub fn random_superop(s: &mut MatrixSampler, d: usize, k: usize) -> SuperOperator {
    let terms = (0..k).map(|_| (s.rect(d, d), s.rect(d, d))).collect();
    SuperOperator::from_terms(terms, d).expect("d x d factors")
}

/// A matrix `T ∈ M_{mn}` with `tr_1 T = x` and `tr_2 T = y`; needs `tr x = tr y`.
pub fn matrix_with_partial_traces(x: &ComplexMatrix, y: &ComplexMatrix, dims: BlockDims) -> ComplexMatrix {
    let BlockDims { m, n } = dims;
    let t = (trace(x).expect("square") + trace(y).expect("square")) * 0.5;
    let a = kron_product(&ComplexMatrix::identity(m), x).scale_real(1.0 / m as f64);
    let b = kron_product(y, &ComplexMatrix::identity(n)).scale_real(1.0 / n as f64);
    let c = ComplexMatrix::identity(m * n).scale(t / (m * n) as f64);
    &(&a + &b) - &c
}

fn required_shift(image: &ComplexMatrix, dims: BlockDims) -> (ComplexMatrix, ComplexMatrix) {
    let BlockDims { m, n } = dims;
    let x = &ComplexMatrix::identity(n).scale_real(m as f64) - &partial_trace_1(image, dims).expect("dims");
    let y = &ComplexMatrix::identity(m).scale_real(n as f64) - &partial_trace_2(image, dims).expect("dims");
    (x, y)
}

/// Adds a right multiplication `M ↦ M T` so that the result satisfies
/// `tr_i φ'(I) = tr_i(I)`, i.e. becomes a preserver.
pub fn correct_to_preserver(phi: &SuperOperator, dims: BlockDims) -> SuperOperator {
    let image = phi.prime().apply(&ComplexMatrix::identity(dims.size())).expect("dims");
    let (x, y) = required_shift(&image, dims);
    let t = matrix_with_partial_traces(&x, &y, dims);
    phi.add(&SuperOperator::right_mult(&t).expect("square")).expect("dims")
}

fn half_sandwich(t: &ComplexMatrix) -> SuperOperator {
    SuperOperator::left_mult(t)
        .and_then(|l| l.add(&SuperOperator::right_mult(t)?))
        .expect("square")
        .scale(Complex64::new(0.5, 0.0))
}

/// `M ↦ tr(M) T`.
fn trace_times(t: &ComplexMatrix) -> SuperOperator {
    let d = t.rows();
    let phi = &vec(t) * &vec(&ComplexMatrix::identity(d)).transpose();
    SuperOperator::from_matrix(phi).expect("d² x d²")
}

fn real_part(x: &ComplexMatrix) -> ComplexMatrix {
    x.map(|z| Complex64::new(z.re, 0.0))
}

fn imag_part(x: &ComplexMatrix) -> ComplexMatrix {
    x.map(|z| Complex64::new(z.im, 0.0))
}

fn symmetric_preserver(s: &mut MatrixSampler, dims: BlockDims) -> SuperOperator {
    let base = random_superop(s, dims.size(), 2).rt_symmetric_part();
    let image = base.apply(&ComplexMatrix::identity(dims.size())).expect("dims");
    let (x, y) = required_shift(&image, dims);
    base.add(&half_sandwich(&matrix_with_partial_traces(&x, &y, dims)))
        .expect("dims")
}

fn hermitian_preserver(s: &mut MatrixSampler, dims: BlockDims) -> SuperOperator {
    let size = dims.size();
    let base = random_superop(s, size, 2).rt_hermitian_part();
    let image = base.apply(&ComplexMatrix::identity(size)).expect("dims");
    let (x, y) = required_shift(&image, dims);
    // real defect: ½(L_T + R_T) with real T stays RT-Hermitian
    let t_re = matrix_with_partial_traces(&real_part(&x), &real_part(&y), dims);
    // imaginary defect is traceless; i(N − N')/(mn) with N = tr(·) T is
    // RT-Hermitian for real T and sends I to i T
    let t_im = matrix_with_partial_traces(&imag_part(&x), &imag_part(&y), dims);
    let n_map = trace_times(&t_im);
    let skew = n_map
        .sub(&n_map.prime())
        .expect("dims")
        .scale(Complex64::new(0.0, 1.0 / size as f64));
    base.add(&half_sandwich(&t_re))
        .and_then(|p| p.add(&skew))
        .expect("dims")
}

/// A random member of `class` acting on `M_{mn}`.
pub fn class_member(s: &mut MatrixSampler, dims: BlockDims, class: MapClass) -> SuperOperator {
    let raw = random_superop(s, dims.size(), 2);
    match class {
        MapClass::General => raw,
        MapClass::RtSymmetric => raw.rt_symmetric_part(),
        MapClass::RtHermitian => raw.rt_hermitian_part(),
        MapClass::RtSkew => raw.rt_skew_part(),
        MapClass::RtSkewHermitian => raw.rt_skew_hermitian_part(),
    }
}

/// A random trace-of-Kronecker-sum preserver inside `class`.
///
/// Skew classes contain no preservers: for skew `φ`, `tr φ(I) = tr φ'(I)`
/// forces `Re tr φ(I) = 0`, while preserving requires `tr φ(I) = mn`. For
/// those classes this returns the skew part of a preserver, which is the
/// closest in-class candidate and always fails.
pub fn class_preserver(s: &mut MatrixSampler, dims: BlockDims, class: MapClass) -> SuperOperator {
    match class {
        MapClass::General => correct_to_preserver(&random_superop(s, dims.size(), 2), dims),
        MapClass::RtSymmetric => symmetric_preserver(s, dims),
        MapClass::RtHermitian => hermitian_preserver(s, dims),
        MapClass::RtSkew => correct_to_preserver(&random_superop(s, dims.size(), 2), dims).rt_skew_part(),
        MapClass::RtSkewHermitian => {
            correct_to_preserver(&random_superop(s, dims.size(), 2), dims).rt_skew_hermitian_part()
        }
    }
}

/// A preserver in `class` pushed off the preserver set by `δ·id`
/// (`|δ| ∈ [0.05, 1]`), optionally plus a further random class member.
pub fn class_non_preserver(s: &mut MatrixSampler, dims: BlockDims, class: MapClass) -> SuperOperator {
    if class.is_skew() {
        return class_member(s, dims, class);
    }
    let base = class_preserver(s, dims, class);
    let mut delta = s.uniform(0.05, 1.0);
    if s.coin() {
        delta = -delta;
    }
    let shifted = base
        .add(&SuperOperator::identity(dims.size()).scale(Complex64::new(delta, 0.0)))
        .expect("dims");
    if s.coin() {
        shifted.add(&class_member(s, dims, class)).expect("dims")
    } else {
        shifted
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TermFamily {
    /// Unconstrained factors; almost surely not a preserver.
    Generic,
    /// `tr(A B) = tr(C D) = 0`, a preserver.
    Orthogonal,
    /// `D C = 0` (hence `tr(C D) = 0`) with `tr(A B)` free, a preserver whose
    /// `tr_1` defect `Σ tr(A B) C D` is non-zero.
    Annihilating,
}

impl TermFamily {
    pub const ALL: [TermFamily; 3] = [TermFamily::Generic, TermFamily::Orthogonal, TermFamily::Annihilating];
}

/// `b - (tr(a b) / tr(a a^*)) a^*`, so that `tr(a b) = 0`.
fn orthogonalize(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let adj = a.adjoint();
    let num = trace(&(a * b)).expect("square");
    let den = trace(&(a * &adj)).expect("square");
    b - &adj.scale(num / den)
}

fn annihilating_pair(s: &mut MatrixSampler, n: usize) -> (ComplexMatrix, ComplexMatrix) {
    let u = s.rect(n, 1);
    let v = s.rect(n, 1);
    let x = s.rect(n, 1);
    let z = s.rect(n, 1);
    // y^T u = 0 makes D C = x (y^T u) v^T vanish; stepping along conj(u)
    // keeps the denominator at |u|^2
    let zu: Complex64 = z.data().iter().zip(u.data()).map(|(a, b)| a * b).sum();
    let uu: f64 = u.data().iter().map(|a| a.norm_sqr()).sum();
    let y = &z - &u.conj().scale(zu / uu);
    (&u * &v.transpose(), &x * &y.transpose())
}

pub fn random_kronecker_terms(
    s: &mut MatrixSampler,
    dims: BlockDims,
    count: usize,
    family: TermFamily,
) -> Vec<KroneckerTerm> {
    let BlockDims { m, n } = dims;
    (0..count)
        .map(|_| {
            let a = s.matrix(m, MatrixKind::General);
            let b = s.matrix(m, MatrixKind::General);
            let (b, c, d) = match family {
                TermFamily::Generic => (b, s.rect(n, n), s.rect(n, n)),
                TermFamily::Orthogonal => {
                    let b = orthogonalize(&a, &b);
                    let c = s.rect(n, n);
                    let d = orthogonalize(&c, &s.rect(n, n));
                    (b, c, d)
                }
                TermFamily::Annihilating => {
                    let (c, d) = annihilating_pair(s, n);
                    (b, c, d)
                }
            };
            KroneckerTerm::new(a, b, c, d, dims).expect("shapes follow dims")
        })
        .collect()
}

/// `r` factor pairs where exactly one factor (chosen at random) has non-zero
/// trace; the rest are traceless.
pub fn one_non_traceless_factor(
    s: &mut MatrixSampler,
    dims: BlockDims,
    r: usize,
) -> Vec<(ComplexMatrix, ComplexMatrix)> {
    let mut pairs: Vec<_> = (0..r)
        .map(|_| (s.matrix(dims.m, MatrixKind::Traceless), s.matrix(dims.n, MatrixKind::Traceless)))
        .collect();
    let j = s.index(r);
    let shift = s.uniform(0.2, 1.0);
    if s.coin() {
        let mut a = pairs[j].0.clone();
        a[(0, 0)] += shift;
        pairs[j].0 = a;
    } else {
        let mut b = pairs[j].1.clone();
        b[(0, 0)] += shift;
        pairs[j].1 = b;
    }
    pairs
}
