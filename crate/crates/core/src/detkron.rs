//! Normalized traces and set-valued determinants on `GL_{mn}(ℂ)`.
//!
//! `Det(X) = det(X)^{1/k} R_k` is a coset of the `k`-th roots of unity `R_k`,
//! so equality is tested up to a root of unity. The partial determinants are
//! defined by transport through the exponential: for `X = e^M`,
//! `Det_1(X) = e^{Tr_1(M)} R_m` and `Det_2(X) = e^{Tr_2(M)} R_n`, where
//! `Tr_1 = tr_1 / m` and `Tr_2 = tr_2 / n`.
//!
//! `ψ(e^M) = e^{φ(M)}` is evaluated on witnesses that carry their logarithm,
//! so no branch has to be chosen after the fact.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kron::{kron_sum, partial_trace_1, partial_trace_2, BlockDims};
use crate::linalg::{determinant, mat_exp, principal_log, Lu};
use crate::matrix::{check_square, commutator, trace, ComplexMatrix, ComplexScalar};
use crate::preserver::oracle_preserves_trace;
use crate::sample::{MatrixKind, MatrixSampler, Seed};
use crate::superop::{KroneckerTerm, SuperOperator};

/// Tolerance for coset and coset-matrix equality.
pub const COSET_TOL: f64 = 1e-7;

/// Relative tolerance for `exp(log X) = X`.
pub const WITNESS_TOL: f64 = 1e-8;

/// Which tensor factor a partial operation keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factor {
    /// `tr_1` / `Det_1`: sums out the first factor, result in `M_n`.
    First,
    /// `tr_2` / `Det_2`: sums out the second factor, result in `M_m`.
    Second,
}

/// The set `rep · R_order`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootCoset {
    pub rep: ComplexScalar,
    pub order: usize,
}

impl RootCoset {
    pub fn new(rep: ComplexScalar, order: usize) -> Self {
        assert!(order > 0, "root-of-unity order must be positive");
        Self { rep, order }
    }

    /// `|(rep₁ / rep₂)^k − 1|`; infinite when the orders differ.
    pub fn defect(&self, other: &Self) -> f64 {
        if self.order != other.order {
            return f64::INFINITY;
        }
        if self.rep == other.rep {
            return 0.0;
        }
        if other.rep.norm() == 0.0 || self.rep.norm() == 0.0 {
            return f64::INFINITY;
        }
        ((self.rep / other.rep).powi(self.order as i32) - 1.0).norm()
    }

    pub fn equals(&self, other: &Self, tol: f64) -> bool {
        self.defect(other) <= tol
    }

    pub fn contains(&self, z: ComplexScalar, tol: f64) -> bool {
        self.equals(&RootCoset::new(z, self.order), tol)
    }

    /// The `order` elements of the coset.
    pub fn elements(&self) -> impl Iterator<Item = ComplexScalar> + '_ {
        roots_of_unity(self.order).map(move |w| self.rep * w)
    }
}

pub fn roots_of_unity(k: usize) -> impl Iterator<Item = ComplexScalar> {
    (0..k).map(move |j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / k as f64))
}

/// The set `{ z · base : z ∈ coset }`.
#[derive(Clone, Debug, PartialEq)]
pub struct CosetMatrix {
    pub base: ComplexMatrix,
    pub coset: RootCoset,
}

impl CosetMatrix {
    /// `base · R_order`.
    pub fn new(base: ComplexMatrix, order: usize) -> Self {
        Self {
            base,
            coset: RootCoset::new(Complex64::new(1.0, 0.0), order),
        }
    }

    /// `min_ζ rel_diff(ζ rep₁ base₁, rep₂ base₂)` over the `k`-th roots `ζ`;
    /// infinite when orders or shapes differ.
    pub fn defect(&self, other: &Self) -> f64 {
        if self.coset.order != other.coset.order || self.base.shape() != other.base.shape() {
            return f64::INFINITY;
        }
        let lhs = self.base.scale(self.coset.rep);
        let rhs = other.base.scale(other.coset.rep);
        roots_of_unity(self.coset.order)
            .map(|w| lhs.scale(w).rel_diff(&rhs))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn equals(&self, other: &Self, tol: f64) -> bool {
        self.defect(other) <= tol
    }
}

/// A non-singular matrix together with a logarithm: `value = e^{log_part}`.
#[derive(Clone, Debug, PartialEq)]
pub struct OmegaWitness {
    log_part: ComplexMatrix,
    value: ComplexMatrix,
}

impl OmegaWitness {
    pub fn from_log(log_part: ComplexMatrix) -> Result<Self> {
        let value = mat_exp(&log_part)?;
        Ok(Self { log_part, value })
    }

    /// Recovers the logarithm with [`principal_log`] and checks the round trip.
    pub fn from_matrix(value: ComplexMatrix) -> Result<Self> {
        let log_part = principal_log(&value)?;
        let defect = mat_exp(&log_part)?.rel_diff(&value);
        if defect > WITNESS_TOL {
            return Err(Error::LogRoundTrip { defect });
        }
        Ok(Self { log_part, value })
    }

    pub fn log_part(&self) -> &ComplexMatrix {
        &self.log_part
    }

    pub fn value(&self) -> &ComplexMatrix {
        &self.value
    }
}

/// `ψ(e^M) = e^{φ(M)}` on `GL_{mn}(ℂ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PsiMap {
    pub phi: SuperOperator,
    pub dims: BlockDims,
}

impl PsiMap {
    pub fn new(phi: SuperOperator, dims: BlockDims) -> Result<Self> {
        if phi.dim() != dims.size() {
            return Err(Error::BlockShape {
                op: "psi_map",
                m: dims.m,
                n: dims.n,
                size: dims.size(),
                rows: phi.dim(),
                cols: phi.dim(),
            });
        }
        Ok(Self { phi, dims })
    }
}

/// `Tr(X) = tr(X) / n`.
pub fn norm_trace(x: &ComplexMatrix) -> Result<ComplexScalar> {
    let n = check_square("norm_trace", x)?;
    Ok(trace(x)? / n as f64)
}

/// `Det(X) = det(X)^{1/n} R_n` with the principal root as representative.
pub fn norm_det(x: &ComplexMatrix) -> Result<RootCoset> {
    let n = check_square("norm_det", x)?;
    let lu = Lu::factor(x)?;
    if lu.is_singular() {
        return Err(Error::Singular { op: "norm_det" });
    }
    let det = lu.determinant();
    Ok(RootCoset::new(det.powf(1.0 / n as f64), n))
}

/// `Tr_1 = tr_1 / m` (in `M_n`) or `Tr_2 = tr_2 / n` (in `M_m`).
pub fn norm_partial_trace(x: &ComplexMatrix, dims: BlockDims, which: Factor) -> Result<ComplexMatrix> {
    Ok(match which {
        Factor::First => partial_trace_1(x, dims)?.scale_real(1.0 / dims.m as f64),
        Factor::Second => partial_trace_2(x, dims)?.scale_real(1.0 / dims.n as f64),
    })
}

/// `Det_1(e^M) = e^{Tr_1 M} R_m`, `Det_2(e^M) = e^{Tr_2 M} R_n`.
pub fn partial_det(x: &OmegaWitness, dims: BlockDims, which: Factor) -> Result<CosetMatrix> {
    let reduced = norm_partial_trace(&x.log_part, dims, which)?;
    let order = match which {
        Factor::First => dims.m,
        Factor::Second => dims.n,
    };
    Ok(CosetMatrix::new(mat_exp(&reduced)?, order))
}

/// [`partial_det`] for a bare matrix; the logarithm comes from
/// [`principal_log`].
pub fn partial_det_of_matrix(x: &ComplexMatrix, dims: BlockDims, which: Factor) -> Result<CosetMatrix> {
    dims.check("partial_det", x)?;
    partial_det(&OmegaWitness::from_matrix(x.clone())?, dims, which)
}

/// `(det X_ij)_ij`: the naive blockwise determinant. Not multiplicative in
/// general and unrelated to [`partial_det`]; kept for comparison only.
pub fn blockwise_det(x: &ComplexMatrix, dims: BlockDims) -> Result<ComplexMatrix> {
    dims.check("blockwise_det", x)?;
    let mut out = ComplexMatrix::zeros(dims.m, dims.m);
    for i in 0..dims.m {
        for j in 0..dims.m {
            out[(i, j)] = determinant(&dims.block(x, i, j))?;
        }
    }
    Ok(out)
}

/// `ψ(e^M) = e^{φ(M)}`; the result carries `φ(M)` as its logarithm, which
/// need not lie in the principal strip.
pub fn psi_apply(psi: &PsiMap, x: &OmegaWitness) -> Result<OmegaWitness> {
    OmegaWitness::from_log(psi.phi.apply(&x.log_part)?)
}

/// `det ψ(e^M) = det e^M` for all `M` reduces to `tr φ(M) = tr M`, which on
/// Kronecker sums is the trace-preserver oracle.
pub fn det_preserver_iff_trace(psi: &PsiMap, tol: f64) -> Result<bool> {
    oracle_preserves_trace(&psi.phi, psi.dims, tol)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetProbe {
    /// Every sample matched within the relative tolerance.
    pub preserves: bool,
    pub max_rel_defect: f64,
}

/// Sampled check of `det ψ(e^{A⊕B}) = det(e^A ⊗ e^B)` on `samples` random
/// pairs with entries of modulus at most `scale`.
pub fn sampled_det_probe(psi: &PsiMap, samples: usize, seed: Seed, scale: f64, tol: f64) -> Result<DetProbe> {
    let mut s = MatrixSampler::new(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let a = s.matrix(psi.dims.m, MatrixKind::General).scale_real(scale);
        let b = s.matrix(psi.dims.n, MatrixKind::General).scale_real(scale);
        let w = OmegaWitness::from_log(kron_sum(&a, &b)?)?;
        let want = determinant(w.value())?;
        let got = determinant(psi_apply(psi, &w)?.value())?;
        worst = worst.max((got - want).norm() / want.norm());
    }
    Ok(DetProbe {
        preserves: worst <= tol,
        max_rel_defect: worst,
    })
}

/// `U = exp((1/m) Σ tr(A_j B_j) [C_j, D_j]) ∈ M_n` and
/// `V = exp((1/n) Σ tr(C_j D_j) [A_j, B_j]) ∈ M_m`.
pub fn corollary_uv(terms: &[KroneckerTerm], dims: BlockDims) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let BlockDims { m, n } = dims;
    let mut u_log = ComplexMatrix::zeros(n, n);
    let mut v_log = ComplexMatrix::zeros(m, m);
    for t in terms {
        t.check(dims)?;
        let ab = trace(&(&t.a * &t.b))?;
        let cd = trace(&(&t.c * &t.d))?;
        u_log = &u_log + &commutator(&t.c, &t.d)?.scale(ab);
        v_log = &v_log + &commutator(&t.a, &t.b)?.scale(cd);
    }
    Ok((
        mat_exp(&u_log.scale_real(1.0 / m as f64))?,
        mat_exp(&v_log.scale_real(1.0 / n as f64))?,
    ))
}

fn e_identity(n: usize, sign: f64) -> ComplexMatrix {
    ComplexMatrix::identity(n).scale_real(sign.exp())
}

/// For `φ(M) = M + Σ (A_j ⊗ C_j) M (B_j ⊗ D_j)`: returns
/// `(Det_1 ψ(e^I) = e^{I_n} U R_m ∧ Det_2 ψ(e^I) = e^{I_m} V R_n, det-preserving)`.
pub fn corollary_uv_check(terms: &[KroneckerTerm], dims: BlockDims, tol: f64) -> Result<(bool, bool)> {
    let psi = PsiMap::new(SuperOperator::from_kronecker_terms(terms, dims)?, dims)?;
    let (u, v) = corollary_uv(terms, dims)?;
    let image = psi_apply(&psi, &OmegaWitness::from_log(ComplexMatrix::identity(dims.size()))?)?;
    let det_1 = partial_det(&image, dims, Factor::First)?;
    let det_2 = partial_det(&image, dims, Factor::Second)?;
    let want_1 = CosetMatrix::new(&e_identity(dims.n, 1.0) * &u, dims.m);
    let want_2 = CosetMatrix::new(&e_identity(dims.m, 1.0) * &v, dims.n);
    let condition = det_1.equals(&want_1, COSET_TOL) && det_2.equals(&want_2, COSET_TOL);
    Ok((condition, det_preserver_iff_trace(&psi, tol)?))
}

/// For RT-symmetric or RT-Hermitian `φ` (skew variants with `skew`): returns
/// `(Det_1 ψ(e^I) = e^{±I_n} R_m ∧ Det_2 ψ(e^I) = e^{±I_m} R_n, det-preserving)`.
pub fn theorem_det_rt(psi: &PsiMap, tol: f64, skew: bool) -> Result<(bool, bool)> {
    let phi = &psi.phi;
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
    let dims = psi.dims;
    let sign = if skew { -1.0 } else { 1.0 };
    let image = psi_apply(psi, &OmegaWitness::from_log(ComplexMatrix::identity(dims.size()))?)?;
    let det_1 = partial_det(&image, dims, Factor::First)?;
    let det_2 = partial_det(&image, dims, Factor::Second)?;
    let condition = det_1.equals(&CosetMatrix::new(e_identity(dims.n, sign), dims.m), COSET_TOL)
        && det_2.equals(&CosetMatrix::new(e_identity(dims.m, sign), dims.n), COSET_TOL);
    Ok((condition, det_preserver_iff_trace(psi, tol)?))
}
