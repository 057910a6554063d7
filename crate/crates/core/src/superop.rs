//! Linear maps `φ: M_d → M_d`.
//!
//! The canonical carrier is the `d² x d²` matrix `Φ` acting on row-stacked
//! vecs, so `vec(φ(X)) = Φ vec(X)`. A term `X ↦ L X R` contributes
//! `L ⊗ R^T`. An operator-sum list `[(L_i, R_i)]` may ride along as a witness
//! of how the map was built; it is never recovered from `Φ`.
//!
//! The transform `φ ↦ φ'` swaps the left and right factor of every term. On
//! matrices it is `Φ' = P Φ^T P^T` with `P = perfect_shuffle(d, d)`, which
//! here is the index permutation that swaps the two base-`d` digits.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kron::{kron_product, rearrange, unvec, vec, BlockDims};
use crate::matrix::{check_square, mat_mul, ComplexMatrix};

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct SuperOperator {
    d: usize,
    phi: ComplexMatrix,
    terms: Option<Vec<(ComplexMatrix, ComplexMatrix)>>,
}

/// One `(A ⊗ C) M (B ⊗ D)` term of `φ(M) = M + Σ_j (A_j ⊗ C_j) M (B_j ⊗ D_j)`,
/// with `A, B ∈ M_m` and `C, D ∈ M_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct KroneckerTerm {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub c: ComplexMatrix,
    pub d: ComplexMatrix,
}

impl KroneckerTerm {
    pub fn new(
        a: ComplexMatrix,
        b: ComplexMatrix,
        c: ComplexMatrix,
        d: ComplexMatrix,
        dims: BlockDims,
    ) -> Result<Self> {
        let term = Self { a, b, c, d };
        term.check(dims)?;
        Ok(term)
    }

    pub fn check(&self, dims: BlockDims) -> Result<()> {
        for (mat, size) in [(&self.a, dims.m), (&self.b, dims.m), (&self.c, dims.n), (&self.d, dims.n)] {
            if mat.shape() != (size, size) {
                return Err(Error::ShapeMismatch {
                    op: "kronecker_term",
                    left: mat.shape(),
                    right: (size, size),
                });
            }
        }
        Ok(())
    }

    /// `(A ⊗ C, B ⊗ D)` as an operator-sum pair.
    pub fn left_right(&self) -> (ComplexMatrix, ComplexMatrix) {
        (kron_product(&self.a, &self.c), kron_product(&self.b, &self.d))
    }
}

fn isqrt_exact(k: usize) -> Option<usize> {
    let r = (k as f64).sqrt().round() as usize;
    (r * r == k).then_some(r)
}

/// Index permutation swapping the two base-`d` digits of `0..d²`.
fn digit_swap(d: usize, r: usize) -> usize {
    (r % d) * d + r / d
}

fn term_matrix(l: &ComplexMatrix, r: &ComplexMatrix) -> ComplexMatrix {
    kron_product(l, &r.transpose())
}

impl SuperOperator {
    /// Wraps a `d² x d²` matrix.
    pub fn from_matrix(phi: ComplexMatrix) -> Result<Self> {
        let n = check_square("superop_from_matrix", &phi)?;
        let d = isqrt_exact(n).ok_or(Error::ShapeMismatch {
            op: "superop_from_matrix",
            left: phi.shape(),
            right: (n, n),
        })?;
        Ok(Self { d, phi, terms: None })
    }

    /// `φ(M) = Σ L_i M R_i`; both representations are populated.
    pub fn from_terms(terms: Vec<(ComplexMatrix, ComplexMatrix)>, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut phi = ComplexMatrix::zeros(d * d, d * d);
        for (l, r) in &terms {
            for m in [l, r] {
                if m.shape() != (d, d) {
                    return Err(Error::ShapeMismatch {
                        op: "superop_from_terms",
                        left: m.shape(),
                        right: (d, d),
                    });
                }
            }
            phi = &phi + &term_matrix(l, r);
        }
        Ok(Self {
            d,
            phi,
            terms: Some(terms),
        })
    }

    /// `φ(M) = M + Σ_j (A_j ⊗ C_j) M (B_j ⊗ D_j)` on `M_{mn}`.
    pub fn from_kronecker_terms(terms: &[KroneckerTerm], dims: BlockDims) -> Result<Self> {
        let size = dims.size();
        let mut list = vec![(ComplexMatrix::identity(size), ComplexMatrix::identity(size))];
        for t in terms {
            t.check(dims)?;
            list.push(t.left_right());
        }
        Self::from_terms(list, size)
    }

    pub fn identity(d: usize) -> Self {
        let i = ComplexMatrix::identity(d);
        Self::from_terms(vec![(i.clone(), i)], d).expect("identity terms are d x d")
    }

    pub fn zero(d: usize) -> Self {
        Self {
            d,
            phi: ComplexMatrix::zeros(d * d, d * d),
            terms: Some(Vec::new()),
        }
    }

    /// `M ↦ P M`.
    pub fn left_mult(p: &ComplexMatrix) -> Result<Self> {
        let d = check_square("left_mult", p)?;
        Self::from_terms(vec![(p.clone(), ComplexMatrix::identity(d))], d)
    }

    /// `M ↦ M P`.
    pub fn right_mult(p: &ComplexMatrix) -> Result<Self> {
        let d = check_square("right_mult", p)?;
        Self::from_terms(vec![(ComplexMatrix::identity(d), p.clone())], d)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// The matrix `Φ`.
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.phi
    }

    pub fn terms(&self) -> Option<&[(ComplexMatrix, ComplexMatrix)]> {
        self.terms.as_deref()
    }

    /// Drops the operator-sum witness, keeping only `Φ`.
    pub fn without_terms(mut self) -> Self {
        self.terms = None;
        self
    }

    fn check_input(&self, x: &ComplexMatrix) -> Result<()> {
        if x.shape() != (self.d, self.d) {
            return Err(Error::ShapeMismatch {
                op: "superop_apply",
                left: x.shape(),
                right: (self.d, self.d),
            });
        }
        Ok(())
    }

    /// `unvec(Φ vec(x))`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_input(x)?;
        unvec(&mat_mul(&self.phi, &vec(x))?, self.d, self.d)
    }

    /// Evaluates through the operator-sum witness, if there is one.
    pub fn apply_terms(&self, x: &ComplexMatrix) -> Option<Result<ComplexMatrix>> {
        let terms = self.terms.as_ref()?;
        Some(self.check_input(x).map(|_| {
            terms
                .iter()
                .fold(ComplexMatrix::zeros(self.d, self.d), |acc, (l, r)| &acc + &(&(l * x) * r))
        }))
    }

    /// The transform `φ'`; swaps the witness factors as well.
    pub fn prime(&self) -> Self {
        let d = self.d;
        let n = d * d;
        let phi = ComplexMatrix::from_fn(n, n, |r, c| self.phi[(digit_swap(d, c), digit_swap(d, r))]);
        let terms = self
            .terms
            .as_ref()
            .map(|ts| ts.iter().map(|(l, r)| (r.clone(), l.clone())).collect());
        Self { d, phi, terms }
    }

    /// Entrywise conjugate map `M ↦ conj(φ(conj M))`.
    pub fn conj(&self) -> Self {
        Self {
            d: self.d,
            phi: self.phi.conj(),
            terms: self
                .terms
                .as_ref()
                .map(|ts| ts.iter().map(|(l, r)| (l.conj(), r.conj())).collect()),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            d: self.d,
            phi: self.phi.scale(s),
            terms: self
                .terms
                .as_ref()
                .map(|ts| ts.iter().map(|(l, r)| (l.scale(s), r.clone())).collect()),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.d != other.d {
            return Err(Error::ShapeMismatch {
                op: "superop_add",
                left: self.phi.shape(),
                right: other.phi.shape(),
            });
        }
        let terms = match (&self.terms, &other.terms) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).cloned().collect()),
            _ => None,
        };
        Ok(Self {
            d: self.d,
            phi: &self.phi + &other.phi,
            terms,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// `½(φ + φ')`.
    pub fn rt_symmetric_part(&self) -> Self {
        self.add(&self.prime()).expect("same dimension").scale(Complex64::new(0.5, 0.0))
    }

    /// `½(φ − φ')`.
    pub fn rt_skew_part(&self) -> Self {
        self.sub(&self.prime()).expect("same dimension").scale(Complex64::new(0.5, 0.0))
    }

    /// `½(φ + conj(φ'))`.
    pub fn rt_hermitian_part(&self) -> Self {
        self.add(&self.prime().conj()).expect("same dimension").scale(Complex64::new(0.5, 0.0))
    }

    /// `½(φ − conj(φ'))`.
    pub fn rt_skew_hermitian_part(&self) -> Self {
        self.sub(&self.prime().conj()).expect("same dimension").scale(Complex64::new(0.5, 0.0))
    }

    /// `max |Φ − Φ'|`.
    pub fn rt_symmetry_defect(&self) -> f64 {
        self.phi.max_abs_diff(&self.prime().phi)
    }

    /// `max |Φ^T − P^T Φ P|`.
    pub fn shuffle_symmetry_defect(&self) -> f64 {
        let d = self.d;
        let shuffled = ComplexMatrix::from_fn(d * d, d * d, |r, c| {
            self.phi[(digit_swap(d, r), digit_swap(d, c))]
        });
        self.phi.transpose().max_abs_diff(&shuffled)
    }

    /// `max |R(Φ)^T − R(Φ^T)|` with `R` acting on `M_d ⊗ M_d`.
    pub fn rearrangement_symmetry_defect(&self) -> f64 {
        let dims = BlockDims { m: self.d, n: self.d };
        let lhs = rearrange(&self.phi, dims).expect("Φ is d² x d²").transpose();
        let rhs = rearrange(&self.phi.transpose(), dims).expect("Φ is d² x d²");
        lhs.max_abs_diff(&rhs)
    }

    pub fn is_rt_symmetric(&self, tol: f64) -> bool {
        self.rt_symmetry_defect() <= tol
    }

    pub fn is_rt_skew(&self, tol: f64) -> bool {
        (&self.phi + &self.prime().phi).max_abs() <= tol
    }

    pub fn is_rt_hermitian(&self, tol: f64) -> bool {
        self.phi.max_abs_diff(&self.prime().phi.conj()) <= tol
    }

    pub fn is_rt_skew_hermitian(&self, tol: f64) -> bool {
        (&self.phi + &self.prime().phi.conj()).max_abs() <= tol
    }

    /// RT-symmetry tested through the shuffle identity `Φ^T = P^T Φ P`.
    pub fn shuffle_characterization(&self, tol: f64) -> bool {
        self.shuffle_symmetry_defect() <= tol
    }

    /// RT-symmetry tested through `R(Φ)^T = R(Φ^T)`.
    pub fn rearrangement_characterization(&self, tol: f64) -> bool {
        self.rearrangement_symmetry_defect() <= tol
    }
}

pub fn superop_apply(phi: &SuperOperator, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    phi.apply(x)
}

pub fn superop_from_terms(terms: Vec<(ComplexMatrix, ComplexMatrix)>, d: usize) -> Result<SuperOperator> {
    SuperOperator::from_terms(terms, d)
}

pub fn prime_transform(phi: &SuperOperator) -> SuperOperator {
    phi.prime()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kron::perfect_shuffle;
    use crate::matrix::ONE;
    use crate::sample::{MatrixSampler, Seed};

    fn e(i: usize, j: usize) -> ComplexMatrix {
        ComplexMatrix::unit(2, i, j)
    }

    fn sandwich() -> SuperOperator {
        // M ↦ E12 M E21
        SuperOperator::from_terms(vec![(e(0, 1), e(1, 0))], 2).unwrap()
    }

    fn random_map(seed: u64, d: usize, k: usize) -> SuperOperator {
        let mut s = MatrixSampler::new(Seed(seed));
        SuperOperator::from_terms((0..k).map(|_| (s.rect(d, d), s.rect(d, d))).collect(), d).unwrap()
    }

    #[test]
    fn apply_examples() {
        let mut s = MatrixSampler::new(Seed(4));
        let x = s.rect(2, 2);
        assert!(SuperOperator::identity(2).apply(&x).unwrap().approx_eq(&x, 1e-15));
        assert_eq!(sandwich().apply(&e(1, 1)).unwrap(), e(0, 0));
        let p = s.rect(3, 3);
        let left = SuperOperator::left_mult(&p).unwrap();
        assert!(left.apply(&ComplexMatrix::identity(3)).unwrap().approx_eq(&p, 1e-15));
        assert!(left.apply(&x).is_err());
    }

    #[test]
    fn from_terms_examples() {
        assert_eq!(SuperOperator::identity(3).matrix(), &ComplexMatrix::identity(9));
        let phi = sandwich();
        let nonzero: Vec<_> = phi.matrix().data().iter().filter(|z| z.norm() > 0.0).collect();
        assert_eq!(nonzero.len(), 1);
        // E12 ⊗ E21^T = E12 ⊗ E12: row (0,0) col (1,1)
        assert_eq!(phi.matrix()[(0, 3)], ONE);
        assert!(SuperOperator::from_terms(vec![(e(0, 0), ComplexMatrix::identity(3))], 2).is_err());
    }

    #[test]
    fn both_evaluation_paths_agree() {
        let phi = random_map(1, 3, 4);
        let x = MatrixSampler::new(Seed(99)).rect(3, 3);
        let via_matrix = phi.apply(&x).unwrap();
        let via_terms = phi.apply_terms(&x).unwrap().unwrap();
        assert!(via_matrix.approx_eq(&via_terms, 1e-12));
        assert!(phi.clone().without_terms().apply_terms(&x).is_none());
    }

    #[test]
    fn columns_are_images_of_units() {
        let phi = random_map(2, 2, 3);
        for p in 0..2 {
            for q in 0..2 {
                let img = vec(&phi.apply(&e(p, q)).unwrap());
                for r in 0..4 {
                    assert!((img[(r, 0)] - phi.matrix()[(r, p * 2 + q)]).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn prime_examples() {
        let phi = sandwich();
        let primed = phi.prime();
        assert_eq!(primed.apply(&e(0, 0)).unwrap(), e(1, 1));
        let expect = SuperOperator::from_terms(vec![(e(1, 0), e(0, 1))], 2).unwrap();
        assert_eq!(primed.matrix(), expect.matrix());
        assert_eq!(SuperOperator::identity(3).prime().matrix(), &ComplexMatrix::identity(9));

        let r = random_map(5, 3, 3);
        assert_eq!(r.prime().prime(), r);
        let p = perfect_shuffle(3, 3);
        let by_products = &(&p * &r.matrix().transpose()) * &p.transpose();
        assert!(r.prime().matrix().approx_eq(&by_products, 1e-14));
    }

    #[test]
    fn prime_of_left_mult_is_right_mult() {
        let p = MatrixSampler::new(Seed(6)).rect(4, 4);
        let left = SuperOperator::left_mult(&p).unwrap();
        let right = SuperOperator::right_mult(&p).unwrap();
        assert!(left.prime().matrix().approx_eq(right.matrix(), 0.0));
    }

    #[test]
    fn rt_symmetry_examples() {
        assert!(SuperOperator::identity(2).is_rt_symmetric(DEFAULT_TOL));
        let phi = sandwich();
        assert!(!phi.is_rt_symmetric(DEFAULT_TOL));
        assert!(!phi.rearrangement_characterization(DEFAULT_TOL));
        let sym = phi.add(&phi.prime()).unwrap();
        assert!(sym.is_rt_symmetric(DEFAULT_TOL));
        assert!(sym.shuffle_characterization(DEFAULT_TOL));
        assert!(sym.rearrangement_characterization(DEFAULT_TOL));
    }

    #[test]
    fn decomposition_parts() {
        let id = SuperOperator::identity(2);
        assert_eq!(id.rt_symmetric_part().matrix(), id.matrix());
        assert_eq!(id.rt_skew_part().matrix().max_abs(), 0.0);

        let phi = sandwich();
        let half = Complex64::new(0.5, 0.0);
        let sym = SuperOperator::from_terms(vec![(e(0, 1), e(1, 0)), (e(1, 0), e(0, 1))], 2)
            .unwrap()
            .scale(half);
        assert!(phi.rt_symmetric_part().matrix().approx_eq(sym.matrix(), 1e-15));

        let r = random_map(8, 3, 2);
        let (s, k) = (r.rt_symmetric_part(), r.rt_skew_part());
        assert!(s.is_rt_symmetric(1e-12));
        assert!(k.is_rt_skew(1e-12));
        assert!(s.add(&k).unwrap().matrix().approx_eq(r.matrix(), 1e-12));
    }

    #[test]
    fn rt_hermitian_examples() {
        assert!(SuperOperator::identity(2).is_rt_hermitian(DEFAULT_TOL));
        let i = Complex64::new(0.0, 1.0);
        let phi = SuperOperator::from_terms(vec![(e(0, 1), e(1, 0)), (e(1, 0), e(0, 1).scale_real(-1.0))], 2)
            .unwrap()
            .scale(i);
        assert!(phi.is_rt_hermitian(DEFAULT_TOL));
        assert!(!phi.is_rt_symmetric(DEFAULT_TOL));
        assert!(!sandwich().is_rt_hermitian(DEFAULT_TOL));

        let r = random_map(10, 2, 3);
        assert!(r.rt_hermitian_part().is_rt_hermitian(1e-12));
        assert!(r.rt_skew_hermitian_part().is_rt_skew_hermitian(1e-12));
    }

    #[test]
    fn kronecker_terms_validate_shapes() {
        let dims = BlockDims::new(2, 3).unwrap();
        let ok = KroneckerTerm::new(
            ComplexMatrix::identity(2),
            ComplexMatrix::identity(2),
            ComplexMatrix::identity(3),
            ComplexMatrix::identity(3),
            dims,
        );
        assert!(ok.is_ok());
        let bad = KroneckerTerm::new(
            ComplexMatrix::identity(3),
            ComplexMatrix::identity(2),
            ComplexMatrix::identity(3),
            ComplexMatrix::identity(3),
            dims,
        );
        assert!(bad.is_err());
        assert!(SuperOperator::from_matrix(ComplexMatrix::identity(5)).is_err());
        assert_eq!(SuperOperator::from_matrix(ComplexMatrix::identity(9)).unwrap().dim(), 3);
    }
}
