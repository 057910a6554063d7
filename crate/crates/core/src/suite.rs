//! Seeded property suite: every identity and every condition-versus-oracle
//! census, run per block shape and merged into a [`SuiteReport`].
//!
//! Trial `k` of property `name` draws from the stream seeded by the first
//! eight bytes of `SHA-256(master ‖ name ‖ 0 ‖ k)`, so reports do not depend
//! on scheduling.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::detkron::{
    corollary_uv, corollary_uv_check, det_preserver_iff_trace, norm_det, norm_partial_trace, norm_trace,
    partial_det, psi_apply, sampled_det_probe, theorem_det_rt, CosetMatrix, Factor, OmegaWitness, PsiMap,
    RootCoset, COSET_TOL,
};
use crate::error::Result;
use crate::instances::{
    class_non_preserver, class_preserver, matrix_with_partial_traces, one_non_traceless_factor,
    random_kronecker_terms, random_superop, MapClass, TermFamily,
};
use crate::kron::{kron_product, kron_sum, partial_trace_1, partial_trace_2, perfect_shuffle, BlockDims};
use crate::linalg::{determinant, inverse, mat_exp, principal_log};
use crate::matrix::{commutator, trace, ComplexMatrix};
use crate::preserver::{
    check_left_mult, corollary_rt_check, corollary_traceless_iff, lemma_anticommutator_check, lemma_check,
    synth_left_mult_factors, synth_left_mult_preserver, theorem_phiprime_check, trace_defect, Bracket,
};
use crate::sample::{MatrixSampler, Seed};
use crate::superop::SuperOperator;

/// A deliberate defect for checking that the suite notices broken code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// The commutator lemma uses `−[C, D]` and `−[A, B]`.
    NegateCommutator,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub trials: usize,
    pub dims: Vec<BlockDims>,
    /// Verdict tolerance for conditions and oracles.
    pub tol: f64,
    pub mutation: Option<Mutation>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 200,
            dims: vec![BlockDims { m: 2, n: 2 }, BlockDims { m: 2, n: 3 }, BlockDims { m: 3, n: 3 }],
            tol: 1e-9,
            mutation: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyRecord {
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    /// Largest finite defect seen across trials.
    pub max_defect: f64,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub properties: Vec<PropertyRecord>,
    pub verdict: Verdict,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failing(&self) -> impl Iterator<Item = &PropertyRecord> {
        self.properties.iter().filter(|p| p.failures > 0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields are finite")
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.properties {
            writeln!(
                f,
                "{} {:<48} trials={:<4} failures={:<4} max_defect={:.3e}",
                if p.failures == 0 { "PASS" } else { "FAIL" },
                p.name,
                p.trials,
                p.failures,
                p.max_defect
            )?;
        }
        write!(f, "overall: {}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

/// Outcome of one trial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Trial {
    pub ok: bool,
    pub defect: f64,
}

impl Trial {
    fn within(defect: f64, tol: f64) -> Self {
        Self {
            ok: defect <= tol,
            defect,
        }
    }

    fn verdict(ok: bool, defect: f64) -> Self {
        Self { ok, defect }
    }
}

struct Ctx {
    tol: f64,
    mutation: Option<Mutation>,
}

fn negated_commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(commutator(a, b)?.scale_real(-1.0))
}

impl Ctx {
    fn commutator(&self) -> Bracket {
        match self.mutation {
            Some(Mutation::NegateCommutator) => negated_commutator,
            None => commutator,
        }
    }
}

type Check = fn(&Ctx, BlockDims, usize, &mut MatrixSampler) -> Result<Trial>;

pub fn trial_seed(master: u64, name: &str, index: usize) -> Seed {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(name.as_bytes());
    h.update([0u8]);
    h.update((index as u64).to_le_bytes());
    let digest = h.finalize();
    Seed(u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes")))
}

/// Names of all properties, without the shape suffix.
pub fn property_names() -> Vec<&'static str> {
    PROPERTIES.iter().map(|(name, _)| *name).collect()
}

pub fn run_suite(config: &SuiteConfig) -> SuiteReport {
    let ctx = Ctx {
        tol: config.tol,
        mutation: config.mutation,
    };
    let jobs: Vec<(String, BlockDims, Check)> = config
        .dims
        .iter()
        .flat_map(|&dims| PROPERTIES.iter().map(move |&(name, check)| (format!("{name}[{dims}]"), dims, check)))
        .collect();
    let properties = jobs
        .par_iter()
        .map(|(name, dims, check)| {
            let outcomes: Vec<Trial> = (0..config.trials)
                .into_par_iter()
                .map(|k| {
                    let mut s = MatrixSampler::new(trial_seed(config.seed, name, k));
                    check(&ctx, *dims, k, &mut s).unwrap_or(Trial {
                        ok: false,
                        defect: f64::INFINITY,
                    })
                })
                .collect();
            PropertyRecord {
                name: name.clone(),
                trials: config.trials,
                failures: outcomes.iter().filter(|t| !t.ok).count(),
                max_defect: outcomes
                    .iter()
                    .map(|t| t.defect)
                    .filter(|d| d.is_finite())
                    .fold(0.0, f64::max),
                seed: config.seed,
            }
        })
        .collect::<Vec<_>>();
    let verdict = if properties.iter().all(|p| p.failures == 0) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    SuiteReport { properties, verdict }
}

const PROPERTIES: &[(&str, Check)] = &[
    ("matrix.trace_cyclic", trace_cyclic),
    ("matrix.det_multiplicative", det_multiplicative),
    ("matrix.exp_log_round_trip", exp_log_round_trip),
    ("matrix.commutator_traceless", commutator_traceless),
    ("matrix.log_principal_strip", log_principal_strip),
    ("kron.partial_traces_keep_trace", partial_traces_keep_trace),
    ("kron.partial_traces_linear", partial_traces_linear),
    ("kron.mixed_product", mixed_product),
    ("kron.det_of_product", det_of_product),
    ("kron.det_exp_kron_sum", det_exp_kron_sum),
    ("kron.shuffle_swaps_partial_traces", shuffle_swaps_partial_traces),
    ("superop.prime_involution", prime_involution),
    ("superop.prime_is_shuffled_transpose", prime_is_shuffled_transpose),
    ("superop.decomposition", decomposition),
    ("superop.rt_tests_agree", rt_tests_agree),
    ("superop.prime_left_is_right", prime_left_is_right),
    ("preserver.left_mult_agreement", left_mult_agreement),
    ("preserver.partial_trace_additivity", partial_trace_additivity),
    ("preserver.traceless_corollary", traceless_corollary),
    ("preserver.lemma_commutator_agreement", lemma_commutator_agreement),
    ("preserver.lemma_anticommutator_agreement", lemma_anticommutator_agreement),
    ("preserver.lemmas_agree", lemmas_agree),
    ("preserver.phiprime_agreement", phiprime_agreement),
    ("preserver.rt_corollary_agreement", rt_corollary_agreement),
    ("preserver.oracle_sees_basis_traces", oracle_sees_basis_traces),
    ("preserver.left_mult_matches_phiprime", left_mult_matches_phiprime),
    ("detkron.coset_equivalence", coset_equivalence),
    ("detkron.norm_det_kron_exp", norm_det_kron_exp),
    ("detkron.coset_identities", coset_identities),
    ("detkron.partial_det_norm_det", partial_det_norm_det),
    ("detkron.uv_unimodular", uv_unimodular),
    ("detkron.root_shift_invariance", root_shift_invariance),
    ("detkron.det_rt_agreement", det_rt_agreement),
    ("detkron.det_probe_matches_oracle", det_probe_matches_oracle),
    ("detkron.corollary_uv_agreement", corollary_uv_agreement),
];

fn rel(got: Complex64, want: Complex64) -> f64 {
    (got - want).norm() / want.norm().max(1.0)
}

fn rel_strict(got: Complex64, want: Complex64) -> f64 {
    (got - want).norm() / got.norm().max(want.norm()).max(f64::MIN_POSITIVE)
}

fn strict_rel_diff(got: &ComplexMatrix, want: &ComplexMatrix) -> f64 {
    got.max_abs_diff(want) / want.max_abs().max(f64::MIN_POSITIVE)
}

/// Random matrix with 1-norm `target`, hence spectral radius below it.
fn small(s: &mut MatrixSampler, n: usize, target: f64) -> ComplexMatrix {
    let x = s.rect(n, n);
    x.scale_real(target / x.norm_1())
}

fn verdict_agreement(holds_oracle: bool, holds_condition: bool, max_defect: f64) -> Trial {
    Trial::verdict(holds_oracle == holds_condition, if holds_oracle { max_defect } else { 0.0 })
}

// ---- matrix ----

fn trace_cyclic(_: &Ctx, d: BlockDims, _: usize, s: &mut MatrixSampler) -> Result<Trial> {
    let x = s.rect(d.m, d.n);
    let y = s.rect(d.n, d.m);
    let xy = trace(&(&x * &y))?;
    let yx = trace(&(&y * &x))?;
    Ok(Trial::within(rel(xy, yx), 1e-10))
}

fn det_multiplicative(_: &Ctx, d: BlockDims, _: usize, s: &mut MatrixSampler) -> Result<Trial> {
    let x = s.rect(d.size(), d.size());
    let y = s.rect(d.size(), d.size());
    let lhs = determinant(&(&x * &y))?;
    let rhs = determinant(&x)? * determinant(&y)?;
    Ok(Trial::within(rel_strict(lhs, rhs), 1e-9))
}

fn exp_log_round_trip(_: &Ctx, d: BlockDims, _: usize, s: &mut MatrixSampler) -> Result<Trial> {
    let radius = s.uniform(0.05, 0.95);
    let x = mat_exp(&small(s, d.size(), radius))?;
    Ok(Trial::within(strict_rel_diff(&mat_exp(&principal_log(&x)?)?, &x), 1e-8))
}

fn commutator_traceless(_: &Ctx, d: BlockDims, _: usize, s: &mut MatrixSampler) -> Result<Trial> {
    let x = s.rect(d.size(), d.size());
    let y = s.rect(d.size(), d.size());
    Ok(Trial::within(trace(&commutator(&x, &y)?)?.norm(), 1e-10))
}

/// `M = S D S^{-1}` with `|Im d_i| < 0.9π`: the principal logarithm of `e^M`
/// must return `M` itself, so its spectrum is the spectrum of `D`.
fn log_principal_strip(_: &Ctx, d: BlockDims, _: usize, s: &mut MatrixSampler) -> Result<Trial> {
    let n = d.size();
    let eig: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(s.uniform(-1.0, 1.0), s.uniform(-0.9 * PI, 0.9 * PI)))
        .collect();
    let basis = &s.rect(n, n).scale_real(0.5) + &ComplexMatrix::identity(n);
    let m = &(&basis * &ComplexMatrix::diag(&eig)) * &inverse(&basis)?;
    let log = principal_log(&mat_exp(&m)?)?;
    Ok(Trial::within(log.rel_diff(&m), 1e-8))
}

// ---- kron ----

fn partial_traces_keep_trace(_: &Ctx, d: BlockDims, _: usize, s: &mut MatrixSampler) -> Result<Trial> {
    let x = s.rect(d.size(), d.size());
    let t = trace(&x)?;
    let d1 = rel(trace(&partial_trace_1(&x, d)?)?, t);
    let d2 = rel(trace(&partial_trace_2(&x, d)?)?, t);
    Ok(Trial::within(d1.max(d2), 1e-10))
}

fn partial_traces_linear(_: &Ctx, d: BlockDims, _: usize, s: &mut MatrixSampler) -> Result<Trial> {
    let x = s.rect(d.size(), d.size());
    let y = s.rect(d.size(), d.size());
    let (a, b) = (s.scalar(), s.scalar());
    let combo = &x.scale(a) + &y.scale(b);
    let mut worst = 0.0f64;
    for pt in [partial_trace_1, partial_trace_2] {
        let want = &pt(&x, d)?.scale(a) + &pt(&y, d)?.scale(b);
        worst = worst.max(pt(&combo, d)?.rel_diff(&want));
    }
    Ok(Trial::within(worst, 1e-10))
}

fn mixed_product(_: &Ctx, d: BlockDims, _: usize, s: &mut MatrixSampler) -> Result<Trial> {
    let (a, c) = (s.rect(d.m, d.m), s.rect(d.m, d.m));
    let (b, e) = (s.rect(d.n, d.n), s.rect(d.n, d.n));
    let lhs = &kron_product(&a, &b) * &kron_product(&c, &e);
    let rhs = kron_product(&(&a * &c), &(&b * &e));
    Ok(Trial::within(lhs.rel_diff(&rhs), 1e-10))
}

fn det_of_product(_: &Ctx, d: BlockDims, _: usize, s: &mut MatrixSampler) -> Result<Trial> {
    let a = s.rect(d.m, d.m);
    let b = s.rect(d.n, d.n);
    let lhs = determinant(&kron_product(&a, &b))?;
    let rhs = determinant(&a)?.powu(d.n as u32) * determinant(&b)?.powu(d.m as u32);
    Ok(Trial::within(rel_strict(lhs, rhs), 1e-8))
}

fn det_exp_kron_sum(_: &Ctx, d: BlockDims, _: usize, s: &mut MatrixSampler) -> Result<Trial> {
    let ks = kron_sum(&s.rect(d.m, d.m), &s.rect(d.n, d.n))?;
    let lhs = determinant(&mat_exp(&ks)?)?;
    Ok(Trial::within(rel_strict(lhs, trace(&ks)?.exp()), 1e-8))
}

fn shuffle_swaps_partial_traces(_: &Ctx, d: BlockDims, _: usize, s: &mut MatrixSampler) -> Result<Trial> {
    let x = s.rect(d.size(), d.size());
    let p = perfect_shuffle(d.m, d.n);
    let y = &(&p.transpose() * &x) * &p;
    let e1 = partial_trace_1(&x, d)?.rel_diff(&partial_trace_2(&y, d.swapped())?);
    let e2 = partial_trace_2(&x, d)?.rel_diff(&partial_trace_1(&y, d.swapped())?);
    Ok(Trial::within(e1.max(e2), 1e-10))
}

// ---- superop ----

fn random_map(s: &mut MatrixSampler, d: BlockDims) -> SuperOperator {
    random_superop(s, d.size(), 2)
}

fn prime_involution(_: &Ctx, d: BlockDims, _: usize, s: &mut MatrixSampler) -> Result<Trial> {
    let phi = random_map(s, d);
    let twice = phi.prime().prime();
    Ok(Trial::within(twice.matrix().max_abs_diff(phi.matrix()), 0.0))
}

fn prime_is_shuffled_transpose(_: &Ctx, d: BlockDims, _: usize, s: &mut MatrixSampler) -> Result<Trial> {
    let phi = random_map(s, d);
    let p = perfect_shuffle(d.size(), d.size());
    let want = &(&p * &phi.matrix().transpose()) * &p.transpose();
    Ok(Trial::within(phi.prime().matrix().max_abs_diff(&want), 1e-12))
}

fn decomposition(_: &Ctx, d: BlockDims, _: usize, s: &mut MatrixSampler) -> Result<Trial> {
    let phi = random_map(s, d);
    let mut worst = 0.0f64;
    for (a, b) in [
        (phi.rt_symmetric_part(), phi.rt_skew_part()),
        (phi.rt_hermitian_part(), phi.rt_skew_hermitian_part()),
    ] {
        let rebuilt = a.add(&b)?;
        let reconstruct = rebuilt.matrix().max_abs_diff(phi.matrix());
        let overlap = a.matrix().inner(b.matrix()).re.abs();
        if reconstruct > 1e-12 || overlap > 1e-10 {
            return Ok(Trial::verdict(false, reconstruct.max(overlap)));
        }
        worst = worst.max(reconstruct).max(overlap);
    }
    Ok(Trial::verdict(true, worst))
}

fn rt_tests_agree(ctx: &Ctx, d: BlockDims, k: usize, s: &mut MatrixSampler) -> Result<Trial> {
    let raw = random_map(s, d);
    let phi = match k % 4 {
        0 => raw,
        1 => raw.rt_symmetric_part(),
        2 => raw.rt_skew_part(),
        _ => {
            let nudge = SuperOperator::from_matrix(s.rect(raw.matrix().rows(), raw.matrix().cols()))?;
            raw.rt_symmetric_part().add(&nudge.scale(Complex64::new(1e-6, 0.0)))?
        }
    };
    let a = phi.is_rt_symmetric(ctx.tol);
    let b = phi.shuffle_characterization(ctx.tol);
    let c = phi.rearrangement_characterization(ctx.tol);
    let spread = [phi.shuffle_symmetry_defect(), phi.rearrangement_symmetry_defect()]
        .iter()
        .map(|x| (x - phi.rt_symmetry_defect()).abs())
        .fold(0.0, f64::max);
    Ok(Trial::verdict(a == b && b == c, spread))
}

fn prime_left_is_right(_: &Ctx, d: BlockDims, _: usize, s: &mut MatrixSampler) -> Result<Trial> {
    let p = s.rect(d.size(), d.size());
    let left = SuperOperator::left_mult(&p)?.prime();
    let right = SuperOperator::right_mult(&p)?;
    Ok(Trial::within(left.matrix().max_abs_diff(right.matrix()), 1e-12))
}

// ---- preserver ----

/// Preservers on even `k` (cycling `r = 1, 2, 3`), non-preservers otherwise.
fn left_mult_candidate(d: BlockDims, k: usize, s: &mut MatrixSampler) -> ComplexMatrix {
    let p = synth_left_mult_preserver(d, 1 + (k / 2) % 3, s.seed());
    match k % 4 {
        0 | 2 => p,
        1 => s.rect(d.size(), d.size()),
        _ => &p + &ComplexMatrix::identity(d.size()).scale_real(s.uniform(0.05, 1.0)),
    }
}

fn left_mult_agreement(ctx: &Ctx, d: BlockDims, k: usize, s: &mut MatrixSampler) -> Result<Trial> {
    let r = check_left_mult(&left_mult_candidate(d, k, s), d, ctx.tol)?;
    let expected = k.is_multiple_of(2);
    let t = verdict_agreement(r.holds_oracle, r.holds_condition, r.max_defect);
    Ok(Trial::verdict(t.ok && r.holds_oracle == expected, t.defect))
}

fn partial_trace_additivity(ctx: &Ctx, d: BlockDims, k: usize, s: &mut MatrixSampler) -> Result<Trial> {
    let p = synth_left_mult_preserver(d, k % 4, s.seed());
    let x = s.rect(d.size(), d.size());
    let t = &x - &matrix_with_partial_traces(&partial_trace_1(&x, d)?, &partial_trace_2(&x, d)?, d);
    let r = check_left_mult(&(&p + &t), d, ctx.tol)?;
    Ok(Trial::verdict(r.holds_oracle && r.holds_condition, r.max_defect))
}

fn traceless_corollary(ctx: &Ctx, d: BlockDims, k: usize, s: &mut MatrixSampler) -> Result<Trial> {
    let r = 1 + (k / 2) % 3;
    let (factors, expect) = if k.is_multiple_of(2) {
        (synth_left_mult_factors(d, r, s.seed()).factors, true)
    } else {
        (one_non_traceless_factor(s, d, r), false)
    };
    let v = corollary_traceless_iff(&factors, d, ctx.tol)?;
    Ok(Trial::verdict(
        v.factors_traceless == expect && v.preserves == expect,
        0.0,
    ))
}

fn lemma_terms(d: BlockDims, k: usize, s: &mut MatrixSampler) -> Vec<crate::superop::KroneckerTerm> {
    random_kronecker_terms(s, d, 1 + (k / 3) % 3, TermFamily::ALL[k % 3])
}

fn lemma_commutator_agreement(ctx: &Ctx, d: BlockDims, k: usize, s: &mut MatrixSampler) -> Result<Trial> {
    let r = lemma_check(&lemma_terms(d, k, s), d, ctx.tol, ctx.commutator())?;
    Ok(verdict_agreement(r.holds_oracle, r.holds_condition, r.max_defect))
}

fn lemma_anticommutator_agreement(ctx: &Ctx, d: BlockDims, k: usize, s: &mut MatrixSampler) -> Result<Trial> {
    let r = lemma_anticommutator_check(&lemma_terms(d, k, s), d, ctx.tol)?;
    Ok(verdict_agreement(r.holds_oracle, r.holds_condition, r.max_defect))
}

fn lemmas_agree(ctx: &Ctx, d: BlockDims, k: usize, s: &mut MatrixSampler) -> Result<Trial> {
    let terms = lemma_terms(d, k, s);
    let c = lemma_check(&terms, d, ctx.tol, ctx.commutator())?;
    let a = lemma_anticommutator_check(&terms, d, ctx.tol)?;
    Ok(Trial::verdict(
        c.holds_condition == a.holds_condition,
        (c.max_defect - a.max_defect).abs(),
    ))
}

fn phiprime_agreement(ctx: &Ctx, d: BlockDims, k: usize, s: &mut MatrixSampler) -> Result<Trial> {
    let phi = match k % 3 {
        0 => class_preserver(s, d, MapClass::General),
        1 => class_non_preserver(s, d, MapClass::General),
        _ => random_map(s, d),
    };
    let r = theorem_phiprime_check(&phi, d, ctx.tol)?;
    let t = verdict_agreement(r.holds_oracle, r.holds_condition, r.max_defect);
    Ok(Trial::verdict(t.ok && (!k.is_multiple_of(3) || r.holds_oracle), t.defect))
}

const RT_CLASSES: [MapClass; 4] = [
    MapClass::RtSymmetric,
    MapClass::RtHermitian,
    MapClass::RtSkew,
    MapClass::RtSkewHermitian,
];

/// A class member from [`RT_CLASSES`], built as a preserver on even `k / 4`.
fn rt_candidate(d: BlockDims, k: usize, s: &mut MatrixSampler) -> (MapClass, SuperOperator) {
    let class = RT_CLASSES[k % 4];
    let phi = if (k / 4).is_multiple_of(2) {
        class_preserver(s, d, class)
    } else {
        class_non_preserver(s, d, class)
    };
    (class, phi)
}

fn rt_corollary_agreement(ctx: &Ctx, d: BlockDims, k: usize, s: &mut MatrixSampler) -> Result<Trial> {
    let (class, phi) = rt_candidate(d, k, s);
    let r = corollary_rt_check(&phi, d, ctx.tol, class.is_skew())?;
    Ok(verdict_agreement(r.holds_oracle, r.holds_condition, r.max_defect))
}

/// Adding a map with traceless values, `M ↦ [K, χ(M)]`, changes no trace on
/// the basis and so must not change the oracle verdict.
fn oracle_sees_basis_traces(ctx: &Ctx, d: BlockDims, k: usize, s: &mut MatrixSampler) -> Result<Trial> {
    let phi = if k.is_multiple_of(2) {
        class_preserver(s, d, MapClass::General)
    } else {
        random_map(s, d)
    };
    let chi = random_map(s, d);
    let kk = s.rect(d.size(), d.size());
    let bracket = SuperOperator::left_mult(&kk)?.sub(&SuperOperator::right_mult(&kk)?)?;
    let other = SuperOperator::from_matrix(phi.matrix() + &(bracket.matrix() * chi.matrix()))?;
    let (t1, t2) = (trace_defect(&phi, d)?, trace_defect(&other, d)?);
    let same = (t1 <= ctx.tol) == (t2 <= ctx.tol);
    Ok(Trial::verdict(same, (t1 - t2).abs()))
}

fn left_mult_matches_phiprime(ctx: &Ctx, d: BlockDims, k: usize, s: &mut MatrixSampler) -> Result<Trial> {
    let p = left_mult_candidate(d, k, s);
    let a = check_left_mult(&p, d, ctx.tol)?;
    let b = theorem_phiprime_check(&SuperOperator::left_mult(&p)?, d, ctx.tol)?;
    Ok(Trial::verdict(
        a.holds_condition == b.holds_condition,
        (a.max_defect - b.max_defect).abs(),
    ))
}

// ---- detkron ----

fn coset_equivalence(_: &Ctx, d: BlockDims, k: usize, s: &mut MatrixSampler) -> Result<Trial> {
    let order = [d.m, d.n, d.size()][k % 3];
    let root = |j: usize| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / order as f64);
    let z1 = s.scalar() + Complex64::new(0.1, 0.0);
    let z2 = z1 * root(s.index(order)) * (1.0 + 1e-12 * s.uniform(-1.0, 1.0));
    let z3 = z2 * root(s.index(order));
    let z4 = s.scalar() + Complex64::new(0.1, 0.0);
    let cosets: Vec<RootCoset> = [z1, z2, z3, z4].iter().map(|&z| RootCoset::new(z, order)).collect();
    let eq = |a: usize, b: usize| cosets[a].equals(&cosets[b], COSET_TOL);
    let mut ok = (0..4).all(|a| eq(a, a));
    for a in 0..4 {
        for b in 0..4 {
            ok &= eq(a, b) == eq(b, a);
            for c in 0..4 {
                ok &= !(eq(a, b) && eq(b, c)) || eq(a, c);
            }
        }
    }
    // the related triple must actually be related
    ok &= eq(0, 1) && eq(1, 2);
    Ok(Trial::verdict(ok, cosets[0].defect(&cosets[2])))
}

fn small_pair(d: BlockDims, s: &mut MatrixSampler) -> (ComplexMatrix, ComplexMatrix) {
    let ra = s.uniform(0.05, 0.5);
    let rb = s.uniform(0.05, 0.5);
    (small(s, d.m, ra), small(s, d.n, rb))
}

fn norm_det_kron_exp(_: &Ctx, d: BlockDims, _: usize, s: &mut MatrixSampler) -> Result<Trial> {
    let (a, b) = small_pair(d, s);
    let got = norm_det(&kron_product(&mat_exp(&a)?, &mat_exp(&b)?))?;
    let want = RootCoset::new(norm_trace(&kron_sum(&a, &b)?)?.exp(), d.size());
    Ok(Trial::within(got.defect(&want), COSET_TOL))
}

/// `Det`, `Det_1`, `Det_2` of `e^A ⊗ e^B`, with the logarithm recovered from
/// the product itself, against closed forms in `A` and `B`.
fn coset_identities(_: &Ctx, d: BlockDims, _: usize, s: &mut MatrixSampler) -> Result<Trial> {
    let (a, b) = small_pair(d, s);
    let (ea, eb) = (mat_exp(&a)?, mat_exp(&b)?);
    let x = kron_product(&ea, &eb);
    let w = OmegaWitness::from_matrix(x.clone())?;
    let ks = kron_sum(&a, &b)?;
    let det = norm_det(&x)?.defect(&RootCoset::new(norm_trace(&ks)?.exp(), d.size()));
    let want_1 = eb.scale((trace(&a)? / d.m as f64).exp());
    let want_2 = ea.scale((trace(&b)? / d.n as f64).exp());
    let det_1 = partial_det(&w, d, Factor::First)?.defect(&CosetMatrix::new(want_1, d.m));
    let det_2 = partial_det(&w, d, Factor::Second)?.defect(&CosetMatrix::new(want_2, d.n));
    // and through the normalized partial traces of the known logarithm
    let via_1 = CosetMatrix::new(mat_exp(&norm_partial_trace(&ks, d, Factor::First)?)?, d.m);
    let via_2 = CosetMatrix::new(mat_exp(&norm_partial_trace(&ks, d, Factor::Second)?)?, d.n);
    let det_1b = partial_det(&w, d, Factor::First)?.defect(&via_1);
    let det_2b = partial_det(&w, d, Factor::Second)?.defect(&via_2);
    Ok(Trial::within(det.max(det_1).max(det_2).max(det_1b).max(det_2b), COSET_TOL))
}

fn partial_det_norm_det(_: &Ctx, d: BlockDims, _: usize, s: &mut MatrixSampler) -> Result<Trial> {
    let (a, b) = small_pair(d, s);
    let w = OmegaWitness::from_log(kron_sum(&a, &b)?)?;
    let full = norm_det(w.value())?;
    let mut worst = 0.0f64;
    for which in [Factor::First, Factor::Second] {
        let base = partial_det(&w, d, which)?.base;
        let lifted = RootCoset::new(norm_det(&base)?.rep, d.size());
        worst = worst.max(lifted.defect(&full));
    }
    Ok(Trial::within(worst, COSET_TOL))
}

fn uv_terms(d: BlockDims, k: usize, s: &mut MatrixSampler) -> Vec<crate::superop::KroneckerTerm> {
    lemma_terms(d, k, s)
}

fn uv_unimodular(_: &Ctx, d: BlockDims, k: usize, s: &mut MatrixSampler) -> Result<Trial> {
    let (u, v) = corollary_uv(&uv_terms(d, k, s), d)?;
    let one = Complex64::new(1.0, 0.0);
    let defect = (determinant(&u)? - one).norm().max((determinant(&v)? - one).norm());
    Ok(Trial::within(defect, 1e-8))
}

/// Shifting the logarithm of `ψ(e^I)` by `2πi j / m · I` multiplies the base
/// of `Det_1` by an `m`-th root of unity; likewise `n` for `Det_2`.
fn root_shift_invariance(_: &Ctx, d: BlockDims, k: usize, s: &mut MatrixSampler) -> Result<Trial> {
    let (_, phi) = rt_candidate(d, k, s);
    let psi = PsiMap::new(phi, d)?;
    let image = psi_apply(&psi, &OmegaWitness::from_log(ComplexMatrix::identity(d.size()))?)?;
    let mut worst = 0.0f64;
    for (which, order) in [(Factor::First, d.m), (Factor::Second, d.n)] {
        let j = 1 + s.index(order);
        let theta = Complex64::new(0.0, 2.0 * PI * j as f64 / order as f64);
        let shifted =
            OmegaWitness::from_log(image.log_part() + &ComplexMatrix::identity(d.size()).scale(theta))?;
        let before = partial_det(&image, d, which)?;
        let after = partial_det(&shifted, d, which)?;
        worst = worst.max(before.defect(&after));
    }
    Ok(Trial::within(worst, COSET_TOL))
}

fn det_rt_agreement(ctx: &Ctx, d: BlockDims, k: usize, s: &mut MatrixSampler) -> Result<Trial> {
    let (class, phi) = rt_candidate(d, k, s);
    let (condition, preserves) = theorem_det_rt(&PsiMap::new(phi, d)?, ctx.tol, class.is_skew())?;
    Ok(Trial::verdict(condition == preserves, 0.0))
}

fn det_probe_matches_oracle(ctx: &Ctx, d: BlockDims, k: usize, s: &mut MatrixSampler) -> Result<Trial> {
    let phi = if k.is_multiple_of(2) {
        class_preserver(s, d, MapClass::General)
    } else {
        class_non_preserver(s, d, MapClass::General)
    };
    let psi = PsiMap::new(phi, d)?;
    let probe = sampled_det_probe(&psi, 2, s.seed(), 0.02, 1e-7)?;
    let oracle = det_preserver_iff_trace(&psi, ctx.tol)?;
    Ok(Trial::verdict(
        probe.preserves == oracle,
        if oracle { probe.max_rel_defect } else { 0.0 },
    ))
}

fn corollary_uv_agreement(ctx: &Ctx, d: BlockDims, k: usize, s: &mut MatrixSampler) -> Result<Trial> {
    let (condition, preserves) = corollary_uv_check(&uv_terms(d, k, s), d, ctx.tol)?;
    Ok(Trial::verdict(condition == preserves, 0.0))
}
