//! Acceptance criteria, one verdict line each. Exits non-zero if any fails.

mod common;

use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use common::{cofactor_det, kron, ksum, tr};
use kronsum::detkron::{
    corollary_uv, norm_det, norm_partial_trace, partial_det, theorem_det_rt, CosetMatrix, Factor, OmegaWitness,
    PsiMap, RootCoset,
};
use kronsum::instances::{
    class_non_preserver, class_preserver, one_non_traceless_factor, random_kronecker_terms, random_superop,
    MapClass, TermFamily,
};
use kronsum::io::write_matrix;
use kronsum::kron::perfect_shuffle;
use kronsum::linalg::{determinant, mat_exp, principal_log};
use kronsum::preserver::{
    check_left_mult, corollary_traceless_iff, lemma_anticommutator_check, lemma_commutator_check,
    synth_left_mult_factors, theorem_phiprime_check,
};
use kronsum::suite::SuiteReport;
use kronsum::{BlockDims, ComplexMatrix, MatrixSampler, Seed};
use num_complex::Complex64;

const TOL: f64 = 1e-9;
const COSET: f64 = 1e-7;
const TRIALS: usize = 200;
const PAIRS: usize = 100;

fn shapes() -> Vec<BlockDims> {
    [(2, 2), (2, 3), (3, 2), (3, 3)]
        .iter()
        .map(|&(m, n)| BlockDims::new(m, n).unwrap())
        .collect()
}

fn sampler(criterion: u64, d: BlockDims) -> MatrixSampler {
    MatrixSampler::new(Seed(criterion * 1000 + 10 * d.m as u64 + d.n as u64))
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn small(s: &mut MatrixSampler, n: usize, radius: f64) -> ComplexMatrix {
    let x = s.rect(n, n);
    x.scale_real(radius / x.norm_1())
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm())
}

fn left_multiplication() -> Outcome {
    let start = Instant::now();
    let (mut disagree, mut total, mut worst, mut preservers) = (0, 0, 0.0f64, 0);
    for d in shapes() {
        let mut s = sampler(1, d);
        for k in 0..TRIALS {
            let p = match k % 4 {
                0 | 2 => kronsum::preserver::synth_left_mult_preserver(d, 1 + k % 3, s.seed()),
                1 => s.rect(d.size(), d.size()),
                _ => {
                    let p = kronsum::preserver::synth_left_mult_preserver(d, 2, s.seed());
                    &p + &s.rect(d.size(), d.size()).scale_real(s.uniform(1e-3, 1.0))
                }
            };
            let r = check_left_mult(&p, d, TOL).unwrap();
            total += 1;
            disagree += usize::from(!r.agrees());
            if r.holds_oracle {
                preservers += 1;
                worst = worst.max(r.max_defect);
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        disagree == 0 && preservers > 0 && elapsed < Duration::from_secs(10),
        format!(
            "{disagree}/{total} disagreements, {preservers} preservers, max preserver residual {worst:.1e}, {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn traceless_factors() -> Outcome {
    let (mut bad_pass, mut bad_fail, mut errors, mut total) = (0, 0, 0, 0);
    for d in shapes() {
        let mut s = sampler(2, d);
        for k in 0..TRIALS {
            let r = 1 + k % 3;
            total += 2;
            let good = synth_left_mult_factors(d, r, s.seed()).factors;
            match corollary_traceless_iff(&good, d, TOL) {
                Ok(v) => bad_pass += usize::from(!(v.preserves && v.factors_traceless)),
                Err(_) => errors += 1,
            }
            let bad = one_non_traceless_factor(&mut s, d, r);
            match corollary_traceless_iff(&bad, d, TOL) {
                Ok(v) => bad_fail += usize::from(v.preserves || v.factors_traceless),
                Err(_) => errors += 1,
            }
        }
    }
    outcome(
        bad_pass + bad_fail + errors == 0,
        format!("{total} instances: {bad_pass} synthesized failing, {bad_fail} non-traceless passing, {errors} errors"),
    )
}

fn lemmas() -> Outcome {
    let (mut comm, mut anti, mut cross, mut total, mut preservers) = (0, 0, 0, 0, 0);
    for d in shapes() {
        let mut s = sampler(3, d);
        for k in 0..TRIALS {
            let terms = random_kronecker_terms(&mut s, d, 1 + (k / 3) % 3, TermFamily::ALL[k % 3]);
            let c = lemma_commutator_check(&terms, d, TOL).unwrap();
            let a = lemma_anticommutator_check(&terms, d, TOL).unwrap();
            total += 1;
            preservers += usize::from(c.holds_oracle);
            comm += usize::from(!c.agrees());
            anti += usize::from(!a.agrees());
            cross += usize::from(c.holds_condition != a.holds_condition);
        }
    }
    outcome(
        comm + anti + cross == 0,
        format!(
            "{total} maps ({preservers} preservers): commutator {comm}, anticommutator {anti}, cross {cross} disagreements"
        ),
    )
}

fn phiprime() -> Outcome {
    let (mut disagree, mut wrong_built, mut total) = (0, 0, 0);
    for d in shapes() {
        let mut s = sampler(4, d);
        for k in 0..TRIALS {
            let (phi, expect) = match k {
                0..50 => (class_preserver(&mut s, d, MapClass::General), Some(true)),
                50..100 => (class_non_preserver(&mut s, d, MapClass::General), Some(false)),
                _ => (random_superop(&mut s, d.size(), 1 + k % 3), None),
            };
            let r = theorem_phiprime_check(&phi, d, TOL).unwrap();
            total += 1;
            disagree += usize::from(!r.agrees());
            if let Some(e) = expect {
                wrong_built += usize::from(r.holds_oracle != e || r.holds_condition != e);
            }
        }
    }
    outcome(
        disagree + wrong_built == 0,
        format!("{total} maps: {disagree} disagreements, {wrong_built} constructed maps with wrong verdicts"),
    )
}

fn rt_machinery() -> Outcome {
    let (mut involution, mut conj, mut tests, mut recon, mut overlap) = (0.0f64, 0.0f64, 0, 0.0f64, 0.0f64);
    let mut total = 0;
    for d in shapes() {
        let mut s = sampler(5, d);
        let p = perfect_shuffle(d.size(), d.size());
        for k in 0..TRIALS {
            let raw = random_superop(&mut s, d.size(), 2);
            let phi = match k % 3 {
                0 => raw,
                1 => raw.rt_symmetric_part(),
                _ => raw.rt_skew_part(),
            };
            total += 1;
            involution = involution.max(phi.prime().prime().matrix().max_abs_diff(phi.matrix()));
            let lhs = phi.matrix().transpose();
            let rhs = &(&p.transpose() * phi.prime().matrix()) * &p;
            conj = conj.max(lhs.max_abs_diff(&rhs));
            let a = phi.is_rt_symmetric(TOL);
            tests += usize::from(a != phi.shuffle_characterization(TOL) || a != phi.rearrangement_characterization(TOL));
            let (sym, skew) = (phi.rt_symmetric_part(), phi.rt_skew_part());
            recon = recon.max(sym.add(&skew).unwrap().matrix().max_abs_diff(phi.matrix()));
            overlap = overlap.max(sym.matrix().inner(skew.matrix()).re.abs());
        }
    }
    outcome(
        involution == 0.0 && conj <= 1e-12 && tests == 0 && recon <= 1e-12 && overlap <= 1e-10,
        format!(
            "{total} maps: involution {involution:.1e}, shuffle relation {conj:.1e}, {tests} test disagreements, reconstruction {recon:.1e}, overlap {overlap:.1e}"
        ),
    )
}

fn exponential_identities() -> Outcome {
    let (mut det_err, mut exp_err) = (0.0f64, 0.0f64);
    for d in shapes() {
        let mut s = sampler(6, d);
        for _ in 0..PAIRS {
            let (ra, rb) = (s.uniform(0.05, 1.0), s.uniform(0.05, 1.0));
            let a = small(&mut s, d.m, ra);
            let b = small(&mut s, d.n, rb);
            let (ea, eb) = (mat_exp(&a).unwrap(), mat_exp(&b).unwrap());
            let kp = kron(&ea, &eb);
            let ks = ksum(&a, &b);
            det_err = det_err.max(rel(determinant(&kp).unwrap(), tr(&ks).exp()));
            let e = mat_exp(&ks).unwrap();
            exp_err = exp_err.max(e.max_abs_diff(&kp) / kp.max_abs());
        }
    }
    outcome(
        det_err <= 1e-8 && exp_err <= 1e-8,
        format!("{} pairs: det relative {det_err:.1e}, exp relative {exp_err:.1e}", PAIRS * shapes().len()),
    )
}

fn coset_identities() -> Outcome {
    let (mut full, mut first, mut second, mut errors) = (0.0f64, 0.0f64, 0.0f64, 0);
    for d in shapes() {
        let mut s = sampler(7, d);
        for _ in 0..PAIRS {
            let a = small(&mut s, d.m, 0.5);
            let b = small(&mut s, d.n, 0.5);
            let x = kron(&mat_exp(&a).unwrap(), &mat_exp(&b).unwrap());
            let ks = ksum(&a, &b);
            let Ok(w) = OmegaWitness::from_matrix(x.clone()) else {
                errors += 1;
                continue;
            };
            let det = norm_det(&x).unwrap();
            full = full.max(det.defect(&RootCoset::new((tr(&ks) / d.size() as f64).exp(), d.size())));
            let want_1 = CosetMatrix::new(mat_exp(&norm_partial_trace(&ks, d, Factor::First).unwrap()).unwrap(), d.m);
            let want_2 =
                CosetMatrix::new(mat_exp(&norm_partial_trace(&ks, d, Factor::Second).unwrap()).unwrap(), d.n);
            first = first.max(partial_det(&w, d, Factor::First).unwrap().defect(&want_1));
            second = second.max(partial_det(&w, d, Factor::Second).unwrap().defect(&want_2));
        }
    }
    outcome(
        errors == 0 && full <= COSET && first <= COSET && second <= COSET,
        format!(
            "{} witnessed pairs: Det {full:.1e}, Det_1 {first:.1e}, Det_2 {second:.1e}, {errors} witness errors",
            PAIRS * shapes().len()
        ),
    )
}

fn det_theorems() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for (class, skew) in [
        (MapClass::RtSymmetric, false),
        (MapClass::RtHermitian, false),
        (MapClass::RtSkew, true),
        (MapClass::RtSkewHermitian, true),
    ] {
        let (mut mismatch, mut preserving, mut total) = (0, 0, 0);
        for d in shapes() {
            let mut s = sampler(8, d);
            for k in 0..PAIRS {
                let phi = if k.is_multiple_of(2) {
                    class_preserver(&mut s, d, class)
                } else {
                    class_non_preserver(&mut s, d, class)
                };
                let (cond, pres) = theorem_det_rt(&PsiMap::new(phi, d).unwrap(), TOL, skew).unwrap();
                total += 1;
                mismatch += usize::from(cond != pres);
                preserving += usize::from(pres);
            }
        }
        // skew classes contain no preservers at all, so their "preserver" half
        // can only be the skew part of a preserver
        let expected_preserving = if skew { 0 } else { total / 2 };
        pass &= mismatch == 0 && preserving == expected_preserving;
        lines.push(format!("{class:?} {mismatch}/{total} mismatches ({preserving} preserving)"));
    }
    let mut uv = 0.0f64;
    for d in shapes() {
        let mut s = sampler(80, d);
        for k in 0..PAIRS {
            let terms = random_kronecker_terms(&mut s, d, k % 4, TermFamily::ALL[k % 3]);
            let (u, v) = corollary_uv(&terms, d).unwrap();
            let one = Complex64::new(1.0, 0.0);
            uv = uv.max((determinant(&u).unwrap() - one).norm()).max((determinant(&v).unwrap() - one).norm());
        }
    }
    pass &= uv <= 1e-8;
    outcome(pass, format!("{}; max |det U − 1|, |det V − 1| = {uv:.1e}", lines.join(", ")))
}

fn substrate() -> Outcome {
    let (mut round, mut det) = (0.0f64, 0.0f64);
    for d in shapes() {
        let mut s = sampler(9, d);
        for _ in 0..PAIRS {
            let radius = s.uniform(0.01, 0.99);
            let x = mat_exp(&small(&mut s, d.size(), radius)).unwrap();
            let back = mat_exp(&principal_log(&x).unwrap()).unwrap();
            round = round.max(back.max_abs_diff(&x) / x.max_abs());
        }
    }
    let mut s = MatrixSampler::new(Seed(9));
    for n in 1..=4 {
        for _ in 0..PAIRS {
            let x = s.rect(n, n);
            let want = cofactor_det(&x);
            det = det.max((determinant(&x).unwrap() - want).norm() / want.norm().max(1.0));
        }
    }
    outcome(
        round <= 1e-8 && det <= 1e-10,
        format!("exp(log X) relative {round:.1e}, determinant vs cofactor {det:.1e}"),
    )
}

fn cli() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_kronsum");
    let run = |args: &[&str]| Command::new(bin).args(args).output().expect("binary runs");
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let mut failed = Vec::new();
    let mut check = |label: &str, ok: bool| {
        if !ok {
            failed.push(label.to_string());
        }
    };

    write_matrix(dir.path().join("id.json").as_path(), &ComplexMatrix::identity(6)).unwrap();
    write_matrix(dir.path().join("two.json").as_path(), &ComplexMatrix::identity(6).scale_real(2.0)).unwrap();
    fs::write(dir.path().join("bad.json"), "{\"rows\": 6}").unwrap();
    let verify = |file: &str| run(&["verify-left", &path(file), "--m", "2", "--n", "3"]).status.code();
    check("verify-left identity", verify("id.json") == Some(0));
    let two = run(&["verify-left", &path("two.json"), "--m", "2", "--n", "3"]);
    check(
        "verify-left 2I",
        two.status.code() == Some(1) && String::from_utf8_lossy(&two.stdout).contains("residual_tr1"),
    );
    check("verify-left malformed", verify("bad.json") == Some(2));

    let synth = |r: &str, seed: &str, out: &str| {
        run(&["synthesize", "--m", "2", "--n", "3", "--r", r, "--seed", seed, "--out", &path(out)]).status.code()
    };
    check("synthesize r=0", synth("0", "1", "zero.json") == Some(0));
    check(
        "synthesize r=0 is identity",
        kronsum::io::read_matrix(dir.path().join("zero.json").as_path()).ok() == Some(ComplexMatrix::identity(6)),
    );
    check("synthesize r=2", synth("2", "7", "a.json") == Some(0) && verify("a.json") == Some(0));
    check(
        "synthesize deterministic",
        synth("2", "7", "b.json") == Some(0)
            && fs::read(dir.path().join("a.json")).unwrap() == fs::read(dir.path().join("b.json")).unwrap(),
    );

    let start = Instant::now();
    let small_run = run(&["suite", "--seed", "42", "--trials", "50", "--dims", "2x2"]);
    check("suite 2x2 pass", small_run.status.code() == Some(0) && start.elapsed() < Duration::from_secs(60));
    let zero = run(&["suite", "--trials", "0", "--json"]);
    let zero_report: Option<SuiteReport> = serde_json::from_slice(&zero.stdout).ok();
    check(
        "suite zero trials",
        zero.status.code() == Some(0)
            && zero_report.is_some_and(|r| r.passed() && r.properties.iter().all(|p| p.trials == 0)),
    );
    let bug = run(&["suite", "--trials", "20", "--dims", "2x2", "--inject-bug", "negate-commutator"]);
    check(
        "suite injected bug",
        bug.status.code() == Some(1)
            && String::from_utf8_lossy(&bug.stdout).contains("FAIL preserver.lemma_commutator_agreement"),
    );
    check("suite bad dims", run(&["suite", "--dims", "2by2"]).status.code() == Some(2));

    let args = ["suite", "--seed", "3", "--trials", "10", "--json"];
    let (a, b) = (run(&args).stdout, run(&args).stdout);
    let parsed: Option<SuiteReport> = serde_json::from_slice(&a).ok();
    check("suite deterministic", a == b);
    check(
        "suite JSON round trip",
        parsed.is_some_and(|r| format!("{}\n", r.to_json()).into_bytes() == a),
    );

    let start = Instant::now();
    let full = run(&["suite"]);
    let full_time = start.elapsed();
    check("full suite", full.status.code() == Some(0) && full_time < Duration::from_secs(120));

    outcome(
        failed.is_empty(),
        if failed.is_empty() {
            format!("all verb contracts hold; full suite {:.1}s", full_time.as_secs_f64())
        } else {
            format!("failed: {}", failed.join(", "))
        },
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("left multiplication", left_multiplication),
        ("traceless factors", traceless_factors),
        ("commutator and anticommutator lemmas", lemmas),
        ("phi-prime condition", phiprime),
        ("RT machinery", rt_machinery),
        ("exponential identities", exponential_identities),
        ("coset identities", coset_identities),
        ("determinant theorems", det_theorems),
        ("numerical substrate", substrate),
        ("command line", cli),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        failures += usize::from(!o.pass);
        println!("{} [{:>2}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
