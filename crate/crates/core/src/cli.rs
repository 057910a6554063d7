//! `kronsum` command line: `verify-left`, `synthesize`, `suite`.
//!
//! Exit status 0 means pass, 1 a failed verdict or property, 2 bad input.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};

use crate::io::{read_matrix, write_matrix};
use crate::kron::BlockDims;
use crate::preserver::{check_left_mult, oracle_preserves_trace, synth_left_mult_preserver};
use crate::sample::Seed;
use crate::suite::{run_suite, Mutation, SuiteConfig};
use crate::superop::{SuperOperator, DEFAULT_TOL};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_INPUT: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "kronsum", version, about = "Trace and determinant preserver checks on Kronecker sums")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check whether M -> P M preserves tr(A ⊕ B), for P read from a matrix file.
    VerifyLeft {
        /// JSON matrix file holding P (mn x mn).
        file: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Write a random P = I + Σ A_j ⊗ B_j with traceless factors.
    Synthesize {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        /// Number of Kronecker terms.
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the seeded property suite.
    Suite {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Comma-separated block shapes such as 2x2,2x3.
        #[arg(long, default_value = "2x2,2x3,3x3", value_parser = parse_dims_list)]
        dims: DimsList,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
        #[arg(long, hide = true)]
        inject_bug: Option<InjectedBug>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum InjectedBug {
    NegateCommutator,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DimsList(pub Vec<BlockDims>);

impl FromStr for BlockDims {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (m, n) = s
            .trim()
            .split_once('x')
            .ok_or_else(|| format!("expected MxN, got {s:?}"))?;
        let parse = |t: &str| t.parse::<usize>().map_err(|_| format!("bad dimension in {s:?}"));
        BlockDims::new(parse(m)?, parse(n)?).map_err(|e| e.to_string())
    }
}

pub fn parse_dims_list(s: &str) -> Result<DimsList, String> {
    let dims = s.split(',').map(BlockDims::from_str).collect::<Result<Vec<_>, _>>()?;
    Ok(DimsList(dims))
}

fn finite_tol(tol: f64) -> Result<f64, String> {
    if tol.is_finite() && tol >= 0.0 {
        Ok(tol)
    } else {
        Err(format!("tolerance must be finite and non-negative, got {tol}"))
    }
}

fn input_error(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(EXIT_INPUT)
}

fn status(pass: bool) -> ExitCode {
    ExitCode::from(if pass { EXIT_PASS } else { EXIT_FAIL })
}

pub fn run(cli: Cli) -> ExitCode {
    match cli.command {
        Command::VerifyLeft { file, m, n, tol } => verify_left(&file, m, n, tol),
        Command::Synthesize { m, n, r, seed, out } => synthesize(m, n, r, seed, &out),
        Command::Suite {
            seed,
            trials,
            dims,
            tol,
            json,
            inject_bug,
        } => suite(seed, trials, dims, tol, json, inject_bug),
    }
}

fn verify_left(file: &std::path::Path, m: usize, n: usize, tol: f64) -> ExitCode {
    let (dims, tol) = match (BlockDims::new(m, n), finite_tol(tol)) {
        (Ok(d), Ok(t)) => (d, t),
        (Err(e), _) => return input_error(e),
        (_, Err(e)) => return input_error(e),
    };
    let p = match read_matrix(file) {
        Ok(p) => p,
        Err(e) => return input_error(e),
    };
    let report = match check_left_mult(&p, dims, tol) {
        Ok(r) => r,
        Err(e) => return input_error(e),
    };
    println!("dims: {dims}");
    println!("holds_condition: {}", report.holds_condition);
    println!("holds_oracle: {}", report.holds_oracle);
    println!("residual_tr1: {:.6e}", report.residual_1.max_abs());
    println!("residual_tr2: {:.6e}", report.residual_2.max_abs());
    println!("max_defect: {:.6e}", report.max_defect);
    if !report.agrees() {
        println!("warning: condition and oracle disagree");
    }
    status(report.holds_condition && report.holds_oracle)
}

fn synthesize(m: usize, n: usize, r: usize, seed: u64, out: &std::path::Path) -> ExitCode {
    let dims = match BlockDims::new(m, n) {
        Ok(d) => d,
        Err(e) => return input_error(e),
    };
    let p = synth_left_mult_preserver(dims, r, Seed(seed));
    let verified = SuperOperator::left_mult(&p).and_then(|phi| oracle_preserves_trace(&phi, dims, DEFAULT_TOL));
    match verified {
        Ok(true) => {}
        Ok(false) => {
            eprintln!("error: synthesized matrix failed the oracle");
            return ExitCode::from(EXIT_FAIL);
        }
        Err(e) => return input_error(e),
    }
    if let Err(e) = write_matrix(out, &p) {
        return input_error(e);
    }
    println!("wrote {}x{} preserver with r={r} to {}", p.rows(), p.cols(), out.display());
    status(true)
}

fn suite(seed: u64, trials: usize, dims: DimsList, tol: f64, json: bool, bug: Option<InjectedBug>) -> ExitCode {
    let tol = match finite_tol(tol) {
        Ok(t) => t,
        Err(e) => return input_error(e),
    };
    let config = SuiteConfig {
        seed,
        trials,
        dims: dims.0,
        tol,
        mutation: bug.map(|InjectedBug::NegateCommutator| Mutation::NegateCommutator),
    };
    let report = run_suite(&config);
    if json {
        println!("{}", report.to_json());
    } else {
        println!("{report}");
    }
    status(report.passed())
}
