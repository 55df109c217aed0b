//! `psdeq`: solve, construct, and certify instances of Σ A^{n−j} X A^{j−1} = B.
//!
//! Exit codes: 0 ok, 1 a check or suite failed, 2 bad input, 3 a mathematical
//! precondition failed (A not positive definite, B not positive semidefinite, ...).

mod failure;
mod matrix_io;
mod ranges;
mod report;
mod reproduce;
mod solve;
mod suites;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use psdeq_core::inequalities::{DimRange, Interval, Probe, SuiteKind};
use psdeq_core::tolerance::default_tol_scale;
use psdeq_core::{ConstructionParams, FurutaSide};

use failure::{Failure, EXIT_CHECK_FAILED, EXIT_OK};
use ranges::{parse_dims, parse_interval};
use report::{RunReport, Status};
use suites::{FuzzBox, FuzzTarget};

/// Settings shared by all commands.
pub struct Ctx {
    pub seed: u64,
    pub tol_scale: f64,
}

#[derive(Parser)]
#[command(
    name = "psdeq",
    version,
    about = "Solve and certify the matrix equation Σ_{j=1}^n A^{n-j} X A^{j-1} = B"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// Relative tolerance scale for PSD decisions [default: 1e-10, or $PSDEQ_TOL_SCALE]
    #[arg(long, global = true, value_name = "SCALE")]
    tol_scale: Option<f64>,
    /// Seed for randomized commands
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print the report as one JSON document
    #[arg(long, global = true)]
    json: bool,
    /// Print nothing but errors
    #[arg(long, global = true)]
    quiet: bool,
    /// Also write the JSON report to this file
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Copy)]
struct ParamArgs {
    #[arg(long)]
    m: u32,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    k: u32,
    #[arg(long, allow_negative_numbers = true)]
    t: f64,
    #[arg(long, allow_negative_numbers = true)]
    r: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the equation for X given A (positive definite) and B
    Solve {
        /// Matrix file for A
        a: PathBuf,
        /// Matrix file for B
        b: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        /// Cross-check against the stacked (Kronecker) linear system
        #[arg(long)]
        oracle: bool,
    },
    /// Build the PSD-guaranteed right-hand side from A, B and (m, n, k, t, r)
    BuildRhs {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        /// Emit the pre-substitution pair (G, rhs) with G = A^{((m-t)k+r)/n}
        #[arg(long)]
        raw: bool,
        /// Also solve for X and report its PSD verdict
        #[arg(long)]
        solve: bool,
        /// Proceed when B is not positive semidefinite
        #[arg(long)]
        allow_indefinite_b: bool,
    },
    /// Re-run a built-in worked example and check its reference values
    Reproduce {
        case: Case,
        /// Diagonal of A for example21, comma separated
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        eigs: Option<Vec<f64>>,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long, allow_negative_numbers = true)]
        t: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        r: Option<f64>,
    },
    /// Run a randomized in-region suite; fails on any violation
    Verify {
        suite: Suite,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        /// Dimension range, e.g. 2..6 (inclusive)
        #[arg(long, default_value = "2..6", value_parser = parse_dims)]
        dims: DimRange,
        /// Fix the power m for the lemma suite
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        m: Option<u32>,
    },
    /// Search outside the validity regions for violations
    Fuzz {
        #[arg(required_unless_present = "replay")]
        target: Option<Target>,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        /// Re-evaluate the witness stored in a report or witness JSON file
        #[arg(long, value_name = "FILE", conflicts_with = "target")]
        replay: Option<PathBuf>,
        /// Use a fixed known instance instead of random sampling
        #[arg(long)]
        probe: Option<ProbeArg>,
        #[arg(long, value_parser = parse_dims)]
        dims: Option<DimRange>,
        #[arg(long)]
        side: Option<Side>,
        #[arg(long, value_parser = parse_interval, allow_negative_numbers = true)]
        alpha: Option<Interval>,
        #[arg(long, value_parser = parse_interval, allow_negative_numbers = true)]
        p: Option<Interval>,
        #[arg(long, value_parser = parse_interval, allow_negative_numbers = true)]
        q: Option<Interval>,
        #[arg(long, value_parser = parse_interval, allow_negative_numbers = true)]
        r: Option<Interval>,
        #[arg(long, value_parser = parse_interval, allow_negative_numbers = true)]
        s: Option<Interval>,
        #[arg(long, value_parser = parse_interval, allow_negative_numbers = true)]
        t: Option<Interval>,
        /// r as a fraction of the required bound
        #[arg(long, value_parser = parse_interval, allow_negative_numbers = true)]
        r_fraction: Option<Interval>,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        max_m: Option<u32>,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        max_n: Option<u32>,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        max_k: Option<u32>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Case {
    Remark22,
    Remark23,
    Example21,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Lh,
    Furuta,
    GrandFuruta,
    Lemma,
    Proofstep,
    Theorem21,
}

impl From<Suite> for SuiteKind {
    fn from(s: Suite) -> Self {
        match s {
            Suite::Lh => SuiteKind::LoewnerHeinz,
            Suite::Furuta => SuiteKind::Furuta,
            Suite::GrandFuruta => SuiteKind::GrandFuruta,
            Suite::Lemma => SuiteKind::Lemma,
            Suite::Proofstep => SuiteKind::ProofStep,
            Suite::Theorem21 => SuiteKind::Theorem21,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    LhAlpha2,
    Lh,
    Furuta,
    GrandFuruta,
    #[value(name = "theorem21-r")]
    Theorem21R,
}

impl From<Target> for FuzzTarget {
    fn from(t: Target) -> Self {
        match t {
            Target::LhAlpha2 => FuzzTarget::LhAlpha2,
            Target::Lh => FuzzTarget::Lh,
            Target::Furuta => FuzzTarget::Furuta,
            Target::GrandFuruta => FuzzTarget::GrandFuruta,
            Target::Theorem21R => FuzzTarget::Theorem21R,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ProbeArg {
    Remark22,
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    A,
    B,
}

impl ParamArgs {
    fn params(self) -> Result<ConstructionParams, Failure> {
        Ok(ConstructionParams::new(self.m, self.n, self.k, self.t, self.r)?)
    }
}

fn run(command: &Command, ctx: &Ctx, report: &mut RunReport) -> Result<(), Failure> {
    match command {
        Command::Solve { a, b, n, oracle } => solve::cmd_solve(ctx, report, a, b, *n, *oracle),
        Command::BuildRhs {
            a,
            b,
            params,
            raw,
            solve,
            allow_indefinite_b,
        } => {
            let opts = solve::BuildOptions {
                raw: *raw,
                solve: *solve,
                allow_indefinite_b: *allow_indefinite_b,
            };
            solve::cmd_build_rhs(ctx, report, a, b, params.params()?, &opts)
        }
        Command::Reproduce {
            case,
            eigs,
            m,
            n,
            k,
            t,
            r,
        } => {
            let extra = eigs.is_some() || m.is_some() || n.is_some() || k.is_some() || t.is_some() || r.is_some();
            match case {
                Case::Remark22 | Case::Remark23 if extra => {
                    Err(Failure::input("--eigs and parameter flags only apply to example21"))
                }
                Case::Remark22 => reproduce::remark22(ctx, report),
                Case::Remark23 => reproduce::remark23(ctx, report),
                Case::Example21 => {
                    let eigs = eigs.clone().unwrap_or_else(|| vec![1.0, 2.0]);
                    let p = ConstructionParams::new(
                        m.unwrap_or(2),
                        n.unwrap_or(2),
                        k.unwrap_or(2),
                        t.unwrap_or(0.5),
                        r.unwrap_or(0.5),
                    )?;
                    reproduce::example21(ctx, report, &eigs, p)
                }
            }
        }
        Command::Verify { suite, trials, dims, m } => {
            suites::cmd_verify(ctx, report, (*suite).into(), *trials, *dims, *m)
        }
        Command::Fuzz {
            target,
            trials,
            replay,
            probe,
            dims,
            side,
            alpha,
            p,
            q,
            r,
            s,
            t,
            r_fraction,
            max_m,
            max_n,
            max_k,
        } => {
            if let Some(path) = replay {
                return suites::cmd_replay(ctx, report, path);
            }
            let target = target.expect("clap requires a target without --replay");
            let bx = FuzzBox {
                dims: *dims,
                probe: probe.map(|ProbeArg::Remark22| Probe::Remark22),
                side: side.map(|s| match s {
                    Side::A => FurutaSide::ASide,
                    Side::B => FurutaSide::BSide,
                }),
                alpha: *alpha,
                p: *p,
                q: *q,
                r: *r,
                s: *s,
                t: *t,
                r_fraction: *r_fraction,
                max_m: *max_m,
                max_n: *max_n,
                max_k: *max_k,
            };
            suites::cmd_fuzz(ctx, report, target.into(), *trials, &bx)
        }
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    let g = &cli.global;
    let tol_scale = g.tol_scale.unwrap_or_else(default_tol_scale);
    let ctx = Ctx {
        seed: g.seed,
        tol_scale,
    };
    let mut report = RunReport::new(argv, g.seed, tol_scale);

    let result = if tol_scale.is_finite() && tol_scale > 0.0 {
        run(&cli.command, &ctx, &mut report)
    } else {
        Err(Failure::input(format!(
            "--tol-scale must be positive and finite, got {tol_scale}"
        )))
    };
    match result {
        Ok(()) if report.failed_checks() > 0 => {
            report.status = Status::Failed;
            report.exit_code = EXIT_CHECK_FAILED;
        }
        Ok(()) => {
            report.status = Status::Ok;
            report.exit_code = EXIT_OK;
        }
        Err(f) => {
            report.status = Status::Error;
            report.exit_code = f.code;
            report.error = Some(f.message);
        }
    }
    report.timing_ms = start.elapsed().as_secs_f64() * 1e3;

    if let Some(path) = &g.out {
        if let Err(e) = fs::write(path, report.to_json() + "\n") {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(failure::EXIT_INPUT);
        }
    }
    if !g.quiet {
        for w in &report.warnings {
            eprintln!("warning: {w}");
        }
        let text = if g.json {
            report.to_json() + "\n"
        } else {
            report.to_human()
        };
        // a closed pipe is not worth a panic
        let _ = io::stdout().lock().write_all(text.as_bytes());
    }
    if let Some(e) = &report.error {
        eprintln!("error: {e}");
    }
    ExitCode::from(report.exit_code)
}
