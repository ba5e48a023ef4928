//! Command-line surface for the k-ary reduction toolkit.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on domain errors
//! (non-coprime inputs, invalid or non-square moduli).

pub mod output;

use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kary_core::analysis::{self, format_rational, DEFAULT_EXHAUSTIVE_LIMIT, DEFAULT_SEED};
use kary_core::gcd::{euclid_gcd, kary_gcd};
use kary_core::numerics::totient;
use kary_core::reduction::{jwa, pares, res, res_swapped};
use kary_core::{Algorithm, Error, Modulus, Natural, RaceMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::output::{Format, OutputRecord, Table, TraceRecord};

#[derive(Debug, Parser)]
#[command(
    name = "kary",
    version,
    about = "Accelerated k-ary GCD reductions and their exact analysis"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Find (n, d) with 0 < n, |d| < √k and n·y ≡ d·x (mod k).
    Reduce(ReduceArgs),
    /// Right-shift k-ary GCD with a Euclid cleanup.
    Gcd(GcdArgs),
    /// Classical Euclidean GCD.
    Euclid { u: Natural, v: Natural },
    /// Exhaustive analysis commands.
    #[command(subcommand)]
    Analyze(AnalyzeCommand),
    /// Compare iteration counts and timings of the reductions on random pairs.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Jwa,
    Res,
    ResSwapped,
    Pares,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum ModeArg {
    #[default]
    Lockstep,
    Concurrent,
}

impl From<ModeArg> for RaceMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Lockstep => RaceMode::Lockstep,
            ModeArg::Concurrent => RaceMode::Concurrent,
        }
    }
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[arg(long)]
    pub k: u64,
    #[arg(long)]
    pub x: u64,
    #[arg(long)]
    pub y: u64,
    #[arg(long, value_enum, default_value_t = AlgoArg::Pares)]
    pub algo: AlgoArg,
    #[arg(long, value_enum, default_value_t = ModeArg::Lockstep)]
    pub mode: ModeArg,
    /// Include the quotient sequence.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GcdAlgoArg {
    Jwa,
    Res,
    Pares,
}

#[derive(Debug, Args)]
pub struct GcdArgs {
    /// Power of four, at least 16.
    #[arg(long)]
    pub k: u64,
    pub u: Natural,
    pub v: Natural,
    #[arg(long, value_enum, default_value_t = GcdAlgoArg::Pares)]
    pub algo: GcdAlgoArg,
    #[arg(long, value_enum, default_value_t = ModeArg::Lockstep)]
    pub mode: ModeArg,
    /// Include the per-step reduction traces.
    #[arg(long)]
    pub report: bool,
}

#[derive(Debug, Subcommand)]
pub enum AnalyzeCommand {
    /// Lower bound p₁ on loop avoidance (square k).
    P1 {
        #[arg(long)]
        k: u64,
        /// Also measure the pairwise avoidance frequency of the racing algorithm.
        #[arg(long)]
        empirical: bool,
        /// Pair count above which the sweep samples instead of enumerating.
        #[arg(long, default_value_t = DEFAULT_EXHAUSTIVE_LIMIT)]
        limit: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Units 1 < x < √k whose inverse is not in ]√k, k − √k[.
    Lemma2 {
        #[arg(long)]
        k: u64,
    },
    /// U_k, λ(U_k), their intersection and union (square k).
    Union {
        #[arg(long)]
        k: u64,
    },
    /// Predicted worst-case JWA iteration count, optionally with a full scan.
    Worst {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        scan: bool,
    },
    /// Table of 1/x mod k over the units.
    TableInverse {
        #[arg(long)]
        k: u64,
    },
    /// Check the Fibonacci logarithm and square-bracket properties up to N.
    FibLemma {
        #[arg(long)]
        max: u64,
    },
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 1 << 16)]
    pub k: u64,
    #[arg(long, default_value_t = 100_000)]
    pub pairs: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

/// Parses `args` (including the program name), runs the command and writes
/// to stdout/stderr. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(record) => {
            print!("{}", record.render(cli.format));
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

pub fn execute(command: &Command) -> Result<OutputRecord, Error> {
    match command {
        Command::Reduce(args) => cmd_reduce(args),
        Command::Gcd(args) => cmd_gcd(args),
        Command::Euclid { u, v } => cmd_euclid(u, v),
        Command::Analyze(sub) => cmd_analyze(sub),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn algo_name(a: AlgoArg) -> &'static str {
    match a {
        AlgoArg::Jwa => "jwa",
        AlgoArg::Res => "res",
        AlgoArg::ResSwapped => "res-swapped",
        AlgoArg::Pares => "pares",
    }
}

fn mode_name(m: ModeArg) -> &'static str {
    match m {
        ModeArg::Lockstep => "lockstep",
        ModeArg::Concurrent => "concurrent",
    }
}

pub fn cmd_reduce(args: &ReduceArgs) -> Result<OutputRecord, Error> {
    let m = Modulus::new(args.k)?;
    let r = match args.algo {
        AlgoArg::Jwa => jwa(args.x, args.y, &m)?,
        AlgoArg::Res => res(args.x, args.y, &m)?,
        AlgoArg::ResSwapped => res_swapped(args.x, args.y, &m)?,
        AlgoArg::Pares => pares(args.x, args.y, &m, args.mode.into())?,
    };
    let mut rec = OutputRecord::new("reduce")
        .input("k", args.k)
        .input("x", args.x)
        .input("y", args.y)
        .input("algo", algo_name(args.algo));
    if args.algo == AlgoArg::Pares {
        rec = rec.input("mode", mode_name(args.mode));
    }
    rec.result("n", r.pair.n)
        .result("d", r.pair.d)
        .result("iterations", r.trace.iterations)
        .result("loop_avoided", r.trace.loop_avoided)
        .result("path", r.trace.path);
    if args.trace {
        rec.trace = Some(TraceRecord::from(&r.trace));
    }
    Ok(rec)
}

pub fn cmd_gcd(args: &GcdArgs) -> Result<OutputRecord, Error> {
    let m = Modulus::new(args.k)?;
    let algo = match args.algo {
        GcdAlgoArg::Jwa => Algorithm::Jwa,
        GcdAlgoArg::Res => Algorithm::Res,
        GcdAlgoArg::Pares => Algorithm::Pares(args.mode.into()),
    };
    let report = kary_gcd(&args.u, &args.v, &m, algo)?;
    let mut rec = OutputRecord::new("gcd")
        .input("k", args.k)
        .input("u", &args.u)
        .input("v", &args.v)
        .input("algo", algo.name());
    rec.result("gcd", &report.result);
    if args.report {
        rec.result("steps", report.steps)
            .result("two_exponent", report.two_exponent)
            .result("spurious_removed", &report.spurious_removed);
        let mut table = Table::new(["step", "iterations", "loop_avoided", "path", "quotients"]);
        for (i, t) in report.reduction_traces.iter().enumerate() {
            let quotients: Vec<String> = t.quotients.iter().map(u64::to_string).collect();
            table.push([
                (i + 1).to_string(),
                t.iterations.to_string(),
                t.loop_avoided.to_string(),
                t.path.to_string(),
                quotients.join(" "),
            ]);
        }
        rec.table = Some(table);
    }
    Ok(rec)
}

pub fn cmd_euclid(u: &Natural, v: &Natural) -> Result<OutputRecord, Error> {
    if *u == Natural::from(0u8) && *v == Natural::from(0u8) {
        return Err(Error::Precondition("gcd(0, 0) is undefined"));
    }
    let mut rec = OutputRecord::new("euclid").input("u", u).input("v", v);
    rec.result("gcd", euclid_gcd(u, v));
    Ok(rec)
}

fn join(values: &[u64]) -> String {
    values.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
}

pub fn cmd_analyze(sub: &AnalyzeCommand) -> Result<OutputRecord, Error> {
    match *sub {
        AnalyzeCommand::P1 {
            k,
            empirical,
            limit,
            seed,
        } => {
            let m = Modulus::new(k)?;
            let p = analysis::p1(&m)?;
            let mut rec = OutputRecord::new("analyze p1").input("k", k);
            rec.result("k", k)
                .result("phi_k", totient(k))
                .result("r", 4 * totient(m.isqrt()) - 2)
                .result("exact", format_rational(&p.exact));
            if let Some(e) = &p.enumerated {
                rec.result("enumerated", format_rational(e));
            }
            if let Some(c) = &p.closed_form {
                rec.result("closed_form", format_rational(c));
            }
            if empirical {
                rec = rec.input("limit", limit).input("seed", seed);
                let a = analysis::empirical_avoidance(&m, limit, seed)?;
                rec.result("empirical", format_rational(&a.frequency()))
                    .result("avoided", a.avoided)
                    .result("pairs", a.total)
                    .result("exhaustive", a.exhaustive)
                    .result("dominates_p1", a.frequency() >= p.exact);
            }
            Ok(rec)
        }
        AnalyzeCommand::Lemma2 { k } => {
            let m = Modulus::new(k)?;
            let violations = analysis::check_lemma2(&m);
            let mut rec = OutputRecord::new("analyze lemma2").input("k", k);
            rec.result("k", k)
                .result("square", m.is_perfect_square())
                .result("violations", violations.len());
            let mut table = Table::new(["x", "inverse"]);
            for (x, y) in violations {
                table.push([x, y]);
            }
            rec.table = Some(table);
            Ok(rec)
        }
        AnalyzeCommand::Union { k } => {
            let m = Modulus::new(k)?;
            let s = analysis::union_stats(&m)?;
            let mut rec = OutputRecord::new("analyze union").input("k", k);
            rec.result("k", k)
                .result("size_uk", s.u_k.len())
                .result("union_size", s.union_size())
                .result("predicted_union_size", 4 * totient(m.isqrt()) - 2)
                .result("intersection", join(&s.intersection))
                .result("union", join(&s.union));
            Ok(rec)
        }
        AnalyzeCommand::Worst { k, scan } => {
            let m = Modulus::new(k)?;
            let mut rec = OutputRecord::new("analyze worst").input("k", k);
            if scan {
                let w = analysis::worst_case_scan(&m)?;
                rec.result("k", k)
                    .result("max", w.max_iterations)
                    .result("predicted", w.predicted)
                    .result("witness", w.argmax_c)
                    .result("witness_count", w.witnesses);
            } else {
                rec.result("k", k)
                    .result("predicted", analysis::predicted_worst_case(k));
            }
            Ok(rec)
        }
        AnalyzeCommand::TableInverse { k } => {
            let m = Modulus::new(k)?;
            let mut rec = OutputRecord::new("analyze table-inverse").input("k", k);
            let rows = analysis::inverse_table(&m);
            rec.result("k", k).result("units", rows.len());
            let mut table = Table::new(["x", "inverse"]);
            for (x, y) in rows {
                table.push([x, y]);
            }
            rec.table = Some(table);
            Ok(rec)
        }
        AnalyzeCommand::FibLemma { max } => {
            let r = analysis::fibonacci_lemma(max);
            let mut rec = OutputRecord::new("analyze fib-lemma").input("max", max);
            rec.result("max", max)
                .result("holds", r.holds())
                .result("ceil_log_failures", join(&r.ceil_log_failures))
                .result("square_bracket_failures", join(&r.square_bracket_failures))
                .result("ceil_log_phi_f2", r.n1_value);
            Ok(rec)
        }
    }
}

pub fn cmd_bench(args: &BenchArgs) -> Result<OutputRecord, Error> {
    let m = Modulus::new(args.k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let k = args.k;
    let pairs: Vec<(u64, u64)> = (0..args.pairs)
        .map(|_| {
            let mut unit = || loop {
                let x = rng.gen_range(1..k);
                if kary_core::numerics::gcd_u64(x, k) == 1 {
                    break x;
                }
            };
            (unit(), unit())
        })
        .collect();

    let algos = [
        ("jwa", Algorithm::Jwa),
        ("res", Algorithm::Res),
        ("pares-lockstep", Algorithm::Pares(RaceMode::Lockstep)),
        ("pares-concurrent", Algorithm::Pares(RaceMode::Concurrent)),
    ];
    let mut rec = OutputRecord::new("bench")
        .input("k", k)
        .input("pairs", args.pairs)
        .input("seed", args.seed);
    let mut table = Table::new(["algo", "total_iterations", "loop_avoided", "elapsed_ns"]);
    for (name, algo) in algos {
        let start = Instant::now();
        let mut iterations = 0usize;
        let mut avoided = 0usize;
        for &(x, y) in &pairs {
            let r = algo.reduce(x, y, &m)?;
            iterations += r.trace.iterations;
            avoided += usize::from(r.trace.loop_avoided);
        }
        let elapsed = start.elapsed().as_nanos();
        table.push([
            name.to_string(),
            iterations.to_string(),
            avoided.to_string(),
            elapsed.to_string(),
        ]);
    }
    rec.result("k", k).result("pairs", args.pairs);
    rec.table = Some(table);
    Ok(rec)
}
