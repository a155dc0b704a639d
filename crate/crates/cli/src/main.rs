// Copyright 2026 The wcount Authors
// SPDX-License-Identifier: Apache-2.0

//! `wcount`: command-line front end for the weighted counting library.
//!
//! Exact values print as `a/b`. Decision commands exit 0 for true, 1 for
//! false; errors exit 2.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;

use wcount::arith::{decimal_display, parse_rational, scaled_nearest, Dyadic};
use wcount::closure::ClosureExpr;
use wcount::counting::{approx_sum, exact_sum};
use wcount::halting::{halting_oracle, ToyMachine};
use wcount::newman::newman_grid_error;
use wcount::pgm::{self, Formula, Pgm, Query};
use wcount::primes::{encode_natural, prime_gap_check, prime_reciprocal_oracle, primorial};
use wcount::quantum::{bqp_decide, pathsum_accept, statevector_accept, Circuit};
use wcount::reductions::{
    apply_reduction, embed_binary_in_pm1, embed_ternary_in_nat, int_to_binary, lift_int_to_ternary,
    lift_nat_to_binary, AffineReduction,
};
use wcount::stochastic::{best_solution, decide_cost, expected_cost, expected_cost_approx, TwoStageProblem};
use wcount::suite;
use wcount::{BitString, Error, IntPolynomial, RangeTag, Result, WeightedCountingProblem};

const USAGE: &str = "\
Command flags:
  pgm-z FILE
  pgm-cond FILE --target i=v[,i=v...] [--given i=v[,i=v...]] --threshold a/b
  majsat FORMULAFILE
  qc-accept FILE [--input BITS] [--pathsum | --statevector] [--decide]
  newman [--m M] [--grid G]
  reduce --kind KIND --weights w1,w2,... [--bits Q]
  closure-demo [--a a/b] [--b a/b] [--paths P]
  stoch-eval FILE --x BITS [--bits B]
  stoch-opt FILE
  stoch-decide FILE --x BITS --t a/b [--q Q]
  primes [--x N] [--gap-check XMAX]
  halting-demo [--machine FILE | --builtin NAME] [--input BITS] [--bits B]
  suite [--seed N] [--only K]

Exit status: 0 true or done, 1 false, 2 error.";

#[derive(Parser, Debug)]
#[command(name = "wcount", version, about = "Exact weighted counting, decisions and case studies", after_help = USAGE)]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Exact `a/b`.
    Rational,
    /// Nearest `m/2^e` at the configured precision, with the exact value.
    Dyadic,
    /// Decimal digits at the configured precision, with the exact value.
    Decimal,
}

#[derive(Args, Debug, Clone)]
struct Config {
    /// Largest path length enumerated, as log2 of the path count (at least 10).
    #[arg(long, global = true, env = "WCOUNT_CAP_LOG2", default_value_t = 24,
          value_parser = clap::value_parser!(u32).range(10..=40))]
    cap_log2: u32,
    /// Default precision in bits for approximate output (at least 1).
    #[arg(long, global = true, env = "WCOUNT_PRECISION", default_value_t = 20,
          value_parser = clap::value_parser!(u32).range(1..))]
    precision: u32,
    /// Worker threads for path enumeration; 0 uses every core.
    #[arg(long, global = true, env = "WCOUNT_WORKERS", default_value_t = 0)]
    workers: usize,
    /// How values are printed.
    #[arg(long, global = true, env = "WCOUNT_FORMAT", value_enum, default_value_t = Format::Rational)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Partition function of a WCPGM file.
    PgmZ { file: PathBuf },
    /// Decide Pr(target | given) > threshold for a WCPGM file.
    PgmCond {
        file: PathBuf,
        /// Target assignment, `i=v[,i=v...]` with 0-based variables.
        #[arg(long, value_parser = parse_assignment)]
        target: Assignment,
        /// Evidence assignment, `i=v[,i=v...]`; empty for none.
        #[arg(long, value_parser = parse_assignment, default_value = "")]
        given: Assignment,
        /// Threshold `a/b`.
        #[arg(long, value_parser = rational_arg)]
        threshold: BigRational,
    },
    /// Fraction of satisfying assignments of a formula file, via its PGM encoding.
    Majsat { file: PathBuf },
    /// Acceptance probability of a WCQC circuit.
    QcAccept {
        file: PathBuf,
        /// Input bits; qubit q starts in state input[q], missing qubits in 0.
        #[arg(long, default_value = "", value_parser = bits_arg)]
        input: BitString,
        /// Sum over path pairs (the default).
        #[arg(long, conflicts_with = "statevector")]
        pathsum: bool,
        /// Exact state-vector simulation.
        #[arg(long)]
        statevector: bool,
        /// Bounded-error decision: exit 0 iff acceptance is above 1/2.
        #[arg(long)]
        decide: bool,
    },
    /// Measured error of the Newman approximation of |x| against 3e^-sqrt(m).
    Newman {
        /// Degree parameter, a perfect square at least 4.
        #[arg(long, default_value_t = 16)]
        m: usize,
        /// Number of evenly spaced grid points on [-1, 1].
        #[arg(long, default_value_t = 1001)]
        grid: usize,
    },
    /// Run a range reduction on a weight table and recover the original sum.
    Reduce {
        #[arg(long, value_enum)]
        kind: ReduceKind,
        /// Comma-separated weights; the count must be a power of two.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = rational_arg)]
        weights: Vec<BigRational>,
        /// Bit bound q with |w| < 2^q, for the unfolding reductions.
        #[arg(long, default_value_t = 4)]
        bits: u64,
    },
    /// Evaluate every closure operation on two constant leaves.
    ClosureDemo {
        #[arg(long, default_value = "1/3", allow_hyphen_values = true, value_parser = rational_arg)]
        a: BigRational,
        #[arg(long, default_value = "2/5", allow_hyphen_values = true, value_parser = rational_arg)]
        b: BigRational,
        /// Path length of each leaf (its value is spread evenly over the paths).
        #[arg(long, default_value_t = 2)]
        paths: u64,
    },
    /// Expected cost of a first-stage decision for a WC2SSP file.
    StochEval {
        file: PathBuf,
        #[arg(long, value_parser = bits_arg)]
        x: BitString,
        /// Also print an approximation within 2^-B.
        #[arg(long)]
        bits: Option<u32>,
    },
    /// Best first-stage decision by enumeration.
    StochOpt { file: PathBuf },
    /// Decide expected cost <= t.
    StochDecide {
        file: PathBuf,
        #[arg(long, value_parser = bits_arg)]
        x: BitString,
        #[arg(long, allow_hyphen_values = true, value_parser = rational_arg)]
        t: BigRational,
        /// Bit bound on the exact cost; defaults to one derived from the items.
        #[arg(long)]
        q: Option<u64>,
    },
    /// Sum of prime reciprocals up to x; optionally the prime gap bound.
    Primes {
        #[arg(long, default_value_t = 10)]
        x: u64,
        /// Check pi(x) - pi(x/e) >= x / (3 ln x) on [17, X]; exit 0 iff it holds.
        #[arg(long)]
        gap_check: Option<u64>,
    },
    /// Approximate the halting weight 2^-t of a toy machine.
    HaltingDemo {
        /// Machine file; without it `--builtin` is used.
        #[arg(long, conflicts_with = "builtin")]
        machine: Option<PathBuf>,
        /// halt-after-N, looping, scan-to-blank or seek-one.
        #[arg(long, default_value = "scan-to-blank")]
        builtin: String,
        #[arg(long, default_value = "", value_parser = bits_arg)]
        input: BitString,
        /// Precision b; defaults to the configured precision.
        #[arg(long)]
        bits: Option<u32>,
    },
    /// Seeded property suite with a pass/fail table; exit 0 iff all pass.
    Suite {
        #[arg(long, default_value_t = 20_260_101)]
        seed: u64,
        /// Run one check (1-based) only.
        #[arg(long)]
        only: Option<usize>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ReduceKind {
    NatToBinary,
    IntToTernary,
    BinaryToPm1,
    TernaryToNat,
    IntToBinary,
}

type Assignment = Vec<(usize, usize)>;

fn parse_assignment(s: &str) -> std::result::Result<Assignment, String> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let (i, v) = p.split_once('=').ok_or_else(|| format!("expected i=v, found {p:?}"))?;
            let i = i.trim().parse().map_err(|_| format!("bad variable {i:?}"))?;
            let v = v.trim().parse().map_err(|_| format!("bad value {v:?}"))?;
            Ok((i, v))
        })
        .collect()
}

fn rational_arg(s: &str) -> std::result::Result<BigRational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn bits_arg(s: &str) -> std::result::Result<BitString, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Outcome {
    Done,
    Decision(bool),
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Precondition(format!("{}: {e}", path.display())))
}

fn show(r: &BigRational, cfg: &Config) -> String {
    match cfg.format {
        Format::Rational => r.to_string(),
        Format::Dyadic => {
            let d = Dyadic::new(scaled_nearest(r, cfg.precision), cfg.precision);
            if d.to_rational() == *r {
                d.to_string()
            } else {
                format!("{d} (exact {r})")
            }
        }
        Format::Decimal => {
            let digits = (cfg.precision as usize * 30103).div_ceil(100_000);
            format!("{} (exact {r})", decimal_display(r, digits))
        }
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    let cfg = &cli.config;
    match cli.command {
        Command::PgmZ { file } => {
            let model: Pgm = read(&file)?.parse()?;
            let z = exact_sum(&model.counting_problem().with_cap(cfg.cap_log2), &BitString::new())?;
            println!("{}", show(&z, cfg));
            Ok(Outcome::Done)
        }
        Command::PgmCond { file, target, given, threshold } => {
            let model: Pgm = read(&file)?.parse()?;
            let query = Query { target, evidence: given, threshold };
            let p = pgm::conditional_probability(&model, &query)?;
            let decision = pgm::conditional_decide(&model, &query)?;
            println!("probability {}", show(&p, cfg));
            println!("{decision}");
            Ok(Outcome::Decision(decision))
        }
        Command::Majsat { file } => {
            let formula: Formula = read(&file)?.trim().parse()?;
            let model = pgm::majsat_to_pgm(&formula)?;
            let z = exact_sum(&model.counting_problem().with_cap(cfg.cap_log2), &BitString::new())?;
            println!("{}", show(&z, cfg));
            Ok(Outcome::Done)
        }
        Command::QcAccept { file, input, pathsum: _, statevector, decide } => {
            let circuit: Circuit = read(&file)?.parse()?;
            if decide {
                let accept = bqp_decide(&circuit, &input)?;
                println!("{accept}");
                return Ok(Outcome::Decision(accept));
            }
            let p = if statevector {
                statevector_accept(&circuit, &input)?
            } else {
                pathsum_accept(&circuit, &input)?
            };
            println!("{p}");
            Ok(Outcome::Done)
        }
        Command::Newman { m, grid } => {
            let report = newman_grid_error(m, grid)?;
            let digits = 12;
            println!("m {} grid {}", report.m, report.grid);
            println!("max error {} at x = {}", decimal_display(&report.max_error, digits), report.argmax);
            let root = (1..).find(|k| k * k >= m).unwrap_or(0);
            println!(
                "bound 3e^-{root} in [{}, {}]",
                decimal_display(&report.bound_lo, digits),
                decimal_display(&report.bound_hi, digits)
            );
            println!("{}", report.holds());
            Ok(Outcome::Decision(report.holds()))
        }
        Command::Reduce { kind, weights, bits } => reduce(kind, weights, bits, cfg),
        Command::ClosureDemo { a, b, paths } => closure_demo(a, b, paths, cfg),
        Command::StochEval { file, x, bits } => {
            let problem: TwoStageProblem = read(&file)?.parse()?;
            println!("{}", show(&expected_cost(&problem, &x)?, cfg));
            if let Some(b) = bits {
                println!("{}", expected_cost_approx(&problem, &x, b)?);
            }
            Ok(Outcome::Done)
        }
        Command::StochOpt { file } => {
            let problem: TwoStageProblem = read(&file)?.parse()?;
            let (x, cost) = best_solution(&problem)?;
            println!("{x} {}", show(&cost, cfg));
            Ok(Outcome::Done)
        }
        Command::StochDecide { file, x, t, q } => {
            let problem: TwoStageProblem = read(&file)?.parse()?;
            let decision = decide_cost(&problem, &x, &t, q)?;
            println!("{decision}");
            Ok(Outcome::Decision(decision))
        }
        Command::Primes { x, gap_check } => {
            let f = exact_sum(&prime_reciprocal_oracle().with_cap(cfg.cap_log2), &encode_natural(x))?;
            println!("{}", show(&f, cfg));
            println!("denominator is the primorial: {}", *f.denom() == BigInt::from(primorial(x)));
            match gap_check {
                Some(max) => {
                    let holds = prime_gap_check(max)?;
                    println!("gap bound on [17, {max}]: {holds}");
                    Ok(Outcome::Decision(holds))
                }
                None => Ok(Outcome::Done),
            }
        }
        Command::HaltingDemo { machine, builtin, input, bits } => {
            let machine = match machine {
                Some(path) => ToyMachine::parse(&read(&path)?)?,
                None => builtin_machine(&builtin)?,
            };
            let b = bits.unwrap_or(cfg.precision);
            let problem = halting_oracle(&machine, &input);
            let approx = approx_sum(&problem, &BitString::new(), b)?;
            println!("{approx}");
            // the oracle simulates b + 1 steps at precision b
            match machine.run(&input, b as u64 + 1) {
                Some(t) => println!("halts after {t} steps"),
                None => println!("no halt within {} steps", b + 1),
            }
            Ok(Outcome::Done)
        }
        Command::Suite { seed, only } => {
            let names = suite::check_names();
            let indices: Vec<usize> = match only {
                Some(k) if (1..=names.len()).contains(&k) => vec![k - 1],
                Some(k) => return Err(Error::Precondition(format!("no check {k}; there are {}", names.len()))),
                None => (0..names.len()).collect(),
            };
            println!("suite (seed {seed})");
            let mut all = true;
            for i in indices {
                let report = suite::run_check(i, seed);
                println!("{:>2}  {report}", i + 1);
                all &= report.passed();
            }
            Ok(Outcome::Decision(all))
        }
    }
}

fn builtin_machine(name: &str) -> Result<ToyMachine> {
    if let Some(t) = name.strip_prefix("halt-after-") {
        let t = t.parse().map_err(|_| Error::Precondition(format!("bad step count in {name:?}")))?;
        return Ok(ToyMachine::halting_after(t));
    }
    match name {
        "looping" => Ok(ToyMachine::looping()),
        "scan-to-blank" => Ok(ToyMachine::scan_to_blank()),
        "seek-one" => Ok(ToyMachine::seek_one()),
        _ => Err(Error::Precondition(format!("unknown machine {name:?}"))),
    }
}

fn table(weights: Vec<BigRational>, tag: RangeTag, cap: u32) -> Result<WeightedCountingProblem> {
    let n = weights.len();
    if !n.is_power_of_two() {
        return Err(Error::Precondition(format!("{n} weights is not a power of two")));
    }
    let p = n.trailing_zeros() as u64;
    let problem = WeightedCountingProblem::from_fn(IntPolynomial::constant(p), tag, move |_, u| {
        weights[u.to_u64() as usize].clone()
    });
    Ok(problem.with_cap(cap))
}

fn reduce(kind: ReduceKind, weights: Vec<BigRational>, bits: u64, cfg: &Config) -> Result<Outcome> {
    let x = BitString::new();
    let q = IntPolynomial::constant(bits);
    let (tag, target) = match kind {
        ReduceKind::NatToBinary => (RangeTag::Nat, RangeTag::B01),
        ReduceKind::IntToTernary => (RangeTag::Int, RangeTag::T101),
        ReduceKind::BinaryToPm1 => (RangeTag::B01, RangeTag::PM1),
        ReduceKind::TernaryToNat => (RangeTag::T101, RangeTag::Nat),
        ReduceKind::IntToBinary => (RangeTag::Int, RangeTag::B01),
    };
    if let Some(w) = weights.iter().find(|w| !tag.contains(w)) {
        return Err(Error::Precondition(format!("weight {w} is outside {}", tag.name())));
    }
    let f = table(weights, tag, cfg.cap_log2)?;
    let (g, red) = match kind {
        ReduceKind::NatToBinary => (lift_nat_to_binary(&f, &q)?, AffineReduction::identity()),
        ReduceKind::IntToTernary => (lift_int_to_ternary(&f, &q)?, AffineReduction::identity()),
        ReduceKind::BinaryToPm1 => embed_binary_in_pm1(&f)?,
        ReduceKind::TernaryToNat => embed_ternary_in_nat(&f)?,
        ReduceKind::IntToBinary => int_to_binary(&f, &q)?,
    };
    let fv = exact_sum(&f, &x)?;
    let gv = exact_sum(&g, &x)?;
    let recovered = apply_reduction(&red, &gv, &x);
    println!("f = {} over 2^{} paths ({})", show(&fv, cfg), f.path_len(&x), tag.name());
    println!("g = {} over 2^{} paths ({})", show(&gv, cfg), g.path_len(&x), target.name());
    println!("scale {} offset {}", red.scale(&x), red.offset(&x));
    println!("recovered {}", show(&recovered, cfg));
    let ok = recovered == fv;
    println!("{ok}");
    Ok(Outcome::Decision(ok))
}

fn closure_demo(a: BigRational, b: BigRational, paths: u64, cfg: &Config) -> Result<Outcome> {
    let x = BitString::new();
    let leaf = |v: &BigRational| {
        let share = v / BigRational::from_integer((1u64 << paths).into());
        ClosureExpr::leaf(WeightedCountingProblem::constant(IntPolynomial::constant(paths), share).with_cap(cfg.cap_log2))
    };
    let (la, lb) = (leaf(&a), leaf(&b));
    let c1 = IntPolynomial::constant(1);
    let exprs = [
        ("a + b (constant)", ClosureExpr::AddConst(Box::new(la.clone()), b.clone())),
        ("a * b (constant)", ClosureExpr::Scale(Box::new(la.clone()), b.clone())),
        ("a + b", ClosureExpr::FiniteSum(vec![la.clone(), lb.clone()])),
        ("a * b", ClosureExpr::FiniteProduct(vec![la.clone(), lb.clone()])),
        ("sum over 2 bits of a", ClosureExpr::UniformExpSum(Box::new(la.clone()), IntPolynomial::constant(2))),
        ("product of 3 copies of a", ClosureExpr::UniformPolyProduct(Box::new(la.clone()), IntPolynomial::constant(3))),
        (
            "a * (1 + b)",
            ClosureExpr::MultivariatePoly { c: Box::new(la), f: Box::new(lb), q: c1.clone(), r: c1 },
        ),
    ];
    let mut ok = true;
    for (label, expr) in exprs {
        let problem = expr.build()?;
        let built = exact_sum(&problem, &x)?;
        let direct = expr.evaluate(&x)?;
        let approx = approx_sum(&problem, &x, cfg.precision)?;
        let agree = built == direct;
        ok &= agree;
        println!(
            "{:<20} {:<26} = {}  paths 2^{}  approx {approx}  {}",
            expr.kind(),
            label,
            show(&built, cfg),
            problem.path_len(&x),
            if agree { "ok" } else { "MISMATCH" }
        );
    }
    Ok(Outcome::Decision(ok))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.config.workers > 0 {
        // a second initialization only happens in tests; ignoring it is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.config.workers).build_global();
    }
    match run(cli) {
        Ok(Outcome::Done) | Ok(Outcome::Decision(true)) => ExitCode::SUCCESS,
        Ok(Outcome::Decision(false)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assignments() {
        assert_eq!(parse_assignment("0=1, 2=0").unwrap(), vec![(0, 1), (2, 0)]);
        assert_eq!(parse_assignment("").unwrap(), vec![]);
        assert!(parse_assignment("0:1").is_err());
    }

    #[test]
    fn formats() {
        let cfg = |format| Config { cap_log2: 24, precision: 8, workers: 0, format };
        let third = BigRational::new(1.into(), 3.into());
        assert_eq!(show(&third, &cfg(Format::Rational)), "1/3");
        assert_eq!(show(&third, &cfg(Format::Dyadic)), "85/2^8 (exact 1/3)");
        assert_eq!(show(&third, &cfg(Format::Decimal)), "0.333 (exact 1/3)");
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(show(&half, &cfg(Format::Dyadic)), "1/2^1");
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
