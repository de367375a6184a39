//! `octosep`: separability-probability simulations, sweeps, calibration and
//! exact formula evaluation, with JSON/CSV output.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use octosep::calibration::{fit_a_of_k, parse_grid, shifted_variant_scan, sweep, SweepResult};
use octosep::formulas::{p1, p2, p_k4, parse_rational, q_k4, ExactProb};
use octosep::matrix::{MatrixError, MinorRule};
use octosep::montecarlo::{eigen_pdf_check, estimate_separability, forrester_3x3_mode, partition};
use octosep::sampling::{GammaVariant, SimulationConfig};
use octosep::Error;

const SCHEMA: &str = "octosep-1";

#[derive(Parser, Debug)]
#[command(name = "octosep", version, about = "Octonionic two-qubit separability probabilities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monte Carlo separability estimate at one value of a
    Simulate(SimulateArgs),
    /// Exact or high-precision closed-form probabilities
    Formulas(FormulaArgs),
    /// Separability estimates over a grid of a, with interpolation to a = 0
    Sweep(SweepArgs),
    /// Sweep, then solve sep_prob(a) = P(k, 4) for each k
    Calibrate(CalibrateArgs),
    /// Eigenvalue density check for 2x2 Gaussian octonionic Wisharts
    Eigcheck(EigArgs),
    /// Fraction of 3x3 octonionic Wisharts with negative determinant
    Forrester3(Forrester3Args),
}

#[derive(Args, Debug, Clone, Serialize)]
struct SimFlags {
    /// Number of samples (per grid point for sweeps)
    #[arg(long)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Diagonal Gamma shapes a + 4i (plain) or a + 1 + 4i (shifted)
    #[arg(long, value_enum)]
    gamma_variant: VariantArg,
    #[arg(long, env = "OCTOSEP_WORKERS", default_value_t = 1)]
    workers: usize,
    /// Rule for the 2x2 octonionic minors in the 4x4 determinant
    #[arg(long, value_enum, default_value_t = RuleArg::RealPart)]
    minor_rule: RuleArg,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Gamma shape parameter, decimal or p/q
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    #[arg(long, default_value_t = 4)]
    dim: usize,
    #[command(flatten)]
    sim: SimFlags,
    /// Output JSON path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum VariantArg {
    Plain,
    Shifted,
}

impl From<VariantArg> for GammaVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Plain => GammaVariant::Plain,
            VariantArg::Shifted => GammaVariant::Shifted,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum RuleArg {
    RealPart,
    Symmetrized,
}

impl From<RuleArg> for MinorRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::RealPart => MinorRule::RealPart,
            RuleArg::Symmetrized => MinorRule::Symmetrized,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
enum Which {
    P1,
    P2,
    Pk4,
    Qk4,
}

#[derive(Args, Debug)]
struct FormulaArgs {
    #[arg(long, value_enum, ignore_case = true)]
    which: Which,
    /// Dyson-index parameter α, decimal or p/q (P1, P2)
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, default_value_t = 0)]
    k: u32,
    /// Decimal digits
    #[arg(long, default_value_t = 30)]
    precision: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// "start:stop:step", fields decimal or p/q
    #[arg(long, allow_hyphen_values = true)]
    a_grid: String,
    #[command(flatten)]
    sim: SimFlags,
    /// CSV output path (a, sep_prob, stderr)
    #[arg(long)]
    csv: Option<PathBuf>,
    /// JSON output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CalibrateArgs {
    /// Comma-separated k values
    #[arg(long, value_delimiter = ',')]
    k_list: Vec<u32>,
    #[command(flatten)]
    sweep: SweepArgs,
}

#[derive(Args, Debug)]
struct EigArgs {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 40)]
    bins: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Forrester3Args {
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    #[command(flatten)]
    sim: SimFlags,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure with an exit code; `detail` goes to stderr as JSON.
struct Failure {
    code: u8,
    detail: Value,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        match e {
            Error::Sample {
                seed,
                stream,
                source: MatrixError::ImaginaryResidualExceeded { residual, value },
            } => Failure {
                code: 3,
                detail: json!({
                    "error": "imaginary-residual-exceeded",
                    "message": message,
                    "seed": seed,
                    "stream": stream,
                    "residual": residual,
                    "value": value,
                }),
            },
            Error::NoBracket { .. } => Failure {
                code: 4,
                detail: json!({ "error": "no-bracket", "message": message }),
            },
            Error::NonConvergence(_) | Error::Sample { .. } | Error::Matrix(_) => Failure {
                code: 1,
                detail: json!({ "error": "runtime", "message": message }),
            },
            Error::InvalidShape { .. } | Error::InvalidConfig(_) | Error::Domain(_) => Failure {
                code: 2,
                detail: json!({ "error": "invalid-input", "message": message }),
            },
        }
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        detail: json!({ "error": "invalid-input", "message": msg.into() }),
    }
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure {
        code: 1,
        detail: json!({ "error": "io", "message": e.to_string() }),
    }
}

fn parse_real(s: &str, name: &str) -> Result<f64, Failure> {
    parse_rational(s)
        .map(|r| r.to_f64())
        .map_err(|_| invalid(format!("--{name}: cannot parse '{s}'")))
}

fn config(a: f64, sim: &SimFlags, dim: usize) -> SimulationConfig {
    SimulationConfig {
        a,
        gamma_variant: sim.gamma_variant.into(),
        dim,
        samples: sim.samples,
        seed: sim.seed,
        workers: sim.workers,
        minor_rule: sim.minor_rule.into(),
    }
}

fn document(subcommand: &str, config: Value, per_worker: Vec<u64>, started: Instant, result: Value) -> Value {
    json!({
        "schema": SCHEMA,
        "manifest": {
            "subcommand": subcommand,
            "config": config,
            "version": env!("CARGO_PKG_VERSION"),
            "runtime_seconds": started.elapsed().as_secs_f64(),
            "per_worker_samples": per_worker,
        },
        "result": result,
    })
}

fn emit(doc: &Value, out: Option<&PathBuf>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(doc).expect("serializable");
    match out {
        Some(p) => fs::write(p, text + "\n").map_err(io_failure),
        None => {
            let mut so = std::io::stdout().lock();
            writeln!(so, "{text}").map_err(io_failure)
        }
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), Failure> {
    let started = Instant::now();
    let a = parse_real(&args.a, "a")?;
    let cfg = config(a, &args.sim, args.dim);
    cfg.validate()?;
    let flags = json!({ "a": args.a, "dim": args.dim, "flags": to_value(&args.sim) });
    match args.dim {
        4 => {
            let r = estimate_separability(&cfg)?;
            let doc = document("simulate", flags, r.per_worker_samples.clone(), started, to_value(&r));
            emit(&doc, args.out.as_ref())
        }
        3 => {
            let frac = forrester_3x3_mode(a, cfg.gamma_variant, cfg.samples, cfg.seed, cfg.workers)?;
            let per_worker = partition(cfg.samples, cfg.workers).iter().map(|(l, h)| h - l).collect();
            let doc = document(
                "simulate",
                flags,
                per_worker,
                started,
                json!({ "dim": 3, "fraction_negative": frac, "config": to_value(&cfg) }),
            );
            emit(&doc, args.out.as_ref())
        }
        d => Err(invalid(format!(
            "--dim {d}: the separability estimate needs dim 4 (dim 3 gives the 3x3 negative-determinant fraction)"
        ))),
    }
}

fn exact_json(v: &ExactProb, which: Which, alpha: Option<&str>, k: u32, precision: u32) -> Value {
    json!({
        "which": which,
        "alpha": alpha,
        "k": k,
        "precision": precision,
        "value_exact": v.exact.as_ref().map(|r| r.to_string()),
        "value_decimal": v.decimal(precision as usize),
        "form": v.form,
        "error_bound": format!("{:e}", v.error_bound.to_f64()),
        "value_recognized": v.recognize().map(|r| r.to_string()),
        "terms": v.terms,
    })
}

fn cmd_formulas(args: FormulaArgs) -> Result<(), Failure> {
    let started = Instant::now();
    let alpha = match (args.which, &args.alpha) {
        (Which::P1 | Which::P2, None) => return Err(invalid("--alpha is required for P1 and P2")),
        (_, Some(s)) => Some(parse_rational(s)?),
        _ => None,
    };
    let v = match args.which {
        Which::P1 => p1(alpha.as_ref().expect("checked"), args.precision)?,
        Which::P2 => p2(alpha.as_ref().expect("checked"), args.k, args.precision)?,
        Which::Pk4 => p_k4(args.k),
        Which::Qk4 => q_k4(args.k),
    };
    let flags = json!({ "which": args.which, "alpha": args.alpha, "k": args.k, "precision": args.precision });
    let result = exact_json(&v, args.which, args.alpha.as_deref(), args.k, args.precision);
    emit(&document("formulas", flags, vec![], started, result), args.out.as_ref())
}

fn run_sweep(args: &SweepArgs) -> Result<(SweepResult, Value), Failure> {
    let grid = parse_grid(&args.a_grid)?;
    let cfg = config(grid[0], &args.sim, 4);
    let result = match args.sim.gamma_variant {
        VariantArg::Plain => sweep(&grid, &cfg)?,
        VariantArg::Shifted => shifted_variant_scan(&grid, &cfg)?,
    };
    let flags = json!({ "a_grid": args.a_grid, "flags": to_value(&args.sim) });
    Ok((result, flags))
}

fn write_csv(path: &PathBuf, s: &SweepResult) -> Result<(), Failure> {
    let mut text = String::from("a,sep_prob,stderr\n");
    for g in &s.grid {
        // shortest round-trip formatting, identical to the JSON numbers
        text.push_str(&format!("{:?},{:?},{:?}\n", g.a, g.sep_prob, g.stderr));
    }
    fs::write(path, text).map_err(io_failure)
}

fn per_point(args: &SweepArgs, points: usize) -> Vec<u64> {
    let per_worker: Vec<u64> = partition(args.sim.samples, args.sim.workers)
        .iter()
        .map(|(l, h)| (h - l) * points as u64)
        .collect();
    per_worker
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Failure> {
    let started = Instant::now();
    let (result, flags) = run_sweep(&args)?;
    if let Some(p) = &args.csv {
        write_csv(p, &result)?;
    }
    let per_worker = per_point(&args, result.grid.len());
    emit(&document("sweep", flags, per_worker, started, to_value(&result)), args.out.as_ref())
}

fn cmd_calibrate(args: CalibrateArgs) -> Result<(), Failure> {
    let started = Instant::now();
    if args.k_list.is_empty() {
        return Err(invalid("--k-list needs at least one k"));
    }
    let (s, mut flags) = run_sweep(&args.sweep)?;
    flags["k_list"] = to_value(&args.k_list);
    if let Some(p) = &args.sweep.csv {
        write_csv(p, &s)?;
    }
    let map = fit_a_of_k(&args.k_list, &s)?;
    let result = json!({ "calibration": to_value(&map), "sweep": to_value(&s) });
    let per_worker = per_point(&args.sweep, s.grid.len());
    emit(&document("calibrate", flags, per_worker, started, result), args.sweep.out.as_ref())
}

fn cmd_eigcheck(args: EigArgs) -> Result<(), Failure> {
    let started = Instant::now();
    let r = eigen_pdf_check(args.n, args.samples, args.seed, args.bins)?;
    let flags = json!({ "n": args.n, "samples": args.samples, "seed": args.seed, "bins": args.bins });
    emit(
        &document("eigcheck", flags, vec![args.samples], started, to_value(&r)),
        args.out.as_ref(),
    )
}

fn cmd_forrester3(args: Forrester3Args) -> Result<(), Failure> {
    let started = Instant::now();
    let a = parse_real(&args.a, "a")?;
    let cfg = config(a, &args.sim, 3);
    let frac = forrester_3x3_mode(a, cfg.gamma_variant, cfg.samples, cfg.seed, cfg.workers)?;
    let per_worker = partition(cfg.samples, cfg.workers).iter().map(|(l, h)| h - l).collect();
    let flags = json!({ "a": args.a, "flags": to_value(&args.sim) });
    let result = json!({ "fraction_negative": frac, "config": to_value(&cfg) });
    emit(&document("forrester3", flags, per_worker, started, result), args.out.as_ref())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Formulas(a) => cmd_formulas(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Calibrate(a) => cmd_calibrate(a),
        Command::Eigcheck(a) => cmd_eigcheck(a),
        Command::Forrester3(a) => cmd_forrester3(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", serde_json::to_string(&f.detail).expect("serializable"));
            ExitCode::from(f.code)
        }
    }
}
