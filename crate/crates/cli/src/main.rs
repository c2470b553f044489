//! Command-line front end: construct codes into JSON descriptors, encode
//! messages, brute-force minimum distances, emit bound tables, and run the
//! library's invariant suites.
//!
//! Exit codes: 0 success; 1 internal/self-test failure; 2 invalid flags or
//! malformed input; 3 construction hypothesis failures (including too few
//! places); 4 message-length mismatches; 5 enumeration caps exceeded.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sumrank_ag::bounds::{self, Extension};
use sumrank_ag::code::{CodeError, LinearizedAGCode};
use sumrank_ag::curve::CurveModel;
use sumrank_ag::selftest;

#[derive(Parser)]
#[command(name = "sumrank-ag", version, about = "Sum-rank metric codes from curves")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Construct a code and write its JSON descriptor.
    Construct(ConstructArgs),
    /// Encode a message against a stored descriptor.
    Encode(EncodeArgs),
    /// Brute-force the exact minimum sum-rank distance.
    Mindist(MindistArgs),
    /// Evaluate rate/distance bounds or emit a CSV table.
    Bounds(BoundsArgs),
    /// Run the invariant suites at desk scale.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct ConstructArgs {
    /// Curve model: p1 (projective line) or hermitian.
    #[arg(long, value_parser = ["p1", "hermitian"])]
    curve: String,
    /// Characteristic of the constant field k.
    #[arg(long)]
    p: Option<u64>,
    /// Extension degree of k over its prime field.
    #[arg(long)]
    e: Option<usize>,
    /// Hermitian parameter: the curve is y^q0 + y = x^(q0+1) over F_(q0^2).
    #[arg(long)]
    q0: Option<u64>,
    /// Twist order (degree of l over k).
    #[arg(long)]
    r: usize,
    /// Pole-order budget at infinity.
    #[arg(long)]
    m: u64,
    /// Truncate the evaluation-place list to this length.
    #[arg(long = "max-s")]
    max_s: Option<usize>,
    /// Output descriptor path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EncodeArgs {
    /// Descriptor file produced by `construct`.
    #[arg(long)]
    code: PathBuf,
    /// Comma-separated message entries: field indices, decimal or 0x-hex.
    #[arg(long)]
    message: String,
}

#[derive(Args)]
struct MindistArgs {
    /// Descriptor file produced by `construct`.
    #[arg(long)]
    code: PathBuf,
    /// Worker threads for the enumeration.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Cap on the number of projective classes to visit.
    #[arg(long)]
    cap: Option<u64>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Field size q.
    #[arg(long)]
    q: u64,
    /// Finite twist order r.
    #[arg(long, conflicts_with = "r_inf")]
    r: Option<u32>,
    /// Use the r → ∞ limit.
    #[arg(long = "r-inf")]
    r_inf: bool,
    /// finite | asymptotic | compgv | table.
    #[arg(long, value_parser = ["finite", "asymptotic", "compgv", "table"])]
    mode: String,
    /// Block count (finite mode only).
    #[arg(long)]
    s: Option<u64>,
    /// Relative distance (single-value modes).
    #[arg(long)]
    delta: Option<f64>,
    /// Grid step for table mode (default 0.01).
    #[arg(long = "delta-step")]
    delta_step: Option<f64>,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelftestArgs {
    /// List suite names before running them.
    #[arg(long)]
    verbose: bool,
}

fn flag_error(msg: &str) -> u8 {
    eprintln!("error: {msg}");
    2
}

fn exit_for(err: &CodeError) -> u8 {
    match err {
        CodeError::HypothesisFailed(_) | CodeError::TooFewPlaces { .. } => 3,
        CodeError::LengthMismatch { .. } => 4,
        CodeError::EnumerationTooLarge { .. } => 5,
        _ => 1,
    }
}

fn load_code(path: &PathBuf) -> Result<LinearizedAGCode, u8> {
    let text = fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        1
    })?;
    LinearizedAGCode::from_json(&text).map_err(|e| {
        eprintln!("error: {e}");
        exit_for(&e)
    })
}

fn cmd_construct(args: &ConstructArgs) -> u8 {
    let curve = match args.curve.as_str() {
        "p1" => {
            let (Some(p), Some(e)) = (args.p, args.e) else {
                return flag_error("--curve p1 requires --p and --e");
            };
            match CurveModel::projective_line(p, e) {
                Ok(c) => c,
                Err(e) => return flag_error(&e.to_string()),
            }
        }
        _ => {
            let Some(q0) = args.q0 else {
                return flag_error("--curve hermitian requires --q0");
            };
            let c = match CurveModel::hermitian(q0) {
                Ok(c) => c,
                Err(e) => return flag_error(&e.to_string()),
            };
            if args.p.is_some_and(|p| p != c.tower.p)
                || args.e.is_some_and(|e| e != c.tower.e)
            {
                return flag_error("--p/--e disagree with the Hermitian constant field");
            }
            c
        }
    };
    if args.r == 0 {
        return flag_error("--r must be at least 1");
    }
    let code = match LinearizedAGCode::construct(curve, args.r, args.m, args.max_s) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_for(&e);
        }
    };
    if let Err(e) = fs::write(&args.out, code.to_json()) {
        eprintln!("error: cannot write {}: {e}", args.out.display());
        return 1;
    }
    let report = code.params();
    println!("n                 {}", report.n);
    println!("n_l               {}", report.n_l);
    println!("kappa_l           {}", report.kappa_l);
    println!("kappa_l_lower     {}", report.kappa_l_lower);
    println!("d_lower           {}", report.d_lower);
    println!("d_upper_singleton {}", report.d_upper_singleton);
    println!("defect_bound      {}", report.defect_bound);
    println!("exact_lambda      {}", report.exact_lambda);
    0
}

fn parse_message(text: &str, l_size: u64) -> Result<Vec<u64>, String> {
    text.split(',')
        .map(|tok| {
            let tok = tok.trim();
            let parsed = if let Some(hex) = tok.strip_prefix("0x").or_else(|| tok.strip_prefix("0X"))
            {
                u64::from_str_radix(hex, 16)
            } else {
                tok.parse::<u64>()
            };
            let v = parsed.map_err(|_| format!("malformed message entry {tok:?}"))?;
            if v >= l_size {
                return Err(format!("message entry {v} outside the field (size {l_size})"));
            }
            Ok(v)
        })
        .collect()
}

fn cmd_encode(args: &EncodeArgs) -> u8 {
    let code = match load_code(&args.code) {
        Ok(c) => c,
        Err(rc) => return rc,
    };
    let indices = match parse_message(&args.message, code.tower.l_size) {
        Ok(v) => v,
        Err(msg) => return flag_error(&msg),
    };
    let message: Vec<_> = indices.iter().map(|i| code.tower.l_from_index(*i)).collect();
    let cw = match code.encode(&message) {
        Ok(cw) => cw,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_for(&e);
        }
    };
    let blocks: Vec<Vec<Vec<u64>>> = cw
        .blocks
        .iter()
        .map(|b| {
            (0..b.rows)
                .map(|i| (0..b.cols).map(|j| code.tower.k_index(b.get(i, j))).collect())
                .collect()
        })
        .collect();
    println!(
        "{}",
        serde_json::to_string_pretty(&serde_json::json!({ "blocks": blocks }))
            .expect("serialization cannot fail")
    );
    0
}

fn cmd_mindist(args: &MindistArgs) -> u8 {
    let mut code = match load_code(&args.code) {
        Ok(c) => c,
        Err(rc) => return rc,
    };
    match code.min_distance_bruteforce(args.cap, args.jobs) {
        Ok(d) => {
            println!("{d}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
    }
}

fn cmd_bounds(args: &BoundsArgs) -> u8 {
    let ext = if args.r_inf {
        Extension::Infinite
    } else if let Some(r) = args.r {
        if r == 0 {
            return flag_error("--r must be at least 1");
        }
        Extension::Finite(r)
    } else {
        return flag_error("provide --r or --r-inf");
    };
    let output = match args.mode.as_str() {
        "finite" => {
            let Extension::Finite(r) = ext else {
                return flag_error("finite mode needs a finite --r");
            };
            let (Some(s), Some(delta)) = (args.s, args.delta) else {
                return flag_error("finite mode requires --s and --delta");
            };
            match bounds::gv_finite(args.q, r, s, delta) {
                Ok(v) => format!("{v:.6}\n"),
                Err(e) => return flag_error(&e.to_string()),
            }
        }
        "asymptotic" => {
            let Some(delta) = args.delta else {
                return flag_error("asymptotic mode requires --delta");
            };
            match bounds::gv_asymptotic(args.q, ext, delta) {
                Ok(v) => format!("{v:.6}\n"),
                Err(e) => return flag_error(&e.to_string()),
            }
        }
        "compgv" => {
            let Some(delta) = args.delta else {
                return flag_error("compgv mode requires --delta");
            };
            match bounds::compgv(args.q, ext, delta) {
                Ok(v) => format!("{v:.6}\n"),
                Err(e) => return flag_error(&e.to_string()),
            }
        }
        _ => {
            let step = args.delta_step.unwrap_or(0.01);
            if step <= 0.0 {
                return flag_error("--delta-step must be positive");
            }
            match bounds::emit_table(args.q, ext, &bounds::delta_grid(step)) {
                Ok(t) => t,
                Err(e) => return flag_error(&e.to_string()),
            }
        }
    };
    match &args.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &output) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return 1;
            }
        }
        None => print!("{output}"),
    }
    0
}

fn cmd_selftest(args: &SelftestArgs) -> u8 {
    if args.verbose {
        let names: Vec<&str> = selftest::SUITES.iter().map(|(n, _)| *n).collect();
        println!("suites: {}", names.join(", "));
    }
    let outcomes = selftest::run_all();
    let mut ok = true;
    for o in &outcomes {
        match &o.error {
            None => println!("suite {:<8} {:>5} cases  {:>6} ms  ok", o.name, o.cases, o.millis),
            Some(e) => {
                ok = false;
                println!("suite {:<8} {:>5} cases  {:>6} ms  FAILED: {e}", o.name, o.cases, o.millis);
            }
        }
    }
    if ok {
        0
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let rc = match &cli.cmd {
        Cmd::Construct(args) => cmd_construct(args),
        Cmd::Encode(args) => cmd_encode(args),
        Cmd::Mindist(args) => cmd_mindist(args),
        Cmd::Bounds(args) => cmd_bounds(args),
        Cmd::Selftest(args) => cmd_selftest(args),
    };
    ExitCode::from(rc)
}
