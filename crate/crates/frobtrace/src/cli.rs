//! Command-line front door: a thin dispatcher from flags to library calls.
//!
//! Machine-readable output (CSV or JSON) goes to stdout or `--out`; human
//! summaries go to stderr. Exit codes: 0 success, 1 runtime failure,
//! 2 usage or validation failure.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::census::{build_report, CensusOptions, ImageOption};
use crate::frobenius::{
    build_trace_table, load_trace_table, render_trace_table, BuildMethod, CurveSpec, TraceTable,
};
use crate::gl2::{
    conjecture_constant, half_trace_constant, parse_image_file, verify_against_enumeration,
    GaloisImage, MAX_ENUM_LEVEL,
};
use crate::sieve::{
    check_lower_lemma, greaves_values, minimal_r, parameter_recipe, sifted_count, solve_u,
    weighted_h, GreavesParams, SieveData, SieveMode,
};

#[derive(Debug)]
enum CliError {
    Usage(String),
    Runtime(String),
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn runtime<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}

#[derive(Parser)]
#[command(
    name = "frobtrace",
    version,
    about = "Frobenius trace tables, almost-prime censuses, GL2 trace classes, and sieve numerics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a trace table and write it as CSV.
    Traces(TracesArgs),
    /// Run the census over a trace table and emit a JSON report.
    Census(CensusArgs),
    /// Print the constants attached to a Galois image.
    Constant(ConstantArgs),
    /// Sieve functional evaluation, solving, and parameter recipes.
    #[command(subcommand)]
    Sieve(SieveCmd),
    /// Cross-check closed-form matrix counts against enumeration.
    Gl2Verify(Gl2VerifyArgs),
    /// Sifted and weighted sums plus the lower-bound lemma on cached traces.
    Greaves(GreavesArgs),
}

#[derive(Args)]
struct TracesArgs {
    /// Coefficient A in y^2 = x^3 + Ax + B.
    #[arg(long = "A", allow_negative_numbers = true)]
    a: i64,
    /// Coefficient B.
    #[arg(long = "B", allow_negative_numbers = true)]
    b: i64,
    /// Upper bound on the primes p.
    #[arg(long)]
    x: u64,
    /// Trace algorithm: naive, fast, or auto.
    #[arg(long, default_value = "auto")]
    method: String,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    workers: Option<usize>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CensusArgs {
    #[arg(long = "A", allow_negative_numbers = true)]
    a: i64,
    #[arg(long = "B", allow_negative_numbers = true)]
    b: i64,
    #[arg(long)]
    x: u64,
    /// Cached trace CSV; its header must match A, B, and x.
    #[arg(long)]
    traces: Option<PathBuf>,
    /// Galois image: `full` (with --level) or a gl2image file path.
    #[arg(long)]
    image: Option<String>,
    /// Level for `--image full`.
    #[arg(long)]
    level: Option<u64>,
    /// Quasi-GRH exponent for the derived sieve parameters.
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    /// Torsion conductor level for the sieve-side filter.
    #[arg(long, default_value_t = 2)]
    m_e: u64,
    /// Largest k for the Q_k and P_k counts.
    #[arg(long, default_value_t = 8)]
    k_max: u64,
    /// Lower cutoff for the reciprocal sum.
    #[arg(long, default_value_t = 2.0)]
    x0: f64,
    /// Euler-product tail tolerance for the constants.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value = "auto")]
    method: String,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConstantArgs {
    /// Image level m (must be even).
    #[arg(long)]
    level: u64,
    /// `full` or a gl2image file path.
    #[arg(long)]
    image: String,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum SieveCmd {
    /// Evaluate alpha(V), beta(V), and J(U, V).
    Eval(SieveEvalArgs),
    /// Solve J(U, V) = target for U by bisection.
    Solve(SieveSolveArgs),
    /// Print the literal parameter recipe for a mode.
    Recipe(SieveRecipeArgs),
}

#[derive(Args)]
struct SieveEvalArgs {
    #[arg(long = "U")]
    u: f64,
    #[arg(long = "V")]
    v: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SieveSolveArgs {
    #[arg(long = "V")]
    v: f64,
    #[arg(long, allow_negative_numbers = true)]
    target: f64,
    /// Bracket lower endpoint.
    #[arg(long, default_value_t = 0.3)]
    lo: f64,
    /// Bracket upper endpoint.
    #[arg(long, default_value_t = 0.9)]
    hi: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SieveRecipeArgs {
    #[arg(long)]
    theta: f64,
    /// One of: selberg, greaves_Q, greaves_P, pcc.
    #[arg(long)]
    mode: String,
    #[arg(long, default_value_t = 1e6)]
    x: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Gl2VerifyArgs {
    /// Check trace classes for all primes l <= lmax.
    #[arg(long)]
    lmax: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GreavesArgs {
    /// Cached trace CSV produced by `traces`.
    #[arg(long)]
    traces: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    /// Recipe mode for (U, V): usually greaves_Q or greaves_P.
    #[arg(long, default_value = "greaves_Q")]
    mode: String,
    #[arg(long, default_value_t = 2)]
    m_e: u64,
    /// Sifting level override; defaults to x^xi (the literal recipe z
    /// collapses below 1 at desk scale).
    #[arg(long)]
    z: Option<f64>,
    /// Factor budget override; defaults to the smallest r satisfying the
    /// lemma's max hypothesis.
    #[arg(long)]
    r: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses arguments from the process environment and runs; returns the exit
/// code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.exit_code() == 0 { 0 } else { 2 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Traces(args) => cmd_traces(args),
        Command::Census(args) => cmd_census(args),
        Command::Constant(args) => cmd_constant(args),
        Command::Sieve(cmd) => match cmd {
            SieveCmd::Eval(args) => cmd_sieve_eval(args),
            SieveCmd::Solve(args) => cmd_sieve_solve(args),
            SieveCmd::Recipe(args) => cmd_sieve_recipe(args),
        },
        Command::Gl2Verify(args) => cmd_gl2_verify(args),
        Command::Greaves(args) => cmd_greaves(args),
    }
}

/// Writes machine-readable output to `--out` or stdout, verbatim.
fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn parse_method(s: &str) -> Result<BuildMethod, CliError> {
    match s {
        "naive" => Ok(BuildMethod::Naive),
        "fast" => Ok(BuildMethod::Fast),
        "auto" => Ok(BuildMethod::Auto),
        _ => Err(CliError::Usage(format!(
            "unknown method `{s}`; expected naive, fast, or auto"
        ))),
    }
}

fn parse_mode(s: &str) -> Result<SieveMode, CliError> {
    s.parse::<SieveMode>().map_err(usage)
}

fn resolve_workers(workers: Option<usize>) -> Result<usize, CliError> {
    match workers {
        Some(0) => Err(CliError::Usage("--workers must be at least 1".into())),
        Some(n) => Ok(n),
        None => Ok(std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)),
    }
}

fn load_table_checked(path: &PathBuf, a: i64, b: i64, x: u64) -> Result<TraceTable, CliError> {
    if !path.exists() {
        return Err(CliError::Usage(format!(
            "trace cache {} does not exist",
            path.display()
        )));
    }
    let table = load_trace_table(path).map_err(runtime)?;
    if table.curve().a() != a || table.curve().b() != b || table.x() != x {
        return Err(CliError::Usage(format!(
            "trace cache {} is for A={} B={} x={}, not A={a} B={b} x={x}",
            path.display(),
            table.curve().a(),
            table.curve().b(),
            table.x()
        )));
    }
    Ok(table)
}

/// Builds the image selected by `--image`/`--level`, validating evenness.
fn resolve_image(image: &str, level: Option<u64>) -> Result<(GaloisImage, u64), CliError> {
    if image == "full" {
        let m = level.ok_or_else(|| CliError::Usage("`--image full` requires --level".into()))?;
        if m % 2 != 0 {
            return Err(CliError::Usage(format!(
                "level {m} is odd; the torsion conductor m_E is even"
            )));
        }
        let img = GaloisImage::full(m).map_err(usage)?;
        Ok((img, m))
    } else {
        let path = PathBuf::from(image);
        if !path.exists() {
            return Err(CliError::Usage(format!(
                "image file {} does not exist",
                path.display()
            )));
        }
        let text = fs::read_to_string(&path).map_err(runtime)?;
        let img = parse_image_file(&text).map_err(runtime)?;
        let m = img.level();
        if m % 2 != 0 {
            return Err(CliError::Usage(format!(
                "image level {m} is odd; the torsion conductor m_E is even"
            )));
        }
        if let Some(l) = level {
            if l != m {
                return Err(CliError::Usage(format!(
                    "--level {l} does not match the image file level {m}"
                )));
            }
        }
        Ok((img, m))
    }
}

fn cmd_traces(args: TracesArgs) -> Result<(), CliError> {
    let curve = CurveSpec::new(args.a, args.b).map_err(usage)?;
    let method = parse_method(&args.method)?;
    let workers = resolve_workers(args.workers)?;
    let table = build_trace_table(&curve, args.x, method, workers).map_err(runtime)?;
    emit(&args.out, &render_trace_table(&table))?;
    eprintln!("{} good primes up to {} for {}", table.len(), args.x, curve);
    Ok(())
}

fn cmd_census(args: CensusArgs) -> Result<(), CliError> {
    let curve = CurveSpec::new(args.a, args.b).map_err(usage)?;
    let table = match &args.traces {
        Some(path) => Some(load_table_checked(path, args.a, args.b, args.x)?),
        None => None,
    };
    let image = match &args.image {
        None => ImageOption::None,
        Some(s) if s == "full" => {
            let (_, m) = resolve_image(s, args.level)?;
            ImageOption::FullLevel(m)
        }
        Some(s) => {
            let (img, _) = resolve_image(s, args.level)?;
            ImageOption::Explicit(img)
        }
    };
    let options = CensusOptions {
        method: parse_method(&args.method)?,
        workers: resolve_workers(args.workers)?,
        m_e: args.m_e,
        theta: args.theta,
        k_max: args.k_max,
        x0: args.x0,
        tol: args.tol,
        image,
        sieve_params: None,
        empirical_ds: vec![1, 3, 5],
        table,
    };
    let report = build_report(&curve, args.x, &options).map_err(runtime)?;
    let mut json = report.to_json();
    json.push('\n');
    emit(&args.out, &json)?;
    eprintln!(
        "census for {} up to {}: {} prime traces among {} good primes",
        curve,
        args.x,
        report.counts.prime,
        report.counts.q.get(&options.k_max).copied().unwrap_or(0)
            + report.counts.zero
            + report.counts.unit
    );
    Ok(())
}

fn cmd_constant(args: ConstantArgs) -> Result<(), CliError> {
    if args.level % 2 != 0 {
        return Err(CliError::Usage(format!(
            "level {} is odd; the torsion conductor m_E is even",
            args.level
        )));
    }
    let (image, m) = resolve_image(&args.image, Some(args.level))?;
    let mut report = conjecture_constant(&image, args.tol).map_err(runtime)?;
    if args.image == "full" && 2 * m <= MAX_ENUM_LEVEL {
        let image2 = GaloisImage::full(2 * m).map_err(runtime)?;
        report.cprime = Some(half_trace_constant(&image2, m, args.tol).map_err(runtime)?);
    }
    let mut json = serde_json::to_string_pretty(&report).expect("serializable");
    json.push('\n');
    emit(&args.out, &json)?;
    eprintln!(
        "C = {:.12} at level {m} (tail bound {:.3e})",
        report.c, report.euler_tail_bound
    );
    Ok(())
}

fn cmd_sieve_eval(args: SieveEvalArgs) -> Result<(), CliError> {
    let values = greaves_values(args.u, args.v).map_err(usage)?;
    let mut json = serde_json::to_string_pretty(&values).expect("serializable");
    json.push('\n');
    emit(&args.out, &json)?;
    eprintln!("J({}, {}) = {:.6}", args.u, args.v, values.j);
    Ok(())
}

fn cmd_sieve_solve(args: SieveSolveArgs) -> Result<(), CliError> {
    use crate::sieve::SieveError;
    let u = solve_u(args.v, args.target, (args.lo, args.hi)).map_err(|e| match e {
        SieveError::Domain(_) => usage(e),
        _ => runtime(e),
    })?;
    let j = crate::sieve::j_of(u, args.v).map_err(runtime)?;
    let out = json!({ "U": u, "V": args.v, "target": args.target, "J": j });
    let mut json = serde_json::to_string_pretty(&out).expect("serializable");
    json.push('\n');
    emit(&args.out, &json)?;
    eprintln!("J(U, {}) = {} at U = {u:.7}", args.v, args.target);
    Ok(())
}

fn cmd_sieve_recipe(args: SieveRecipeArgs) -> Result<(), CliError> {
    let mode = parse_mode(&args.mode)?;
    let params = parameter_recipe(args.theta, mode, args.x).map_err(usage)?;
    let mut json = serde_json::to_string_pretty(&params).expect("serializable");
    json.push('\n');
    emit(&args.out, &json)?;
    eprintln!(
        "mode {mode}: U = {}, V = {}, z = {:.6e}, r = {}",
        params.u, params.v, params.z, params.r
    );
    Ok(())
}

fn cmd_gl2_verify(args: Gl2VerifyArgs) -> Result<(), CliError> {
    let checks = verify_against_enumeration(args.lmax).map_err(usage)?;
    let all_ok = checks.iter().all(|(_, ok)| *ok);
    for (name, ok) in &checks {
        eprintln!("{} {name}", if *ok { "ok " } else { "FAIL" });
    }
    let rows: Vec<serde_json::Value> = checks
        .iter()
        .map(|(name, ok)| json!({ "check": name, "ok": ok }))
        .collect();
    let mut json =
        serde_json::to_string_pretty(&json!({ "lmax": args.lmax, "checks": rows, "all_ok": all_ok }))
            .expect("serializable");
    json.push('\n');
    emit(&args.out, &json)?;
    if all_ok {
        Ok(())
    } else {
        Err(CliError::Runtime("enumeration cross-check failed".into()))
    }
}

fn cmd_greaves(args: GreavesArgs) -> Result<(), CliError> {
    if !args.traces.exists() {
        return Err(CliError::Usage(format!(
            "trace cache {} does not exist",
            args.traces.display()
        )));
    }
    let table = load_trace_table(&args.traces).map_err(runtime)?;
    let data = SieveData::from_table(&table, args.m_e).map_err(usage)?;
    let mode = parse_mode(&args.mode)?;
    let recipe = parameter_recipe(args.theta, mode, table.x() as f64).map_err(usage)?;
    let z = match args.z {
        Some(z) if z > 1.0 => z,
        Some(_) => return Err(CliError::Usage("--z must exceed 1".into())),
        None => (table.x() as f64).powf(recipe.xi),
    };
    let max_abs = data
        .values()
        .iter()
        .map(|a| a.unsigned_abs())
        .max()
        .unwrap_or(0);
    let r = match args.r {
        Some(r) if r >= 1 => r,
        Some(_) => return Err(CliError::Usage("--r must be at least 1".into())),
        None => minimal_r(z, recipe.u, recipe.v, max_abs).map_err(runtime)?,
    };
    let params = GreavesParams { z, r, ..recipe };
    params.validate().map_err(usage)?;
    let s = sifted_count(&data, params.z).map_err(runtime)?;
    let h = weighted_h(&data, &params).map_err(runtime)?;
    let lemma = check_lower_lemma(&data, &params).map_err(runtime)?;
    let out = json!({
        "params": params,
        "m_E": args.m_e,
        "set_size": data.len(),
        "S": s,
        "H": h,
        "lemma": lemma,
    });
    let mut json = serde_json::to_string_pretty(&out).expect("serializable");
    json.push('\n');
    emit(&args.out, &json)?;
    eprintln!(
        "S = {s}, H = {h:.4}, omega-count = {} (r = {}), max hypothesis {}",
        lemma.count_omega_le_r,
        params.r,
        if lemma.max_ok { "holds" } else { "fails" }
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_negative_coefficients() {
        let cli = Cli::try_parse_from(["frobtrace", "traces", "--A", "-1", "--B", "0", "--x", "10"])
            .unwrap();
        match cli.command {
            Command::Traces(args) => {
                assert_eq!((args.a, args.b, args.x), (-1, 0, 10));
                assert_eq!(args.method, "auto");
            }
            _ => panic!("wrong subcommand"),
        }
    }

    #[test]
    fn parses_sieve_subcommands() {
        let cli = Cli::try_parse_from([
            "frobtrace", "sieve", "eval", "--U", "0.83", "--V", "0.1666666667",
        ])
        .unwrap();
        match cli.command {
            Command::Sieve(SieveCmd::Eval(args)) => {
                assert_eq!(args.u, 0.83);
            }
            _ => panic!("wrong subcommand"),
        }
        let cli = Cli::try_parse_from([
            "frobtrace", "sieve", "solve", "--V", "0.25", "--target", "0.5",
        ])
        .unwrap();
        match cli.command {
            Command::Sieve(SieveCmd::Solve(args)) => {
                assert_eq!((args.lo, args.hi), (0.3, 0.9));
            }
            _ => panic!("wrong subcommand"),
        }
    }

    #[test]
    fn rejects_unknown_flags_and_modes() {
        assert!(Cli::try_parse_from(["frobtrace", "traces", "--bogus", "1"]).is_err());
        assert!(parse_mode("chen").is_err());
        assert!(parse_method("magic").is_err());
        assert!(matches!(resolve_workers(Some(0)), Err(CliError::Usage(_))));
        assert_eq!(resolve_workers(Some(3)).unwrap(), 3);
    }

    #[test]
    fn kebab_case_subcommand_names() {
        assert!(Cli::try_parse_from(["frobtrace", "gl2-verify", "--lmax", "3"]).is_ok());
        assert!(Cli::try_parse_from(["frobtrace", "greaves", "--traces", "t.csv"]).is_ok());
    }
}
