//! `minkval`: compute valuation bodies, run verification suites, write slices.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value as Json};

use minkval::harness::suite::{run_suite, SuiteConfig};
use minkval::harness::sublinearity_counterexample;
use minkval::operators::{classified_operator, Body, OperatorSpec};
use minkval::polytope::gram_schmidt;
use minkval::scalar::{from_f64, parse_rational};
use minkval::{Error, Polytope, Vector};

#[derive(Parser, Debug)]
#[command(name = "minkval", version, about = "L_p Minkowski valuations on polytopes containing the origin")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Apply an operator to a polytope file.
    Compute(ComputeArgs),
    /// Run a suite configuration file.
    Verify(VerifyArgs),
    /// Evaluate the sublinearity counterexample.
    Counterexample(OutArgs),
    /// Run named sub-suites (all when none are given) with the default configuration.
    Suite(SuiteArgs),
    /// Write `(theta, h(cos theta u1 + sin theta u2))` as CSV.
    Slice(SliceArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeFlag {
    Exact,
    Float,
}

impl fmt::Display for ModeFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModeFlag::Exact => "exact",
            ModeFlag::Float => "float",
        })
    }
}

#[derive(Args, Debug)]
struct OperatorArgs {
    /// Polytope file.
    #[arg(long)]
    input: PathBuf,
    /// Operator family, e.g. `projection`, `asym-linf`, `moment`, `lp-covariant`.
    #[arg(long)]
    operator: String,
    /// JSON object (inline or a file path) with `p`, `sign` and `coefficients`.
    #[arg(long)]
    params: Option<String>,
    #[arg(long, value_enum)]
    mode: Option<ModeFlag>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ComputeArgs {
    #[command(flatten)]
    op: OperatorArgs,
    /// Number of sampled directions for field results.
    #[arg(long, default_value_t = 32)]
    probes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Extra evaluation direction, comma separated (repeatable).
    #[arg(long = "at")]
    at: Vec<String>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Suite configuration file.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    probes: Option<usize>,
}

#[derive(Args, Debug)]
struct SuiteArgs {
    names: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    probes: Option<usize>,
}

#[derive(Args, Debug)]
struct OutArgs {
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SliceArgs {
    #[command(flatten)]
    op: OperatorArgs,
    /// First plane vector, comma separated.
    #[arg(long)]
    u1: String,
    /// Second plane vector, comma separated.
    #[arg(long)]
    u2: String,
    #[arg(long, default_value_t = 360)]
    resolution: usize,
}

/// Input that could not be parsed or validated (exit status 2).
#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::Parse(_) | Error::Config(_)) => 2,
        _ => 1,
    }
}

fn default_mode() -> ModeFlag {
    match std::env::var("EXACT").as_deref() {
        Ok("0") => ModeFlag::Float,
        _ => ModeFlag::Exact,
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn parse_json(text: &str, what: &str) -> Result<Json> {
    serde_json::from_str(text).map_err(|e| usage(format!("malformed {what}: {e}")))
}

fn parse_vector(text: &str) -> Result<Vector> {
    let coords = text
        .split(',')
        .map(|s| parse_rational(s.trim()))
        .collect::<minkval::Result<Vec<_>>>()
        .map_err(|e| usage(format!("bad vector {text:?}: {e}")))?;
    Ok(Vector(coords))
}

fn load_polytope(path: &Path) -> Result<Polytope> {
    Ok(Polytope::from_json(&read(path)?)?)
}

fn operator_spec(args: &OperatorArgs) -> Result<(OperatorSpec, Json)> {
    let params = match &args.params {
        None => json!({}),
        Some(p) if Path::new(p).is_file() => parse_json(&read(Path::new(p))?, "params")?,
        Some(p) => parse_json(p, "params")?,
    };
    let Json::Object(mut obj) = params.clone() else {
        return Err(usage("params must be a JSON object"));
    };
    let mode = args.mode.unwrap_or_else(default_mode);
    obj.insert("family".into(), Json::String(args.operator.clone()));
    obj.entry("mode").or_insert_with(|| Json::String(mode.to_string()));
    let spec = OperatorSpec::from_json(&Json::Object(obj).to_string())?;
    Ok((spec, params))
}

fn provenance(spec: &OperatorSpec, params: &Json) -> Json {
    json!({ "operator": spec.family, "params": params, "mode": spec.mode })
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn to_pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn cmd_compute(args: &ComputeArgs) -> Result<()> {
    let p = load_polytope(&args.op.input)?;
    let (spec, params) = operator_spec(&args.op)?;
    let body = classified_operator(&spec, &p)?;
    let prov = provenance(&spec, &params);
    let doc = match &body {
        Body::Polytope(q) => {
            let mut file = serde_json::to_value(q.to_file())?;
            file["mode"] = json!("exact");
            file["provenance"] = prov;
            file
        }
        Body::Field(f) => {
            let mut dirs: Vec<Vector> = args.at.iter().map(|s| parse_vector(s)).collect::<Result<_>>()?;
            let sampled = minkval::probes::probe_set(p.n(), args.probes, args.seed);
            dirs.extend(sampled.into_iter().take(args.probes));
            let samples = dirs
                .iter()
                .map(|x| {
                    Ok(json!({
                        "direction": x,
                        "support": f.eval(x)?,
                        "field": f.field(x)?,
                    }))
                })
                .collect::<Result<Vec<_>>>()?;
            json!({ "n": p.n(), "order": f.order(), "samples": samples, "provenance": prov })
        }
    };
    write_or_print(args.op.out.as_deref(), &to_pretty(&doc))?;
    if args.op.out.is_some() {
        println!("{} applied to {} ({} vertices)", args.op.operator, args.op.input.display(), p.vertices().len());
    }
    Ok(())
}

fn report(bundle: &minkval::harness::Bundle, out: Option<&Path>) -> Result<()> {
    for v in &bundle.verdicts {
        let ok = v.cases.iter().filter(|c| c.as_expected()).count();
        let status = if v.pass { "ok" } else { "FAILED" };
        println!("{:<22} {ok}/{} as expected  {status}  ({} ms)", v.suite, v.cases.len(), v.elapsed_ms);
        for c in v.cases.iter().filter(|c| !c.as_expected()) {
            println!("    unexpected: {} (pass = {})", c.key, c.pass);
        }
    }
    if let Some(path) = out {
        fs::write(path, bundle.to_json()).with_context(|| format!("writing {}", path.display()))?;
    }
    println!("overall: {}", if bundle.pass { "pass" } else { "FAIL" });
    if bundle.pass {
        Ok(())
    } else {
        Err(anyhow::anyhow!("suite failed")).context(FailedMarker)
    }
}

/// A suite or verification that did not meet its expectations (exit status 1).
#[derive(Debug)]
struct FailedMarker;

impl fmt::Display for FailedMarker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("verification failed")
    }
}

fn apply_overrides(cfg: &mut SuiteConfig, seed: Option<u64>, probes: Option<usize>) {
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(p) = probes {
        cfg.probes = p;
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<()> {
    let mut cfg = SuiteConfig::from_json(&read(&args.input)?)?;
    apply_overrides(&mut cfg, args.seed, args.probes);
    let bundle = run_suite(&cfg)?;
    report(&bundle, args.out.as_deref())
}

fn cmd_suite(args: &SuiteArgs) -> Result<()> {
    let mut cfg = SuiteConfig::default();
    if !args.names.is_empty() {
        cfg.suites = args.names.clone();
    }
    apply_overrides(&mut cfg, args.seed, args.probes);
    let bundle = run_suite(&cfg)?;
    report(&bundle, args.out.as_deref())
}

fn cmd_counterexample(args: &OutArgs) -> Result<()> {
    let ce = sublinearity_counterexample()?;
    println!(
        "h(x) = {}, h(y) = {}, h(x + y) = {}: subadditivity fails by {}",
        ce.hx, ce.hy, ce.hxy, ce.margin
    );
    if let Some(path) = &args.out {
        fs::write(path, to_pretty(&ce)).with_context(|| format!("writing {}", path.display()))?;
    }
    if ce.subadditive {
        return Err(anyhow::anyhow!("expected a violation of subadditivity")).context(FailedMarker);
    }
    Ok(())
}

fn cmd_slice(args: &SliceArgs) -> Result<()> {
    let p = load_polytope(&args.op.input)?;
    let (spec, _) = operator_spec(&args.op)?;
    let (u1, u2) = (parse_vector(&args.u1)?, parse_vector(&args.u2)?);
    let basis = gram_schmidt(&[u1.clone(), u2.clone()], p.n())?;
    if basis.len() != 2 {
        return Err(Error::DegenerateBasis.into());
    }
    if args.resolution == 0 {
        return Err(usage("resolution must be positive"));
    }
    let body = classified_operator(&spec, &p)?;
    let (e1, e2) = (u1.to_f64(), u2.to_f64());
    let mut csv = String::from("theta,h\n");
    for k in 0..args.resolution {
        let theta = std::f64::consts::TAU * k as f64 / args.resolution as f64;
        let (c, s) = (theta.cos(), theta.sin());
        let x = e1
            .iter()
            .zip(&e2)
            .map(|(a, b)| from_f64(c * a + s * b))
            .collect::<minkval::Result<Vec<_>>>()?;
        let h = body.eval(&Vector(x))?;
        csv.push_str(&format!("{theta},{}\n", h.to_f64()));
    }
    match &args.op.out {
        Some(path) => {
            fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?;
            println!("{} rows written to {}", args.resolution, path.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Compute(a) => cmd_compute(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Counterexample(a) => cmd_counterexample(a),
        Command::Suite(a) => cmd_suite(a),
        Command::Slice(a) => cmd_slice(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.downcast_ref::<FailedMarker>().is_some() => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

