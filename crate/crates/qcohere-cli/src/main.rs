mod output;
mod registry;
mod suites;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qcohere::channels::{apply, apply_all, standard_channel, ChannelKind, KrausChannel, OnSubsystem};
use qcohere::error::Error;
use qcohere::io::{read_channel, read_matrix, read_state};
use qcohere::protocols::{haar_average_coherence, HaarKind};
use qcohere::qcore::{DensityMatrix, ReferenceBasis};
use qcohere::relativistic::{degradation_curve, CurveMeasure, Statistics, TruncationConfig};

use output::{emit, json, Cell, Format, Table};

#[derive(Parser)]
#[command(name = "qcohere", version, about = "Coherence and quantum-correlation quantifiers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one measure on a state file.
    Compute(ComputeArgs),
    /// Evaluate a measure along a channel-parameter grid.
    Sweep(SweepArgs),
    /// Run an analytic-versus-oracle suite.
    Verify(VerifyArgs),
    /// Monte-Carlo Haar average of a coherence quantity.
    Haar(HaarArgs),
    /// Correlation of an Unruh-degraded Bell state versus acceleration.
    Curve(CurveArgs),
    /// List measure identifiers.
    Measures,
}

#[derive(Args)]
struct MeasureArgs {
    #[arg(long)]
    state: PathBuf,
    #[arg(long)]
    measure: String,
    /// Unitary whose columns form the reference basis.
    #[arg(long)]
    basis: Option<PathBuf>,
    /// Dimension of subsystem A for bipartite measures.
    #[arg(long)]
    dim_a: Option<usize>,
    /// Order of the Tsallis measure.
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    m: MeasureArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    m: MeasureArgs,
    /// A standard channel name (the grid is its parameter) or a channel JSON file (the grid
    /// counts repeated applications).
    #[arg(long)]
    channel: String,
    #[arg(long)]
    grid: String,
    /// Where the channel acts: whole, all (each subsystem), or a subsystem index.
    #[arg(long)]
    on: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    suite: String,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value = "l1")]
    kind: String,
}

#[derive(Args)]
struct HaarArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value = "l1")]
    kind: String,
}

#[derive(Args)]
struct CurveArgs {
    #[arg(long)]
    statistics: String,
    #[arg(long)]
    measure: String,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// Acceleration grid.
    #[arg(long)]
    grid: String,
    #[arg(long, default_value_t = TruncationConfig::DEFAULT_TAIL)]
    tail: f64,
}

enum Failure {
    Verify(String),
    Lib(Error),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verify(_) => 1,
            Failure::Lib(Error::NoConvergence(_) | Error::OptimizerStalled(_) | Error::BoundViolation(_)) => 3,
            Failure::Lib(_) | Failure::Io(_) => 2,
        }
    }
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, Error> {
    let bad = || Error::Parse(format!("grid {spec:?} is not start:stop:steps"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, n] = parts[..] else { return Err(bad()) };
    let start: f64 = a.trim().parse().map_err(|_| bad())?;
    let stop: f64 = b.trim().parse().map_err(|_| bad())?;
    let steps: usize = n.trim().parse().map_err(|_| bad())?;
    if !start.is_finite() || !stop.is_finite() {
        return Err(bad());
    }
    if steps == 0 {
        return Err(Error::ParamOutOfRange(format!("grid {spec:?} is empty")));
    }
    if steps == 1 {
        return Ok(vec![start]);
    }
    Ok((0..steps).map(|k| start + (stop - start) * k as f64 / (steps - 1) as f64).collect())
}

fn load(m: &MeasureArgs) -> Result<(DensityMatrix, &'static registry::Entry, registry::Ctx), Error> {
    let entry = registry::lookup(&m.measure)?;
    let rho = read_state(&m.state)?;
    let basis = m.basis.as_ref().map(|p| read_matrix(p).and_then(|u| ReferenceBasis::from_unitary(&u))).transpose()?;
    let ctx = entry.prepare(rho.dim(), m.dim_a, basis, m.alpha)?;
    Ok((rho, entry, ctx))
}

fn compute(a: &ComputeArgs, format: Format) -> Result<String, Failure> {
    let (rho, entry, ctx) = load(&a.m)?;
    let res = entry.run(&rho, &ctx)?;
    Ok(match format {
        Format::Json => json(&res),
        Format::Csv => {
            let mut t = Table::new(vec!["measure", "value", "method", "tol"]);
            let method = serde_json::to_value(res.method).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
            t.rows.push(vec![Cell::Text(entry.name.into()), Cell::Num(res.value), Cell::Text(method), Cell::Num(res.tol)]);
            t.render(format)
        }
    })
}

enum SweepChannel {
    Family(ChannelKind),
    Fixed(KrausChannel),
}

/// Default and "all" act on every subsystem; an index picks one; "whole" needs matching dims.
fn act(ch: &KrausChannel, rho: &DensityMatrix, on: Option<&str>) -> Result<DensityMatrix, Error> {
    let (c, d) = (ch.dim(), rho.dim());
    let k = (1..=16).find(|&k| c.pow(k as u32) == d).ok_or(Error::DimensionMismatch { expected: c, got: d })?;
    let dims = vec![c; k];
    match on {
        None | Some("all") => apply_all(ch, rho, &dims),
        Some("whole") => apply(ch, rho, &OnSubsystem::Whole),
        Some(s) => {
            let index: usize = s.parse().map_err(|_| Error::Parse(format!("--on {s:?}: expected whole, all or an index")))?;
            apply(ch, rho, &OnSubsystem::Part { dims, index })
        }
    }
}

fn sweep(a: &SweepArgs, format: Format) -> Result<String, Failure> {
    let grid = parse_grid(&a.grid)?;
    let (rho, entry, ctx) = load(&a.m)?;
    let channel = match a.channel.parse::<ChannelKind>() {
        Ok(kind) => SweepChannel::Family(kind),
        Err(_) if Path::new(&a.channel).exists() => SweepChannel::Fixed(read_channel(&a.channel)?),
        Err(e) => return Err(e.into()),
    };
    let mut t = Table::new(vec!["param", "measure", "value"]);
    for &p in &grid {
        let out = match &channel {
            SweepChannel::Family(kind) => act(&standard_channel(*kind, p)?, &rho, a.on.as_deref())?,
            SweepChannel::Fixed(ch) => {
                if p < 0.0 || p.fract() != 0.0 {
                    return Err(Error::ParamOutOfRange(format!("grid value {p} is not an application count")).into());
                }
                let mut s = rho.clone();
                for _ in 0..p as usize {
                    s = act(ch, &s, a.on.as_deref())?;
                }
                s
            }
        };
        let v = entry.run(&out, &ctx)?;
        t.rows.push(vec![Cell::Num(p), Cell::Text(entry.name.into()), Cell::Num(v.value)]);
    }
    Ok(t.render(format))
}

fn verify(a: &VerifyArgs, seed: u64, format: Format) -> Result<String, Failure> {
    let haar = a.suite == "haar";
    let opts = suites::SuiteOptions {
        seed,
        samples: a.samples.unwrap_or(if haar { 10_000 } else { 20 }),
        dim: a.dim,
        haar_kind: a.kind.parse::<HaarKind>()?,
    };
    let checks = suites::run(&a.suite, &opts)?;
    let mut t = Table::new(vec!["check", "case", "value", "expected", "tol", "pass"]);
    for c in &checks {
        t.rows.push(vec![
            Cell::Text(c.check.clone()),
            Cell::Int(c.case as u64),
            Cell::Num(c.value),
            Cell::Num(c.expected),
            Cell::Num(c.tol),
            Cell::Text(if c.pass { "pass" } else { "FAIL" }.into()),
        ]);
    }
    let failed: Vec<_> = checks.iter().filter(|c| !c.pass).collect();
    if failed.is_empty() {
        Ok(t.render(format))
    } else {
        print!("{}", t.render(format));
        Err(Failure::Verify(serde_json::to_string(&failed).expect("checks serialize")))
    }
}

fn haar(a: &HaarArgs, seed: u64, format: Format) -> Result<String, Failure> {
    let kind: HaarKind = a.kind.parse()?;
    let h = haar_average_coherence(a.dim, a.samples, seed, kind)?;
    Ok(match format {
        Format::Json => json(&h),
        Format::Csv => {
            let mut t = Table::new(vec!["dim", "samples", "kind", "mean", "stderr", "analytic", "sigmas"]);
            t.rows.push(vec![
                Cell::Int(a.dim as u64),
                Cell::Int(a.samples as u64),
                Cell::Text(a.kind.clone()),
                Cell::Num(h.mean),
                Cell::Num(h.stderr),
                Cell::Num(h.analytic),
                Cell::Num(h.sigmas()),
            ]);
            t.render(format)
        }
    })
}

fn curve(a: &CurveArgs, format: Format) -> Result<String, Failure> {
    let stats: Statistics = a.statistics.parse()?;
    let measure: CurveMeasure = a.measure.parse()?;
    let grid = parse_grid(&a.grid)?;
    let rows = degradation_curve(stats, measure, a.omega, &grid, a.tail)?;
    let mut t = Table::new(vec!["acceleration", "r", "measure", "value", "n_max"]);
    for r in rows {
        t.rows.push(vec![
            Cell::Num(r.acceleration),
            Cell::Num(r.r),
            Cell::Text(r.measure.to_string()),
            Cell::Num(r.value),
            r.n_max.map_or(Cell::Empty, |n| Cell::Int(n as u64)),
        ]);
    }
    Ok(t.render(format))
}

fn measures(format: Format) -> String {
    let mut t = Table::new(vec!["measure", "applies_to", "basis"]);
    for e in registry::REGISTRY {
        t.rows.push(vec![Cell::Text(e.name.into()), Cell::Text(e.shape.describe().into()), Cell::Text(e.basis.to_string())]);
    }
    t.render(format)
}

fn init_threads() {
    if let Some(n) = std::env::var("QCOHERE_THREADS").ok().and_then(|s| s.parse::<usize>().ok()).filter(|&n| n > 0) {
        // a second initialization only happens in tests; the first pool wins
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads();
    let table_default = Format::Csv;
    let result = match &cli.command {
        Command::Compute(a) => compute(a, cli.format.unwrap_or(Format::Json)),
        Command::Sweep(a) => sweep(a, cli.format.unwrap_or(table_default)),
        Command::Verify(a) => verify(a, cli.seed, cli.format.unwrap_or(table_default)),
        Command::Haar(a) => haar(a, cli.seed, cli.format.unwrap_or(Format::Json)),
        Command::Curve(a) => curve(a, cli.format.unwrap_or(table_default)),
        Command::Measures => Ok(measures(cli.format.unwrap_or(table_default))),
    };
    let result = result.and_then(|text| emit(&text, cli.out.as_deref()).map_err(Failure::from));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Verify(cases) => eprintln!("verification failed: {cases}"),
                Failure::Lib(e) => eprintln!("error: {e}"),
                Failure::Io(e) => eprintln!("error: {e}"),
            }
            ExitCode::from(f.code())
        }
    }
}
