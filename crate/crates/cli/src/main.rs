//! `pebble`: build, search, check and cost spooky pebbling schedules.
//!
//! Exit codes: 0 success, 1 I/O or parse failure, 2 bad flags or input,
//! 3 no schedule fits the budget, 4 node cap reached, 5 invalid schedule.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use spooky_core::estimator::{estimate, EstimateError, EstimatorParams, Strategy, ROOT_HERMITE};
use spooky_core::format::{parse, serialize_pretty};
use spooky_core::report::{render_costs, Format};
use spooky_core::search::{astar_search, SearchError, SearchParams, TieBreak, DEFAULT_NODE_CAP};
use spooky_core::{construct, replay, validate, Variant, WeightProfile};

#[derive(Parser)]
#[command(name = "pebble", version, about = "Parallel spooky pebble games on the line graph")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal-depth schedule from the recursive construction.
    Construct(ConstructArgs),
    /// Exact minimum-depth schedule for a pebble budget.
    Search(SearchArgs),
    /// Replay a schedule file and print its validation report as JSON.
    Validate(ValidateArgs),
    /// Factoring cost estimate, one row per configuration.
    Estimate(EstimateArgs),
    /// Per-step space and cost of a schedule file.
    Metrics(MetricsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Plain,
    #[value(name = "measured_target", alias = "measured-target")]
    MeasuredTarget,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Plain => Variant::Plain,
            VariantArg::MeasuredTarget => Variant::MeasuredTarget,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TieBreakArg {
    None,
    #[value(name = "min_total_ops", alias = "min-total-ops")]
    MinTotalOps,
}

impl From<TieBreakArg> for TieBreak {
    fn from(t: TieBreakArg) -> Self {
        match t {
            TieBreakArg::None => TieBreak::None,
            TieBreakArg::MinTotalOps => TieBreak::MinTotalOps,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Text,
    Json,
    Csv,
    Md,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    length: u64,
    #[arg(long, value_enum, default_value = "plain")]
    variant: VariantArg,
    /// Write the schedule here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: OutFormat,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    length: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pebbles: u64,
    /// Weight profile JSON; unit weights when absent.
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Weighted space bound as `p/q`; defaults to the pebble count.
    #[arg(long)]
    space_cap: Option<Rational64>,
    #[arg(long, value_enum, default_value = "plain")]
    variant: VariantArg,
    #[arg(long, value_enum, default_value = "min_total_ops")]
    tie_break: TieBreakArg,
    #[arg(long, env = "PEBBLE_NODE_CAP", default_value_t = DEFAULT_NODE_CAP)]
    node_cap: usize,
    /// Worker hint; results do not depend on it.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: OutFormat,
}

#[derive(Args)]
struct ValidateArgs {
    file: PathBuf,
    #[arg(long)]
    weights: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    /// Modulus bit lengths, comma separated.
    #[arg(long = "n", value_delimiter = ',', required = true)]
    n: Vec<u32>,
    #[arg(long, value_delimiter = ',', required = true)]
    beta: Vec<u32>,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..16))]
    window: u32,
    #[arg(long, value_delimiter = ',', required = true)]
    pebbles: Vec<usize>,
    #[arg(long, default_value = "construction")]
    strategy: Strategy,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutFormat,
    /// Transient ancilla weight as `p/q`.
    #[arg(long, default_value = "1")]
    tau: Rational64,
    /// Drop the lower-order terms of the log D bound.
    #[arg(long)]
    no_lower_order: bool,
    #[arg(long, value_enum, default_value = "none")]
    tie_break: TieBreakArg,
    #[arg(long, env = "PEBBLE_NODE_CAP", default_value_t = DEFAULT_NODE_CAP)]
    node_cap: usize,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args)]
struct MetricsArgs {
    file: PathBuf,
    #[arg(long)]
    weights: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutFormat,
}

/// An error with the exit code it maps to.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

fn with_code<E: Into<anyhow::Error>>(code: u8) -> impl FnOnce(E) -> Failure {
    move |e| Failure { code, err: e.into() }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(with_code(1))
}

fn write(path: &Path, text: &str) -> Outcome {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display())).map_err(with_code(1))
}

fn load_weights(path: Option<&Path>) -> Result<WeightProfile, Failure> {
    match path {
        None => Ok(WeightProfile::unit()),
        Some(p) => WeightProfile::from_json(&read(p)?)
            .map_err(|e| anyhow!("{}: {e}", p.display()))
            .map_err(with_code(1)),
    }
}

fn cmd_construct(a: ConstructArgs) -> Outcome {
    let trace = construct(a.length as usize, a.variant.into());
    let report = validate(&trace.schedule, &WeightProfile::unit());
    if let Some(out) = &a.out {
        write(out, &serialize_pretty(&trace.schedule))?;
    }
    match a.format {
        OutFormat::Json => println!("{}", serde_json::to_string(&report).expect("report serializes")),
        _ => println!("depth={} space={} cost={}", report.depth, report.space, report.cost),
    }
    Ok(())
}

fn search_code(e: &SearchError) -> u8 {
    match e {
        SearchError::Infeasible => 3,
        SearchError::MemoryLimit(_) => 4,
        SearchError::LimitExceeded | SearchError::InvalidInput(_) => 2,
    }
}

fn cmd_search(a: SearchArgs) -> Outcome {
    let weights = load_weights(a.weights.as_deref())?;
    let mut p = SearchParams::new(a.length as usize, a.pebbles as usize, a.variant.into())
        .weights(weights)
        .tie_break(a.tie_break.into())
        .node_cap(a.node_cap)
        .threads(a.threads);
    if let Some(cap) = a.space_cap {
        p = p.space_cap(cap);
    }
    let r = astar_search(&p).map_err(|e| Failure { code: search_code(&e), err: e.into() })?;
    if let Some(out) = &a.out {
        write(out, &serialize_pretty(&r.schedule))?;
    }
    match a.format {
        OutFormat::Json => println!("{}", serde_json::to_string(&r).expect("result serializes")),
        _ => println!(
            "depth={} total_ops={} expanded={} stored={}",
            r.optimal_depth, r.total_ops, r.expanded_nodes, r.stored_nodes
        ),
    }
    Ok(())
}

fn cmd_validate(a: ValidateArgs) -> Outcome {
    let weights = load_weights(a.weights.as_deref())?;
    let text = read(&a.file)?;
    let schedule = parse(&text).map_err(|e| anyhow!("{}: {e}", a.file.display())).map_err(with_code(1))?;
    let report = validate(&schedule, &weights);
    println!("{}", serde_json::to_string(&report).expect("report serializes"));
    if report.valid {
        Ok(())
    } else {
        let f = report.failure.as_ref().expect("invalid report carries a failure");
        Err(Failure { code: 5, err: anyhow!("invalid at step {}: {}", f.step, f.reason) })
    }
}

fn cmd_estimate(a: EstimateArgs) -> Outcome {
    for &beta in &a.beta {
        if !ROOT_HERMITE.iter().any(|(b, _)| *b == beta) {
            let known: Vec<String> = ROOT_HERMITE.iter().map(|(b, _)| b.to_string()).collect();
            return Err(Failure {
                code: 2,
                err: anyhow!("beta {beta} not tabulated (known: {})", known.join(", ")),
            });
        }
    }
    let mut rows = Vec::new();
    for &n in &a.n {
        for &beta in &a.beta {
            for &s in &a.pebbles {
                let mut p = EstimatorParams::new(n, beta, a.window, s);
                p.tau = a.tau;
                p.include_lower_order = !a.no_lower_order;
                p.tie_break = a.tie_break.into();
                p.node_cap = a.node_cap;
                let r = estimate(&p, a.strategy).map_err(|e| {
                    let code = match &e {
                        EstimateError::Search(se) => search_code(se),
                        _ => 2,
                    };
                    Failure { code, err: anyhow!("n={n} beta={beta} s={s}: {e}") }
                })?;
                if r.exceeds_budget {
                    eprintln!("note: n={n} beta={beta}: construction needs more than {s} pebbles");
                }
                rows.push(r);
            }
        }
    }
    let format = match a.format {
        OutFormat::Csv => Format::Csv,
        OutFormat::Json => Format::Json,
        OutFormat::Md | OutFormat::Text => Format::Markdown,
    };
    print!("{}", render_costs(&rows, format));
    Ok(())
}

fn cmd_metrics(a: MetricsArgs) -> Outcome {
    let weights = load_weights(a.weights.as_deref())?;
    let text = read(&a.file)?;
    let schedule = parse(&text).map_err(|e| anyhow!("{}: {e}", a.file.display())).map_err(with_code(1))?;
    let steps = replay(&schedule, &weights)
        .map_err(|f| Failure { code: 5, err: anyhow!("invalid at step {}: {}", f.step, f.reason) })?;
    match a.format {
        OutFormat::Json => println!("{}", serde_json::to_string(&steps).expect("metrics serialize")),
        _ => {
            println!("step,space,weighted_space,cost");
            for (t, m) in steps.iter().enumerate() {
                println!("{},{},{},{}", t + 1, m.space, m.weighted_space, m.cost);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.cmd {
        Command::Construct(a) => cmd_construct(a),
        Command::Search(a) => cmd_search(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Metrics(a) => cmd_metrics(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}
