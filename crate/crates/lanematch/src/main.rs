//! Command-line harness: run single experiments, parameter sweeps,
//! oracle verification, and fixture generation.

use std::fs::File;
use std::io::{Read as _, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use lanematch::error::Error;
use lanematch::gen;
use lanematch::graph::Graph;
use lanematch::metrics::{emit_report, ReportFormat};
use lanematch::ordering::{generate_order, MatchingOrder};
use lanematch::runner::{self, mem_budget_from_env, RunConfig, SweepAxis, DEFAULT_MEM_BUDGET};
use lanematch::scheduler::EngineKind;
use lanematch::workload::{random_query, relabel_zipf, QueryGraph};

/// Exit codes: 0 success, 2 input error, 3 timeout, 4 memory cap exceeded.
const EXIT_INPUT: u8 = 2;
const EXIT_TIMEOUT: u8 = 3;
const EXIT_MEMCAP: u8 = 4;

#[derive(Parser)]
#[command(name = "lanematch", version, about = "Multicore subgraph-matching engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one matching experiment and emit a report.
    Run(RunArgs),
    /// Run a parameter sweep (one run per axis value) and emit merged CSV.
    Sweep(SweepArgs),
    /// Diff both engines against the brute-force oracle on seeded instances.
    Verify(VerifyArgs),
    /// Generate random connected query graphs from a data graph.
    GenQuery(GenQueryArgs),
    /// Generate a synthetic data graph fixture.
    Gen(GenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Coarse,
    Fine,
}

#[derive(Clone, Copy, ValueEnum)]
enum OnOff {
    On,
    Off,
}

impl OnOff {
    fn as_bool(self) -> bool {
        matches!(self, OnOff::On)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportArg {
    Json,
    Csv,
}

#[derive(Args)]
struct InstanceArgs {
    /// Data graph: text edge list, or binary (sniffed by magic).
    #[arg(long)]
    data: PathBuf,
    /// Optional label file for a text data graph ("v label" lines).
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Query graph in text edge-list format.
    #[arg(long)]
    query: PathBuf,
    /// Optional label file for the query graph.
    #[arg(long)]
    query_labels: Option<PathBuf>,
    /// Matching order: "auto" or "file:<path>" (whitespace-separated ids).
    #[arg(long, default_value = "auto")]
    order: String,
}

#[derive(Args)]
struct EngineArgs {
    /// Execution model.
    #[arg(long, value_enum, default_value = "fine")]
    engine: EngineArg,
    /// Loop-unrolling factor of the coarse engine.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(usize))]
    unroll: usize,
    /// Emulated lane width of the fine engine.
    #[arg(long, default_value_t = 32)]
    lane_width: usize,
    /// Initialization-pool threshold.
    #[arg(long, default_value_t = 1_000_000)]
    tau: usize,
    /// Work stealing between fine-engine workers.
    #[arg(long, value_enum, default_value = "on")]
    steal: OnOff,
    /// Worker thread count (0 = hardware parallelism).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Label+degree candidate filter.
    #[arg(long, value_enum, default_value = "on")]
    filter: OnOff,
    /// Seed echoed into the report (runs themselves are deterministic).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output mode: "count" or "list:<path>".
    #[arg(long, default_value = "count")]
    mode: String,
    /// Cooperative timeout in seconds (0 disables).
    #[arg(long, default_value_t = 60)]
    timeout: u64,
    /// Memory budget in bytes (env LANEMATCH_MEM_BUDGET overrides default).
    #[arg(long)]
    mem_budget: Option<u64>,
    /// Record the full batch-event stream (volume!).
    #[arg(long, value_enum, default_value = "off")]
    events: OnOff,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    engine: EngineArgs,
    /// Report format.
    #[arg(long, value_enum, default_value = "json")]
    report: ReportArg,
    /// Write the report here instead of stdout.
    #[arg(long)]
    report_path: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    Tau,
    Sigma,
    Workers,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    engine: EngineArgs,
    /// Swept parameter.
    #[arg(long, value_enum)]
    axis: AxisArg,
    /// Comma-separated axis values.
    #[arg(long, value_delimiter = ',')]
    values: Vec<usize>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    report_path: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Number of seeded instances.
    #[arg(long, default_value_t = 100)]
    instances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    workers: usize,
}

#[derive(Args)]
struct GenQueryArgs {
    /// Data graph to sample from.
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Query vertex count.
    #[arg(long)]
    size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// How many queries to emit.
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Output prefix; files are <prefix><i>.txt (+ .labels when labeled).
    /// Omit to print a single query to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Rmat,
    Er,
    Star,
    Powerlaw,
}

#[derive(Clone, Copy, ValueEnum)]
enum FileFormat {
    Text,
    Binary,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: GenKind,
    /// Vertex count.
    #[arg(long)]
    n: usize,
    /// Edge samples (rmat only).
    #[arg(long, default_value_t = 0)]
    m: usize,
    /// Edge probability (er only).
    #[arg(long, default_value_t = 0.0)]
    p: f64,
    /// Attachment degree (powerlaw only).
    #[arg(long, default_value_t = 2)]
    attach: usize,
    /// Quadrant probabilities a,b,c,d (rmat only).
    #[arg(long, value_delimiter = ',', default_value = "0.57,0.19,0.19,0.05")]
    probs: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Zipf label count (1 = unlabeled).
    #[arg(long, default_value_t = 1)]
    label_sigma: u32,
    /// Zipf skew (0 = uniform).
    #[arg(long, default_value_t = 0.0)]
    label_alpha: f64,
    #[arg(long, value_enum, default_value = "binary")]
    format: FileFormat,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Verify(args) => cmd_verify(args),
        Command::GenQuery(args) => cmd_gen_query(args),
        Command::Gen(args) => cmd_gen(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Timeout => EXIT_TIMEOUT,
                Error::MemoryCap { .. } => EXIT_MEMCAP,
                _ => EXIT_INPUT,
            })
        }
    }
}

/// Loads a data graph, sniffing the binary magic first.
fn load_data_graph(path: &Path, labels: Option<&Path>) -> Result<Graph, Error> {
    let mut magic = [0u8; 4];
    let is_binary = File::open(path)?
        .read_exact(&mut magic)
        .map(|_| &magic == b"GMG1")
        .unwrap_or(false);
    if is_binary {
        if labels.is_some() {
            return Err(Error::InvalidParam(
                "binary graphs carry labels; --labels not allowed".into(),
            ));
        }
        Graph::load_binary(path)
    } else {
        Ok(Graph::load_text(path, labels)?.0)
    }
}

fn load_order(spec: &str, q: &QueryGraph) -> Result<MatchingOrder, Error> {
    if spec == "auto" {
        return Ok(generate_order(q));
    }
    let Some(path) = spec.strip_prefix("file:") else {
        return Err(Error::InvalidParam(format!(
            "--order must be \"auto\" or \"file:<path>\", got {spec:?}"
        )));
    };
    let text = std::fs::read_to_string(path)?;
    let phi: Vec<u32> = text
        .split_whitespace()
        .map(|t| {
            t.parse::<u32>()
                .map_err(|e| Error::InvalidParam(format!("bad order entry {t:?}: {e}")))
        })
        .collect::<Result<_, _>>()?;
    MatchingOrder::from_permutation(q, phi)
}

struct ParsedMode {
    collect: bool,
    list_path: Option<PathBuf>,
}

fn parse_mode(mode: &str) -> Result<ParsedMode, Error> {
    if mode == "count" {
        return Ok(ParsedMode {
            collect: false,
            list_path: None,
        });
    }
    if let Some(path) = mode.strip_prefix("list:") {
        return Ok(ParsedMode {
            collect: true,
            list_path: Some(PathBuf::from(path)),
        });
    }
    Err(Error::InvalidParam(format!(
        "--mode must be \"count\" or \"list:<path>\", got {mode:?}"
    )))
}

fn build_config(args: &EngineArgs, collect: bool) -> RunConfig {
    let workers = if args.workers == 0 {
        std::thread::available_parallelism().map_or(1, |p| p.get())
    } else {
        args.workers
    };
    RunConfig {
        engine: match args.engine {
            EngineArg::Coarse => EngineKind::Coarse,
            EngineArg::Fine => EngineKind::Fine,
        },
        w: args.lane_width,
        sigma: args.unroll,
        tau: args.tau,
        workers,
        steal: args.steal.as_bool(),
        filter: args.filter.as_bool(),
        seed: args.seed,
        collect,
        record_events: args.events.as_bool(),
        timeout: (args.timeout > 0).then(|| Duration::from_secs(args.timeout)),
        mem_budget: args
            .mem_budget
            .or_else(mem_budget_from_env)
            .unwrap_or(DEFAULT_MEM_BUDGET),
    }
}

fn load_instance(args: &InstanceArgs) -> Result<(Graph, QueryGraph, MatchingOrder), Error> {
    let g = load_data_graph(&args.data, args.labels.as_deref())?;
    let q = QueryGraph::load_text(&args.query, args.query_labels.as_deref())?;
    let order = load_order(&args.order, &q)?;
    Ok((g, q, order))
}

fn write_or_print(path: Option<&Path>, content: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<ExitCode, Error> {
    let (g, q, order) = load_instance(&args.instance)?;
    let mode = parse_mode(&args.engine.mode)?;
    let cfg = build_config(&args.engine, mode.collect);
    let out = runner::run(&g, &q, &order, &cfg)?;

    if let (Some(path), Some(matches)) = (&mode.list_path, &out.matches) {
        let mut f = File::create(path)?;
        for m in matches {
            let line: Vec<String> = m
                .iter()
                .enumerate()
                .map(|(pos, &v)| format!("{}\u{2192}{}", order.phi[pos], g.external_id(v)))
                .collect();
            writeln!(f, "{}", line.join(" "))?;
        }
    }

    let format = match args.report {
        ReportArg::Json => ReportFormat::Json,
        ReportArg::Csv => ReportFormat::Csv,
    };
    let mut text = emit_report(&out.report, format);
    if format == ReportFormat::Json {
        text.push('\n');
    }
    write_or_print(args.report_path.as_deref(), &text)?;

    if out.report.timed_out {
        eprintln!("warning: search timed out; report is partial");
        return Ok(ExitCode::from(EXIT_TIMEOUT));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(args: SweepArgs) -> Result<ExitCode, Error> {
    let (g, q, order) = load_instance(&args.instance)?;
    let mode = parse_mode(&args.engine.mode)?;
    let base = build_config(&args.engine, mode.collect);
    let axis = match args.axis {
        AxisArg::Tau => SweepAxis::Tau,
        AxisArg::Sigma => SweepAxis::Sigma,
        AxisArg::Workers => SweepAxis::Workers,
    };
    if args.values.is_empty() {
        return Err(Error::InvalidParam("--values must be nonempty".into()));
    }
    let csv = runner::sweep(&g, &q, &order, &base, axis, &args.values);
    write_or_print(args.report_path.as_deref(), &csv)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, Error> {
    let summary = runner::verify(args.instances, args.seed, args.workers.max(1));
    println!(
        "verified {} instances, {} mismatches",
        summary.instances,
        summary.mismatches.len()
    );
    for m in &summary.mismatches {
        println!("MISMATCH {m}");
    }
    if summary.mismatches.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(EXIT_INPUT))
    }
}

fn cmd_gen_query(args: GenQueryArgs) -> Result<ExitCode, Error> {
    let g = load_data_graph(&args.data, args.labels.as_deref())?;
    if args.count == 0 {
        return Err(Error::InvalidParam("--count must be >= 1".into()));
    }
    for i in 0..args.count {
        let q = random_query(&g, args.size, args.seed + i as u64)?;
        match &args.out {
            None => {
                if args.count > 1 {
                    return Err(Error::InvalidParam(
                        "--out is required when --count > 1".into(),
                    ));
                }
                print!("{}", q.to_text());
                if let Some(labels) = q.labels_to_text() {
                    eprintln!("# labels (write with --out to get a .labels file):");
                    print!("{labels}");
                }
            }
            Some(prefix) => {
                let path = PathBuf::from(format!("{}{}.txt", prefix.display(), i));
                std::fs::write(&path, q.to_text())?;
                if let Some(labels) = q.labels_to_text() {
                    let lp = PathBuf::from(format!("{}{}.labels", prefix.display(), i));
                    std::fs::write(&lp, labels)?;
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode, Error> {
    let g = match args.kind {
        GenKind::Er => gen::er(args.n, args.p, args.seed),
        GenKind::Star => gen::star(args.n),
        GenKind::Rmat => {
            if args.probs.len() != 4 {
                return Err(Error::InvalidParam(
                    "--probs needs exactly four values".into(),
                ));
            }
            gen::rmat(
                args.n,
                args.m,
                (args.probs[0], args.probs[1], args.probs[2], args.probs[3]),
                args.seed,
            )?
        }
        GenKind::Powerlaw => gen::powerlaw(args.n, args.attach, args.seed)?,
    };
    let g = if args.label_sigma > 1 {
        relabel_zipf(&g, args.label_sigma, args.label_alpha, args.seed ^ 0x5eed)
    } else {
        g
    };
    match args.format {
        FileFormat::Binary => g.save_binary(&args.out)?,
        FileFormat::Text => {
            let mut f = File::create(&args.out)?;
            writeln!(f, "{}", g.n())?;
            for u in 0..g.n() as u32 {
                for &v in g.neighbor_slice(u) {
                    if u < v {
                        writeln!(f, "{u} {v}")?;
                    }
                }
            }
            if g.label_count() > 1 {
                let mut lf = File::create(args.out.with_extension("labels"))?;
                for v in 0..g.n() as u32 {
                    writeln!(lf, "{v} {}", g.label(v))?;
                }
            }
        }
    }
    eprintln!(
        "generated n={} arcs={} d_max={} labels={}",
        g.n(),
        g.arc_count(),
        g.d_max(),
        g.label_count()
    );
    Ok(ExitCode::SUCCESS)
}
