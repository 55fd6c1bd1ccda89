use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use chunklab::dynamics::{AlphaMode, NegativeRule};
use chunklab::harness::{
    default_grid, export_map, fit_map, report_tables, run_bench, run_experiment, run_sweep,
    ExperimentConfig, ExperimentReport, ExportFormat, Method, DEFAULT_STEPS_PER_TASK,
};
use chunklab::problems::{load_graph, ProblemId};
use chunklab::{Error, Result};

#[derive(Parser)]
#[command(name = "chunklab", version, about = "SyncMap chunking benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one method on one problem and write a JSON report.
    Run(RunArgs),
    /// Run the SyncMap parameter grid over several problems.
    Sweep(SweepArgs),
    /// Time methods on identical inputs.
    Bench(BenchArgs),
    /// Train one map and export it as CSV or SVG.
    ExportMap(ExportArgs),
    /// Check a graph file and print a summary.
    ValidateGraph { file: PathBuf },
    /// Build comparison tables from saved reports.
    Compare {
        reports: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Encoder timesteps per task.
    #[arg(long, default_value_t = DEFAULT_STEPS_PER_TASK)]
    steps: usize,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, value_enum)]
    alpha_mode: Option<ModeArg>,
    #[arg(long)]
    dims: Option<usize>,
    #[arg(long)]
    radius: Option<f64>,
    /// DBSCAN neighbourhood radius.
    #[arg(long)]
    eps: Option<f64>,
    /// DBSCAN minimum points, counting the point itself.
    #[arg(long)]
    min_cluster_size: Option<usize>,
    #[arg(long, value_enum)]
    negative_rule: Option<RuleArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Fixed,
    Out,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    Eq8,
    Attract,
    Dipole,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Svg,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    problem: String,
    #[arg(long, default_value = "syncmap")]
    method: String,
    #[arg(long, default_value_t = 30)]
    trials: usize,
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated problem ids.
    #[arg(long, value_delimiter = ',', required = true)]
    problems: Vec<String>,
    #[arg(long, default_value_t = 30)]
    trials: usize,
    #[command(flatten)]
    common: Common,
    /// Output directory; created if missing.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "syncmap,parser")]
    methods: Vec<String>,
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[arg(long, default_value = "fixed_chunks")]
    problem: String,
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    problem: String,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    out: PathBuf,
}

fn config(problem: &str, method: Method, trials: usize, c: &Common) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::new(problem.parse()?, method);
    cfg.trials = trials;
    cfg.seed = c.seed;
    cfg.steps_per_task = c.steps;
    let d = &mut cfg.dynamics;
    if let Some(a) = c.alpha {
        d.alpha = a;
    }
    if let Some(m) = c.alpha_mode {
        d.alpha_mode = match m {
            ModeArg::Fixed => AlphaMode::Fixed,
            ModeArg::Out => AlphaMode::ScaledByN,
        };
    }
    if let Some(k) = c.dims {
        d.dims = k;
    }
    if let Some(r) = c.radius {
        d.radius = r;
    }
    if let Some(r) = c.negative_rule {
        d.negative_rule = match r {
            RuleArg::Eq8 => NegativeRule::Eq8Literal,
            RuleArg::Attract => NegativeRule::AttractCn,
            RuleArg::Dipole => NegativeRule::Dipole,
        };
    }
    if let Some(e) = c.eps {
        cfg.clustering.eps = e;
    }
    if let Some(m) = c.min_cluster_size {
        cfg.clustering.min_cluster_size = m;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn summary_line(r: &ExperimentReport) -> String {
    let cells: Vec<String> = (0..r.n_tasks())
        .map(|t| match r.summary(t) {
            Some(s) => format!("{:.2}±{:.2}", s.mean, s.std),
            None => "n/a".into(),
        })
        .collect();
    format!("{} on {}: {}", r.label, r.config.problem, cells.join("  "))
}

fn run(args: RunArgs) -> Result<()> {
    let cfg = config(&args.problem, args.method.parse()?, args.trials, &args.common)?;
    let report = run_experiment(&cfg)?;
    write(&args.out, &report.to_json()?)?;
    println!("{}", summary_line(&report));
    println!("report: {}  hash: {}", args.out.display(), report.determinism_hash);
    if report.failed_trials > 0 {
        for t in report.trials.iter().filter(|t| !t.ok()) {
            eprintln!("trial {}: {}", t.trial, t.error.as_deref().unwrap_or_default());
        }
        return Err(Error::Config(format!(
            "{} of {} trials failed",
            report.failed_trials, cfg.trials
        )));
    }
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<()> {
    let problems = args
        .problems
        .iter()
        .map(|p| p.parse())
        .collect::<Result<Vec<ProblemId>>>()?;
    let base = config(&problems[0].to_string(), Method::Syncmap, args.trials, &args.common)?;
    let report = run_sweep(&base, &problems, &default_grid())?;
    let text = report.to_text();
    write(&args.out.join("sweep.json"), &serde_json::to_string_pretty(&report)?)?;
    write(&args.out.join("sweep.txt"), &text)?;
    print!("{text}");
    let failed = report.entries.iter().filter(|e| e.error.is_some()).count();
    if failed > 0 {
        for e in report.entries.iter().filter(|e| e.error.is_some()) {
            eprintln!("{:?} on {}: {}", e.cell, e.problem, e.error.as_deref().unwrap_or_default());
        }
        return Err(Error::Config(format!("{failed} sweep cells failed")));
    }
    Ok(())
}

fn bench(args: BenchArgs) -> Result<()> {
    let methods = args
        .methods
        .iter()
        .map(|m| m.parse())
        .collect::<Result<Vec<Method>>>()?;
    let base = config(&args.problem, Method::Syncmap, args.trials, &args.common)?;
    let report = run_bench(&base, &methods)?;
    print!("{}", report.to_text());
    if let Some(out) = &args.out {
        write(out, &serde_json::to_string_pretty(&report)?)?;
    }
    Ok(())
}

fn export(args: ExportArgs) -> Result<()> {
    let cfg = config(&args.problem, Method::Syncmap, 1, &args.common)?;
    let fitted = fit_map(&cfg)?;
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    let format = match args.format {
        FormatArg::Csv => ExportFormat::Csv,
        FormatArg::Svg => ExportFormat::Svg,
    };
    export_map(&fitted, format, &args.out)?;
    println!(
        "{} states, {} clusters, {} noise -> {}",
        fitted.states.len(),
        fitted.assignment.n_clusters(),
        fitted.assignment.noise_count(),
        args.out.display()
    );
    Ok(())
}

fn validate_graph(file: &Path) -> Result<()> {
    let g = load_graph(file)?;
    let edges: usize = (0..g.n_states()).map(|s| g.row(s).len()).sum();
    let chunks = g.chunk_labels.iter().max().map_or(0, |m| m + 1);
    println!(
        "{}: {} states, {} edges, {} chunks, {} deterministic chains",
        file.display(),
        g.n_states(),
        edges,
        chunks,
        g.deterministic_chains().len()
    );
    match g.check_communities() {
        Ok(()) => println!("community condition holds for every probabilistic state"),
        Err(e) => println!("note: {e}"),
    }
    Ok(())
}

fn compare(reports: &[PathBuf], out: Option<&Path>) -> Result<()> {
    let loaded = reports
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p).map_err(|e| io_err(p, e))?;
            Ok(serde_json::from_str::<ExperimentReport>(&text)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let comparison = report_tables(&loaded)?;
    print!("{}", comparison.to_text());
    if let Some(out) = out {
        write(out, &serde_json::to_string_pretty(&comparison)?)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Sweep(a) => sweep(a),
        Command::Bench(a) => bench(a),
        Command::ExportMap(a) => export(a),
        Command::ValidateGraph { file } => validate_graph(&file),
        Command::Compare { reports, out } => compare(&reports, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
