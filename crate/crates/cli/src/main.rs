mod config;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fvc_core::fvc::{AlphaMode, LimiterKind};
use fvc_core::harness::{
    builtin_benchmarks, convergence_study, emit_artifacts, find_benchmark, least_squares_rate, run_benchmark,
    timing_study, Artifacts, Benchmark, RunResult, TABLE_GRIDS,
};
use fvc_core::{SchemeConfig, SchemeKind};

use config::{manifest, resolve, ConfigFile, RunSpec};

const EXIT_USAGE: u8 = 2;
const EXIT_VALIDATION: u8 = 3;
const EXIT_SOLVER: u8 = 4;
const EXIT_IO: u8 = 5;

const TIMING_GRIDS: [usize; 2] = [1600, 3200];

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Validation(String),
    Solver(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Solver(_) => EXIT_SOLVER,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Solver(m) => write!(f, "solver failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<fvc_core::Error> for CliError {
    fn from(e: fvc_core::Error) -> Self {
        use fvc_core::Error as E;
        match e {
            E::Io { .. } => CliError::Io(e.to_string()),
            E::Config(_) | E::Domain { .. } | E::LengthMismatch { .. } => CliError::Validation(e.to_string()),
            _ => CliError::Solver(e.to_string()),
        }
    }
}

/// Benchmarks for the 1D Euler equations: the finite volume
/// characteristics scheme next to Rusanov, HLL and Roe.
#[derive(Debug, Parser)]
#[command(name = "fvc", version, arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one benchmark with one scheme and write its profiles.
    Run(RunArgs),
    /// Reproduce the error table, the timing table or every figure.
    Campaign(CampaignArgs),
    /// List the builtin benchmarks.
    List,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Scheme: fvc, rusanov, hll or roe.
    #[arg(long, value_parser = parse_scheme)]
    scheme: Option<SchemeKind>,
    /// Number of interior cells.
    #[arg(long)]
    cells: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
#[group(id = "what", required = true, multiple = false, args = ["table1", "table2", "all_figures"])]
struct CampaignArgs {
    /// L1 density errors and convergence rates over the six grids.
    #[arg(long)]
    table1: bool,
    /// Median wall time per scheme at 1600 and 3200 cells.
    #[arg(long)]
    table2: bool,
    /// Every figure run with its gnuplot script.
    #[arg(long)]
    all_figures: bool,
    /// Comma-separated grid levels for the tables.
    #[arg(long, value_delimiter = ',')]
    grids: Option<Vec<usize>>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Config file with [problem], [mesh], [scheme] and [output] sections.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Builtin benchmark name (see `fvc list`).
    #[arg(long, value_parser = parse_test)]
    test: Option<String>,
    /// Courant number.
    #[arg(long)]
    cfl: Option<f64>,
    /// FVC control parameter: adaptive or fixed:<v>.
    #[arg(long, value_parser = parse_alpha)]
    alpha: Option<AlphaMode>,
    /// FVC limiter: minmod or vanalbada.
    #[arg(long, value_parser = parse_limiter)]
    limiter: Option<LimiterKind>,
    /// Ratio of specific heats.
    #[arg(long)]
    gamma: Option<f64>,
    /// End time.
    #[arg(long)]
    tend: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Concurrent runs for error campaigns.
    #[arg(long)]
    jobs: Option<usize>,
    /// Timed repetitions per scheme and grid (at least 3).
    #[arg(long)]
    repetitions: Option<usize>,
    /// Also write gnuplot scripts.
    #[arg(long)]
    plots: bool,
}

fn parse_scheme(s: &str) -> Result<SchemeKind, String> {
    s.parse().map_err(|e: fvc_core::Error| e.to_string())
}

fn parse_alpha(s: &str) -> Result<AlphaMode, String> {
    s.parse().map_err(|e: fvc_core::Error| e.to_string())
}

fn parse_limiter(s: &str) -> Result<LimiterKind, String> {
    s.parse().map_err(|e: fvc_core::Error| e.to_string())
}

fn parse_test(s: &str) -> Result<String, String> {
    find_benchmark(s).map(|b| b.name).map_err(|e| e.to_string())
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub test: Option<String>,
    pub scheme: Option<SchemeKind>,
    pub cells: Option<usize>,
    pub cfl: Option<f64>,
    pub alpha: Option<AlphaMode>,
    pub limiter: Option<LimiterKind>,
    pub gamma: Option<f64>,
    pub tend: Option<f64>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub repetitions: Option<usize>,
    pub plots: bool,
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            test: self.test.clone(),
            cfl: self.cfl,
            alpha: self.alpha,
            limiter: self.limiter,
            gamma: self.gamma,
            tend: self.tend,
            out: self.out.clone(),
            jobs: self.jobs,
            repetitions: self.repetitions,
            plots: self.plots,
            ..Overrides::default()
        }
    }

    fn spec(&self, scheme: Option<SchemeKind>, cells: Option<usize>) -> Result<RunSpec, CliError> {
        let file = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let flags = Overrides {
            scheme,
            cells,
            ..self.overrides()
        };
        resolve(&file, &flags)
    }
}

fn prepare_out(spec: &RunSpec) -> Result<(), CliError> {
    let io = |p: &Path, e: std::io::Error| CliError::Io(format!("{}: {e}", p.display()));
    std::fs::create_dir_all(&spec.out).map_err(|e| io(&spec.out, e))?;
    let path = spec.out.join("manifest.toml");
    let text = toml::to_string(&manifest(spec)).expect("manifest serializes");
    std::fs::write(&path, text).map_err(|e| io(&path, e))
}

fn report_written(out: &Path, written: &[PathBuf]) {
    eprintln!("wrote {} files to {}", written.len() + 1, out.display());
}

fn run(args: &RunArgs) -> Result<(), CliError> {
    let spec = args.common.spec(args.scheme, args.cells)?;
    prepare_out(&spec)?;
    let result = run_benchmark(&spec.benchmark, &spec.scheme, spec.cells)?;
    let artifacts = Artifacts {
        runs: vec![&result],
        plot_scripts: spec.plots,
        ..Artifacts::default()
    };
    let written = emit_artifacts(&artifacts, &spec.out)?;
    report_written(&spec.out, &written);
    if result.completed() {
        println!("{}", result.summary());
        Ok(())
    } else {
        Err(CliError::Solver(result.summary()))
    }
}

fn campaign_configs(spec: &RunSpec) -> Vec<SchemeConfig> {
    SchemeKind::ALL
        .iter()
        .map(|&kind| SchemeConfig { kind, ..spec.scheme })
        .collect()
}

fn grids(args: &CampaignArgs, default: &[usize]) -> Result<Vec<usize>, CliError> {
    let g = args.grids.clone().unwrap_or_else(|| default.to_vec());
    if g.is_empty() || g.contains(&0) {
        return Err(CliError::Validation("grid levels must be positive".into()));
    }
    Ok(g)
}

/// Every figure run: each benchmark with every scheme, plus the sod
/// variants with fixed alpha and without the entropy fix.
fn figure_runs() -> Vec<(Benchmark, SchemeConfig)> {
    let mut runs = Vec::new();
    for b in builtin_benchmarks() {
        for kind in SchemeKind::ALL {
            runs.push((b.clone(), b.scheme(kind)));
        }
        if b.name == "sod_sonic" {
            for a in [0.5, 1.0] {
                let cfg = SchemeConfig {
                    alpha_mode: AlphaMode::Fixed(a),
                    ..b.scheme(SchemeKind::Fvc)
                };
                runs.push((b.clone(), cfg));
            }
            let cfg = SchemeConfig {
                roe_epsilon: 0.0,
                ..b.scheme(SchemeKind::Roe)
            };
            runs.push((b.clone(), cfg));
        }
    }
    runs
}

fn campaign(args: &CampaignArgs) -> Result<(), CliError> {
    let spec = args.common.spec(None, None)?;
    prepare_out(&spec)?;
    let b = &spec.benchmark;
    if args.table1 {
        let grids = grids(args, &TABLE_GRIDS)?;
        eprintln!("error study on {} over {grids:?} with {} jobs", b.name, spec.jobs);
        let c = convergence_study(b, &campaign_configs(&spec), &grids, spec.jobs)?;
        for col in &c.columns {
            let e = col.density_errors();
            let cells: Vec<String> = e.iter().map(|x| format!("{x:.6e}")).collect();
            let rate = if grids.len() > 1 {
                format!("{:.3}", least_squares_rate(&grids, &e))
            } else {
                "-".into()
            };
            println!("{:<8} L1(rho) {} rate {rate}", col.label, cells.join(" "));
            for (g, entry) in col.entries.iter().enumerate() {
                if let Some(f) = &entry.failure {
                    eprintln!("warning: {} at {} cells failed at {f}", col.label, grids[g]);
                }
            }
        }
        let written = emit_artifacts(
            &Artifacts {
                convergence: Some(&c),
                plot_scripts: spec.plots,
                ..Artifacts::default()
            },
            &spec.out,
        )?;
        report_written(&spec.out, &written);
    } else if args.table2 {
        let grids = grids(args, &TIMING_GRIDS)?;
        eprintln!(
            "timing {} over {grids:?}, {} repetitions, serial",
            b.name, spec.repetitions
        );
        let t = timing_study(b, &campaign_configs(&spec), &grids, spec.repetitions)?;
        for col in &t.columns {
            let secs: Vec<String> = col.seconds().iter().map(|s| format!("{s:.4}")).collect();
            println!("{:<8} median seconds {}", col.label, secs.join(" "));
        }
        let written = emit_artifacts(
            &Artifacts {
                timing: Some(&t),
                ..Artifacts::default()
            },
            &spec.out,
        )?;
        report_written(&spec.out, &written);
    } else {
        let mut results: Vec<RunResult> = Vec::new();
        for (bench, cfg) in figure_runs() {
            let r = run_benchmark(&bench, &cfg, bench.cells)?;
            if r.completed() {
                println!("{}", r.summary());
            } else {
                eprintln!("warning: {}", r.summary());
            }
            results.push(r);
        }
        let written = emit_artifacts(
            &Artifacts {
                runs: results.iter().collect(),
                plot_scripts: true,
                ..Artifacts::default()
            },
            &spec.out,
        )?;
        report_written(&spec.out, &written);
    }
    Ok(())
}

fn list() {
    for b in builtin_benchmarks() {
        let (l, r) = (b.left, b.right);
        println!(
            "{:<19} left ({}, {}, {}) right ({}, {}, {}) t_end {} cells {}: {}",
            b.name, l.rho, l.u, l.p, r.rho, r.u, r.p, b.t_end, b.cells, b.notes
        );
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let outcome = match &cli.command {
        Command::Run(args) => run(args),
        Command::Campaign(args) => campaign(args),
        Command::List => {
            list();
            Ok(())
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fvc: {e}");
            ExitCode::from(e.code())
        }
    }
}
