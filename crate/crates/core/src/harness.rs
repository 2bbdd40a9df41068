//! Benchmark problems, run loop, convergence and timing campaigns, and
//! CSV / gnuplot artifact output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_riemann::exact_profile;
use crate::fvc::AlphaMode;
use crate::gas_dynamics::{ConservedState, GasModel, PrimitiveState};
use crate::mesh::{init_riemann, l1_error, Field, L1Error, Mesh};
use crate::scheme::{SchemeConfig, SchemeKind, StepReport};

/// Grid levels of the convergence and timing tables.
pub const TABLE_GRIDS: [usize; 6] = [100, 200, 400, 800, 1600, 3200];

/// Hard stop for runaway runs whose time step collapses.
pub const MAX_STEPS: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Benchmark {
    pub name: String,
    pub left: PrimitiveState,
    pub right: PrimitiveState,
    pub x_min: f64,
    pub x_max: f64,
    pub x_split: f64,
    pub t_end: f64,
    pub cells: usize,
    pub courant: f64,
    /// Overrides the FVC control parameter mode for this problem.
    pub alpha_mode: Option<AlphaMode>,
    pub notes: String,
}

impl Benchmark {
    /// A two-state problem on `[0, 1]` with the default Courant number 0.8.
    pub fn riemann(
        name: &str,
        left: PrimitiveState,
        right: PrimitiveState,
        x_split: f64,
        t_end: f64,
        cells: usize,
    ) -> Result<Self> {
        let b = Benchmark {
            name: name.to_string(),
            left,
            right,
            x_min: 0.0,
            x_max: 1.0,
            x_split,
            t_end,
            cells,
            courant: 0.8,
            alpha_mode: None,
            notes: String::new(),
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        self.left.validate()?;
        self.right.validate()?;
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::Domain {
                what: "end time must be positive",
                value: self.t_end,
            });
        }
        if !(self.courant > 0.0) {
            return Err(Error::Domain {
                what: "Courant number must be positive",
                value: self.courant,
            });
        }
        Mesh::new(self.x_min, self.x_max, self.cells.max(1))?;
        if !(self.x_split > self.x_min && self.x_split < self.x_max) {
            return Err(Error::Domain {
                what: "split point must lie inside the domain",
                value: self.x_split,
            });
        }
        Ok(())
    }

    pub fn mesh(&self, cells: usize) -> Result<Mesh> {
        Mesh::new(self.x_min, self.x_max, cells)
    }

    pub fn initial_field(&self, cells: usize, gas: &GasModel) -> Result<Field> {
        init_riemann(self.mesh(cells)?, self.left, self.right, self.x_split, gas)
    }

    /// Exact solution at `t_end` on the cell centers of `mesh`.
    pub fn exact(&self, mesh: &Mesh, gas: &GasModel) -> Result<Vec<PrimitiveState>> {
        exact_profile(self.left, self.right, self.x_split, self.t_end, mesh, gas)
    }

    /// Default numerics for `kind` on this problem.
    pub fn scheme(&self, kind: SchemeKind) -> SchemeConfig {
        let mut cfg = SchemeConfig::of(kind);
        cfg.courant = self.courant;
        if let Some(mode) = self.alpha_mode {
            cfg.alpha_mode = mode;
        }
        cfg
    }
}

fn prim(rho: f64, u: f64, p: f64) -> PrimitiveState {
    PrimitiveState::new(rho, u, p)
}

/// The six shipped problems.
pub fn builtin_benchmarks() -> Vec<Benchmark> {
    let make = |name: &str, l, r, t_end, cells, notes: &str| Benchmark {
        name: name.to_string(),
        left: l,
        right: r,
        x_min: 0.0,
        x_max: 1.0,
        x_split: 0.5,
        t_end,
        cells,
        courant: 0.8,
        alpha_mode: None,
        notes: notes.to_string(),
    };
    vec![
        make(
            "sod_sonic",
            prim(1.0, 0.75, 1.0),
            prim(0.125, 0.0, 0.1),
            0.2,
            200,
            "Sod data with a left-moving inflow, so the rarefaction contains a sonic point",
        ),
        make(
            "vacuum123",
            prim(1.0, -2.0, 0.4),
            prim(1.0, 2.0, 0.4),
            0.15,
            200,
            "symmetric strong expansion (123 problem) with u = -2/+2 and p = 0.4",
        ),
        make(
            "blast_left",
            prim(1.0, 0.0, 1000.0),
            prim(1.0, 0.0, 0.01),
            0.012,
            2000,
            "left half of the blast-wave problem: strong right-moving shock",
        ),
        make(
            "blast_right",
            prim(1.0, 0.0, 0.01),
            prim(1.0, 0.0, 100.0),
            0.035,
            2000,
            "right half of the blast-wave problem: strong left-moving shock",
        ),
        make(
            "contact_stationary",
            prim(1.4, 0.0, 1.0),
            prim(1.0, 0.0, 1.0),
            2.0,
            200,
            "isolated stationary contact",
        ),
        Benchmark {
            alpha_mode: Some(AlphaMode::Fixed(0.5)),
            ..make(
                "contact_slow",
                prim(1.4, 0.1, 1.0),
                prim(1.0, 0.1, 1.0),
                2.0,
                200,
                "isolated contact moving slowly to the right; FVC runs with fixed alpha = 1/2",
            )
        },
    ]
}

pub fn find_benchmark(name: &str) -> Result<Benchmark> {
    builtin_benchmarks()
        .into_iter()
        .find(|b| b.name == name)
        .ok_or_else(|| {
            let names: Vec<String> = builtin_benchmarks().into_iter().map(|b| b.name).collect();
            Error::Config(format!(
                "unknown benchmark '{name}' (expected one of: {})",
                names.join(", ")
            ))
        })
}

#[derive(Debug)]
pub enum RunOutcome {
    Completed,
    Failed { step: u64, time: f64, cause: Error },
}

#[derive(Debug)]
pub struct RunResult {
    pub benchmark: Benchmark,
    pub config: SchemeConfig,
    pub cells: usize,
    /// Final field. After a failure it holds the partially updated state
    /// of the failing step.
    pub field: Field,
    pub outcome: RunOutcome,
    /// Minimum density and pressure over every completed step.
    pub min_rho: f64,
    pub min_p: f64,
    /// Control parameter per interface after the last step (FVC only).
    pub alpha: Option<Vec<f64>>,
    /// L1 errors against the exact solution, for completed runs.
    pub l1: Option<L1Error>,
    pub wall_seconds: f64,
    pub initial_totals: ConservedState,
    /// Time integral of boundary inflow minus outflow.
    pub boundary_transfer: ConservedState,
}

impl RunResult {
    pub fn completed(&self) -> bool {
        matches!(self.outcome, RunOutcome::Completed)
    }

    pub fn steps(&self) -> u64 {
        self.field.step
    }

    /// One-line description used by the CLI.
    pub fn summary(&self) -> String {
        let mut s = format!(
            "{} {} cells={} ",
            self.benchmark.name,
            self.config.label(),
            self.cells
        );
        match &self.outcome {
            RunOutcome::Completed => {
                let _ = write!(s, "t={} steps={}", self.field.time, self.field.step);
                if let Some(e) = &self.l1 {
                    let _ = write!(
                        s,
                        " L1(rho)={:.6e} L1(u)={:.6e} L1(p)={:.6e} L1(E)={:.6e}",
                        e.rho, e.u, e.p, e.ener
                    );
                }
            }
            RunOutcome::Failed { step, time, cause } => {
                let _ = write!(s, "FAILED at step {step} (t={time}): {cause}");
            }
        }
        s
    }
}

/// Runs `bench` to its end time, calling `observer` after every completed
/// step. Solver failures end the run with [`RunOutcome::Failed`];
/// configuration problems are returned as errors before any compute.
pub fn run_observed<F>(
    bench: &Benchmark,
    scheme: &SchemeConfig,
    cells: usize,
    mut observer: F,
) -> Result<RunResult>
where
    F: FnMut(&Field, &StepReport),
{
    bench.validate()?;
    let gas = scheme.gas()?;
    let mut solver = scheme.build()?;
    let mut field = bench.initial_field(cells, &gas)?;
    let initial_totals = field.totals();
    let mut transfer = ConservedState::ZERO;
    let mut min_rho = f64::INFINITY;
    let mut min_p = f64::INFINITY;
    let started = Instant::now();

    let mut outcome = RunOutcome::Completed;
    while field.time < bench.t_end {
        if field.step >= MAX_STEPS {
            outcome = RunOutcome::Failed {
                step: field.step,
                time: field.time,
                cause: Error::NonConvergence(MAX_STEPS as usize),
            };
            break;
        }
        let time = field.time;
        match solver.step(&mut field, bench.t_end) {
            Ok(report) => {
                let net = report.left_flux - report.right_flux;
                transfer += ConservedState::new(net.mass, net.momentum, net.energy) * report.dt;
                min_rho = min_rho.min(report.min_rho);
                min_p = min_p.min(report.min_p);
                observer(&field, &report);
            }
            Err(cause) => {
                outcome = RunOutcome::Failed {
                    step: field.step + 1,
                    time,
                    cause,
                };
                break;
            }
        }
    }
    let wall_seconds = started.elapsed().as_secs_f64();

    let l1 = match outcome {
        RunOutcome::Completed => {
            let exact = bench.exact(field.mesh(), &gas)?;
            l1_error(&field, &exact, &gas).ok()
        }
        RunOutcome::Failed { .. } => None,
    };
    Ok(RunResult {
        benchmark: bench.clone(),
        config: *scheme,
        cells,
        alpha: solver.alpha().map(<[f64]>::to_vec),
        field,
        outcome,
        min_rho,
        min_p,
        l1,
        wall_seconds,
        initial_totals,
        boundary_transfer: transfer,
    })
}

pub fn run_benchmark(bench: &Benchmark, scheme: &SchemeConfig, cells: usize) -> Result<RunResult> {
    run_observed(bench, scheme, cells, |_, _| {})
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignEntry {
    pub cells: usize,
    pub l1: Option<L1Error>,
    pub steps: u64,
    /// Wall time; the median over repetitions for timing studies.
    pub seconds: f64,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignColumn {
    pub label: String,
    pub config: SchemeConfig,
    pub entries: Vec<CampaignEntry>,
}

impl CampaignColumn {
    /// Density L1 error per grid; NaN for failed runs.
    pub fn density_errors(&self) -> Vec<f64> {
        self.entries
            .iter()
            .map(|e| e.l1.map_or(f64::NAN, |l| l.rho))
            .collect()
    }

    pub fn seconds(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.seconds).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignResult {
    pub benchmark: String,
    pub grids: Vec<usize>,
    pub columns: Vec<CampaignColumn>,
    pub repetitions: usize,
    pub environment: Option<String>,
}

impl CampaignResult {
    pub fn column(&self, label: &str) -> Option<&CampaignColumn> {
        self.columns.iter().find(|c| c.label == label)
    }
}

/// `log2(e_k / e_{k+1})` for consecutive levels.
pub fn pairwise_rates(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

/// Least-squares slope of `-log e` against `log N` over all levels.
pub fn least_squares_rate(grids: &[usize], errors: &[f64]) -> f64 {
    let xs: Vec<f64> = grids.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    -sxy / sxx
}

fn check_grids(grids: &[usize]) -> Result<()> {
    if grids.is_empty() {
        return Err(Error::Config("no grid levels given".into()));
    }
    if grids.contains(&0) {
        return Err(Error::Config("grid levels must be positive".into()));
    }
    Ok(())
}

fn entry(result: &RunResult, seconds: f64) -> CampaignEntry {
    CampaignEntry {
        cells: result.cells,
        l1: result.l1,
        steps: result.field.step,
        seconds,
        failure: match &result.outcome {
            RunOutcome::Completed => None,
            RunOutcome::Failed { step, cause, .. } => Some(format!("step {step}: {cause}")),
        },
    }
}

/// Error study for every scheme on every grid. Runs execute concurrently on
/// at most `jobs` threads; results do not depend on `jobs`.
pub fn convergence_study(
    bench: &Benchmark,
    schemes: &[SchemeConfig],
    grids: &[usize],
    jobs: usize,
) -> Result<CampaignResult> {
    check_grids(grids)?;
    for s in schemes {
        s.validate()?;
    }
    let pairs: Vec<(usize, usize)> = (0..schemes.len())
        .flat_map(|s| (0..grids.len()).map(move |g| (s, g)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let results: Vec<Result<CampaignEntry>> = pool.install(|| {
        pairs
            .par_iter()
            .map(|&(s, g)| {
                let r = run_benchmark(bench, &schemes[s], grids[g])?;
                Ok(entry(&r, r.wall_seconds))
            })
            .collect()
    });
    let mut results = results.into_iter();
    let mut columns = Vec::with_capacity(schemes.len());
    for cfg in schemes {
        let mut entries = Vec::with_capacity(grids.len());
        for _ in grids {
            entries.push(results.next().expect("one result per pair")?);
        }
        columns.push(CampaignColumn {
            label: cfg.label(),
            config: *cfg,
            entries,
        });
    }
    Ok(CampaignResult {
        benchmark: bench.name.clone(),
        grids: grids.to_vec(),
        columns,
        repetitions: 1,
        environment: None,
    })
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Machine descriptor recorded next to timing tables.
pub fn environment_descriptor() -> String {
    let cpu = fs::read_to_string("/proc/cpuinfo")
        .ok()
        .and_then(|s| {
            s.lines()
                .find(|l| l.starts_with("model name"))
                .and_then(|l| l.split(':').nth(1))
                .map(|m| m.trim().to_string())
        })
        .unwrap_or_else(|| "unknown cpu".to_string());
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let profile = if cfg!(debug_assertions) {
        "debug-assertions"
    } else {
        "release"
    };
    format!(
        "{cpu}; {threads} logical cpus; {} {}; {profile}",
        std::env::consts::OS,
        std::env::consts::ARCH
    )
}

/// Serial wall-clock study. One warmup run per (scheme, grid) is discarded;
/// repetitions interleave the schemes so slow drift affects all alike.
pub fn timing_study(
    bench: &Benchmark,
    schemes: &[SchemeConfig],
    grids: &[usize],
    repetitions: usize,
) -> Result<CampaignResult> {
    check_grids(grids)?;
    if repetitions < 3 {
        return Err(Error::Config(format!(
            "timing needs at least 3 repetitions, got {repetitions}"
        )));
    }
    let mut columns: Vec<CampaignColumn> = schemes
        .iter()
        .map(|cfg| CampaignColumn {
            label: cfg.label(),
            config: *cfg,
            entries: Vec::new(),
        })
        .collect();
    for &cells in grids {
        let mut last = Vec::with_capacity(schemes.len());
        for cfg in schemes {
            last.push(run_benchmark(bench, cfg, cells)?);
        }
        let mut samples = vec![Vec::with_capacity(repetitions); schemes.len()];
        for _ in 0..repetitions {
            for (s, cfg) in schemes.iter().enumerate() {
                let r = run_benchmark(bench, cfg, cells)?;
                samples[s].push(r.wall_seconds);
                last[s] = r;
            }
        }
        for (s, times) in samples.into_iter().enumerate() {
            columns[s].entries.push(entry(&last[s], median(times)));
        }
    }
    Ok(CampaignResult {
        benchmark: bench.name.clone(),
        grids: grids.to_vec(),
        columns,
        repetitions,
        environment: Some(environment_descriptor()),
    })
}

/// One row of the profile CSV schema.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileRow {
    pub x: f64,
    pub state: PrimitiveState,
    pub ener: f64,
    pub mach: f64,
    pub alpha: Option<f64>,
}

pub const PROFILE_HEADER: &str = "x,rho,u,p,E,mach,alpha";

fn row(x: f64, q: PrimitiveState, gas: &GasModel, alpha: Option<f64>) -> ProfileRow {
    let c = gas.sound_speed(&q).unwrap_or(0.0);
    let ener = gas.to_conserved(&q).ener;
    ProfileRow {
        x,
        state: q,
        ener,
        mach: if c > 0.0 { q.u / c } else { f64::NAN },
        alpha,
    }
}

/// Profile rows of a numerical field. `alpha` holds one value per
/// interface; each cell reports the mean of its two faces.
pub fn field_rows(field: &Field, gas: &GasModel, alpha: Option<&[f64]>) -> Result<Vec<ProfileRow>> {
    let mesh = field.mesh();
    let prims = field.primitives(gas)?;
    Ok(prims
        .into_iter()
        .enumerate()
        .map(|(i, q)| {
            let a = alpha.map(|a| 0.5 * (a[i] + a[i + 1]));
            row(mesh.cell_center(i), q, gas, a)
        })
        .collect())
}

pub fn exact_rows(mesh: &Mesh, exact: &[PrimitiveState], gas: &GasModel) -> Vec<ProfileRow> {
    exact
        .iter()
        .enumerate()
        .map(|(i, &q)| row(mesh.cell_center(i), q, gas, None))
        .collect()
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn profile_csv(rows: &[ProfileRow]) -> String {
    let mut s = String::with_capacity(rows.len() * 140);
    s.push_str(PROFILE_HEADER);
    s.push('\n');
    for r in rows {
        let alpha = r.alpha.map(num).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            num(r.x),
            num(r.state.rho),
            num(r.state.u),
            num(r.state.p),
            num(r.ener),
            num(r.mach),
            alpha
        );
    }
    s
}

fn write_file(path: &Path, contents: &str) -> Result<PathBuf> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))?;
    Ok(path.to_path_buf())
}

fn table_csv(campaign: &CampaignResult, value: impl Fn(&CampaignEntry) -> Option<f64>) -> String {
    let mut s = String::from("cells");
    for c in &campaign.columns {
        let _ = write!(s, ",{}", c.label);
    }
    s.push('\n');
    for (g, cells) in campaign.grids.iter().enumerate() {
        let _ = write!(s, "{cells}");
        for c in &campaign.columns {
            let v = value(&c.entries[g]).map(num).unwrap_or_default();
            let _ = write!(s, ",{v}");
        }
        s.push('\n');
    }
    s
}

/// Empirical rates: one row per scheme with consecutive-level rates and the
/// least-squares rate.
pub fn rates_csv(campaign: &CampaignResult) -> String {
    let mut s = String::from("scheme");
    for w in campaign.grids.windows(2) {
        let _ = write!(s, ",{}-{}", w[0], w[1]);
    }
    s.push_str(",least_squares\n");
    for c in &campaign.columns {
        let e = c.density_errors();
        s.push_str(&c.label);
        for r in pairwise_rates(&e) {
            let _ = write!(s, ",{}", num(r));
        }
        let _ = writeln!(s, ",{}", num(least_squares_rate(&campaign.grids, &e)));
    }
    s
}

/// Riemann invariants `u -/+ 2c/(gamma-1)` and their largest magnitude per
/// cell, numerical next to exact.
pub fn invariants_csv(field: &Field, exact: &[PrimitiveState], gas: &GasModel) -> Result<String> {
    let mut s = String::from("x,w_minus,w_plus,q,w_minus_exact,w_plus_exact,q_exact\n");
    let prims = field.primitives(gas)?;
    for (i, (q, e)) in prims.iter().zip(exact).enumerate() {
        let (wm, wp) = gas.riemann_invariants(q);
        let (em, ep) = gas.riemann_invariants(e);
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            num(field.mesh().cell_center(i)),
            num(wm),
            num(wp),
            num(wm.abs().max(wp.abs())),
            num(em),
            num(ep),
            num(em.abs().max(ep.abs()))
        );
    }
    Ok(s)
}

/// Control parameter at each interface.
pub fn alpha_csv(mesh: &Mesh, alpha: &[f64]) -> String {
    let mut s = String::from("x,alpha\n");
    for (k, a) in alpha.iter().enumerate() {
        let _ = writeln!(s, "{},{}", num(mesh.interface(k)), num(*a));
    }
    s
}

/// What to write. Runs produce profile CSVs; campaigns produce tables.
#[derive(Debug, Default)]
pub struct Artifacts<'a> {
    pub runs: Vec<&'a RunResult>,
    pub convergence: Option<&'a CampaignResult>,
    pub timing: Option<&'a CampaignResult>,
    pub plot_scripts: bool,
}

pub fn profile_file_name(bench: &str, label: &str, cells: usize) -> String {
    format!("{bench}_{label}_{cells}.csv")
}

pub fn exact_file_name(bench: &str, cells: usize) -> String {
    format!("{bench}_exact_{cells}.csv")
}

/// Writes all requested artifacts into `out_dir` (created if missing) and
/// returns the written paths. Output is byte-identical for identical inputs
/// apart from the timing table.
pub fn emit_artifacts(artifacts: &Artifacts<'_>, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();
    let mut exact_written: Vec<String> = Vec::new();

    let mut summary = String::from("benchmark,scheme,cells,status,steps,time,l1_rho,l1_u,l1_p,l1_E\n");
    for run in &artifacts.runs {
        let gas = run.config.gas()?;
        let mesh = *run.field.mesh();
        let status = match &run.outcome {
            RunOutcome::Completed => "completed".to_string(),
            RunOutcome::Failed { step, cause, .. } => format!("failed at step {step}: {cause}"),
        };
        let l1 = run
            .l1
            .map(|e| format!("{},{},{},{}", num(e.rho), num(e.u), num(e.p), num(e.ener)))
            .unwrap_or_else(|| ",,,".into());
        let _ = writeln!(
            summary,
            "{},{},{},\"{}\",{},{},{}",
            run.benchmark.name,
            run.config.label(),
            run.cells,
            status.replace('"', "'"),
            run.field.step,
            num(run.field.time),
            l1
        );

        let exact_name = exact_file_name(&run.benchmark.name, run.cells);
        if !exact_written.contains(&exact_name) {
            let exact = run.benchmark.exact(&mesh, &gas)?;
            written.push(write_file(
                &out_dir.join(&exact_name),
                &profile_csv(&exact_rows(&mesh, &exact, &gas)),
            )?);
            exact_written.push(exact_name);
        }
        if !run.completed() {
            continue;
        }
        let stem = format!("{}_{}_{}", run.benchmark.name, run.config.label(), run.cells);
        let rows = field_rows(&run.field, &gas, run.alpha.as_deref())?;
        written.push(write_file(
            &out_dir.join(format!("{stem}.csv")),
            &profile_csv(&rows),
        )?);
        if let Some(alpha) = &run.alpha {
            written.push(write_file(
                &out_dir.join(format!("{stem}_alpha.csv")),
                &alpha_csv(&mesh, alpha),
            )?);
            let exact = run.benchmark.exact(&mesh, &gas)?;
            let invariants = invariants_csv(&run.field, &exact, &gas)?;
            written.push(write_file(
                &out_dir.join(format!("{stem}_invariants.csv")),
                &invariants,
            )?);
            if run.benchmark.name == "sod_sonic" && run.config.label() == "fvc" && run.cells == 200 {
                written.push(write_file(&out_dir.join("alpha_profile.csv"), &alpha_csv(&mesh, alpha))?);
                written.push(write_file(&out_dir.join("riemann_invariants.csv"), &invariants)?);
            }
        }
    }
    if !artifacts.runs.is_empty() {
        written.push(write_file(&out_dir.join("runs_summary.csv"), &summary)?);
    }

    if let Some(c) = artifacts.convergence {
        written.push(write_file(
            &out_dir.join("table1_reproduction.csv"),
            &table_csv(c, |e| e.l1.map(|l| l.rho)),
        )?);
        written.push(write_file(&out_dir.join("convergence_rates.csv"), &rates_csv(c))?);
    }
    if let Some(t) = artifacts.timing {
        written.push(write_file(
            &out_dir.join("table2_reproduction.csv"),
            &table_csv(t, |e| Some(e.seconds)),
        )?);
        let env = format!(
            "benchmark: {}\nrepetitions: {} (median, warmup discarded)\nenvironment: {}\n",
            t.benchmark,
            t.repetitions,
            t.environment.as_deref().unwrap_or("unknown")
        );
        written.push(write_file(&out_dir.join("table2_environment.txt"), &env)?);
    }
    if artifacts.plot_scripts {
        for (name, script) in plot_scripts(artifacts, out_dir) {
            written.push(write_file(&out_dir.join(name), &script)?);
        }
    }
    Ok(written)
}

/// Panels of a four-variable figure: (column, label).
const STATE_PANELS: [(usize, &str); 4] = [(2, "density"), (3, "velocity"), (4, "pressure"), (5, "total energy")];

fn four_panel(title: &str, png: &str, exact: &str, curves: &[(String, String)]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {title}");
    let _ = writeln!(s, "set terminal pngcairo size 1200,900");
    let _ = writeln!(s, "set output '{png}'");
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set key autotitle columnhead");
    let _ = writeln!(s, "set multiplot layout 2,2 title '{title}'");
    for (col, name) in STATE_PANELS {
        let _ = writeln!(s, "set title '{name}'");
        let mut parts = vec![format!("'{exact}' using 1:{col} with lines lw 2 lc 'black' title 'exact'")];
        for (file, label) in curves {
            parts.push(format!("'{file}' using 1:{col} with points pt 7 ps 0.4 title '{label}'"));
        }
        let _ = writeln!(s, "plot {}", parts.join(", \\\n     "));
    }
    s.push_str("unset multiplot\n");
    s
}

fn plot_scripts(artifacts: &Artifacts<'_>, out_dir: &Path) -> Vec<(String, String)> {
    let exists = |f: &str| out_dir.join(f).exists();
    let runs_of = |bench: &str, cells: usize, defaults_only: bool| -> Vec<(String, String)> {
        artifacts
            .runs
            .iter()
            .filter(|r| r.benchmark.name == bench && r.cells == cells && r.completed())
            .filter(|r| !defaults_only || r.config == r.benchmark.scheme(r.config.kind))
            .map(|r| {
                (
                    profile_file_name(bench, &r.config.label(), cells),
                    r.config.label(),
                )
            })
            .filter(|(f, _)| exists(f))
            .collect()
    };
    let mut out = Vec::new();
    let four = [
        ("fig02_sod_sonic.gp", "sod_sonic", 200, "Sod shock tube, t = 0.2, 200 cells"),
        ("fig07_vacuum123.gp", "vacuum123", 200, "strong expansion, t = 0.15, 200 cells"),
        ("fig09_blast_left.gp", "blast_left", 2000, "left blast, t = 0.012, 2000 cells"),
        ("fig10_blast_right.gp", "blast_right", 2000, "right blast, t = 0.035, 2000 cells"),
        ("fig11_contact_stationary.gp", "contact_stationary", 200, "stationary contact, t = 2, 200 cells"),
        ("fig12_contact_slow.gp", "contact_slow", 200, "slow contact, t = 2, 200 cells"),
    ];
    for (name, bench, cells, title) in four {
        let curves = runs_of(bench, cells, true);
        let exact = exact_file_name(bench, cells);
        if curves.is_empty() || !exists(&exact) {
            continue;
        }
        let png = name.replace(".gp", ".png");
        out.push((name.to_string(), four_panel(title, &png, &exact, &curves)));
    }

    let sod = runs_of("sod_sonic", 200, false);
    let exact = exact_file_name("sod_sonic", 200);
    if !sod.is_empty() && exists(&exact) {
        let mut s = String::from("# Sod shock tube: density and Mach number near the sonic point\n");
        s.push_str("set terminal pngcairo size 1200,900\nset output 'fig03_sonic_point.png'\n");
        s.push_str("set datafile separator ','\nset multiplot layout 2,2\n");
        for (col, name, zoom) in [
            (2, "density", ""),
            (2, "density near the sonic point", "set xrange [0.35:0.55]\n"),
            (6, "Mach number", ""),
            (6, "Mach number near the sonic point", "set xrange [0.35:0.55]\n"),
        ] {
            s.push_str(zoom);
            let _ = writeln!(s, "set title '{name}'");
            let mut parts = vec![format!("'{exact}' using 1:{col} with lines lw 2 lc 'black' title 'exact'")];
            for (file, label) in sod.iter().filter(|(_, l)| !l.starts_with("fvc_alpha")) {
                parts.push(format!("'{file}' using 1:{col} with points pt 7 ps 0.4 title '{label}'"));
            }
            let _ = writeln!(s, "plot {}", parts.join(", \\\n     "));
            s.push_str("set autoscale x\n");
        }
        s.push_str("unset multiplot\n");
        out.push(("fig03_sonic_point.gp".into(), s));

        let alpha_runs: Vec<_> = sod
            .iter()
            .filter(|(_, l)| l == "fvc" || l.starts_with("fvc_alpha"))
            .cloned()
            .collect();
        if !alpha_runs.is_empty() {
            let mut s = String::from("# Sod shock tube: FVC density for several choices of alpha\n");
            s.push_str("set terminal pngcairo size 900,600\nset output 'fig04_alpha_modes.png'\n");
            s.push_str("set datafile separator ','\n");
            let mut parts = vec![format!("'{exact}' using 1:2 with lines lw 2 lc 'black' title 'exact'")];
            for (file, label) in &alpha_runs {
                let title = if label == "fvc" { "adaptive".to_string() } else { label.replace("fvc_alpha", "alpha = ") };
                parts.push(format!("'{file}' using 1:2 with linespoints pt 7 ps 0.4 title '{title}'"));
            }
            let _ = writeln!(s, "plot {}", parts.join(", \\\n     "));
            out.push(("fig04_alpha_modes.gp".into(), s));
        }
    }

    for (name, stem, png) in [
        ("fig05_sod_invariants_alpha.gp", "sod_sonic_fvc_200", "fig05_sod_invariants_alpha.png"),
        ("fig08_vacuum_invariants_alpha.gp", "vacuum123_fvc_200", "fig08_vacuum_invariants_alpha.png"),
    ] {
        let inv = format!("{stem}_invariants.csv");
        let alpha = format!("{stem}_alpha.csv");
        if !(exists(&inv) && exists(&alpha)) {
            continue;
        }
        let mut s = String::from("# Riemann invariant magnitude and control parameter\n");
        let _ = writeln!(s, "set terminal pngcairo size 1200,500\nset output '{png}'");
        s.push_str("set datafile separator ','\nset multiplot layout 1,2\n");
        let _ = writeln!(
            s,
            "set title 'max |u -/+ 2c/(gamma-1)|'\nplot '{inv}' using 1:7 with lines lc 'black' title 'exact', '{inv}' using 1:4 with points pt 7 ps 0.4 title 'fvc'"
        );
        let _ = writeln!(s, "set title 'alpha'\nplot '{alpha}' using 1:2 with linespoints pt 7 ps 0.4 title 'alpha'");
        s.push_str("unset multiplot\n");
        out.push((name.to_string(), s));
    }

    if let Some(c) = artifacts.convergence {
        let mut s = String::from("# L1 density error against cells, logarithmic axes\n");
        s.push_str("set terminal pngcairo size 900,600\nset output 'fig06_convergence.png'\n");
        s.push_str("set datafile separator ','\nset logscale xy\nset key autotitle columnhead\n");
        s.push_str("set xlabel 'cells'\nset ylabel 'L1 error (density)'\n");
        let parts: Vec<String> = (0..c.columns.len())
            .map(|i| format!("'table1_reproduction.csv' using 1:{} with linespoints pt 7", i + 2))
            .collect();
        let _ = writeln!(s, "plot {}", parts.join(", \\\n     "));
        out.push(("fig06_convergence.gp".into(), s));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_set() {
        let b = builtin_benchmarks();
        let names: Vec<_> = b.iter().map(|b| b.name.as_str()).collect();
        assert_eq!(
            names,
            [
                "sod_sonic",
                "vacuum123",
                "blast_left",
                "blast_right",
                "contact_stationary",
                "contact_slow"
            ]
        );
        for x in &b {
            x.validate().unwrap();
            assert_eq!((x.x_min, x.x_max, x.x_split, x.courant), (0.0, 1.0, 0.5, 0.8));
        }
        let sod = find_benchmark("sod_sonic").unwrap();
        assert_eq!(sod.left, prim(1.0, 0.75, 1.0));
        assert_eq!(sod.right, prim(0.125, 0.0, 0.1));
        let blast = find_benchmark("blast_left").unwrap();
        assert_eq!((blast.left.p, blast.right.p, blast.cells), (1000.0, 0.01, 2000));
        let slow = find_benchmark("contact_slow").unwrap();
        assert_eq!(slow.left, prim(1.4, 0.1, 1.0));
        assert_eq!(slow.alpha_mode, Some(AlphaMode::Fixed(0.5)));
        assert!(find_benchmark("shu_osher").is_err());
    }

    #[test]
    fn rates() {
        let e = [1.0, 0.5, 0.25];
        assert_eq!(pairwise_rates(&e), vec![1.0, 1.0]);
        let r = least_squares_rate(&[100, 200, 400], &e);
        assert!((r - 1.0).abs() < 1e-12);
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn run_reaches_end_time_exactly() {
        let b = find_benchmark("sod_sonic").unwrap();
        let r = run_benchmark(&b, &b.scheme(SchemeKind::Hll), 50).unwrap();
        assert!(r.completed());
        assert_eq!(r.field.time, 0.2);
        assert!(r.l1.unwrap().rho > 0.0);
        assert!(r.alpha.is_none());
    }

    #[test]
    fn roe_fails_on_vacuum_with_a_recorded_step() {
        let b = find_benchmark("vacuum123").unwrap();
        let r = run_benchmark(&b, &b.scheme(SchemeKind::Roe), 200).unwrap();
        match r.outcome {
            RunOutcome::Failed { step, .. } => assert!(step >= 1),
            RunOutcome::Completed => panic!("Roe should fail on the strong expansion"),
        }
        assert!(r.l1.is_none());
        assert!(r.summary().contains("FAILED at step"));
    }

    #[test]
    fn profile_csv_format() {
        let gas = GasModel::default();
        let b = find_benchmark("sod_sonic").unwrap();
        let f = b.initial_field(4, &gas).unwrap();
        let rows = field_rows(&f, &gas, Some(&[0.5, 0.5, 1.0, 0.5, 0.5])).unwrap();
        let csv = profile_csv(&rows);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], PROFILE_HEADER);
        assert_eq!(lines.len(), 5);
        let fields: Vec<_> = lines[2].split(',').collect();
        assert_eq!(fields.len(), 7);
        assert_eq!(fields[0], "3.7500000000000000e-1");
        assert_eq!(fields[6], "7.5000000000000000e-1");
        let plain = profile_csv(&field_rows(&f, &gas, None).unwrap());
        assert!(plain.lines().nth(1).unwrap().ends_with(','));
    }
}
