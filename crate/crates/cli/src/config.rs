//! Config file grammar and the merge of flags, file and defaults.
//!
//! The file is TOML with four optional sections; every key is optional and
//! unknown keys are rejected:
//!
//! ```toml
//! [problem]
//! test = "sod_sonic"        # builtin benchmark, or give left/right below
//! left = [1.0, 0.75, 1.0]   # rho, u, p
//! right = [0.125, 0.0, 0.1]
//! split = 0.5
//! t_end = 0.2
//!
//! [mesh]
//! cells = 200
//! x_min = 0.0
//! x_max = 1.0
//!
//! [scheme]
//! name = "fvc"              # fvc, rusanov, hll, roe
//! cfl = 0.8
//! cfl_mode = "base"         # base or alpha_weighted (fvc only)
//! alpha = "adaptive"        # adaptive or "fixed:<v>" with 0 < v <= 1
//! limiter = "minmod"        # minmod or vanalbada
//! gamma = 1.4
//! roe_epsilon = 0.1
//!
//! [output]
//! dir = "fvc_output"
//! plots = true
//! jobs = 1
//! repetitions = 5
//! ```

use std::path::{Path, PathBuf};

use fvc_core::fvc::{AlphaMode, LimiterKind};
use fvc_core::harness::{find_benchmark, Benchmark};
use fvc_core::mesh::CflMode;
use fvc_core::{PrimitiveState, SchemeConfig, SchemeKind};
use serde::{Deserialize, Serialize};

use crate::{CliError, Overrides};

pub const DEFAULT_OUT: &str = "fvc_output";
pub const DEFAULT_REPETITIONS: usize = 5;

#[derive(Debug, Default, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub left: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub right: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
}

#[derive(Debug, Default, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cells: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
}

#[derive(Debug, Default, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cfl: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cfl_mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limiter: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub roe_epsilon: Option<f64>,
}

#[derive(Debug, Default, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plots: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub repetitions: Option<usize>,
}

#[derive(Debug, Default, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub problem: ProblemSection,
    #[serde(default)]
    pub mesh: MeshSection,
    #[serde(default)]
    pub scheme: SchemeSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub benchmark: Benchmark,
    pub scheme: SchemeConfig,
    pub cells: usize,
    pub out: PathBuf,
    pub plots: bool,
    pub jobs: usize,
    pub repetitions: usize,
}

fn parse_name<T: std::str::FromStr<Err = fvc_core::Error>>(s: &str) -> Result<T, CliError> {
    s.parse::<T>().map_err(|e| CliError::Usage(e.to_string()))
}

fn parse_cfl_mode(s: &str) -> Result<CflMode, CliError> {
    match s {
        "base" => Ok(CflMode::Base),
        "alpha_weighted" => Ok(CflMode::AlphaWeighted),
        _ => Err(CliError::Usage(format!(
            "unknown cfl_mode '{s}' (expected base or alpha_weighted)"
        ))),
    }
}

fn state(field: &str, v: [f64; 3]) -> Result<PrimitiveState, CliError> {
    let [rho, u, p] = v;
    let bad = |what: &str, x: f64| CliError::Validation(format!("{field}: {what}, got {x}"));
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(bad("density must be positive", rho));
    }
    if !u.is_finite() {
        return Err(bad("velocity must be finite", u));
    }
    if !(p > 0.0 && p.is_finite()) {
        return Err(bad("pressure must be positive", p));
    }
    Ok(PrimitiveState::new(rho, u, p))
}

fn positive(field: &str, x: f64) -> Result<f64, CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Validation(format!("{field} must be positive, got {x}")))
    }
}

/// Merges flags over the config file over benchmark defaults. Nothing is
/// computed; every value is checked here.
pub fn resolve(file: &ConfigFile, flags: &Overrides) -> Result<RunSpec, CliError> {
    let custom = file.problem.left.is_some() || file.problem.right.is_some();
    let builtin = |name: &str| find_benchmark(name).map_err(|e| CliError::Usage(e.to_string()));
    let mut b = match (&flags.test, &file.problem.test) {
        (Some(name), _) => builtin(name)?,
        (None, Some(_)) if custom => {
            return Err(CliError::Usage(
                "problem.test and problem.left/right are mutually exclusive".into(),
            ))
        }
        (None, Some(name)) => builtin(name)?,
        (None, None) if custom => {
            let (Some(l), Some(r)) = (file.problem.left, file.problem.right) else {
                return Err(CliError::Usage(
                    "a custom problem needs both problem.left and problem.right".into(),
                ));
            };
            let mut b = builtin("sod_sonic")?;
            b.name = "custom".into();
            b.left = state("problem.left", l)?;
            b.right = state("problem.right", r)?;
            b.notes = "user-defined Riemann problem".into();
            b
        }
        (None, None) => builtin("sod_sonic")?,
    };
    if let Some(x) = file.problem.split {
        b.x_split = x;
    }
    if let Some(t) = flags.tend.or(file.problem.t_end) {
        b.t_end = positive("t_end", t)?;
    }
    if let Some(x) = file.mesh.x_min {
        b.x_min = x;
    }
    if let Some(x) = file.mesh.x_max {
        b.x_max = x;
    }
    if let Some(c) = flags.cfl.or(file.scheme.cfl) {
        b.courant = positive("cfl", c)?;
    }
    if b.x_min >= b.x_max || !b.x_min.is_finite() || !b.x_max.is_finite() {
        return Err(CliError::Validation(format!(
            "mesh.x_min must be below mesh.x_max, got {} and {}",
            b.x_min, b.x_max
        )));
    }
    if !(b.x_split > b.x_min && b.x_split < b.x_max) {
        return Err(CliError::Validation(format!(
            "problem.split must lie inside ({}, {}), got {}",
            b.x_min, b.x_max, b.x_split
        )));
    }

    let cells = flags.cells.or(file.mesh.cells).unwrap_or(b.cells);
    if cells == 0 {
        return Err(CliError::Validation("cells must be at least 1".into()));
    }
    b.cells = cells;

    let kind = match (&flags.scheme, &file.scheme.name) {
        (Some(k), _) => *k,
        (None, Some(s)) => parse_name::<SchemeKind>(s)?,
        (None, None) => SchemeKind::Fvc,
    };
    let mut scheme = b.scheme(kind);
    if let Some(a) = flags.alpha {
        scheme.alpha_mode = a;
    } else if let Some(s) = &file.scheme.alpha {
        scheme.alpha_mode = parse_name::<AlphaMode>(s)?;
    }
    if let Some(l) = flags.limiter {
        scheme.limiter = l;
    } else if let Some(s) = &file.scheme.limiter {
        scheme.limiter = parse_name::<LimiterKind>(s)?;
    }
    if let Some(s) = &file.scheme.cfl_mode {
        scheme.cfl_mode = parse_cfl_mode(s)?;
    }
    if let Some(g) = flags.gamma.or(file.scheme.gamma) {
        scheme.gamma = g;
    }
    if let Some(e) = file.scheme.roe_epsilon {
        scheme.roe_epsilon = e;
    }
    scheme.validate().map_err(|e| CliError::Validation(e.to_string()))?;
    b.validate().map_err(|e| CliError::Validation(e.to_string()))?;

    let jobs = flags.jobs.or(file.output.jobs).unwrap_or(1);
    if jobs == 0 {
        return Err(CliError::Validation("jobs must be at least 1".into()));
    }
    let repetitions = flags
        .repetitions
        .or(file.output.repetitions)
        .unwrap_or(DEFAULT_REPETITIONS);
    if repetitions < 3 {
        return Err(CliError::Validation(format!(
            "repetitions must be at least 3, got {repetitions}"
        )));
    }
    Ok(RunSpec {
        benchmark: b,
        scheme,
        cells,
        out: flags
            .out
            .clone()
            .or_else(|| file.output.dir.clone())
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
        plots: flags.plots || file.output.plots.unwrap_or(false),
        jobs,
        repetitions,
    })
}

/// The resolved settings in the config grammar, so a manifest can be fed
/// back in with `--config`.
pub fn manifest(spec: &RunSpec) -> ConfigFile {
    let b = &spec.benchmark;
    let s = &spec.scheme;
    let state = |q: &PrimitiveState| [q.rho, q.u, q.p];
    let builtin = find_benchmark(&b.name).is_ok();
    ConfigFile {
        problem: ProblemSection {
            test: builtin.then(|| b.name.clone()),
            left: (!builtin).then(|| state(&b.left)),
            right: (!builtin).then(|| state(&b.right)),
            split: Some(b.x_split),
            t_end: Some(b.t_end),
        },
        mesh: MeshSection {
            cells: Some(spec.cells),
            x_min: Some(b.x_min),
            x_max: Some(b.x_max),
        },
        scheme: SchemeSection {
            name: Some(s.kind.to_string()),
            cfl: Some(s.courant),
            cfl_mode: Some(
                match s.cfl_mode {
                    CflMode::Base => "base",
                    CflMode::AlphaWeighted => "alpha_weighted",
                }
                .into(),
            ),
            alpha: Some(s.alpha_mode.to_string()),
            limiter: Some(
                match s.limiter {
                    LimiterKind::Minmod => "minmod",
                    LimiterKind::VanAlbada => "vanalbada",
                }
                .into(),
            ),
            gamma: Some(s.gamma),
            roe_epsilon: Some(s.roe_epsilon),
        },
        output: OutputSection {
            dir: Some(spec.out.clone()),
            plots: Some(spec.plots),
            jobs: Some(spec.jobs),
            repetitions: Some(spec.repetitions),
        },
    }
}
