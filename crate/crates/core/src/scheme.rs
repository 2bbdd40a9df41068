//! Scheme selection shared by FVC and the classic flux schemes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classic_schemes::{GodunovSolver, NumericalFlux, DEFAULT_HARTEN_EPSILON};
use crate::error::{Error, Result};
use crate::fvc::{AlphaMode, FvcSolver, LimiterKind};
use crate::gas_dynamics::{Flux, GasModel};
use crate::mesh::{CflMode, CflRule, Field};

/// Outcome of one time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub dt: f64,
    /// Numerical flux through the left domain boundary.
    pub left_flux: Flux,
    /// Numerical flux through the right domain boundary.
    pub right_flux: Flux,
    pub min_rho: f64,
    pub min_p: f64,
}

/// A time integrator that advances a field in place.
pub trait Scheme: Send {
    fn name(&self) -> &'static str;

    /// Advances one step, never past `t_end`. On error the field may be
    /// partially updated and should be discarded.
    fn step(&mut self, field: &mut Field, t_end: f64) -> Result<StepReport>;

    /// Control parameter per interface from the last step, for FVC.
    fn alpha(&self) -> Option<&[f64]> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Fvc,
    Rusanov,
    Hll,
    Roe,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 4] = [
        SchemeKind::Rusanov,
        SchemeKind::Roe,
        SchemeKind::Hll,
        SchemeKind::Fvc,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeKind::Fvc => "fvc",
            SchemeKind::Rusanov => "rusanov",
            SchemeKind::Hll => "hll",
            SchemeKind::Roe => "roe",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fvc" => Ok(SchemeKind::Fvc),
            "rusanov" => Ok(SchemeKind::Rusanov),
            "hll" => Ok(SchemeKind::Hll),
            "roe" => Ok(SchemeKind::Roe),
            _ => Err(Error::Config(format!(
                "unknown scheme '{s}' (expected fvc, rusanov, hll or roe)"
            ))),
        }
    }
}

impl FromStr for AlphaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("adaptive") {
            return Ok(AlphaMode::Adaptive);
        }
        let value = s
            .strip_prefix("fixed:")
            .ok_or_else(|| {
                Error::Config(format!("alpha mode '{s}' (expected adaptive or fixed:<v>)"))
            })?
            .parse::<f64>()
            .map_err(|e| Error::Config(format!("alpha value in '{s}': {e}")))?;
        AlphaMode::fixed(value)
    }
}

impl FromStr for LimiterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "minmod" => Ok(LimiterKind::Minmod),
            "vanalbada" | "van_albada" | "van-albada" => Ok(LimiterKind::VanAlbada),
            _ => Err(Error::Config(format!(
                "unknown limiter '{s}' (expected minmod or vanalbada)"
            ))),
        }
    }
}

/// Numerical settings for one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub kind: SchemeKind,
    pub courant: f64,
    pub gamma: f64,
    /// FVC only.
    pub alpha_mode: AlphaMode,
    /// FVC only.
    pub limiter: LimiterKind,
    /// FVC only; the classic schemes always use the base rule.
    pub cfl_mode: CflMode,
    /// Roe only.
    pub roe_epsilon: f64,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        SchemeConfig {
            kind: SchemeKind::Fvc,
            courant: 0.8,
            gamma: 1.4,
            alpha_mode: AlphaMode::Adaptive,
            limiter: LimiterKind::Minmod,
            cfl_mode: CflMode::Base,
            roe_epsilon: DEFAULT_HARTEN_EPSILON,
        }
    }
}

impl SchemeConfig {
    pub fn fvc() -> Self {
        SchemeConfig::default()
    }

    pub fn of(kind: SchemeKind) -> Self {
        SchemeConfig {
            kind,
            ..SchemeConfig::default()
        }
    }

    pub fn gas(&self) -> Result<GasModel> {
        GasModel::new(self.gamma)
    }

    pub fn cfl_rule(&self) -> Result<CflRule> {
        let mode = match self.kind {
            SchemeKind::Fvc => self.cfl_mode,
            _ => CflMode::Base,
        };
        CflRule::new(self.courant, mode)
    }

    pub fn validate(&self) -> Result<()> {
        self.gas()?;
        self.cfl_rule()?;
        if let AlphaMode::Fixed(v) = self.alpha_mode {
            AlphaMode::fixed(v)?;
        }
        if !(self.roe_epsilon >= 0.0) {
            return Err(Error::Config(format!(
                "entropy-fix parameter must be non-negative, got {}",
                self.roe_epsilon
            )));
        }
        Ok(())
    }

    /// Short label such as `fvc` or `roe`, extended with the fixed alpha or
    /// a non-default entropy-fix parameter.
    pub fn label(&self) -> String {
        match (self.kind, self.alpha_mode) {
            (SchemeKind::Fvc, AlphaMode::Fixed(v)) => format!("fvc_alpha{v}"),
            (SchemeKind::Roe, _) if self.roe_epsilon != DEFAULT_HARTEN_EPSILON => {
                format!("roe_eps{}", self.roe_epsilon)
            }
            (kind, _) => kind.to_string(),
        }
    }

    pub fn build(&self) -> Result<Box<dyn Scheme>> {
        self.validate()?;
        let gas = self.gas()?;
        let rule = self.cfl_rule()?;
        Ok(match self.kind {
            SchemeKind::Fvc => Box::new(FvcSolver::new(gas, rule, self.alpha_mode, self.limiter)),
            SchemeKind::Rusanov => Box::new(GodunovSolver::new(gas, rule, NumericalFlux::Rusanov)),
            SchemeKind::Hll => Box::new(GodunovSolver::new(gas, rule, NumericalFlux::Hll)),
            SchemeKind::Roe => Box::new(GodunovSolver::new(
                gas,
                rule,
                NumericalFlux::RoeHarten {
                    epsilon: self.roe_epsilon,
                },
            )),
        })
    }
}
