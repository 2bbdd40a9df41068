//! Finite volume characteristics (FVC) scheme.
//!
//! Each step has two stages. The predictor builds one state per interface
//! by tracing the fluid characteristic back from the interface over
//! `alpha * dt`, interpolating the cell averages at its foot, and adding the
//! advective source integrated over the same interval. The corrector is the
//! conservative update with the physical flux of those interface states.
//!
//! In advective form every conserved component moves with the fluid
//! velocity `u` and picks up the source
//!
//! ```text
//! G = ( -rho du/dx,  -rho u du/dx - dp/dx,  -E du/dx - d(pu)/dx )
//! ```
//!
//! The control parameter blends `alpha_bar = dx / (2 dt S)` (S the local
//! Rusanov speed) with 1/2 through a slope limiter applied to the largest
//! Riemann invariant magnitude per cell.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Location, Result};
use crate::gas_dynamics::{check_positive, ConservedState, Flux, GasModel};
use crate::mesh::{clip_dt, dt_from_radii, CflMode, CflRule, Field, GHOST_LAYERS};
use crate::scheme::{Scheme, StepReport};

/// Stand-in for an infinite ratio when a ramp runs into flat data.
pub const LARGE_RATIO: f64 = 1e12;

/// Relative tolerance under which limiter differences count as zero.
const FLAT_TOLERANCE: f64 = 1e-14;

/// Lower clamp for the control parameter.
pub const ALPHA_FLOOR: f64 = f64::EPSILON;

const FOOT_MAX_ITERATIONS: usize = 10;
const FOOT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AlphaMode {
    Adaptive,
    Fixed(f64),
}

impl AlphaMode {
    pub fn fixed(value: f64) -> Result<Self> {
        if value > 0.0 && value <= 1.0 {
            Ok(AlphaMode::Fixed(value))
        } else {
            Err(Error::Config(format!(
                "fixed alpha must lie in (0, 1], got {value}"
            )))
        }
    }
}

impl std::fmt::Display for AlphaMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AlphaMode::Adaptive => write!(f, "adaptive"),
            AlphaMode::Fixed(v) => write!(f, "fixed:{v}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LimiterKind {
    Minmod,
    VanAlbada,
}

impl LimiterKind {
    /// Limiter value for the ratio `r`. Minmod stays in `[0, 1]`; van Albada
    /// peaks at `(1 + sqrt 2) / 2` near `r = 2.41`.
    #[inline]
    pub fn apply(self, r: f64) -> f64 {
        match self {
            LimiterKind::Minmod => r.min(1.0).max(0.0),
            LimiterKind::VanAlbada => {
                if r > 0.0 {
                    (r * r + r) / (r * r + 1.0)
                } else {
                    0.0
                }
            }
        }
    }
}

/// Interface states produced by the predictor, indexed by interface
/// `0..=n_cells`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InterfaceStates {
    pub states: Vec<ConservedState>,
    pub alpha: Vec<f64>,
    pub foot: Vec<f64>,
}

impl InterfaceStates {
    fn resize(&mut self, n: usize) {
        self.states.resize(n, ConservedState::ZERO);
        self.alpha.resize(n, 0.0);
        self.foot.resize(n, 0.0);
    }
}

/// Per-stored-cell quantities reused by every interface in a step.
#[derive(Debug, Default)]
struct CellCache {
    u: Vec<f64>,
    p: Vec<f64>,
    pu: Vec<f64>,
    /// `max(|u + 2c/(gamma-1)|, |u - 2c/(gamma-1)|)`
    q: Vec<f64>,
    radius: Vec<f64>,
}

impl CellCache {
    fn fill(&mut self, field: &Field, gas: &GasModel) -> Result<()> {
        let cells = field.stored();
        let n = cells.len();
        self.u.resize(n, 0.0);
        self.p.resize(n, 0.0);
        self.pu.resize(n, 0.0);
        self.q.resize(n, 0.0);
        self.radius.resize(n, 0.0);
        let k = 2.0 / (gas.gamma() - 1.0);
        for (s, w) in cells.iter().enumerate() {
            let prim = gas.to_primitive_at(w, Location::Cell(s.saturating_sub(GHOST_LAYERS)))?;
            let c = gas.sound_speed_unchecked(prim.rho, prim.p);
            self.u[s] = prim.u;
            self.p[s] = prim.p;
            self.pu[s] = prim.p * prim.u;
            self.q[s] = (prim.u + k * c).abs().max((prim.u - k * c).abs());
            self.radius[s] = prim.u.abs() + c;
        }
        Ok(())
    }

    fn from_field(field: &Field, gas: &GasModel) -> Result<Self> {
        let mut cache = CellCache::default();
        cache.fill(field, gas)?;
        Ok(cache)
    }
}

/// Ratio of consecutive differences of `q` at the interface right of stored
/// cell `s`, with flat and ramp-into-flat data resolved explicitly.
#[inline]
fn ratio_at(q: &[f64], s: usize) -> f64 {
    let (qm, q0, qp) = (q[s - 1], q[s], q[s + 1]);
    let num = q0 - qm;
    let den = qp - q0;
    let tol = FLAT_TOLERANCE * qm.max(q0).max(qp);
    if den.abs() < tol {
        if num.abs() < tol {
            1.0
        } else {
            LARGE_RATIO.copysign(num)
        }
    } else {
        num / den
    }
}

/// Limiter value at the interface right of stored cell `s`. Minmod is
/// evaluated without dividing when the ratio is clearly outside (0, 1); the
/// result is the same as `limiter.apply(ratio_at(q, s))`.
#[inline]
fn phi_at(q: &[f64], s: usize, limiter: LimiterKind) -> f64 {
    if limiter != LimiterKind::Minmod {
        return limiter.apply(ratio_at(q, s));
    }
    let (qm, q0, qp) = (q[s - 1], q[s], q[s + 1]);
    let num = q0 - qm;
    let den = qp - q0;
    let tol = FLAT_TOLERANCE * qm.max(q0).max(qp);
    if den.abs() < tol {
        if num.abs() < tol || num > 0.0 {
            1.0
        } else {
            0.0
        }
    } else if num * den <= 0.0 {
        0.0
    } else if num.abs() >= den.abs() {
        1.0
    } else {
        num / den
    }
}

/// `half_dx_dt` is `dx / (2 dt)`.
#[inline]
fn alpha_at(
    cache: &CellCache,
    s: usize,
    half_dx_dt: f64,
    mode: AlphaMode,
    limiter: LimiterKind,
) -> f64 {
    match mode {
        AlphaMode::Fixed(v) => v,
        AlphaMode::Adaptive => {
            let speed = cache.radius[s].max(cache.radius[s + 1]);
            if !(speed > 0.0) {
                return 1.0;
            }
            let alpha_bar = half_dx_dt / speed;
            let phi = phi_at(&cache.q, s, limiter);
            (alpha_bar + (0.5 - alpha_bar) * phi).clamp(ALPHA_FLOOR, 1.0)
        }
    }
}

/// Fixed-point trace of the characteristic arriving at the interface right
/// of stored cell `s`. Returns the foot in window coordinates: 0 at the
/// center of stored cell `s - 1`, 1.5 at the interface, 3 at `s + 2`.
#[inline]
fn trace_at(u: &[f64], s: usize, courant_alpha: f64, interface: usize) -> Result<f64> {
    // local window over stored centers s-1 ..= s+2, face at 1.5
    let w: &[f64; 4] = u[s - 1..s + 3].try_into().expect("four-cell stencil");
    let mut xi = 1.5;
    for _ in 0..FOOT_MAX_ITERATIONS {
        let j = (xi as usize).min(2);
        let theta = xi - j as f64;
        let velocity = w[j] + theta * (w[j + 1] - w[j]);
        let next = 1.5 - courant_alpha * velocity;
        if !(0.0..=3.0).contains(&next) {
            return Err(Error::CflViolation {
                interface,
                displacement: 1.5 - next,
            });
        }
        let done = (next - xi).abs() < FOOT_TOLERANCE;
        xi = next;
        if done {
            break;
        }
    }
    Ok(xi)
}

/// Linear interpolation at window coordinate `xi` measured from stored
/// cell `base`.
#[inline]
fn interpolate_at(cells: &[ConservedState], base: usize, xi: f64) -> ConservedState {
    let j = xi as usize;
    let theta = xi - j as f64;
    if theta == 0.0 {
        cells[base + j]
    } else {
        cells[base + j].lerp(cells[base + j + 1], theta)
    }
}

#[allow(clippy::too_many_arguments)]
fn predict_into(
    field: &Field,
    cache: &CellCache,
    dt: f64,
    mode: AlphaMode,
    limiter: LimiterKind,
    gas: &GasModel,
    out: &mut InterfaceStates,
    fluxes: &mut Vec<Flux>,
) -> Result<()> {
    let mesh = field.mesh();
    let n = mesh.n_cells();
    let dx = mesh.dx();
    let cells = field.stored();
    let gm1 = gas.gamma() - 1.0;
    let half_dx_dt = dx / (2.0 * dt);
    out.resize(n + 1);
    fluxes.clear();
    for k in 0..=n {
        let s = GHOST_LAYERS + k - 1;
        let alpha = alpha_at(cache, s, half_dx_dt, mode, limiter);
        let tau = alpha * dt / dx;
        let xi = trace_at(&cache.u, s, tau, k)?;
        let foot = interpolate_at(cells, s - 1, xi);

        let du = cache.u[s + 1] - cache.u[s];
        let dp = cache.p[s + 1] - cache.p[s];
        let dpu = cache.pu[s + 1] - cache.pu[s];
        // source coefficients taken at the foot, where the characteristic starts
        let w = ConservedState {
            rho: foot.rho - tau * foot.rho * du,
            mom: foot.mom - tau * (foot.mom * du + dp),
            ener: foot.ener - tau * (foot.ener * du + dpu),
        };
        let u = w.mom / w.rho;
        let p = gm1 * (w.ener - 0.5 * w.mom * u);
        check_positive(w.rho, p, Location::Interface(k))?;
        fluxes.push(Flux {
            mass: w.mom,
            momentum: w.mom * u + p,
            energy: u * (w.ener + p),
        });

        out.states[k] = w;
        out.alpha[k] = alpha;
        out.foot[k] = mesh.stored_center(s - 1) + xi * dx;
    }
    Ok(())
}

/// Conservative update from interface fluxes. Returns the minimum density
/// and pressure over the updated cells.
pub(crate) fn conservative_update(
    field: &mut Field,
    fluxes: &[Flux],
    dt: f64,
    gas: &GasModel,
) -> Result<(f64, f64)> {
    let n = field.mesh().n_cells();
    let ratio = dt / field.mesh().dx();
    let mut min_rho = f64::INFINITY;
    let mut min_p = f64::INFINITY;
    for (i, w) in field.interior_mut().iter_mut().enumerate() {
        let df = fluxes[i + 1] - fluxes[i];
        w.rho -= ratio * df.mass;
        w.mom -= ratio * df.momentum;
        w.ener -= ratio * df.energy;
        let q = gas.to_primitive_at(w, Location::Cell(i))?;
        min_rho = min_rho.min(q.rho);
        min_p = min_p.min(q.p);
    }
    debug_assert_eq!(fluxes.len(), n + 1);
    Ok((min_rho, min_p))
}

/// Limiter function value; see [`LimiterKind::apply`].
pub fn limiter(kind: LimiterKind, r: f64) -> f64 {
    kind.apply(r)
}

/// Smoothness ratio at interface `k` built from the largest Riemann
/// invariant magnitude of the three cells `k-2, k-1, k`.
pub fn smoothness_ratio(field: &Field, k: usize, gas: &GasModel) -> Result<f64> {
    check_interface(field, k)?;
    let cache = CellCache::from_field(field, gas)?;
    Ok(ratio_at(&cache.q, GHOST_LAYERS + k - 1))
}

/// Control parameter at interface `k` for time step `dt`.
pub fn alpha(
    field: &Field,
    k: usize,
    dt: f64,
    mode: AlphaMode,
    kind: LimiterKind,
    gas: &GasModel,
) -> Result<f64> {
    check_interface(field, k)?;
    if !(dt > 0.0) {
        return Err(Error::Domain {
            what: "time step must be positive",
            value: dt,
        });
    }
    let cache = CellCache::from_field(field, gas)?;
    let half_dx_dt = field.mesh().dx() / (2.0 * dt);
    Ok(alpha_at(&cache, GHOST_LAYERS + k - 1, half_dx_dt, mode, kind))
}

/// Foot position `x_c` of the characteristic that reaches interface `k`
/// after `alpha * dt`, using piecewise-linear velocity between cell centers.
pub fn trace_foot(field: &Field, k: usize, alpha: f64, dt: f64) -> Result<f64> {
    check_interface(field, k)?;
    let u: Vec<f64> = field.stored().iter().map(|w| w.mom / w.rho).collect();
    let dx = field.mesh().dx();
    let s = GHOST_LAYERS + k - 1;
    let xi = trace_at(&u, s, alpha * dt / dx, k)?;
    Ok(field.mesh().stored_center(s - 1) + xi * dx)
}

/// Linear interpolation of the cell averages between the two cell centers
/// that bracket `x_c`.
pub fn interpolate_at_foot(field: &Field, x_c: f64) -> Result<ConservedState> {
    let mesh = field.mesh();
    let xi = (x_c - mesh.stored_center(0)) / mesh.dx();
    if !(xi >= 0.0 && xi <= (mesh.n_stored() - 1) as f64) {
        return Err(Error::OutOfSpan(x_c));
    }
    if xi == (mesh.n_stored() - 1) as f64 {
        return Ok(field.stored()[mesh.n_stored() - 1]);
    }
    Ok(interpolate_at(field.stored(), 0, xi))
}

/// Predictor stage: interface states for every interface of `field`, whose
/// ghost cells must already be populated.
pub fn predictor(
    field: &Field,
    dt: f64,
    mode: AlphaMode,
    kind: LimiterKind,
    gas: &GasModel,
) -> Result<InterfaceStates> {
    let cache = CellCache::from_field(field, gas)?;
    let mut out = InterfaceStates::default();
    predict_into(field, &cache, dt, mode, kind, gas, &mut out, &mut Vec::new())?;
    Ok(out)
}

/// Corrector stage: conservative update with the physical flux of the
/// interface states.
pub fn corrector(
    field: &Field,
    interfaces: &InterfaceStates,
    dt: f64,
    gas: &GasModel,
) -> Result<Field> {
    let n = field.mesh().n_cells();
    if interfaces.states.len() != n + 1 {
        return Err(Error::LengthMismatch {
            field: n + 1,
            reference: interfaces.states.len(),
        });
    }
    let fluxes: Vec<Flux> = interfaces.states.iter().map(|w| gas.physical_flux(w)).collect();
    let mut next = field.clone();
    conservative_update(&mut next, &fluxes, dt, gas).map_err(|e| e.at_step(field.step + 1))?;
    next.time += dt;
    next.step += 1;
    Ok(next)
}

fn check_interface(field: &Field, k: usize) -> Result<()> {
    if k > field.mesh().n_cells() {
        return Err(Error::Config(format!(
            "interface {k} out of range 0..={}",
            field.mesh().n_cells()
        )));
    }
    Ok(())
}

/// Stateful FVC integrator. Keeps work buffers and the lagged control
/// parameter between steps.
#[derive(Debug)]
pub struct FvcSolver {
    gas: GasModel,
    cfl: CflRule,
    mode: AlphaMode,
    limiter: LimiterKind,
    cache: CellCache,
    interfaces: InterfaceStates,
    fluxes: Vec<Flux>,
    has_alpha: bool,
}

impl FvcSolver {
    pub fn new(gas: GasModel, cfl: CflRule, mode: AlphaMode, limiter: LimiterKind) -> Self {
        FvcSolver {
            gas,
            cfl,
            mode,
            limiter,
            cache: CellCache::default(),
            interfaces: InterfaceStates::default(),
            fluxes: Vec::new(),
            has_alpha: false,
        }
    }

    /// Interface states of the last completed predictor stage.
    pub fn interfaces(&self) -> &InterfaceStates {
        &self.interfaces
    }
}

impl Scheme for FvcSolver {
    fn name(&self) -> &'static str {
        "fvc"
    }

    fn step(&mut self, field: &mut Field, t_end: f64) -> Result<StepReport> {
        let step = field.step + 1;
        field.apply_transmissive_bc();
        self.cache.fill(field, &self.gas).map_err(|e| e.at_step(step))?;

        let lagged = match (self.cfl.mode, self.has_alpha) {
            (CflMode::AlphaWeighted, true) => Some(self.interfaces.alpha.as_slice()),
            _ => None,
        };
        let dt = dt_from_radii(field.mesh(), &self.cache.radius, &self.cfl, lagged)?;
        let dt = clip_dt(field.time, dt, t_end);

        predict_into(
            field,
            &self.cache,
            dt,
            self.mode,
            self.limiter,
            &self.gas,
            &mut self.interfaces,
            &mut self.fluxes,
        )
        .map_err(|e| e.at_step(step))?;
        self.has_alpha = true;

        let (min_rho, min_p) =
            conservative_update(field, &self.fluxes, dt, &self.gas).map_err(|e| e.at_step(step))?;

        field.time += dt;
        field.step = step;
        let n = field.mesh().n_cells();
        Ok(StepReport {
            dt,
            left_flux: self.fluxes[0],
            right_flux: self.fluxes[n],
            min_rho,
            min_p,
        })
    }

    fn alpha(&self) -> Option<&[f64]> {
        if self.has_alpha {
            Some(&self.interfaces.alpha)
        } else {
            None
        }
    }
}

/// One FVC step on a copy of `field`: boundary fill, time step, predictor,
/// corrector. Returns the advanced field with the interface diagnostics.
pub fn fvc_step(
    field: &Field,
    config: &crate::scheme::SchemeConfig,
    gas: &GasModel,
    t_end: f64,
) -> Result<(Field, InterfaceStates)> {
    let mut solver = FvcSolver::new(*gas, config.cfl_rule()?, config.alpha_mode, config.limiter);
    let mut next = field.clone();
    solver.step(&mut next, t_end)?;
    Ok((next, solver.interfaces))
}
