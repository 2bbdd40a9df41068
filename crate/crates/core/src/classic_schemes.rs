//! Reference Godunov-type fluxes: Rusanov, HLL and Roe with Harten's
//! entropy fix, all driven by the same conservative update as FVC.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Location, Result};
use crate::fvc::conservative_update;
use crate::gas_dynamics::{ConservedState, Flux, GasModel};
use crate::mesh::{clip_dt, CflRule, Field, GHOST_LAYERS};
use crate::scheme::{Scheme, StepReport};

/// Harten threshold as a fraction of the Roe-averaged sound speed.
pub const DEFAULT_HARTEN_EPSILON: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NumericalFlux {
    Rusanov,
    Hll,
    RoeHarten { epsilon: f64 },
}

/// One side of an interface, unpacked once.
#[derive(Clone, Copy)]
struct Side {
    w: ConservedState,
    u: f64,
    p: f64,
    c: f64,
    f: Flux,
}

impl Side {
    #[inline]
    fn new(w: &ConservedState, gas: &GasModel, location: Location) -> Result<Side> {
        let q = gas.to_primitive_at(w, location)?;
        let c = gas.sound_speed_unchecked(q.rho, q.p);
        Ok(Side {
            w: *w,
            u: q.u,
            p: q.p,
            c,
            f: Flux {
                mass: w.mom,
                momentum: w.mom * q.u + q.p,
                energy: q.u * (w.ener + q.p),
            },
        })
    }
}

#[inline]
fn rusanov_sides(l: &Side, r: &Side) -> Flux {
    let s = (l.u.abs() + l.c).max(r.u.abs() + r.c);
    (l.f + r.f) * 0.5 - Flux::from_state(r.w - l.w) * (0.5 * s)
}

#[inline]
fn hll_sides(l: &Side, r: &Side) -> Flux {
    let s_l = (l.u - l.c).min(r.u - r.c);
    let s_r = (l.u + l.c).max(r.u + r.c);
    if s_l >= 0.0 {
        l.f
    } else if s_r <= 0.0 {
        r.f
    } else if s_r == s_l {
        rusanov_sides(l, r)
    } else {
        (l.f * s_r - r.f * s_l + Flux::from_state(r.w - l.w) * (s_l * s_r)) * (1.0 / (s_r - s_l))
    }
}

#[inline]
fn harten(lambda: f64, delta: f64) -> f64 {
    let a = lambda.abs();
    if a < delta {
        (lambda * lambda + delta * delta) / (2.0 * delta)
    } else {
        a
    }
}

#[inline]
fn roe_sides(l: &Side, r: &Side, epsilon: f64, gamma: f64) -> Result<Flux> {
    let sl = l.w.rho.sqrt();
    let sr = r.w.rho.sqrt();
    let inv = 1.0 / (sl + sr);
    let hl = (l.w.ener + l.p) / l.w.rho;
    let hr = (r.w.ener + r.p) / r.w.rho;
    let u = (sl * l.u + sr * r.u) * inv;
    let h = (sl * hl + sr * hr) * inv;
    let c2 = (gamma - 1.0) * (h - 0.5 * u * u);
    if !(c2 > 0.0) {
        return Err(Error::RoeAverage(c2));
    }
    let c = c2.sqrt();
    let rho = sl * sr;

    let d_rho = r.w.rho - l.w.rho;
    let d_u = r.u - l.u;
    let d_p = r.p - l.p;
    let a1 = (d_p - rho * c * d_u) / (2.0 * c2);
    let a2 = d_rho - d_p / c2;
    let a3 = (d_p + rho * c * d_u) / (2.0 * c2);

    let delta = epsilon * c;
    let l1 = harten(u - c, delta);
    let l2 = u.abs();
    let l3 = harten(u + c, delta);

    let [r1, r2, r3] = GasModel::right_eigenvectors(u, c, h);
    let dissipation = r1 * (a1 * l1) + r2 * (a2 * l2) + r3 * (a3 * l3);
    Ok((l.f + r.f) * 0.5 - dissipation * 0.5)
}

fn sides(
    left: &ConservedState,
    right: &ConservedState,
    gas: &GasModel,
) -> Result<(Side, Side)> {
    Ok((
        Side::new(left, gas, Location::Unspecified)?,
        Side::new(right, gas, Location::Unspecified)?,
    ))
}

/// Local Lax-Friedrichs flux.
pub fn rusanov_flux(left: &ConservedState, right: &ConservedState, gas: &GasModel) -> Result<Flux> {
    let (l, r) = sides(left, right, gas)?;
    Ok(rusanov_sides(&l, &r))
}

/// HLL flux with Davis wave-speed estimates.
pub fn hll_flux(left: &ConservedState, right: &ConservedState, gas: &GasModel) -> Result<Flux> {
    let (l, r) = sides(left, right, gas)?;
    Ok(hll_sides(&l, &r))
}

/// Roe flux with Harten's fix on the acoustic fields, threshold
/// `epsilon * c_roe`. `epsilon = 0` is the plain Roe flux.
pub fn roe_harten_flux(
    left: &ConservedState,
    right: &ConservedState,
    gas: &GasModel,
    epsilon: f64,
) -> Result<Flux> {
    if !(epsilon >= 0.0) {
        return Err(Error::Domain {
            what: "entropy-fix parameter must be non-negative",
            value: epsilon,
        });
    }
    let (l, r) = sides(left, right, gas)?;
    roe_sides(&l, &r, epsilon, gas.gamma())
}

impl NumericalFlux {
    pub fn evaluate(
        &self,
        left: &ConservedState,
        right: &ConservedState,
        gas: &GasModel,
    ) -> Result<Flux> {
        match *self {
            NumericalFlux::Rusanov => rusanov_flux(left, right, gas),
            NumericalFlux::Hll => hll_flux(left, right, gas),
            NumericalFlux::RoeHarten { epsilon } => roe_harten_flux(left, right, gas, epsilon),
        }
    }
}

/// Stateful driver for a classic flux. Conversions happen per interface,
/// the way a flux routine taking two conserved states works.
#[derive(Debug)]
pub struct GodunovSolver {
    gas: GasModel,
    cfl: CflRule,
    flux: NumericalFlux,
    fluxes: Vec<Flux>,
}

impl GodunovSolver {
    pub fn new(gas: GasModel, cfl: CflRule, flux: NumericalFlux) -> Self {
        GodunovSolver {
            gas,
            cfl,
            flux,
            fluxes: Vec::new(),
        }
    }

    fn fill_fluxes<F>(&mut self, field: &Field, mut flux: F) -> Result<()>
    where
        F: FnMut(&Side, &Side) -> Result<Flux>,
    {
        let cells = field.stored();
        let n = field.mesh().n_cells();
        self.fluxes.clear();
        for k in 0..=n {
            let s = GHOST_LAYERS + k - 1;
            let l = Side::new(&cells[s], &self.gas, Location::Interface(k))?;
            let r = Side::new(&cells[s + 1], &self.gas, Location::Interface(k))?;
            self.fluxes.push(flux(&l, &r)?);
        }
        Ok(())
    }
}

fn max_radius(field: &Field, gas: &GasModel) -> Result<f64> {
    let mut max = 0.0f64;
    for (i, w) in field.interior().iter().enumerate() {
        let q = gas.to_primitive_at(w, Location::Cell(i))?;
        max = max.max(q.u.abs() + gas.sound_speed_unchecked(q.rho, q.p));
    }
    if !(max > 0.0) {
        return Err(Error::NoWaveSpeed);
    }
    Ok(max)
}

impl Scheme for GodunovSolver {
    fn name(&self) -> &'static str {
        match self.flux {
            NumericalFlux::Rusanov => "rusanov",
            NumericalFlux::Hll => "hll",
            NumericalFlux::RoeHarten { .. } => "roe",
        }
    }

    fn step(&mut self, field: &mut Field, t_end: f64) -> Result<StepReport> {
        let step = field.step + 1;
        field.apply_transmissive_bc();
        let radius = max_radius(field, &self.gas).map_err(|e| e.at_step(step))?;
        let dt = clip_dt(field.time, self.cfl.courant * field.mesh().dx() / radius, t_end);

        let gamma = self.gas.gamma();
        let filled = match self.flux {
            NumericalFlux::Rusanov => self.fill_fluxes(field, |l, r| Ok(rusanov_sides(l, r))),
            NumericalFlux::Hll => self.fill_fluxes(field, |l, r| Ok(hll_sides(l, r))),
            NumericalFlux::RoeHarten { epsilon } => {
                self.fill_fluxes(field, |l, r| roe_sides(l, r, epsilon, gamma))
            }
        };
        filled.map_err(|e| e.at_step(step))?;
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
}

/// One step of a classic scheme on a copy of `field`: boundary fill, base
/// time step, interface fluxes, conservative update.
pub fn godunov_type_step(
    field: &Field,
    flux: NumericalFlux,
    rule: &CflRule,
    gas: &GasModel,
    t_end: f64,
) -> Result<Field> {
    let mut solver = GodunovSolver::new(*gas, CflRule::base(rule.courant)?, flux);
    let mut next = field.clone();
    solver.step(&mut next, t_end)?;
    Ok(next)
}
