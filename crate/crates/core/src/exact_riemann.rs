//! Exact Riemann solver for the ideal-gas Euler equations.
//!
//! Newton iteration on the star-pressure function from a two-rarefaction
//! initial guess, then self-similar sampling of the wave fan. Data that
//! generates vacuum gets an explicit vacuum fan instead of a star state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas_dynamics::{GasModel, PrimitiveState};
use crate::mesh::Mesh;

const NEWTON_TOLERANCE: f64 = 1e-12;
const NEWTON_MAX_ITERATIONS: usize = 100;
/// Floor on the initial guess relative to the smaller input pressure.
const PRESSURE_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StarState {
    pub p_star: f64,
    pub u_star: f64,
    pub rho_star_left: f64,
    pub rho_star_right: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Wave {
    Shock { speed: f64 },
    Rarefaction { head: f64, tail: f64 },
}

impl Wave {
    pub fn is_shock(&self) -> bool {
        matches!(self, Wave::Shock { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveFan {
    pub left: Wave,
    pub contact: f64,
    pub right: Wave,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RiemannSolution {
    Star { star: StarState, fan: WaveFan },
    /// Two rarefactions separated by vacuum between `left_tail` and
    /// `right_tail`.
    Vacuum {
        left_head: f64,
        left_tail: f64,
        right_tail: f64,
        right_head: f64,
    },
}

/// Solved Riemann problem, ready for sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactRiemann {
    pub left: PrimitiveState,
    pub right: PrimitiveState,
    pub solution: RiemannSolution,
    pub iterations: usize,
    gamma: f64,
    c_left: f64,
    c_right: f64,
}

/// Value and derivative of the one-sided pressure function `f_K(p)`:
/// the velocity jump across the `K` wave when the star pressure is `p`.
pub fn pressure_function(p: f64, state: &PrimitiveState, gamma: f64) -> (f64, f64) {
    let c = (gamma * state.p / state.rho).sqrt();
    if p > state.p {
        let a = 2.0 / ((gamma + 1.0) * state.rho);
        let b = (gamma - 1.0) / (gamma + 1.0) * state.p;
        let root = (a / (p + b)).sqrt();
        let f = (p - state.p) * root;
        (f, root * (1.0 - 0.5 * (p - state.p) / (b + p)))
    } else {
        let z = (gamma - 1.0) / (2.0 * gamma);
        let ratio = p / state.p;
        let f = 2.0 * c / (gamma - 1.0) * (ratio.powf(z) - 1.0);
        let df = ratio.powf(-(gamma + 1.0) / (2.0 * gamma)) / (state.rho * c);
        (f, df)
    }
}

fn two_rarefaction_guess(l: &PrimitiveState, r: &PrimitiveState, cl: f64, cr: f64, g: f64) -> f64 {
    let z = (g - 1.0) / (2.0 * g);
    let num = cl + cr - 0.5 * (g - 1.0) * (r.u - l.u);
    let den = cl / l.p.powf(z) + cr / r.p.powf(z);
    (num / den).max(0.0).powf(1.0 / z)
}

impl ExactRiemann {
    pub fn solve(left: PrimitiveState, right: PrimitiveState, gas: &GasModel) -> Result<Self> {
        left.validate()?;
        right.validate()?;
        let g = gas.gamma();
        let cl = gas.sound_speed(&left)?;
        let cr = gas.sound_speed(&right)?;
        let mut out = ExactRiemann {
            left,
            right,
            solution: RiemannSolution::Vacuum {
                left_head: 0.0,
                left_tail: 0.0,
                right_tail: 0.0,
                right_head: 0.0,
            },
            iterations: 0,
            gamma: g,
            c_left: cl,
            c_right: cr,
        };

        let critical = 2.0 * (cl + cr) / (g - 1.0);
        if critical <= right.u - left.u {
            out.solution = RiemannSolution::Vacuum {
                left_head: left.u - cl,
                left_tail: left.u + 2.0 * cl / (g - 1.0),
                right_tail: right.u - 2.0 * cr / (g - 1.0),
                right_head: right.u + cr,
            };
            return Ok(out);
        }

        let floor = PRESSURE_FLOOR * left.p.min(right.p);
        let du = right.u - left.u;
        let mut p = two_rarefaction_guess(&left, &right, cl, cr, g).max(floor);
        let mut converged = false;
        for it in 1..=NEWTON_MAX_ITERATIONS {
            let (fl, dfl) = pressure_function(p, &left, g);
            let (fr, dfr) = pressure_function(p, &right, g);
            let newton = p - (fl + fr + du) / (dfl + dfr);
            // near-vacuum data can overshoot below zero; shrink instead
            let next = if newton > 0.0 { newton } else { 0.1 * p };
            let change = 2.0 * (next - p).abs() / (next + p);
            p = next;
            out.iterations = it;
            if change < NEWTON_TOLERANCE {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence(NEWTON_MAX_ITERATIONS));
        }

        let (fl, _) = pressure_function(p, &left, g);
        let (fr, _) = pressure_function(p, &right, g);
        let u = 0.5 * (left.u + right.u) + 0.5 * (fr - fl);

        let g6 = (g - 1.0) / (g + 1.0);
        let z = (g - 1.0) / (2.0 * g);
        let side = |s: &PrimitiveState, c: f64, sign: f64| -> (f64, Wave) {
            let ratio = p / s.p;
            if p > s.p {
                let rho = s.rho * (ratio + g6) / (g6 * ratio + 1.0);
                let speed = s.u + sign * c * ((g + 1.0) / (2.0 * g) * ratio + z).sqrt();
                (rho, Wave::Shock { speed })
            } else {
                let rho = s.rho * ratio.powf(1.0 / g);
                let c_star = c * ratio.powf(z);
                (
                    rho,
                    Wave::Rarefaction {
                        head: s.u + sign * c,
                        tail: u + sign * c_star,
                    },
                )
            }
        };
        let (rho_l, wave_l) = side(&left, cl, -1.0);
        let (rho_r, wave_r) = side(&right, cr, 1.0);
        out.solution = RiemannSolution::Star {
            star: StarState {
                p_star: p,
                u_star: u,
                rho_star_left: rho_l,
                rho_star_right: rho_r,
            },
            fan: WaveFan {
                left: wave_l,
                contact: u,
                right: wave_r,
            },
        };
        Ok(out)
    }

    pub fn star(&self) -> Option<&StarState> {
        match &self.solution {
            RiemannSolution::Star { star, .. } => Some(star),
            RiemannSolution::Vacuum { .. } => None,
        }
    }

    pub fn fan(&self) -> Option<&WaveFan> {
        match &self.solution {
            RiemannSolution::Star { fan, .. } => Some(fan),
            RiemannSolution::Vacuum { .. } => None,
        }
    }

    fn left_fan(&self, xi: f64) -> PrimitiveState {
        let g = self.gamma;
        let (l, c) = (&self.left, self.c_left);
        let base = 2.0 / (g + 1.0) + (g - 1.0) / ((g + 1.0) * c) * (l.u - xi);
        PrimitiveState {
            rho: l.rho * base.powf(2.0 / (g - 1.0)),
            u: 2.0 / (g + 1.0) * (c + 0.5 * (g - 1.0) * l.u + xi),
            p: l.p * base.powf(2.0 * g / (g - 1.0)),
        }
    }

    fn right_fan(&self, xi: f64) -> PrimitiveState {
        let g = self.gamma;
        let (r, c) = (&self.right, self.c_right);
        let base = 2.0 / (g + 1.0) - (g - 1.0) / ((g + 1.0) * c) * (r.u - xi);
        PrimitiveState {
            rho: r.rho * base.powf(2.0 / (g - 1.0)),
            u: 2.0 / (g + 1.0) * (-c + 0.5 * (g - 1.0) * r.u + xi),
            p: r.p * base.powf(2.0 * g / (g - 1.0)),
        }
    }

    /// Solution at similarity coordinate `xi = x / t`. Points exactly on
    /// the contact take the left star state. Vacuum carries `u = xi`.
    pub fn sample(&self, xi: f64) -> PrimitiveState {
        match self.solution {
            RiemannSolution::Vacuum {
                left_head,
                left_tail,
                right_tail,
                right_head,
            } => {
                if xi <= left_head {
                    self.left
                } else if xi < left_tail {
                    self.left_fan(xi)
                } else if xi <= right_tail {
                    PrimitiveState {
                        rho: 0.0,
                        u: xi,
                        p: 0.0,
                    }
                } else if xi < right_head {
                    self.right_fan(xi)
                } else {
                    self.right
                }
            }
            RiemannSolution::Star { star, fan } => {
                if xi <= fan.contact {
                    match fan.left {
                        Wave::Shock { speed } => {
                            if xi < speed {
                                self.left
                            } else {
                                PrimitiveState::new(star.rho_star_left, star.u_star, star.p_star)
                            }
                        }
                        Wave::Rarefaction { head, tail } => {
                            if xi <= head {
                                self.left
                            } else if xi >= tail {
                                PrimitiveState::new(star.rho_star_left, star.u_star, star.p_star)
                            } else {
                                self.left_fan(xi)
                            }
                        }
                    }
                } else {
                    match fan.right {
                        Wave::Shock { speed } => {
                            if xi > speed {
                                self.right
                            } else {
                                PrimitiveState::new(star.rho_star_right, star.u_star, star.p_star)
                            }
                        }
                        Wave::Rarefaction { head, tail } => {
                            if xi >= head {
                                self.right
                            } else if xi <= tail {
                                PrimitiveState::new(star.rho_star_right, star.u_star, star.p_star)
                            } else {
                                self.right_fan(xi)
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Exact solution at every cell center of `mesh` at time `t`. At `t = 0`
/// this is the initial jump, with the split point itself on the right.
pub fn exact_profile(
    left: PrimitiveState,
    right: PrimitiveState,
    x_split: f64,
    t: f64,
    mesh: &Mesh,
    gas: &GasModel,
) -> Result<Vec<PrimitiveState>> {
    if !(t >= 0.0) {
        return Err(Error::Domain {
            what: "time must be non-negative",
            value: t,
        });
    }
    let solver = ExactRiemann::solve(left, right, gas)?;
    Ok(mesh
        .cell_centers()
        .into_iter()
        .map(|x| {
            if t == 0.0 {
                if x < x_split {
                    left
                } else {
                    right
                }
            } else {
                solver.sample((x - x_split) / t)
            }
        })
        .collect())
}
