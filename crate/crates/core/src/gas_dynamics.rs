//! Ideal-gas thermodynamics for the 1D Euler system.
//!
//! Conserved variables are `(rho, rho*u, E)`, primitive variables are
//! `(rho, u, p)`. The closure is `e = p / ((gamma - 1) rho)`.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Location, Result};

/// Densities and pressures at or below this value count as a positivity
/// violation; they are never rounded up.
pub const POSITIVITY_FLOOR: f64 = 1e-12;

macro_rules! vector3_ops {
    ($ty:ident, $a:ident, $b:ident, $c:ident) => {
        impl $ty {
            pub const ZERO: $ty = $ty {
                $a: 0.0,
                $b: 0.0,
                $c: 0.0,
            };

            #[inline]
            pub fn to_array(self) -> [f64; 3] {
                [self.$a, self.$b, self.$c]
            }

            #[inline]
            pub fn from_array(v: [f64; 3]) -> Self {
                $ty {
                    $a: v[0],
                    $b: v[1],
                    $c: v[2],
                }
            }
        }

        impl Add for $ty {
            type Output = $ty;
            #[inline]
            fn add(self, o: $ty) -> $ty {
                $ty {
                    $a: self.$a + o.$a,
                    $b: self.$b + o.$b,
                    $c: self.$c + o.$c,
                }
            }
        }

        impl Sub for $ty {
            type Output = $ty;
            #[inline]
            fn sub(self, o: $ty) -> $ty {
                $ty {
                    $a: self.$a - o.$a,
                    $b: self.$b - o.$b,
                    $c: self.$c - o.$c,
                }
            }
        }

        impl Neg for $ty {
            type Output = $ty;
            #[inline]
            fn neg(self) -> $ty {
                $ty {
                    $a: -self.$a,
                    $b: -self.$b,
                    $c: -self.$c,
                }
            }
        }

        impl Mul<f64> for $ty {
            type Output = $ty;
            #[inline]
            fn mul(self, s: f64) -> $ty {
                $ty {
                    $a: self.$a * s,
                    $b: self.$b * s,
                    $c: self.$c * s,
                }
            }
        }

        impl Mul<$ty> for f64 {
            type Output = $ty;
            #[inline]
            fn mul(self, v: $ty) -> $ty {
                v * self
            }
        }

        impl AddAssign for $ty {
            #[inline]
            fn add_assign(&mut self, o: $ty) {
                *self = *self + o;
            }
        }

        impl SubAssign for $ty {
            #[inline]
            fn sub_assign(&mut self, o: $ty) {
                *self = *self - o;
            }
        }
    };
}

/// Cell value in conserved form.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ConservedState {
    pub rho: f64,
    pub mom: f64,
    pub ener: f64,
}

vector3_ops!(ConservedState, rho, mom, ener);

/// A flux vector: mass, momentum and energy fluxes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Flux {
    pub mass: f64,
    pub momentum: f64,
    pub energy: f64,
}

vector3_ops!(Flux, mass, momentum, energy);

impl Flux {
    /// Reinterprets a conserved-state difference as a flux-shaped vector.
    #[inline]
    pub fn from_state(w: ConservedState) -> Flux {
        Flux {
            mass: w.rho,
            momentum: w.mom,
            energy: w.ener,
        }
    }
}

impl ConservedState {
    pub fn new(rho: f64, mom: f64, ener: f64) -> Self {
        ConservedState { rho, mom, ener }
    }

    /// Linear interpolation `(1 - theta) * self + theta * other`.
    #[inline]
    pub fn lerp(self, other: ConservedState, theta: f64) -> ConservedState {
        self + (other - self) * theta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveState {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
}

impl PrimitiveState {
    pub fn new(rho: f64, u: f64, p: f64) -> Self {
        PrimitiveState { rho, u, p }
    }

    /// Checks `rho > 0` and `p > 0` against [`POSITIVITY_FLOOR`].
    pub fn validate(&self) -> Result<()> {
        check_positive(self.rho, self.p, Location::Unspecified)
    }
}

#[inline]
pub(crate) fn check_positive(rho: f64, p: f64, location: Location) -> Result<()> {
    // written so that NaN fails too
    if rho > POSITIVITY_FLOOR && p > POSITIVITY_FLOOR && rho.is_finite() && p.is_finite() {
        Ok(())
    } else {
        Err(Error::Positivity {
            location,
            step: 0,
            rho,
            p,
        })
    }
}

/// Ideal gas with constant ratio of specific heats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasModel {
    gamma: f64,
}

impl Default for GasModel {
    fn default() -> Self {
        GasModel { gamma: 1.4 }
    }
}

impl GasModel {
    pub fn new(gamma: f64) -> Result<Self> {
        if gamma > 1.0 && gamma.is_finite() {
            Ok(GasModel { gamma })
        } else {
            Err(Error::Domain {
                what: "ratio of specific heats must exceed 1",
                value: gamma,
            })
        }
    }

    #[inline]
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Specific internal energy `p / ((gamma - 1) rho)`.
    pub fn internal_energy(&self, prim: &PrimitiveState) -> Result<f64> {
        if !(prim.rho > 0.0) {
            return Err(Error::Domain {
                what: "density must be positive",
                value: prim.rho,
            });
        }
        Ok(prim.p / ((self.gamma - 1.0) * prim.rho))
    }

    #[inline]
    pub fn to_conserved(&self, prim: &PrimitiveState) -> ConservedState {
        ConservedState {
            rho: prim.rho,
            mom: prim.rho * prim.u,
            ener: prim.p / (self.gamma - 1.0) + 0.5 * prim.rho * prim.u * prim.u,
        }
    }

    /// Pressure recovered from a conserved state, without any checks.
    #[inline]
    pub fn pressure(&self, cons: &ConservedState) -> f64 {
        (self.gamma - 1.0) * (cons.ener - 0.5 * cons.mom * cons.mom / cons.rho)
    }

    /// Inverse of [`GasModel::to_conserved`]. Fails when the density or the
    /// recovered pressure is not positive.
    pub fn to_primitive(&self, cons: &ConservedState) -> Result<PrimitiveState> {
        self.to_primitive_at(cons, Location::Unspecified)
    }

    #[inline]
    pub(crate) fn to_primitive_at(
        &self,
        cons: &ConservedState,
        location: Location,
    ) -> Result<PrimitiveState> {
        let u = cons.mom / cons.rho;
        let p = (self.gamma - 1.0) * (cons.ener - 0.5 * cons.mom * u);
        check_positive(cons.rho, p, location)?;
        Ok(PrimitiveState { rho: cons.rho, u, p })
    }

    /// `c = sqrt(gamma p / rho)`; zero pressure gives zero.
    pub fn sound_speed(&self, prim: &PrimitiveState) -> Result<f64> {
        if !(prim.rho > 0.0) {
            return Err(Error::Domain {
                what: "density must be positive",
                value: prim.rho,
            });
        }
        if prim.p < 0.0 || prim.p.is_nan() {
            return Err(Error::Domain {
                what: "pressure must be non-negative",
                value: prim.p,
            });
        }
        Ok((self.gamma * prim.p / prim.rho).sqrt())
    }

    #[inline]
    pub(crate) fn sound_speed_unchecked(&self, rho: f64, p: f64) -> f64 {
        (self.gamma * p / rho).sqrt()
    }

    /// Signed Mach number `u / c`.
    pub fn mach_number(&self, prim: &PrimitiveState) -> Result<f64> {
        let c = self.sound_speed(prim)?;
        if c == 0.0 {
            return Err(Error::Domain {
                what: "Mach number undefined at zero sound speed",
                value: c,
            });
        }
        Ok(prim.u / c)
    }

    /// Physical flux `(rho u, rho u^2 + p, u (E + p))`.
    #[inline]
    pub fn physical_flux(&self, cons: &ConservedState) -> Flux {
        let u = cons.mom / cons.rho;
        let p = (self.gamma - 1.0) * (cons.ener - 0.5 * cons.mom * u);
        Flux {
            mass: cons.mom,
            momentum: cons.mom * u + p,
            energy: u * (cons.ener + p),
        }
    }

    /// Eigenvalues of the flux Jacobian, ascending: `(u - c, u, u + c)`.
    pub fn eigenvalues(&self, prim: &PrimitiveState) -> [f64; 3] {
        let c = self.sound_speed_unchecked(prim.rho, prim.p.max(0.0));
        [prim.u - c, prim.u, prim.u + c]
    }

    /// Spectral radius `|u| + c`.
    #[inline]
    pub fn spectral_radius(&self, prim: &PrimitiveState) -> f64 {
        prim.u.abs() + self.sound_speed_unchecked(prim.rho, prim.p.max(0.0))
    }

    /// `(u - 2c/(gamma-1), u + 2c/(gamma-1))`.
    pub fn riemann_invariants(&self, prim: &PrimitiveState) -> (f64, f64) {
        let c = self.sound_speed_unchecked(prim.rho, prim.p.max(0.0));
        let k = 2.0 * c / (self.gamma - 1.0);
        (prim.u - k, prim.u + k)
    }

    /// Total specific enthalpy `(E + p) / rho`.
    pub fn total_enthalpy(&self, cons: &ConservedState) -> f64 {
        (cons.ener + self.pressure(cons)) / cons.rho
    }

    /// Flux Jacobian `dF/dW` of the ideal-gas Euler flux, row-major.
    pub fn jacobian(&self, cons: &ConservedState) -> [[f64; 3]; 3] {
        let g = self.gamma;
        let u = cons.mom / cons.rho;
        let h = self.total_enthalpy(cons);
        [
            [0.0, 1.0, 0.0],
            [0.5 * (g - 3.0) * u * u, (3.0 - g) * u, g - 1.0],
            [(0.5 * (g - 1.0) * u * u - h) * u, h + (1.0 - g) * u * u, g * u],
        ]
    }

    /// Right eigenvectors for velocity `u`, sound speed `c` and total
    /// enthalpy `h`, ordered with the eigenvalues.
    pub fn right_eigenvectors(u: f64, c: f64, h: f64) -> [Flux; 3] {
        [
            Flux::from_array([1.0, u - c, h - u * c]),
            Flux::from_array([1.0, u, 0.5 * u * u]),
            Flux::from_array([1.0, u + c, h + u * c]),
        ]
    }
}
