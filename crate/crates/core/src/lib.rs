//! One-dimensional compressible Euler solvers: the finite volume
//! characteristics (FVC) scheme, Rusanov, HLL and Roe reference fluxes, an
//! exact Riemann solver and a benchmark harness.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classic_schemes;
pub mod error;
pub mod exact_riemann;
pub mod fvc;
pub mod gas_dynamics;
pub mod harness;
pub mod mesh;
pub mod scheme;

pub use error::{Error, Location, Result};
pub use gas_dynamics::{ConservedState, Flux, GasModel, PrimitiveState};
pub use mesh::{CflMode, CflRule, Field, Mesh};
pub use scheme::{Scheme, SchemeConfig, SchemeKind, StepReport};
