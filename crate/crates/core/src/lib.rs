//! Shooting for a closed rotational lambda-hypersurface of sphere type
//! whose profile curve crosses itself.
//!
//! The profile curve of a rotation hypersurface about the x-axis solves
//! `theta' = lambda + x sin(theta) - (z - (n-1)/z) cos(theta)`. Launching
//! perpendicularly from `(b, 0)` and following the curve through two vertical
//! tangents, the initial height `b0` at which the second one lands on the
//! z-axis closes the curve symmetrically. [`shooting`] finds `b0`,
//! [`verify`] checks the qualitative shape of the resulting profile and
//! [`geometry`] resamples, revolves and exports it.

pub mod geometry;
pub mod ode;
mod scalar;
pub mod shooting;
pub mod verify;

pub use ode::{CurveState, DenseBranch, OdeError, Params};
pub use scalar::Real;
pub use shooting::{ClosedProfile, ShootError, ShotClass, ShotReport};

pub type Params64 = Params<f64>;
pub type Params32 = Params<f32>;
pub type CurveState64 = CurveState<f64>;
pub type DenseBranch64 = DenseBranch<f64>;
pub type ShotReport64 = ShotReport<f64>;
pub type ClosedProfile64 = ClosedProfile<f64>;
