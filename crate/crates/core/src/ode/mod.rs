//! The profile equation, its special solutions and the integrator.

mod branch;
mod dopri;
mod exact;
mod params;
mod state;

use thiserror::Error;

pub use branch::{BranchKind, DenseBranch, DenseStep, Event, EventKind};
pub use dopri::{integrate, EventSpec, Trace, TerminalReason};
pub use exact::ExactCurve;
pub use params::Params;
pub use state::{
    axis_curvature, axis_series_start, chart_derivatives, chart_from_angle, equation_residual, rhs, series_state,
    CurveState, Derivs,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("equation evaluated on or below the axis (z = {z})")]
    AxisSingularity { z: f64 },
    #[error("graph chart undefined at a vertical tangent (sin theta = {sin_theta:e})")]
    VerticalTangent { sin_theta: f64 },
    #[error("step size underflow at s = {s} (h = {h:e})")]
    StepSizeUnderflow { s: f64, h: f64 },
    #[error("step budget exhausted at s = {s} after {steps} steps")]
    BudgetExceeded { s: f64, steps: usize },
}
