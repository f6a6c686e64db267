//! Method-of-lines solver for the radial equation
//! `u_tt = u_rr + (n-1)/r u_r - (n-1)/2 sin(2u)/r² - f(u) f'(u)/r^alpha` on `[0, R]`.

mod data;
mod evolve;
mod grid;
mod integrator;
mod operator;
mod state;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use data::{make_bump, BumpSpec, VelocityProfile};
pub use evolve::{evolve, evolve_forced, ConeSample, RunHistory, SolverConfig, StepRecord};
pub use grid::RadialGrid;
pub use integrator::{step, Rk4, MAX_CFL};
pub use operator::{stable_length, Forcing, OriginClosure, SpatialOperator};
pub use state::{FieldState, ORIGIN_RELATIVE_TOLERANCE, ORIGIN_TOLERANCE};

/// Why a run was stopped as a suspected blow-up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum BlowUpReason {
    SupExceeded { sup: f64, threshold: f64 },
    EnergyJump { previous: f64, current: f64 },
    NonFinite { index: usize },
}

impl fmt::Display for BlowUpReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlowUpReason::SupExceeded { sup, threshold } => {
                write!(f, "sup|u| = {sup:e} exceeded threshold {threshold:e}")
            }
            BlowUpReason::EnergyJump { previous, current } => {
                write!(f, "energy jumped from {previous:e} to {current:e} in one step")
            }
            BlowUpReason::NonFinite { index } => write!(f, "non-finite value at cell {index}"),
        }
    }
}

#[derive(Debug, Error, Clone)]
pub enum SolverError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("array length {found} does not match grid of {expected} cells")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("non-finite value at step {step}, t = {t}, cell {index}")]
    NonFinite { step: usize, t: f64, index: usize },
    #[error("time step {dt:e} exceeds the stability limit {limit:e}")]
    CflViolation { dt: f64, limit: f64 },
    #[error("blow-up suspected at step {step}, t = {t}: {reason}")]
    BlowUpSuspected {
        step: usize,
        t: f64,
        reason: BlowUpReason,
        last_good: Box<FieldState>,
        history: Box<RunHistory>,
    },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("initial data violates u(t,0) = 0: extrapolated origin value {0:e}")]
    OriginCondition(f64),
}
