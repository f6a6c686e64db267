//! Light-cone diagnostics computed from a [`RunHistory`](crate::solver::RunHistory).
//!
//! All quantities use the reflected time `t = apex - t_lab`, so the cone
//! `K(S,T) = {0 <= r <= t, S <= t <= T}` shrinks to the apex as `t -> 0`, and the radial
//! measure `r^(n-1) dr` with the sphere area dropped.

mod bogomolny;
mod bounds;
mod cone;
mod density;
mod energy;
mod multiplier;

use serde::Serialize;
use thiserror::Error;

use crate::nonlinearity::ProfileError;

pub use bogomolny::{bogomolny_check, bogomolny_profile, BogomolnyPoint, BogomolnyReport};
pub use bounds::{
    dyadic_scan, dyadic_times, growth_factor, lemma_bounds, sup_probe, tip_energy, BoundCheck, DyadicScan,
    LemmaReport,
};
pub use cone::ConeRegion;
pub use density::{cone_integral, densities, point_densities, DensitySlice, PointDensity};
pub use energy::{cone_energy, energy_flux_residual, energy_ledger, flux, flux_decay, EnergyLedger, LedgerEntry};
pub use multiplier::{
    energyint_decomposition, multiplier_residual, Coefficient, EnergyIntLedger, Multiplier, ResidualReport,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error("the run has no cone apex; set one to enable cone diagnostics")]
    NoApex,
    #[error("invalid cone region: need 0 <= S <= T, got S = {s}, T = {t}")]
    InvalidRegion { s: f64, t: f64 },
    #[error("time {time} lies outside the recorded window [{lo}, {hi}]")]
    OutsideWindow { time: f64, lo: f64, hi: f64 },
    #[error("no retained slice at time {time}; align region ends with the snapshot stride")]
    NotRetained { time: f64 },
    #[error("cone radius {t} exceeds the grid radius {radius}")]
    BeyondGrid { t: f64, radius: f64 },
    #[error("the Bogomolny bound needs alpha >= 2(n-1) = {required}, got {alpha}")]
    AlphaBelowThreshold { alpha: f64, required: f64 },
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

/// Grid parameters attached to diagnostic reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridInfo {
    pub h: f64,
    pub cells: usize,
    pub dt: f64,
}

impl GridInfo {
    pub fn of(history: &crate::solver::RunHistory) -> Self {
        GridInfo { h: history.grid.h(), cells: history.grid.cells(), dt: history.dt }
    }
}
