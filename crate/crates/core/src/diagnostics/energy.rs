use serde::Serialize;

use crate::nonlinearity::Model;
use crate::solver::{FieldState, OriginClosure, RadialGrid, RunHistory, SpatialOperator};

use super::cone::{ConeRegion, ConeView};
use super::density::cone_integral;
use super::DiagnosticsError;

/// `E(T) = ∫_0^T e⁺ r^(n-1) dr` on a slice, with `e⁺` the scheme-consistent density of
/// [`SpatialOperator::energy_density`].
pub fn cone_energy(state: &FieldState, t: f64, grid: &RadialGrid, model: &Model) -> Result<f64, DiagnosticsError> {
    let op = SpatialOperator::new(*grid, *model, OriginClosure::Odd);
    let mut e = vec![0.0; grid.cells()];
    op.energy_density(&state.u, &state.v, &mut e);
    cone_integral(&e, grid, model.params.n, t)
}

/// `F(S,T) = ∫_S^T t^(n-1) (e⁺ + m)(t, t) dt`: the flux through the cone boundary.
pub fn flux(history: &RunHistory, s: f64, t: f64) -> Result<f64, DiagnosticsError> {
    let view = ConeView::new(history)?;
    let region = ConeRegion::new(s, t)?;
    view.surface_integral(&region, &|p| 0.5 * (p.ut + p.ur).powi(2) + (p.e_plus - 0.5 * (p.ut * p.ut + p.ur * p.ur)))
}

/// `F(T) = lim_{S -> 0} F(S,T)`, using the earliest recorded cone sample.
pub fn flux_decay(history: &RunHistory, t: f64) -> Result<f64, DiagnosticsError> {
    let start = history.cone_series().first().map(|(t, _)| *t).ok_or(DiagnosticsError::NoApex)?;
    flux(history, start, t)
}

fn slice_energy(view: &ConeView, t: f64) -> Result<f64, DiagnosticsError> {
    let slice = view.slice(t)?;
    cone_energy(&slice, t, &view.history.grid, &view.model)
}

/// `E(T) - E(S) - F(S,T)`, which vanishes for the exact solution.
pub fn energy_flux_residual(history: &RunHistory, s: f64, t: f64) -> Result<f64, DiagnosticsError> {
    let view = ConeView::new(history)?;
    ConeRegion::new(s, t)?;
    let e_t = slice_energy(&view, t)?;
    let e_s = slice_energy(&view, s)?;
    Ok(e_t - e_s - flux(history, s, t)?)
}

/// One step of the energy ledger between consecutive retained slices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LedgerEntry {
    pub s: f64,
    pub t: f64,
    pub energy_s: f64,
    pub energy_t: f64,
    pub flux: f64,
    pub residual: f64,
}

/// Cone energies at every retained slice and fluxes between them, in increasing reflected time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyLedger {
    pub times: Vec<f64>,
    pub energies: Vec<f64>,
    /// `F(times[0], times[k])`.
    pub cumulative_flux: Vec<f64>,
    pub entries: Vec<LedgerEntry>,
}

impl EnergyLedger {
    /// Smallest `F(S,T)` over all pairs of retained times.
    pub fn min_pair_flux(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.times.len() {
            for j in i..self.times.len() {
                best = best.min(self.cumulative_flux[j] - self.cumulative_flux[i]);
            }
        }
        if best.is_finite() {
            best
        } else {
            0.0
        }
    }

    /// Largest decrease `E(t_k) - E(t_{k+1})` between consecutive retained slices (negative
    /// when the energy increases everywhere).
    pub fn max_energy_decrease(&self) -> f64 {
        self.energies.windows(2).map(|w| w[0] - w[1]).fold(f64::NEG_INFINITY, f64::max).max(0.0)
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.entries.iter().map(|e| e.residual.abs()).fold(0.0, f64::max)
    }
}

/// Ledger over every retained slice whose cone fits in the grid.
pub fn energy_ledger(history: &RunHistory) -> Result<EnergyLedger, DiagnosticsError> {
    let view = ConeView::new(history)?;
    let (lo, hi) = history.reflected_window().ok_or(DiagnosticsError::NoApex)?;
    let slices: Vec<FieldState> = history
        .reflected_slices(lo, hi)
        .into_iter()
        .filter(|s| s.t >= 0.0 && s.t <= history.grid.radius())
        .collect();
    let mut times = Vec::with_capacity(slices.len());
    let mut energies = Vec::with_capacity(slices.len());
    for s in &slices {
        times.push(s.t);
        energies.push(cone_energy(s, s.t, &history.grid, &view.model)?);
    }
    let mut cumulative_flux = vec![0.0; times.len()];
    let mut entries = Vec::with_capacity(times.len().saturating_sub(1));
    for k in 1..times.len() {
        let f = flux(history, times[k - 1], times[k])?;
        cumulative_flux[k] = cumulative_flux[k - 1] + f;
        entries.push(LedgerEntry {
            s: times[k - 1],
            t: times[k],
            energy_s: energies[k - 1],
            energy_t: energies[k],
            flux: f,
            residual: energies[k] - energies[k - 1] - f,
        });
    }
    Ok(EnergyLedger { times, energies, cumulative_flux, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinearity::Profile;
    use crate::solver::{evolve, SolverConfig};

    fn zero_run() -> RunHistory {
        let grid = RadialGrid::with_radius(4.0, 1.0 / 64.0).unwrap();
        let model = Model::new(3, 4.0, Profile::AdkinsNappi).unwrap();
        let cfg = SolverConfig { apex: Some(1.0), snapshot_stride: 4, ..Default::default() };
        evolve(&cfg, FieldState::zeros(0.0, grid.cells()), &grid, &model).unwrap()
    }

    #[test]
    fn zero_run_has_zero_energy_and_flux() {
        let h = zero_run();
        assert_eq!(flux(&h, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(energy_flux_residual(&h, 0.25, 1.0).unwrap(), 0.0);
        let ledger = energy_ledger(&h).unwrap();
        assert!(ledger.energies.iter().all(|&e| e == 0.0));
        assert_eq!(ledger.min_pair_flux(), 0.0);
    }

    #[test]
    fn errors_outside_window() {
        let h = zero_run();
        assert!(matches!(flux(&h, 0.5, 1.5), Err(DiagnosticsError::OutsideWindow { .. })));
        assert!(matches!(flux(&h, 0.6, 0.5), Err(DiagnosticsError::InvalidRegion { .. })));
        // 0.3 is not a multiple of the stride
        assert!(matches!(energy_flux_residual(&h, 0.3, 1.0), Err(DiagnosticsError::NotRetained { .. })));
    }
}
