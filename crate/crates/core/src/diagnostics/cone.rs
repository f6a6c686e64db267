use serde::{Deserialize, Serialize};

use crate::nonlinearity::Model;
use crate::quadrature::{integrate_clipped, integrate_to, radial_derivative, trapezoid};
use crate::solver::{ConeSample, FieldState, OriginClosure, RunHistory, SpatialOperator};

use super::density::point_densities;
use super::DiagnosticsError;

/// Cone region `K(S,T)` with slices `Σ_S`, `Σ_T` and lateral boundary `C(S,T)`, in reflected time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeRegion {
    pub s: f64,
    pub t: f64,
}

impl ConeRegion {
    /// `S = 0` is allowed and means the limit towards the apex.
    pub fn new(s: f64, t: f64) -> Result<Self, DiagnosticsError> {
        if !(s.is_finite() && t.is_finite() && 0.0 <= s && s <= t) {
            return Err(DiagnosticsError::InvalidRegion { s, t });
        }
        Ok(ConeRegion { s, t })
    }

    /// Lab-time interval `[apex - T, apex - S]` covered by the region.
    pub fn lab_interval(&self, apex: f64) -> (f64, f64) {
        (apex - self.t, apex - self.s)
    }
}

/// Field values at one point in reflected orientation. `e_plus` is the scheme-consistent
/// density on slices and the pointwise density on the cone boundary.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Point {
    pub t: f64,
    pub r: f64,
    pub u: f64,
    pub ut: f64,
    pub ur: f64,
    pub e_plus: f64,
}

/// Read-only view of a history for cone integrals.
pub(crate) struct ConeView<'a> {
    pub history: &'a RunHistory,
    pub model: Model,
    op: SpatialOperator,
}

impl<'a> ConeView<'a> {
    pub fn new(history: &'a RunHistory) -> Result<Self, DiagnosticsError> {
        history.apex().ok_or(DiagnosticsError::NoApex)?;
        let op = SpatialOperator::new(history.grid, history.model, OriginClosure::Odd);
        Ok(ConeView { history, model: history.model, op })
    }

    pub fn nm1(&self) -> f64 {
        self.model.params.n_minus_one()
    }

    fn window(&self) -> (f64, f64) {
        self.history.reflected_window().unwrap_or((0.0, 0.0))
    }

    fn check_in_window(&self, time: f64) -> Result<(), DiagnosticsError> {
        let (lo, hi) = self.window();
        let tol = self.history.time_tolerance();
        if time < lo - tol || time > hi + tol {
            return Err(DiagnosticsError::OutsideWindow { time, lo, hi });
        }
        if time > self.history.grid.radius() {
            return Err(DiagnosticsError::BeyondGrid { t: time, radius: self.history.grid.radius() });
        }
        Ok(())
    }

    pub fn check_region(&self, region: &ConeRegion) -> Result<(), DiagnosticsError> {
        self.check_in_window(region.s)?;
        self.check_in_window(region.t)
    }

    /// Retained slice at reflected time `t`, in reflected orientation.
    pub fn slice(&self, t: f64) -> Result<FieldState, DiagnosticsError> {
        self.check_in_window(t)?;
        self.history.reflected_slice(t).ok_or(DiagnosticsError::NotRetained { time: t })
    }

    /// Retained slices covering `[s, t]`; both ends must be retained.
    pub fn slices(&self, region: &ConeRegion) -> Result<Vec<FieldState>, DiagnosticsError> {
        self.check_region(region)?;
        let slices = self.history.reflected_slices(region.s, region.t);
        let tol = self.history.time_tolerance();
        let first_ok = slices.first().is_some_and(|s| (s.t - region.s).abs() <= tol);
        let last_ok = slices.last().is_some_and(|s| (s.t - region.t).abs() <= tol);
        if !first_ok {
            return Err(DiagnosticsError::NotRetained { time: region.s });
        }
        if !last_ok {
            return Err(DiagnosticsError::NotRetained { time: region.t });
        }
        Ok(slices)
    }

    /// `∫_0^upper g r^(n-1) dr` over a reflected slice.
    pub fn slice_integral(
        &self,
        state: &FieldState,
        upper: f64,
        g: &dyn Fn(&Point) -> f64,
    ) -> Result<f64, DiagnosticsError> {
        let grid = &self.history.grid;
        let cells = grid.cells();
        let mut ur = vec![0.0; cells];
        radial_derivative(&state.u, grid.h(), &mut ur);
        let mut e = vec![0.0; cells];
        self.op.energy_density(&state.u, &state.v, &mut e);
        let weights = self.op.weights();
        let last = grid.last_index_within(upper).map_or(0, |j| (j + 2).min(cells));
        let mut ys = vec![0.0; cells];
        for j in 0..last.max(2) {
            let p = Point { t: state.t, r: grid.r(j), u: state.u[j], ut: state.v[j], ur: ur[j], e_plus: e[j] };
            ys[j] = g(&p) * weights[j];
        }
        integrate_to(&ys, grid.h(), upper).ok_or(DiagnosticsError::BeyondGrid { t: upper, radius: grid.radius() })
    }

    /// `∫_S^T ∫_0^t g r^(n-1) dr dt` by the trapezoid rule over retained slices.
    pub fn volume_integral(&self, region: &ConeRegion, g: &dyn Fn(&Point) -> f64) -> Result<f64, DiagnosticsError> {
        let slices = self.slices(region)?;
        let mut ts = Vec::with_capacity(slices.len());
        let mut ys = Vec::with_capacity(slices.len());
        for s in &slices {
            ts.push(s.t);
            ys.push(self.slice_integral(s, s.t.max(0.0), g)?);
        }
        Ok(trapezoid(&ts, &ys))
    }

    /// Cone-boundary point from a per-step sample at reflected time `t`.
    pub fn boundary_point(&self, t: f64, c: &ConeSample) -> Point {
        let ut = -c.v;
        let e_plus = if c.r > 0.0 { point_densities(&self.model, c.r, c.u, ut, c.ur).e_plus } else { 0.5 * (ut * ut + c.ur * c.ur) };
        Point { t, r: c.r, u: c.u, ut, ur: c.ur, e_plus }
    }

    /// `∫_S^T t^(n-1) g(t, t) dt` over the per-step cone samples.
    pub fn surface_integral(&self, region: &ConeRegion, g: &dyn Fn(&Point) -> f64) -> Result<f64, DiagnosticsError> {
        self.check_region(region)?;
        let series = self.history.cone_series();
        if series.len() < 2 {
            return Err(DiagnosticsError::OutsideWindow { time: region.s, lo: 0.0, hi: 0.0 });
        }
        let nm1 = self.nm1();
        let xs: Vec<f64> = series.iter().map(|(t, _)| *t).collect();
        let ys: Vec<f64> = series
            .iter()
            .map(|(t, c)| if c.r > 0.0 { t.powf(nm1) * g(&self.boundary_point(*t, c)) } else { 0.0 })
            .collect();
        let lo = xs[0];
        let hi = xs[xs.len() - 1];
        let tol = self.history.time_tolerance();
        if region.s < lo - tol || region.t > hi + tol {
            return Err(DiagnosticsError::OutsideWindow { time: if region.s < lo { region.s } else { region.t }, lo, hi });
        }
        let a = region.s.clamp(lo, hi);
        let b = region.t.clamp(a, hi);
        Ok(integrate_clipped(&xs, &ys, a, b).unwrap_or(0.0))
    }
}
