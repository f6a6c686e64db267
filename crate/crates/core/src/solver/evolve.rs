use serde::{Deserialize, Serialize};

use super::{
    stable_length, BlowUpReason, FieldState, Forcing, OriginClosure, RadialGrid, Rk4, SolverError,
    SpatialOperator, MAX_CFL,
};
use crate::nonlinearity::Model;
use crate::quadrature::{interpolate, radial_derivative, Parity};

/// Time-stepping and monitoring parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// Courant factor: `dt = cfl * stable_length`, `0 < cfl <= 0.9`.
    pub cfl: f64,
    pub t0: f64,
    pub t_end: f64,
    /// Number of steps between retained slices, counted back from the final step.
    pub snapshot_stride: usize,
    /// `sup|u|` above which the run is stopped. Defaults to `50 sup|u(t0)| + 10`.
    pub blowup_threshold: Option<f64>,
    /// Lab time of the cone apex. Reflected time is `apex - t`; when set, the solver samples
    /// the backward cone boundary `r = apex - t` every step.
    pub apex: Option<f64>,
    pub origin_closure: OriginClosure,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            cfl: 0.5,
            t0: 0.0,
            t_end: 1.0,
            snapshot_stride: 1,
            blowup_threshold: None,
            apex: None,
            origin_closure: OriginClosure::Odd,
        }
    }
}

impl SolverConfig {
    /// Number of uniform steps and their size on `grid`.
    pub fn step_plan(&self, grid: &RadialGrid, model: &Model) -> Result<(usize, f64), SolverError> {
        let length = stable_length(grid, model);
        if !(self.cfl > 0.0 && self.cfl <= MAX_CFL) {
            return Err(SolverError::CflViolation { dt: self.cfl * length, limit: MAX_CFL * length });
        }
        let span = self.t_end - self.t0;
        if !(span.is_finite() && span > 0.0) {
            return Err(SolverError::InvalidConfig(format!(
                "need t_end > t0, got t0 = {}, t_end = {}",
                self.t0, self.t_end
            )));
        }
        let steps = (span / (self.cfl * length) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        Ok((steps, span / steps as f64))
    }

    fn validate(&self, grid: &RadialGrid) -> Result<(), SolverError> {
        if self.snapshot_stride == 0 {
            return Err(SolverError::InvalidConfig("snapshot_stride must be at least 1".into()));
        }
        if let Some(th) = self.blowup_threshold {
            if !(th >= 0.0) {
                return Err(SolverError::InvalidConfig(format!("blowup_threshold must be >= 0, got {th}")));
            }
        }
        if let Some(apex) = self.apex {
            if !(apex.is_finite() && apex > self.t0) {
                return Err(SolverError::InvalidConfig(format!("apex {apex} must lie after t0 = {}", self.t0)));
            }
            let pad = 2.0 * (apex - self.t0);
            if grid.radius() <= pad {
                return Err(SolverError::InvalidConfig(format!(
                    "R = {} must exceed twice the initial cone radius ({pad}) so the outer boundary stays causally separated from the cone",
                    grid.radius()
                )));
            }
        }
        Ok(())
    }
}

/// Field data on the backward cone boundary `r = apex - t`, in lab orientation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeSample {
    pub r: f64,
    pub u: f64,
    pub v: f64,
    pub ur: f64,
    /// `(e⁺ + m)` at `(t, t)` in the reflected orientation: `½(u_r - v)² + potential`.
    pub flux_density: f64,
}

/// Scalars recorded after every step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub t: f64,
    /// Discrete energy of the whole grid (see [`SpatialOperator::discrete_energy`]).
    pub energy: f64,
    pub sup_abs: f64,
    pub cone: Option<ConeSample>,
}

/// Output of [`evolve`]: strided slices plus per-step scalars.
#[derive(Debug, Clone, PartialEq)]
pub struct RunHistory {
    pub grid: RadialGrid,
    pub model: Model,
    pub config: SolverConfig,
    pub dt: f64,
    pub steps: usize,
    pub slices: Vec<FieldState>,
    pub slice_steps: Vec<usize>,
    pub records: Vec<StepRecord>,
}

impl RunHistory {
    pub fn apex(&self) -> Option<f64> {
        self.config.apex
    }

    pub fn final_state(&self) -> &FieldState {
        self.slices.last().expect("a history always holds the initial slice")
    }

    /// Tolerance for matching a requested time to a recorded one.
    pub fn time_tolerance(&self) -> f64 {
        1e-6 * self.dt
    }

    /// Retained slice at lab time `t`, if any.
    pub fn slice_at(&self, t: f64) -> Option<&FieldState> {
        let tol = self.time_tolerance();
        self.slices.iter().find(|s| (s.t - t).abs() <= tol)
    }

    /// Retained slice at reflected time `t_reflected`, reflected to reflected orientation.
    pub fn reflected_slice(&self, t_reflected: f64) -> Option<FieldState> {
        let apex = self.apex()?;
        self.slice_at(apex - t_reflected).map(|s| s.reflected(apex))
    }

    /// All retained slices with reflected time in `[lo, hi]`, reflected, in increasing reflected time.
    pub fn reflected_slices(&self, lo: f64, hi: f64) -> Vec<FieldState> {
        let Some(apex) = self.apex() else { return Vec::new() };
        let tol = self.time_tolerance();
        let mut out: Vec<FieldState> = self
            .slices
            .iter()
            .filter(|s| {
                let tp = apex - s.t;
                tp >= lo - tol && tp <= hi + tol
            })
            .map(|s| s.reflected(apex))
            .collect();
        out.reverse();
        out
    }

    /// Cone samples as `(reflected time, sample)` in increasing reflected time.
    pub fn cone_series(&self) -> Vec<(f64, ConeSample)> {
        let Some(apex) = self.apex() else { return Vec::new() };
        let mut out: Vec<(f64, ConeSample)> =
            self.records.iter().filter_map(|rec| rec.cone.map(|c| (apex - rec.t, c))).collect();
        out.reverse();
        out
    }

    /// Earliest and latest reflected times covered by retained slices.
    pub fn reflected_window(&self) -> Option<(f64, f64)> {
        let apex = self.apex()?;
        let first = self.slices.first()?.t;
        let last = self.slices.last()?.t;
        Some(((apex - last).max(0.0), apex - first))
    }
}

struct Monitor<'a> {
    grid: &'a RadialGrid,
    model: &'a Model,
    op: SpatialOperator,
    scratch: Vec<f64>,
    ur: Vec<f64>,
    apex: Option<f64>,
}

impl Monitor<'_> {
    fn record(&mut self, step: usize, state: &FieldState) -> StepRecord {
        let energy = self.op.discrete_energy(&state.u, &state.v, &mut self.scratch);
        let cone = self.apex.and_then(|apex| {
            radial_derivative(&state.u, self.grid.h(), &mut self.ur);
            self.cone_sample(apex - state.t, state)
        });
        StepRecord { step, t: state.t, energy, sup_abs: state.sup_abs(), cone }
    }

    fn cone_sample(&self, r: f64, state: &FieldState) -> Option<ConeSample> {
        let h = self.grid.h();
        let r = if r.abs() < 1e-9 * h { 0.0 } else { r };
        let u = interpolate(&state.u, h, r, Parity::Odd)?;
        let v = interpolate(&state.v, h, r, Parity::Odd)?;
        let ur = interpolate(&self.ur, h, r, Parity::Even)?;
        let potential = if r > 0.0 { self.model.potential(u, 1.0 / (r * r), r.powf(-self.model.params.alpha)) } else { 0.0 };
        let flux_density = 0.5 * (ur - v).powi(2) + potential;
        Some(ConeSample { r, u, v, ur, flux_density })
    }
}

/// Evolves `data` from `config.t0` to `config.t_end` without forcing.
pub fn evolve(
    config: &SolverConfig,
    data: FieldState,
    grid: &RadialGrid,
    model: &Model,
) -> Result<RunHistory, SolverError> {
    run(config, data, grid, model, None)
}

/// Evolves `u_tt = L[u] + F` with the source and outer boundary data of `forcing`.
pub fn evolve_forced(
    config: &SolverConfig,
    data: FieldState,
    grid: &RadialGrid,
    model: &Model,
    forcing: &dyn Forcing,
) -> Result<RunHistory, SolverError> {
    run(config, data, grid, model, Some(forcing))
}

fn run(
    config: &SolverConfig,
    mut state: FieldState,
    grid: &RadialGrid,
    model: &Model,
    forcing: Option<&dyn Forcing>,
) -> Result<RunHistory, SolverError> {
    let (steps, dt) = config.step_plan(grid, model)?;
    config.validate(grid)?;
    if state.u.len() != grid.cells() || state.v.len() != grid.cells() {
        return Err(SolverError::ShapeMismatch { expected: grid.cells(), found: state.u.len().min(state.v.len()) });
    }
    if state.is_finite() && !state.satisfies_origin_condition() {
        return Err(SolverError::OriginCondition(state.origin_value()));
    }
    state.t = config.t0;
    let threshold = config.blowup_threshold.unwrap_or(50.0 * state.sup_abs() + 10.0);

    let op = SpatialOperator::new(*grid, *model, config.origin_closure);
    let mut monitor = Monitor {
        grid,
        model,
        op: op.clone(),
        scratch: vec![0.0; grid.cells()],
        ur: vec![0.0; grid.cells()],
        apex: config.apex,
    };
    let mut history = RunHistory {
        grid: *grid,
        model: *model,
        config: *config,
        dt,
        steps,
        slices: vec![state.clone()],
        slice_steps: vec![0],
        records: vec![monitor.record(0, &state)],
    };
    let mut rk = Rk4::new(op);
    let mut last_good = state.clone();

    for k in 1..=steps {
        rk.advance(&mut state, dt, forcing);
        if k == steps {
            state.t = config.t_end;
        }
        let reason = if let Some(index) = state.u.iter().chain(&state.v).position(|x| !x.is_finite()) {
            let index = index % grid.cells();
            if k == 1 {
                return Err(SolverError::NonFinite { step: 1, t: state.t, index });
            }
            Some(BlowUpReason::NonFinite { index })
        } else {
            None
        };
        let reason = reason.or_else(|| {
            let sup = state.sup_abs();
            (sup > threshold).then_some(BlowUpReason::SupExceeded { sup, threshold })
        });
        let record = if reason.is_none() { Some(monitor.record(k, &state)) } else { None };
        let reason = reason.or_else(|| {
            let previous = history.records.last().map_or(0.0, |r| r.energy);
            let current = record.as_ref().map_or(previous, |r| r.energy);
            (previous > 0.0 && (current - previous).abs() > 0.1 * previous)
                .then_some(BlowUpReason::EnergyJump { previous, current })
        });
        if let Some(reason) = reason {
            return Err(SolverError::BlowUpSuspected {
                step: k,
                t: state.t,
                reason,
                last_good: Box::new(last_good),
                history: Box::new(history),
            });
        }
        history.records.push(record.expect("record exists when no blow-up was flagged"));
        if (steps - k) % config.snapshot_stride == 0 {
            history.slices.push(state.clone());
            history.slice_steps.push(k);
        }
        last_good.clone_from(&state);
    }
    Ok(history)
}
