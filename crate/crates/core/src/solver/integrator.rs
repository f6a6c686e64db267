use super::{stable_length, FieldState, Forcing, OriginClosure, RadialGrid, SolverError, SpatialOperator};
use crate::nonlinearity::Model;

/// Largest admissible Courant factor.
pub const MAX_CFL: f64 = 0.9;

/// Classical four-stage Runge–Kutta for the first-order system `u_t = v`, `v_t = L[u] + F`,
/// with reusable stage buffers.
#[derive(Debug, Clone)]
pub struct Rk4 {
    op: SpatialOperator,
    us: Vec<f64>,
    vs: Vec<f64>,
    accel: Vec<f64>,
    src: Vec<f64>,
    acc_u: Vec<f64>,
    acc_v: Vec<f64>,
}

impl Rk4 {
    pub fn new(op: SpatialOperator) -> Self {
        let n = op.grid().cells();
        Rk4 {
            op,
            us: vec![0.0; n],
            vs: vec![0.0; n],
            accel: vec![0.0; n],
            src: vec![0.0; n],
            acc_u: vec![0.0; n],
            acc_v: vec![0.0; n],
        }
    }

    pub fn operator(&self) -> &SpatialOperator {
        &self.op
    }

    /// `accel = L[us] + F(t)`.
    fn acceleration(&mut self, t: f64, forcing: Option<&dyn Forcing>) {
        let outer = forcing.map_or(0.0, |f| f.outer_value(t));
        self.op.apply(&self.us, outer, &mut self.accel);
        if let Some(f) = forcing {
            f.fill_source(t, self.op.grid(), &mut self.src);
            for (a, s) in self.accel.iter_mut().zip(&self.src) {
                *a += s;
            }
        }
    }

    /// Advances `state` by `dt` in place. Performs no step-size or finiteness checks.
    pub fn advance(&mut self, state: &mut FieldState, dt: f64, forcing: Option<&dyn Forcing>) {
        let t = state.t;
        let half = 0.5 * dt;
        let n = state.len();

        self.us.copy_from_slice(&state.u);
        self.acceleration(t, forcing);
        self.acc_u.copy_from_slice(&state.v);
        self.acc_v.copy_from_slice(&self.accel);

        for j in 0..n {
            self.us[j] = state.u[j] + half * state.v[j];
            self.vs[j] = state.v[j] + half * self.accel[j];
        }
        self.acceleration(t + half, forcing);
        for j in 0..n {
            self.acc_u[j] += 2.0 * self.vs[j];
            self.acc_v[j] += 2.0 * self.accel[j];
        }

        for j in 0..n {
            self.us[j] = state.u[j] + half * self.vs[j];
            self.vs[j] = state.v[j] + half * self.accel[j];
        }
        self.acceleration(t + half, forcing);
        for j in 0..n {
            self.acc_u[j] += 2.0 * self.vs[j];
            self.acc_v[j] += 2.0 * self.accel[j];
        }

        for j in 0..n {
            self.us[j] = state.u[j] + dt * self.vs[j];
            self.vs[j] = state.v[j] + dt * self.accel[j];
        }
        self.acceleration(t + dt, forcing);
        let sixth = dt / 6.0;
        for j in 0..n {
            state.u[j] += sixth * (self.acc_u[j] + self.vs[j]);
            state.v[j] += sixth * (self.acc_v[j] + self.accel[j]);
        }
        state.t = t + dt;
    }
}

/// One RK4 step of `u_tt = L[u] + F` from `state`.
pub fn step(
    state: &FieldState,
    dt: f64,
    grid: &RadialGrid,
    model: &Model,
    forcing: Option<&dyn Forcing>,
) -> Result<FieldState, SolverError> {
    if state.len() != grid.cells() || state.v.len() != grid.cells() {
        return Err(SolverError::ShapeMismatch { expected: grid.cells(), found: state.len() });
    }
    let limit = MAX_CFL * stable_length(grid, model);
    if !(dt > 0.0 && dt <= limit) {
        return Err(SolverError::CflViolation { dt, limit });
    }
    let mut rk = Rk4::new(SpatialOperator::new(*grid, *model, OriginClosure::Odd));
    let mut next = state.clone();
    rk.advance(&mut next, dt, forcing);
    if let Some(index) = next.u.iter().chain(&next.v).position(|x| !x.is_finite()) {
        return Err(SolverError::NonFinite { step: 1, t: next.t, index: index % grid.cells() });
    }
    Ok(next)
}
