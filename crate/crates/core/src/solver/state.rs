use serde::{Deserialize, Serialize};

/// Absolute part of the admissible `|u(t,0)|` reconstructed through the first two cells.
pub const ORIGIN_TOLERANCE: f64 = 1e-6;
/// Relative part, against `max(|u(r_0)|, |u(r_1)|)`. Data that vanishes like `r` at the
/// origin extrapolates to `O(h³)`, far below this fraction of the first-cell values.
pub const ORIGIN_RELATIVE_TOLERANCE: f64 = 0.05;

/// One time slice: field `u` and its time derivative `v = u_t` at the cell centres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldState {
    pub t: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl FieldState {
    pub fn zeros(t: f64, cells: usize) -> Self {
        FieldState { t, u: vec![0.0; cells], v: vec![0.0; cells] }
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().chain(&self.v).all(|x| x.is_finite())
    }

    pub fn sup_abs(&self) -> f64 {
        self.u.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `u(t, 0)` reconstructed by linear extrapolation through `r_0` and `r_1`.
    pub fn origin_value(&self) -> f64 {
        1.5 * self.u[0] - 0.5 * self.u[1]
    }

    pub fn satisfies_origin_condition(&self) -> bool {
        let scale = self.u[0].abs().max(self.u[1].abs());
        self.origin_value().abs() <= ORIGIN_TOLERANCE + ORIGIN_RELATIVE_TOLERANCE * scale
    }

    /// The same slice seen under `t -> apex - t`: time runs backwards, so `u_t` flips sign.
    pub fn reflected(&self, apex: f64) -> FieldState {
        FieldState { t: apex - self.t, u: self.u.clone(), v: self.v.iter().map(|x| -x).collect() }
    }

    /// Pointwise `u -> -u`, `v -> -v`.
    pub fn negated(&self) -> FieldState {
        FieldState {
            t: self.t,
            u: self.u.iter().map(|x| -x).collect(),
            v: self.v.iter().map(|x| -x).collect(),
        }
    }
}
