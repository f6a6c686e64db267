use serde::{Deserialize, Serialize};

use super::{FieldState, RadialGrid, SolverError};

/// Initial velocity attached to a bump.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VelocityProfile {
    /// `u_t = 0`.
    #[default]
    Zero,
    /// `u_t = -u_r`: a pulse moving towards larger `r`.
    Outgoing,
    /// `u_t = u_r`: a pulse moving towards the origin.
    Ingoing,
}

/// Smooth compactly supported bump `u = a r exp(-x²/(1-x²))`, `x = (r - center)/width`,
/// supported on `[center - width, center + width]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpSpec {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
    #[serde(default)]
    pub velocity: VelocityProfile,
}

impl Default for BumpSpec {
    fn default() -> Self {
        BumpSpec { amplitude: 1e-3, center: 1.0, width: 0.2, velocity: VelocityProfile::Zero }
    }
}

impl BumpSpec {
    pub fn value(&self, r: f64) -> f64 {
        let x = (r - self.center) / self.width;
        if x.abs() >= 1.0 {
            return 0.0;
        }
        let x2 = x * x;
        self.amplitude * r * (-x2 / (1.0 - x2)).exp()
    }

    pub fn derivative(&self, r: f64) -> f64 {
        let x = (r - self.center) / self.width;
        if x.abs() >= 1.0 {
            return 0.0;
        }
        let x2 = x * x;
        let g = (-x2 / (1.0 - x2)).exp();
        let dg_dx = -2.0 * x / (1.0 - x2).powi(2) * g;
        self.amplitude * (g + r * dg_dx / self.width)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.width, self.center + self.width)
    }
}

/// Samples `spec` on `grid` at time `t0`.
pub fn make_bump(spec: &BumpSpec, grid: &RadialGrid, t0: f64) -> Result<FieldState, SolverError> {
    let BumpSpec { amplitude, center, width, velocity } = *spec;
    if ![amplitude, center, width, t0].iter().all(|x| x.is_finite()) || width <= 0.0 {
        return Err(SolverError::InvalidConfig(format!(
            "bump needs finite parameters and width > 0, got amplitude {amplitude}, center {center}, width {width}"
        )));
    }
    if center + width > grid.radius() {
        return Err(SolverError::InvalidConfig(format!(
            "bump support [{}, {}] extends past R = {}",
            center - width,
            center + width,
            grid.radius()
        )));
    }
    let radii = grid.radii();
    let u: Vec<f64> = radii.iter().map(|&r| spec.value(r)).collect();
    let v = radii
        .iter()
        .map(|&r| match velocity {
            VelocityProfile::Zero => 0.0,
            VelocityProfile::Outgoing => -spec.derivative(r),
            VelocityProfile::Ingoing => spec.derivative(r),
        })
        .collect();
    Ok(FieldState { t: t0, u, v })
}
