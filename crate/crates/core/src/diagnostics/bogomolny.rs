use serde::Serialize;

use crate::nonlinearity::Model;
use crate::quadrature::{cumulative_power, radial_derivative};
use crate::solver::{FieldState, RadialGrid};

use super::DiagnosticsError;

/// Both sides of the Bogomolny bound at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BogomolnyPoint {
    pub r: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BogomolnyReport {
    /// `max_r (LHS - RHS)`; non-positive when the bound holds everywhere.
    pub max_violation: f64,
    pub witness: f64,
}

/// `|I(u(r))|` against
/// `r^((alpha - 2(n-1))/2) (∫_0^r f(u)² s^(n-1-alpha) ds)^(1/2) (∫_0^r u_r² s^(n-1) ds)^(1/2)`
/// at every cell centre.
pub fn bogomolny_profile(
    state: &FieldState,
    grid: &RadialGrid,
    model: &Model,
) -> Result<Vec<BogomolnyPoint>, DiagnosticsError> {
    let params = model.params;
    let nm1 = params.n_minus_one();
    let required = 2.0 * nm1;
    if params.alpha < required {
        return Err(DiagnosticsError::AlphaBelowThreshold { alpha: params.alpha, required });
    }
    let h = grid.h();
    let mut ur = vec![0.0; state.len()];
    radial_derivative(&state.u, h, &mut ur);
    let radii = grid.radii();
    let potential: Vec<f64> = radii
        .iter()
        .zip(&state.u)
        .map(|(r, u)| model.profile.f(*u).powi(2) * r.powf(nm1 - params.alpha))
        .collect();
    let gradient: Vec<f64> = radii.iter().zip(&ur).map(|(r, d)| d * d * r.powf(nm1)).collect();
    let a = cumulative_power(&potential, h);
    let b = cumulative_power(&gradient, h);
    let power = 0.5 * (params.alpha - required);
    let mut out = Vec::with_capacity(state.len());
    for j in 0..state.len() {
        let r = radii[j];
        let lhs = model.profile.bogomolny(state.u[j])?.abs();
        let rhs = r.powf(power) * (a[j].max(0.0) * b[j].max(0.0)).sqrt();
        out.push(BogomolnyPoint { r, lhs, rhs });
    }
    Ok(out)
}

/// Largest violation of the Bogomolny bound over the slice.
pub fn bogomolny_check(state: &FieldState, grid: &RadialGrid, model: &Model) -> Result<BogomolnyReport, DiagnosticsError> {
    let profile = bogomolny_profile(state, grid, model)?;
    let mut report = BogomolnyReport { max_violation: f64::NEG_INFINITY, witness: 0.0 };
    for p in &profile {
        let v = p.lhs - p.rhs;
        if v > report.max_violation {
            report = BogomolnyReport { max_violation: v, witness: p.r };
        }
    }
    if !report.max_violation.is_finite() {
        report.max_violation = 0.0;
    }
    Ok(report)
}
