use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::solver::RunHistory;

use super::cone::{ConeRegion, ConeView, Point};
use super::{DiagnosticsError, GridInfo};

const FD_STEP: f64 = 1e-5;

/// A multiplier coefficient as a function of reflected time `t` and radius `r`.
#[derive(Clone)]
pub enum Coefficient {
    Const(f64),
    /// `t`.
    Time,
    /// `r`.
    Radius,
    /// Arbitrary smooth function; derivatives by central differences.
    Func(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl Coefficient {
    pub fn value(&self, t: f64, r: f64) -> f64 {
        match self {
            Coefficient::Const(c) => *c,
            Coefficient::Time => t,
            Coefficient::Radius => r,
            Coefficient::Func(f) => f(t, r),
        }
    }

    pub fn d_t(&self, t: f64, r: f64) -> f64 {
        match self {
            Coefficient::Const(_) | Coefficient::Radius => 0.0,
            Coefficient::Time => 1.0,
            Coefficient::Func(f) => (f(t + FD_STEP, r) - f(t - FD_STEP, r)) / (2.0 * FD_STEP),
        }
    }

    pub fn d_r(&self, t: f64, r: f64) -> f64 {
        match self {
            Coefficient::Const(_) | Coefficient::Time => 0.0,
            Coefficient::Radius => 1.0,
            Coefficient::Func(f) => (f(t, r + FD_STEP) - f(t, r - FD_STEP)) / (2.0 * FD_STEP),
        }
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Const(c) => write!(f, "{c}"),
            Coefficient::Time => write!(f, "t"),
            Coefficient::Radius => write!(f, "r"),
            Coefficient::Func(_) => write!(f, "g(t,r)"),
        }
    }
}

/// The multiplier `r^(n-1) (a u_t + b u_r + c u)`.
#[derive(Debug, Clone)]
pub struct Multiplier {
    pub a: Coefficient,
    pub b: Coefficient,
    pub c: Coefficient,
}

impl Multiplier {
    /// `(1, 0, 0)`: the energy identity.
    pub fn energy() -> Self {
        Multiplier { a: Coefficient::Const(1.0), b: Coefficient::Const(0.0), c: Coefficient::Const(0.0) }
    }

    /// `(t, r, (n-1)/2)`: the scaling identity.
    pub fn scaling(n: u32) -> Self {
        Multiplier { a: Coefficient::Time, b: Coefficient::Radius, c: Coefficient::Const(0.5 * (n as f64 - 1.0)) }
    }

    pub fn description(&self) -> String {
        format!("({}, {}, {})", self.a, self.b, self.c)
    }
}

/// Integrated multiplier identity over `K(S,T)`:
/// `residual = P(Σ_T) - P(Σ_S) - ∫_{C(S,T)} (P + Q) - ∫_K RHS`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub multiplier: String,
    pub region: ConeRegion,
    pub slice_t: f64,
    pub slice_s: f64,
    pub surface: f64,
    pub volume: f64,
    pub residual: f64,
    pub grid: GridInfo,
}

/// Integrates the multiplier identity
/// `∂_t P - ∂_r Q = RHS` with `P = r^(n-1)(a e⁺ + b m + c u u_t)`,
/// `Q = r^(n-1)(a m + b e⁻ + c u u_r)` over `K(S,T)` and returns the defect.
pub fn multiplier_residual(
    history: &RunHistory,
    mult: &Multiplier,
    region: &ConeRegion,
) -> Result<ResidualReport, DiagnosticsError> {
    let view = ConeView::new(history)?;
    let model = view.model;
    let nm1 = view.nm1();
    let alpha = model.params.alpha;
    let Multiplier { a, b, c } = mult;

    let density = |p: &Point| a.value(p.t, p.r) * p.e_plus + b.value(p.t, p.r) * p.ut * p.ur + c.value(p.t, p.r) * p.u * p.ut;
    let slice_t = view.slice_integral(&view.slice(region.t)?, region.t, &density)?;
    let slice_s = view.slice_integral(&view.slice(region.s)?, region.s, &density)?;

    let boundary = |p: &Point| {
        let null = 0.5 * (p.ut + p.ur).powi(2);
        let pot = model.potential(p.u, 1.0 / (p.r * p.r), p.r.powf(-alpha));
        a.value(p.t, p.r) * (null + pot) + b.value(p.t, p.r) * (null - pot) + c.value(p.t, p.r) * p.u * (p.ut + p.ur)
    };
    let surface = view.surface_integral(region, &boundary)?;

    let rhs = |p: &Point| {
        let (t, r, u, ut, ur) = (p.t, p.r, p.u, p.ut, p.ur);
        let (a_t, a_r) = (a.d_t(t, r), a.d_r(t, r));
        let (bv, b_t, b_r) = (b.value(t, r), b.d_t(t, r), b.d_r(t, r));
        let (cv, c_t, c_r) = (c.value(t, r), c.d_t(t, r), c.d_r(t, r));
        let b_over_r = bv / r;
        let inv_r2 = 1.0 / (r * r);
        let inv_ra = r.powf(-alpha);
        let f = model.profile.f(u);
        let ff = model.profile.force(u);
        0.5 * (a_t - b_r - nm1 * b_over_r + 2.0 * cv) * ut * ut
            + 0.5 * (a_t - b_r + nm1 * b_over_r - 2.0 * cv) * ur * ur
            + (a_t + b_r + (nm1 - 2.0) * b_over_r) * 0.5 * nm1 * u.sin().powi(2) * inv_r2
            + (a_t + b_r + (nm1 - alpha) * b_over_r) * 0.5 * f * f * inv_ra
            + (b_t - a_r) * ut * ur
            + u * (c_t * ut - c_r * ur)
            - cv * u * (0.5 * nm1 * (2.0 * u).sin() * inv_r2 + ff * inv_ra)
    };
    let volume = view.volume_integral(region, &rhs)?;

    Ok(ResidualReport {
        multiplier: mult.description(),
        region: *region,
        slice_t,
        slice_s,
        surface,
        volume,
        residual: slice_t - slice_s - surface - volume,
        grid: GridInfo::of(history),
    })
}

/// Named terms of the integrated `(t, r, (n-1)/2)` identity over `K(S,T)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyIntLedger {
    pub region: ConeRegion,
    /// `∫_K ((n-1)/2) u f'(u) f(u) / r^alpha`.
    pub volume_ff: f64,
    /// `∫_K (alpha - n - 1) f(u)² / (2 r^alpha)`.
    pub volume_fsq: f64,
    /// `∫_{Σ_T} (T e⁺ + r u_t u_r + ((n-1)/2) u u_t)`.
    pub slice_t: f64,
    /// `∫_{Σ_S} (S e⁺ + r u_t u_r + ((n-1)/2) u u_t)`.
    pub slice_s: f64,
    /// `∫_K ((n-1)²/2) sin²u / r² - ((n-1)²/4) u sin 2u / r²`.
    pub volume_sin: f64,
    /// `∫_{C(S,T)} t (e⁺ + m) + r (e⁻ + m) + ((n-1)/2) u (u_t + u_r)`.
    pub surface: f64,
    /// `volume_ff + volume_fsq + slice_t - slice_s - volume_sin - surface`.
    pub signed_sum: f64,
}

pub fn energyint_decomposition(history: &RunHistory, region: &ConeRegion) -> Result<EnergyIntLedger, DiagnosticsError> {
    let view = ConeView::new(history)?;
    let model = view.model;
    let nm1 = view.nm1();
    let alpha = model.params.alpha;
    let c = 0.5 * nm1;

    let ff = |p: &Point| c * p.u * model.profile.force(p.u) * p.r.powf(-alpha);
    let fsq = |p: &Point| (alpha - nm1 - 2.0) * 0.5 * model.profile.f(p.u).powi(2) * p.r.powf(-alpha);
    let sin = |p: &Point| {
        let inv_r2 = 1.0 / (p.r * p.r);
        0.5 * nm1 * nm1 * p.u.sin().powi(2) * inv_r2 - 0.25 * nm1 * nm1 * p.u * (2.0 * p.u).sin() * inv_r2
    };
    let slice = |p: &Point| p.t * p.e_plus + p.r * p.ut * p.ur + c * p.u * p.ut;
    let boundary = |p: &Point| {
        let null = 0.5 * (p.ut + p.ur).powi(2);
        let pot = model.potential(p.u, 1.0 / (p.r * p.r), p.r.powf(-alpha));
        p.t * (null + pot) + p.r * (null - pot) + c * p.u * (p.ut + p.ur)
    };

    let volume_ff = view.volume_integral(region, &ff)?;
    let volume_fsq = view.volume_integral(region, &fsq)?;
    let volume_sin = view.volume_integral(region, &sin)?;
    let slice_t = view.slice_integral(&view.slice(region.t)?, region.t, &slice)?;
    let slice_s = view.slice_integral(&view.slice(region.s)?, region.s, &slice)?;
    let surface = view.surface_integral(region, &boundary)?;
    Ok(EnergyIntLedger {
        region: *region,
        volume_ff,
        volume_fsq,
        slice_t,
        slice_s,
        volume_sin,
        surface,
        signed_sum: volume_ff + volume_fsq + slice_t - slice_s - volume_sin - surface,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_derivatives() {
        let f = Coefficient::Func(Arc::new(|t: f64, r: f64| t * t * r));
        assert!((f.d_t(2.0, 3.0) - 12.0).abs() < 1e-6);
        assert!((f.d_r(2.0, 3.0) - 4.0).abs() < 1e-6);
        assert_eq!(Coefficient::Time.d_t(5.0, 1.0), 1.0);
        assert_eq!(Coefficient::Radius.d_r(5.0, 1.0), 1.0);
        assert_eq!(Coefficient::Const(2.0).d_t(1.0, 1.0), 0.0);
        assert_eq!(Multiplier::scaling(3).description(), "(t, r, 1)");
    }
}
