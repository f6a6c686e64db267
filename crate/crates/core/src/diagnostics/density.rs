use serde::Serialize;

use crate::nonlinearity::Model;
use crate::quadrature::{integrate_to, radial_derivative};
use crate::solver::{FieldState, RadialGrid};

use super::DiagnosticsError;

/// Energy and momentum densities at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointDensity {
    pub e_plus: f64,
    pub e_minus: f64,
    pub m: f64,
}

/// `e± = ½(u_t² + u_r²) ± ((n-1)/2) sin²u/r² ± f(u)²/(2 r^alpha)` and `m = u_t u_r` at radius `r`.
pub fn point_densities(model: &Model, r: f64, u: f64, ut: f64, ur: f64) -> PointDensity {
    let kinetic = 0.5 * (ut * ut + ur * ur);
    let potential = model.potential(u, 1.0 / (r * r), r.powf(-model.params.alpha));
    PointDensity { e_plus: kinetic + potential, e_minus: kinetic - potential, m: ut * ur }
}

/// Densities over a whole slice, with `u_r` from fourth-order differences.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensitySlice {
    pub e_plus: Vec<f64>,
    pub e_minus: Vec<f64>,
    pub m: Vec<f64>,
    pub ur: Vec<f64>,
}

/// Evaluates the densities of `state` with `u_t = state.v` in whatever orientation the
/// state is given (`e±` are even in `u_t`, `m` is odd).
pub fn densities(state: &FieldState, grid: &RadialGrid, model: &Model) -> DensitySlice {
    let n = state.len();
    let mut ur = vec![0.0; n];
    radial_derivative(&state.u, grid.h(), &mut ur);
    let mut e_plus = Vec::with_capacity(n);
    let mut e_minus = Vec::with_capacity(n);
    let mut m = Vec::with_capacity(n);
    for j in 0..n {
        let d = point_densities(model, grid.r(j), state.u[j], state.v[j], ur[j]);
        e_plus.push(d.e_plus);
        e_minus.push(d.e_minus);
        m.push(d.m);
    }
    DensitySlice { e_plus, e_minus, m, ur }
}

/// `∫_0^T g r^(n-1) dr` for cell-centred samples `g`.
pub fn cone_integral(g: &[f64], grid: &RadialGrid, n: u32, t: f64) -> Result<f64, DiagnosticsError> {
    let nm1 = n as f64 - 1.0;
    let weighted: Vec<f64> = g.iter().enumerate().map(|(j, x)| x * grid.r(j).powf(nm1)).collect();
    integrate_to(&weighted, grid.h(), t).ok_or(DiagnosticsError::BeyondGrid { t, radius: grid.radius() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinearity::Profile;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn an() -> Model {
        Model::new(3, 4.0, Profile::AdkinsNappi).unwrap()
    }

    #[test]
    fn zero_state_has_zero_densities() {
        let grid = RadialGrid::new(0.01, 64).unwrap();
        let d = densities(&FieldState::zeros(0.0, 64), &grid, &an());
        assert!(d.e_plus.iter().chain(&d.e_minus).chain(&d.m).all(|&x| x == 0.0));
    }

    #[test]
    fn null_direction_example() {
        let d = point_densities(&an(), 0.7, 0.0, 1.0, -1.0);
        assert_eq!(d.e_plus, 1.0);
        assert_eq!(d.m, -1.0);
        assert_eq!(d.e_plus + d.m, 0.0);
    }

    #[test]
    fn adkins_nappi_half_pi_example() {
        let d = point_densities(&an(), 1.0, PI / 2.0, 0.0, 0.0);
        assert!((d.e_plus - (1.0 + PI * PI / 8.0)).abs() < 1e-14);
    }

    #[test]
    fn unit_density_cone_integral() {
        let grid = RadialGrid::with_radius(2.0, 1.0 / 512.0).unwrap();
        let v = cone_integral(&vec![1.0; grid.cells()], &grid, 3, 1.0).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-5, "{v}");
        assert!(cone_integral(&vec![1.0; grid.cells()], &grid, 3, 2.5).is_err());
    }

    proptest! {
        #[test]
        fn null_identity_and_positivity(
            r in 1e-3f64..5.0, u in -6.0f64..6.0, ut in -10.0f64..10.0, ur in -10.0f64..10.0,
            n in 2u32..5, alpha in 0.5f64..8.0,
        ) {
            for profile in [Profile::AdkinsNappi, Profile::Linear, Profile::Cubic] {
                let model = Model::new(n, alpha, profile).unwrap();
                let d = point_densities(&model, r, u, ut, ur);
                let pot = model.potential(u, 1.0 / (r * r), r.powf(-alpha));
                let closed = 0.5 * (ut + ur).powi(2) + pot;
                prop_assert!((d.e_plus + d.m - closed).abs() <= 1e-12 * closed.abs().max(1.0));
                prop_assert!(d.e_plus + d.m >= -1e-12 * d.e_plus.abs().max(1.0));
                prop_assert!(d.e_plus >= d.m.abs() * (1.0 - 1e-12));
            }
        }
    }
}
