use serde::{Deserialize, Serialize};

use super::{RadialGrid, SolverError};
use crate::nonlinearity::Model;

/// How the ghost cell at `-h/2` is filled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OriginClosure {
    /// `u(-h/2) = -u(h/2)`: the odd extension that enforces `u(t,0) = 0`.
    #[default]
    Odd,
    /// `u(-h/2) = u(h/2)`. Wrong for this equation; kept as a mutation hook for the
    /// convergence study.
    Even,
}

/// External source term and outer boundary data for `u_tt = L[u] + F(t, r)`.
pub trait Forcing: Sync {
    fn source(&self, t: f64, r: f64) -> f64;

    /// Fills `out[j] = F(t, r_j)`.
    fn fill_source(&self, t: f64, grid: &RadialGrid, out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o = self.source(t, grid.r(j));
        }
    }

    /// Dirichlet value imposed at `r = R`.
    fn outer_value(&self, _t: f64) -> f64 {
        0.0
    }
}

impl<F: Fn(f64, f64) -> f64 + Sync> Forcing for F {
    fn source(&self, t: f64, r: f64) -> f64 {
        self(t, r)
    }
}

/// The radial operator
/// `L[u] = u_rr + (n-1)/r u_r - (n-1)/2 sin(2u)/r² - f(u) f'(u)/r^alpha`
/// discretised by second-order centred differences on the staggered grid.
#[derive(Debug, Clone)]
pub struct SpatialOperator {
    grid: RadialGrid,
    model: Model,
    origin: OriginClosure,
    drift: Vec<f64>,
    sine_weight: Vec<f64>,
    inv_r_alpha: Vec<f64>,
    weight: Vec<f64>,
    edge: Vec<f64>,
    defect: Vec<f64>,
}

impl SpatialOperator {
    pub fn new(grid: RadialGrid, model: Model, origin: OriginClosure) -> Self {
        let nm1 = model.params.n_minus_one();
        let h = grid.h();
        let radii = grid.radii();
        let drift = radii.iter().map(|r| nm1 / (2.0 * h * r)).collect();
        let sine_weight = radii.iter().map(|r| 0.5 * nm1 / (r * r)).collect();
        let inv_r_alpha = radii.iter().map(|r| r.powf(-model.params.alpha)).collect();

        // Quadratic form of the weighted derivative part M = r^(n-1) D (times h²):
        // off-diagonals w_j (1 ± (n-1) h / (2 r_j)), diagonal -2 w_j plus ghost contributions.
        let cells = grid.cells();
        let weight: Vec<f64> = radii.iter().map(|r| r.powf(nm1)).collect();
        let plus: Vec<f64> = radii.iter().map(|r| 1.0 + nm1 * h / (2.0 * r)).collect();
        let minus: Vec<f64> = radii.iter().map(|r| 1.0 - nm1 * h / (2.0 * r)).collect();
        let mut edge = vec![0.0; cells];
        for j in 0..cells - 1 {
            edge[j] = 0.5 * (weight[j] * plus[j] + weight[j + 1] * minus[j + 1]);
        }
        let mut defect = vec![0.0; cells];
        for j in 0..cells {
            let mut diag = -2.0;
            if j == 0 {
                diag += match origin {
                    OriginClosure::Odd => -minus[0],
                    OriginClosure::Even => minus[0],
                };
            }
            if j + 1 == cells {
                diag -= plus[j];
            }
            let left = if j > 0 { edge[j - 1] } else { 0.0 };
            defect[j] = weight[j] * diag + left + edge[j];
        }
        let inv_h2 = 1.0 / (h * h);
        edge.iter_mut().chain(defect.iter_mut()).for_each(|x| *x *= inv_h2);
        SpatialOperator { grid, model, origin, drift, sine_weight, inv_r_alpha, weight, edge, defect }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    /// Writes `L[u]` into `out`, with `outer` the Dirichlet value at `r = R`.
    pub fn apply(&self, u: &[f64], outer: f64, out: &mut [f64]) {
        let n = u.len();
        debug_assert_eq!(n, self.grid.cells());
        debug_assert_eq!(out.len(), n);
        let inv_h2 = 1.0 / (self.grid.h() * self.grid.h());
        let ghost_in = match self.origin {
            OriginClosure::Odd => -u[0],
            OriginClosure::Even => u[0],
        };
        let ghost_out = 2.0 * outer - u[n - 1];
        let profile = self.model.profile;
        for j in 0..n {
            let left = if j == 0 { ghost_in } else { u[j - 1] };
            let right = if j + 1 == n { ghost_out } else { u[j + 1] };
            let uj = u[j];
            out[j] = (right - 2.0 * uj + left) * inv_h2 + self.drift[j] * (right - left)
                - self.sine_weight[j] * (2.0 * uj).sin()
                - profile.force(uj) * self.inv_r_alpha[j];
        }
    }

    /// Per-cell energy density `e_j` (per unit `r^(n-1)` weight) of the discrete energy
    /// `E_h = h ∑ r_j^(n-1) e_j`. The gradient part is the quadratic form `-½ u·(r^(n-1) D u)`
    /// of the derivative part `D` of the operator, split into edge terms `(u_{j+1} - u_j)²`
    /// shared between neighbouring cells plus a diagonal remainder from the ghost cells.
    /// For `n = 2, 3` the weighted `D` is symmetric and `E_h` is exactly conserved by the
    /// semi-discrete unforced scheme with homogeneous outer data.
    pub fn energy_density(&self, u: &[f64], v: &[f64], out: &mut [f64]) {
        let n = u.len();
        debug_assert_eq!(v.len(), n);
        debug_assert_eq!(out.len(), n);
        let edge_term = |j: usize| -> f64 {
            if j + 1 < n {
                let d = u[j + 1] - u[j];
                self.edge[j] * d * d
            } else {
                0.0
            }
        };
        let mut left = 0.0;
        for j in 0..n {
            let right = edge_term(j);
            let gradient = 0.25 * (left + right) - 0.5 * self.defect[j] * u[j] * u[j];
            let potential = self.sine_weight[j] * u[j].sin().powi(2)
                + 0.5 * self.model.profile.f(u[j]).powi(2) * self.inv_r_alpha[j];
            out[j] = 0.5 * v[j] * v[j] + potential + gradient / self.weight[j];
            left = right;
        }
    }

    /// Discrete energy `h ∑ r_j^(n-1) e_j`; see [`SpatialOperator::energy_density`].
    /// `scratch` must hold `cells` entries.
    pub fn discrete_energy(&self, u: &[f64], v: &[f64], scratch: &mut [f64]) -> f64 {
        self.energy_density(u, v, scratch);
        scratch.iter().zip(&self.weight).map(|(e, w)| e * w).sum::<f64>() * self.grid.h()
    }

    /// `r_j^(n-1)`.
    pub fn weights(&self) -> &[f64] {
        &self.weight
    }

    /// `L[u]` as a fresh vector, failing on non-finite output.
    pub fn evaluate(&self, u: &[f64], outer: f64) -> Result<Vec<f64>, SolverError> {
        if u.len() != self.grid.cells() {
            return Err(SolverError::ShapeMismatch { expected: self.grid.cells(), found: u.len() });
        }
        let mut out = vec![0.0; u.len()];
        self.apply(u, outer, &mut out);
        match out.iter().position(|x| !x.is_finite()) {
            Some(j) => Err(SolverError::NonFinite { step: 0, t: f64::NAN, index: j }),
            None => Ok(out),
        }
    }
}

/// Length scale that sets the explicit step: `dt = cfl * stable_length`.
///
/// This is `h` unless the profile has `f'(0) != 0`, in which case the linearised potential
/// `f'(0)² / r^alpha` at the first cell is a stiff oscillator of frequency
/// `|f'(0)| (h/2)^(-alpha/2)` and the length shrinks so that `cfl = 0.5` keeps its
/// RK4 amplification below one.
pub fn stable_length(grid: &RadialGrid, model: &Model) -> f64 {
    let fp0 = model.profile.f_prime(0.0).abs();
    let h = grid.h();
    if fp0 == 0.0 {
        return h;
    }
    let r0 = 0.5 * h;
    let omega = fp0 * r0.powf(-0.5 * model.params.alpha);
    h.min(2.0 / omega)
}
