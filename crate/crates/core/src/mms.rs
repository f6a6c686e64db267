//! Manufactured solutions: closed-form fields `u*`, the source `F*` that makes them exact
//! solutions of the forced equation, and grid-convergence studies against them.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nonlinearity::Model;
use crate::solver::{
    evolve_forced, FieldState, Forcing, OriginClosure, RadialGrid, Rk4, SolverConfig, SolverError, SpatialOperator,
};

#[derive(Debug, Error, Clone)]
pub enum MmsError {
    #[error("the forcing is not defined at r = {0}")]
    AtOrigin(f64),
    #[error("invalid convergence study: {0}")]
    InvalidStudy(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Values of `u*` and the derivatives the forcing needs at one point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Jet {
    pub u: f64,
    pub u_t: f64,
    pub u_tt: f64,
    pub u_r: f64,
    pub u_rr: f64,
}

/// A closed-form field with `u*(t, 0) = 0` and `u* = O(r)` at the origin.
pub trait ManufacturedSolution: Send + Sync {
    fn name(&self) -> String;

    fn jet(&self, t: f64, r: f64) -> Jet;

    /// `(a, a', a'')` at `t` when `u* = a(t) φ(r)`.
    fn temporal(&self, _t: f64) -> Option<[f64; 3]> {
        None
    }

    /// `(φ, φ', φ'')` at `r` when `u* = a(t) φ(r)`.
    fn radial(&self, _r: f64) -> Option<[f64; 3]> {
        None
    }
}

/// `u* = 0`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ZeroSolution;

impl ManufacturedSolution for ZeroSolution {
    fn name(&self) -> String {
        "zero".into()
    }

    fn jet(&self, _t: f64, _r: f64) -> Jet {
        Jet::default()
    }
}

/// `u* = A r exp(-r²) cos(ω t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianMode {
    pub amplitude: f64,
    pub omega: f64,
}

impl Default for GaussianMode {
    fn default() -> Self {
        GaussianMode { amplitude: 0.1, omega: 1.0 }
    }
}

impl ManufacturedSolution for GaussianMode {
    fn name(&self) -> String {
        format!("gaussian_mode(A = {}, omega = {})", self.amplitude, self.omega)
    }

    fn jet(&self, t: f64, r: f64) -> Jet {
        let [a, a_t, a_tt] = self.temporal(t).unwrap_or_default();
        let [p, p_r, p_rr] = self.radial(r).unwrap_or_default();
        Jet { u: a * p, u_t: a_t * p, u_tt: a_tt * p, u_r: a * p_r, u_rr: a * p_rr }
    }

    fn temporal(&self, t: f64) -> Option<[f64; 3]> {
        let (s, c) = (self.omega * t).sin_cos();
        let a = self.amplitude;
        Some([a * c, -a * self.omega * s, -a * self.omega * self.omega * c])
    }

    fn radial(&self, r: f64) -> Option<[f64; 3]> {
        let g = (-r * r).exp();
        Some([r * g, (1.0 - 2.0 * r * r) * g, (4.0 * r * r - 6.0) * r * g])
    }
}

/// Choice of manufactured solution in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SolutionSpec {
    Zero,
    GaussianMode {
        #[serde(default = "default_amplitude")]
        amplitude: f64,
        #[serde(default = "default_omega")]
        omega: f64,
    },
}

fn default_amplitude() -> f64 {
    GaussianMode::default().amplitude
}

fn default_omega() -> f64 {
    GaussianMode::default().omega
}

impl Default for SolutionSpec {
    fn default() -> Self {
        SolutionSpec::GaussianMode { amplitude: default_amplitude(), omega: default_omega() }
    }
}

impl SolutionSpec {
    pub fn build(&self) -> Arc<dyn ManufacturedSolution> {
        match *self {
            SolutionSpec::Zero => Arc::new(ZeroSolution),
            SolutionSpec::GaussianMode { amplitude, omega } => Arc::new(GaussianMode { amplitude, omega }),
        }
    }
}

/// A manufactured solution together with the model it forces.
#[derive(Clone)]
pub struct ManufacturedCase {
    pub solution: Arc<dyn ManufacturedSolution>,
    pub model: Model,
}

impl std::fmt::Debug for ManufacturedCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ManufacturedCase")
            .field("solution", &self.solution.name())
            .field("model", &self.model)
            .finish()
    }
}

impl ManufacturedCase {
    pub fn new(solution: Arc<dyn ManufacturedSolution>, model: Model) -> Self {
        ManufacturedCase { solution, model }
    }

    /// The Gaussian mode with `A = 0.1`, `ω = 1` on `model`.
    pub fn gaussian(model: Model) -> Self {
        Self::new(Arc::new(GaussianMode::default()), model)
    }

    pub fn name(&self) -> String {
        format!("{} | n = {}, alpha = {}, {}", self.solution.name(), self.model.params.n, self.model.params.alpha, self.model.profile)
    }

    /// `F* = u*_tt - u*_rr - (n-1)/r u*_r + (n-1)/2 sin(2u*)/r² + f(u*) f'(u*)/r^alpha`.
    pub fn forcing(&self, t: f64, r: f64) -> Result<f64, MmsError> {
        if !(r > 0.0) {
            return Err(MmsError::AtOrigin(r));
        }
        let j = self.solution.jet(t, r);
        Ok(self.residual(j.u, j.u_tt - j.u_rr - self.model.params.n_minus_one() / r * j.u_r, r, r.powf(-self.model.params.alpha)))
    }

    /// Adds the nonlinear terms to the linear part `lin = u_tt - u_rr - (n-1)/r u_r`.
    #[inline]
    fn residual(&self, u: f64, lin: f64, r: f64, inv_r_alpha: f64) -> f64 {
        let nm1 = self.model.params.n_minus_one();
        lin + 0.5 * nm1 * (2.0 * u).sin() / (r * r) + self.model.profile.force(u) * inv_r_alpha
    }

    /// Largest mismatch between the closed-form derivatives and central differences of `u*`,
    /// scaled by `1/step²`, over `samples` points of `(0, radius] x [t0, t1]`.
    pub fn derivative_defect(&self, radius: f64, times: (f64, f64), samples: usize, step: f64) -> f64 {
        let s = &self.solution;
        let mut worst: f64 = 0.0;
        for i in 0..samples {
            let r = radius * (i as f64 + 0.5) / samples as f64 + step;
            let t = times.0 + (times.1 - times.0) * ((i * 7) % samples) as f64 / samples as f64;
            let j = s.jet(t, r);
            let u = |t: f64, r: f64| s.jet(t, r).u;
            let ut = (u(t + step, r) - u(t - step, r)) / (2.0 * step);
            let utt = (u(t + step, r) - 2.0 * j.u + u(t - step, r)) / (step * step);
            let ur = (u(t, r + step) - u(t, r - step)) / (2.0 * step);
            let urr = (u(t, r + step) - 2.0 * j.u + u(t, r - step)) / (step * step);
            for d in [ut - j.u_t, utt - j.u_tt, ur - j.u_r, urr - j.u_rr] {
                worst = worst.max(d.abs() / (step * step));
            }
        }
        worst
    }

    /// Largest `|u*(t, r) / r|` over sampled small radii; finite when `u* = O(r)`.
    pub fn origin_slope(&self, times: (f64, f64), samples: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..samples {
            let t = times.0 + (times.1 - times.0) * i as f64 / samples.max(2).saturating_sub(1) as f64;
            for k in 1..=12 {
                let r = 10f64.powi(-k);
                worst = worst.max((self.solution.jet(t, r).u / r).abs());
            }
        }
        worst
    }

    pub fn initial_state(&self, grid: &RadialGrid, t0: f64) -> FieldState {
        let radii = grid.radii();
        FieldState {
            t: t0,
            u: radii.iter().map(|&r| self.solution.jet(t0, r).u).collect(),
            v: radii.iter().map(|&r| self.solution.jet(t0, r).u_t).collect(),
        }
    }

    /// `u*` and `u*_t` on `grid` at time `t`.
    pub fn exact_state(&self, grid: &RadialGrid, t: f64) -> FieldState {
        self.initial_state(grid, t)
    }

    /// The source `F*` and the exact outer boundary value, precomputed on `grid`.
    pub fn grid_forcing(&self, grid: &RadialGrid) -> GridForcing {
        let radii = grid.radii();
        let alpha = self.model.params.alpha;
        let nm1 = self.model.params.n_minus_one();
        let inv_r_alpha = radii.iter().map(|r| r.powf(-alpha)).collect();
        let separated = match self.solution.radial(radii[0]) {
            Some(_) => Some(
                radii
                    .iter()
                    .map(|&r| {
                        let [p, p_r, p_rr] = self.solution.radial(r).unwrap_or_default();
                        (p, p_rr + nm1 / r * p_r)
                    })
                    .collect(),
            ),
            None => None,
        };
        GridForcing { case: self.clone(), radii, inv_r_alpha, separated, radius: grid.radius() }
    }
}

/// [`Forcing`] for a manufactured case on a fixed grid, with radial factors cached when
/// the solution separates.
pub struct GridForcing {
    case: ManufacturedCase,
    radii: Vec<f64>,
    inv_r_alpha: Vec<f64>,
    /// `(φ, φ'' + (n-1)/r φ')` per cell.
    separated: Option<Vec<(f64, f64)>>,
    radius: f64,
}

impl Forcing for GridForcing {
    fn source(&self, t: f64, r: f64) -> f64 {
        self.case.forcing(t, r).unwrap_or(0.0)
    }

    fn fill_source(&self, t: f64, grid: &RadialGrid, out: &mut [f64]) {
        debug_assert_eq!(grid.cells(), self.radii.len());
        match (&self.separated, self.case.solution.temporal(t)) {
            (Some(radial), Some([a, _, a_tt])) => {
                for (j, o) in out.iter_mut().enumerate() {
                    let (p, lap) = radial[j];
                    *o = self.case.residual(a * p, a_tt * p - a * lap, self.radii[j], self.inv_r_alpha[j]);
                }
            }
            _ => {
                for (j, o) in out.iter_mut().enumerate() {
                    *o = self.source(t, self.radii[j]);
                }
            }
        }
    }

    fn outer_value(&self, t: f64) -> f64 {
        self.case.solution.jet(t, self.radius).u
    }
}

/// Time window, domain and stepping of a convergence study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StudyConfig {
    pub radius: f64,
    pub t0: f64,
    pub t_end: f64,
    pub cfl: f64,
    pub origin_closure: OriginClosure,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig { radius: 1.0, t0: 0.0, t_end: 0.1, cfl: 0.5, origin_closure: OriginClosure::Odd }
    }
}

impl StudyConfig {
    /// Errors in the interior variant are measured on `r <= radius - (t_end - t0)`, which the
    /// outer boundary cannot influence.
    pub fn interior_radius(&self) -> f64 {
        (self.radius - (self.t_end - self.t0)).max(0.0)
    }
}

/// Errors against `u*` at the final time on one grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelError {
    pub h: f64,
    pub steps: usize,
    pub dt: f64,
    pub max_error: f64,
    pub energy_error: f64,
    pub max_error_interior: f64,
    pub energy_error_interior: f64,
}

/// `log2(err(h) / err(h/2))`; `None` when both errors vanish.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObservedOrder {
    pub h: f64,
    pub max: Option<f64>,
    pub energy: Option<f64>,
    pub max_interior: Option<f64>,
    pub energy_interior: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub case: String,
    pub config: StudyConfig,
    pub levels: Vec<LevelError>,
    pub orders: Vec<ObservedOrder>,
    /// Every level reproduced `u*` exactly.
    pub exact: bool,
}

impl ConvergenceReport {
    /// Max-norm orders over the full grid, which gate the study.
    pub fn max_orders(&self) -> Vec<Option<f64>> {
        self.orders.iter().map(|o| o.max).collect()
    }

    /// True when every max-norm order lies in `[lo, hi]`; exact levels pass.
    pub fn within(&self, lo: f64, hi: f64) -> bool {
        self.max_orders().iter().all(|o| o.map_or(true, |p| p >= lo && p <= hi))
    }

    /// True when the max-norm error decreases strictly from level to level (or is zero).
    pub fn monotone(&self) -> bool {
        self.levels.windows(2).all(|w| w[1].max_error < w[0].max_error || (w[0].max_error == 0.0 && w[1].max_error == 0.0))
    }
}

fn order(coarse: f64, fine: f64) -> Option<f64> {
    if coarse == 0.0 && fine == 0.0 {
        None
    } else {
        Some((coarse / fine).log2())
    }
}

/// Discrete max and energy norms of `(u - u*, v - v*)` on the cells with `r <= limit`.
fn errors(grid: &RadialGrid, model: &Model, numeric: &FieldState, exact: &FieldState, limit: f64) -> (f64, f64) {
    let h = grid.h();
    let nm1 = model.params.n_minus_one();
    let last = grid.last_index_within(limit).map_or(0, |j| j + 1);
    let mut max: f64 = 0.0;
    let mut energy = 0.0;
    for j in 0..last {
        let e = numeric.u[j] - exact.u[j];
        let ev = numeric.v[j] - exact.v[j];
        max = max.max(e.abs());
        let grad = if j + 1 < last { (numeric.u[j + 1] - exact.u[j + 1] - e) / h } else { 0.0 };
        energy += grid.r(j).powf(nm1) * (ev * ev + grad * grad);
    }
    (max, (h * energy).sqrt())
}

/// Runs the forced problem from `u*(t0)` on one grid and measures the final errors.
pub fn run_level(case: &ManufacturedCase, h: f64, cfg: &StudyConfig) -> Result<LevelError, MmsError> {
    let grid = RadialGrid::with_radius(cfg.radius, h)?;
    let solver = SolverConfig {
        cfl: cfg.cfl,
        t0: cfg.t0,
        t_end: cfg.t_end,
        snapshot_stride: usize::MAX,
        blowup_threshold: None,
        apex: None,
        origin_closure: cfg.origin_closure,
    };
    let forcing = case.grid_forcing(&grid);
    let history = evolve_forced(&solver, case.initial_state(&grid, cfg.t0), &grid, &case.model, &forcing)?;
    let exact = case.exact_state(&grid, cfg.t_end);
    let numeric = history.final_state();
    let (max_error, energy_error) = errors(&grid, &case.model, numeric, &exact, cfg.radius);
    let (max_error_interior, energy_error_interior) = errors(&grid, &case.model, numeric, &exact, cfg.interior_radius());
    Ok(LevelError { h, steps: history.steps, dt: history.dt, max_error, energy_error, max_error_interior, energy_error_interior })
}

/// Grid-convergence study over `hs` (at least three levels, each half the previous).
/// Levels run concurrently.
pub fn convergence_study(case: &ManufacturedCase, hs: &[f64], cfg: &StudyConfig) -> Result<ConvergenceReport, MmsError> {
    if hs.len() < 3 {
        return Err(MmsError::InvalidStudy(format!("need at least 3 grid levels, got {}", hs.len())));
    }
    for w in hs.windows(2) {
        if !(w[0] > 0.0 && (w[0] / w[1] - 2.0).abs() < 1e-9) {
            return Err(MmsError::InvalidStudy(format!("grid levels must halve h: {} -> {}", w[0], w[1])));
        }
    }
    let levels = hs.par_iter().map(|&h| run_level(case, h, cfg)).collect::<Result<Vec<_>, _>>()?;
    let orders = levels
        .windows(2)
        .map(|w| ObservedOrder {
            h: w[0].h,
            max: order(w[0].max_error, w[1].max_error),
            energy: order(w[0].energy_error, w[1].energy_error),
            max_interior: order(w[0].max_error_interior, w[1].max_error_interior),
            energy_interior: order(w[0].energy_error_interior, w[1].energy_error_interior),
        })
        .collect();
    let exact = levels.iter().all(|l| l.max_error == 0.0 && l.energy_error == 0.0);
    Ok(ConvergenceReport { case: case.name(), config: *cfg, levels, orders, exact })
}

/// Energy balance of a forced run: `E_h(t_end) - E_h(t0)` against the work `∫ h ∑ r^(n-1) v F dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorkBalance {
    pub energy_change: f64,
    pub work: f64,
    /// `energy_change - work`.
    pub residual: f64,
}

/// Evolves the forced problem and integrates the forcing work with Simpson's rule on the
/// uniform steps. The domain should be wide enough that `u*` vanishes at `r = R` to rounding.
pub fn work_balance(case: &ManufacturedCase, grid: &RadialGrid, cfg: &StudyConfig) -> Result<WorkBalance, MmsError> {
    let solver = SolverConfig { cfl: cfg.cfl, t0: cfg.t0, t_end: cfg.t_end, ..Default::default() };
    let (mut steps, _) = solver.step_plan(grid, &case.model)?;
    steps += steps % 2;
    let dt = (cfg.t_end - cfg.t0) / steps as f64;
    let op = SpatialOperator::new(*grid, case.model, cfg.origin_closure);
    let forcing = case.grid_forcing(grid);
    let mut scratch = vec![0.0; grid.cells()];
    let mut source = vec![0.0; grid.cells()];
    let power = |state: &FieldState, source: &mut [f64]| {
        forcing.fill_source(state.t, grid, source);
        grid.h() * source.iter().zip(&state.v).zip(op.weights()).map(|((f, v), w)| f * v * w).sum::<f64>()
    };
    let mut state = case.initial_state(grid, cfg.t0);
    let e0 = op.discrete_energy(&state.u, &state.v, &mut scratch);
    let mut rk = Rk4::new(op.clone());
    let mut work = power(&state, &mut source);
    for k in 1..=steps {
        rk.advance(&mut state, dt, Some(&forcing));
        if !state.is_finite() {
            return Err(SolverError::NonFinite { step: k, t: state.t, index: 0 }.into());
        }
        let weight = if k == steps { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
        work += weight * power(&state, &mut source);
    }
    let work = work * dt / 3.0;
    let energy_change = op.discrete_energy(&state.u, &state.v, &mut scratch) - e0;
    Ok(WorkBalance { energy_change, work, residual: energy_change - work })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinearity::Profile;

    /// `u* = r g(t)` with `g(0) = 1`, `g''(0) = 0`.
    struct LinearInR;

    impl ManufacturedSolution for LinearInR {
        fn name(&self) -> String {
            "r (1 + t)".into()
        }

        fn jet(&self, t: f64, r: f64) -> Jet {
            Jet { u: r * (1.0 + t), u_t: r, u_tt: 0.0, u_r: 1.0 + t, u_rr: 0.0 }
        }
    }

    fn an() -> Model {
        Model::new(3, 4.0, Profile::AdkinsNappi).unwrap()
    }

    #[test]
    fn zero_solution_has_zero_forcing() {
        let case = ManufacturedCase::new(Arc::new(ZeroSolution), an());
        for r in [0.01, 0.5, 2.0] {
            assert_eq!(case.forcing(0.3, r).unwrap(), 0.0);
        }
        assert!(matches!(case.forcing(0.0, 0.0), Err(MmsError::AtOrigin(_))));
    }

    #[test]
    fn hand_evaluated_forcing() {
        let model = Model::new(2, 3.0, Profile::Linear).unwrap();
        let case = ManufacturedCase::new(Arc::new(LinearInR), model);
        let expected = -1.0 + 0.5 * 2f64.sin() + 1.0;
        assert!((case.forcing(0.0, 1.0).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn gaussian_derivatives_match_finite_differences() {
        let case = ManufacturedCase::gaussian(an());
        assert!(case.derivative_defect(3.0, (0.0, 2.0), 200, 1e-3) < 10.0);
        assert_eq!(case.solution.jet(0.7, 0.0).u, 0.0);
        assert!(case.origin_slope((0.0, 2.0), 10) <= 0.1 + 1e-12);
    }

    #[test]
    fn forcing_matches_finite_difference_residual() {
        // Sixth-order differences of u* alone, independent of the closed-form jets.
        for (n, alpha, profile) in [(2, 3.0, Profile::Linear), (3, 4.0, Profile::AdkinsNappi), (3, 4.0, Profile::Cubic)] {
            let model = Model::new(n, alpha, profile).unwrap();
            let case = ManufacturedCase::gaussian(model);
            let s = case.solution.clone();
            let u = |t: f64, r: f64| s.jet(t, r).u;
            let d = 1e-3;
            let d1 = |g: &dyn Fn(f64) -> f64, x: f64| {
                (-g(x - 3.0 * d) + 9.0 * g(x - 2.0 * d) - 45.0 * g(x - d) + 45.0 * g(x + d) - 9.0 * g(x + 2.0 * d) + g(x + 3.0 * d))
                    / (60.0 * d)
            };
            let d2 = |g: &dyn Fn(f64) -> f64, x: f64| {
                (2.0 * g(x - 3.0 * d) - 27.0 * g(x - 2.0 * d) + 270.0 * g(x - d) - 490.0 * g(x) + 270.0 * g(x + d)
                    - 27.0 * g(x + 2.0 * d)
                    + 2.0 * g(x + 3.0 * d))
                    / (180.0 * d * d)
            };
            for &(t, r) in &[(0.1, 0.3), (0.5, 1.0), (1.3, 1.7), (2.0, 0.05)] {
                let utt = d2(&|t| u(t, r), t);
                let ur = d1(&|r| u(t, r), r);
                let urr = d2(&|r| u(t, r), r);
                let w = u(t, r);
                let nm1 = n as f64 - 1.0;
                let fd = utt - urr - nm1 / r * ur + 0.5 * nm1 * (2.0 * w).sin() / (r * r) + profile.force(w) * r.powf(-alpha);
                let exact = case.forcing(t, r).unwrap();
                assert!((fd - exact).abs() < 1e-6, "{profile:?} ({t}, {r}): {fd} vs {exact}");
            }
        }
    }

    #[test]
    fn grid_forcing_matches_pointwise_forcing() {
        let case = ManufacturedCase::gaussian(an());
        let grid = RadialGrid::with_radius(2.0, 1.0 / 32.0).unwrap();
        let f = case.grid_forcing(&grid);
        let mut out = vec![0.0; grid.cells()];
        f.fill_source(0.4, &grid, &mut out);
        for (j, o) in out.iter().enumerate() {
            assert!((o - case.forcing(0.4, grid.r(j)).unwrap()).abs() < 1e-12 * (1.0 + o.abs()));
        }
        assert_eq!(f.outer_value(0.4), case.solution.jet(0.4, 2.0).u);
    }

    #[test]
    fn zero_case_is_exact() {
        let case = ManufacturedCase::new(Arc::new(ZeroSolution), an());
        let rep = convergence_study(&case, &[1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0], &StudyConfig::default()).unwrap();
        assert!(rep.exact);
        assert!(rep.orders.iter().all(|o| o.max.is_none()));
        assert!(rep.within(1.8, 2.2));
    }

    #[test]
    fn study_validates_levels() {
        let case = ManufacturedCase::gaussian(an());
        let cfg = StudyConfig::default();
        assert!(matches!(convergence_study(&case, &[0.1], &cfg), Err(MmsError::InvalidStudy(_))));
        assert!(matches!(convergence_study(&case, &[0.1, 0.05, 0.02], &cfg), Err(MmsError::InvalidStudy(_))));
    }

    #[test]
    fn coarse_study_is_second_order() {
        let case = ManufacturedCase::gaussian(an());
        let rep = convergence_study(&case, &[1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0], &StudyConfig::default()).unwrap();
        assert!(rep.monotone(), "{rep:?}");
        assert!(rep.within(1.8, 2.2), "{:?}", rep.orders);
    }

    #[test]
    fn forcing_work_balances_energy() {
        let case = ManufacturedCase::gaussian(an());
        let grid = RadialGrid::with_radius(6.0, 1.0 / 64.0).unwrap();
        let cfg = StudyConfig { radius: 6.0, t_end: 1.0, ..Default::default() };
        let wb = work_balance(&case, &grid, &cfg).unwrap();
        assert!(wb.energy_change.abs() > 1e-4, "{wb:?}");
        assert!(wb.residual.abs() < 1e-6 * wb.energy_change.abs(), "{wb:?}");
    }
}
