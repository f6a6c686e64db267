use serde::Serialize;

use crate::nonlinearity::Model;
use crate::quadrature::radial_derivative;
use crate::solver::{FieldState, RadialGrid, RunHistory};

use super::cone::{ConeRegion, ConeView, Point};
use super::density::cone_integral;
use super::energy::{cone_energy, flux_decay};
use super::multiplier::energyint_decomposition;
use super::DiagnosticsError;

/// One bound `LHS ≲ shape`, with the ratio that plays the role of the hidden constant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub shape: f64,
    /// `lhs / shape`; `0` when both vanish, `None` when only the shape does.
    pub ratio: Option<f64>,
}

impl BoundCheck {
    fn new(name: &str, lhs: f64, shape: f64) -> Self {
        let ratio = if shape > 0.0 {
            Some(lhs / shape)
        } else if lhs == 0.0 {
            Some(0.0)
        } else {
            None
        };
        BoundCheck { name: name.into(), lhs, shape, ratio }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    pub region: ConeRegion,
    pub bounds: Vec<BoundCheck>,
}

impl LemmaReport {
    pub fn get(&self, name: &str) -> Option<&BoundCheck> {
        self.bounds.iter().find(|b| b.name == name)
    }
}

pub const SURFACE: &str = "surface";
pub const VOLUME: &str = "volume";
pub const SLICE: &str = "slice";
pub const U_UT: &str = "u_ut";

/// The four bounds used to control the scaling identity on `K(S,T)`:
/// - `surface`: the lateral term of the scaling identity vs `T F(T) + T^(n/2) F(T)^(1/2)`;
/// - `volume`: `∫_K (sin²u + |u sin 2u|)/r²` vs `T^(alpha/2)` (n = 2) or `T^(n-1)`;
/// - `slice`: `∫_{Σ_T} T e⁺ + r |u_t u_r|` vs `T E(T)`;
/// - `u_ut`: `∫_{Σ_T} |u u_t|` vs `T^((alpha+2)/4) E(T)` (n = 2) or `T^(n/2) E(T)^(1/2)`.
pub fn lemma_bounds(history: &RunHistory, region: &ConeRegion) -> Result<LemmaReport, DiagnosticsError> {
    let view = ConeView::new(history)?;
    let n = view.model.params.n;
    let alpha = view.model.params.alpha;
    let t = region.t;
    let nf = n as f64;

    let ledger = energyint_decomposition(history, region)?;
    let f_t = flux_decay(history, t)?.max(0.0);
    let surface = BoundCheck::new(SURFACE, ledger.surface.abs(), t * f_t + t.powf(0.5 * nf) * f_t.sqrt());

    let vol = |p: &Point| (p.u.sin().powi(2) + (p.u * (2.0 * p.u).sin()).abs()) / (p.r * p.r);
    let volume_lhs = view.volume_integral(region, &vol)?;
    let volume_shape = if n == 2 { t.powf(0.5 * alpha) } else { t.powf(nf - 1.0) };
    let volume = BoundCheck::new(VOLUME, volume_lhs, volume_shape);

    let slice_t = view.slice(t)?;
    let energy_t = cone_energy(&slice_t, t, &history.grid, &view.model)?;
    let slice_lhs = view.slice_integral(&slice_t, t, &|p: &Point| p.t * p.e_plus + p.r * (p.ut * p.ur).abs())?;
    let slice = BoundCheck::new(SLICE, slice_lhs, t * energy_t);

    let uut_lhs = view.slice_integral(&slice_t, t, &|p: &Point| (p.u * p.ut).abs())?;
    let uut_shape = if n == 2 { t.powf(0.25 * (alpha + 2.0)) * energy_t } else { t.powf(0.5 * nf) * energy_t.sqrt() };
    let uut = BoundCheck::new(U_UT, uut_lhs, uut_shape);

    Ok(LemmaReport { region: *region, bounds: vec![surface, volume, slice, uut] })
}

/// `∫_0^T [(1 - r/T)(u_t - u_r)² + (u_t + u_r)² + sin²u/r² + f(u)²/r^alpha] r^(n-1) dr`
/// on a slice in reflected orientation at time `T`.
pub fn tip_energy(state: &FieldState, t: f64, grid: &RadialGrid, model: &Model) -> Result<f64, DiagnosticsError> {
    if t <= 0.0 {
        return Ok(0.0);
    }
    let mut ur = vec![0.0; state.len()];
    radial_derivative(&state.u, grid.h(), &mut ur);
    let alpha = model.params.alpha;
    let g: Vec<f64> = (0..state.len())
        .map(|j| {
            let r = grid.r(j);
            let (u, ut, d) = (state.u[j], state.v[j], ur[j]);
            let cut = (1.0 - r / t).max(0.0);
            cut * (ut - d).powi(2) + (ut + d).powi(2) + u.sin().powi(2) / (r * r) + model.profile.f(u).powi(2) * r.powf(-alpha)
        })
        .collect();
    Ok(cone_integral(&g, grid, model.params.n, t)?.max(0.0))
}

/// `sup |u|` over retained slices with reflected time in `(0, T]` and `r <= t`.
pub fn sup_probe(history: &RunHistory, t: f64) -> Result<f64, DiagnosticsError> {
    history.apex().ok_or(DiagnosticsError::NoApex)?;
    let grid = &history.grid;
    let mut best: f64 = 0.0;
    for slice in history.reflected_slices(0.0, t) {
        if slice.t <= 0.0 {
            continue;
        }
        if let Some(last) = grid.last_index_within(slice.t) {
            best = slice.u[..=last].iter().fold(best, |m, x| m.max(x.abs()));
        }
    }
    Ok(best)
}

/// `t_max, t_max/2, ..., t_max/2^(levels-1)`.
pub fn dyadic_times(t_max: f64, levels: usize) -> Vec<f64> {
    (0..levels).map(|k| t_max / 2f64.powi(k as i32)).collect()
}

/// Largest growth `ratio[j] / ratio[k]` over `j > k`, where later entries are closer to the apex.
/// Ratios that vanish are skipped; returns 1 when fewer than two usable entries exist.
pub fn growth_factor(ratios: &[f64]) -> f64 {
    let mut worst: f64 = 1.0;
    for k in 0..ratios.len() {
        if !(ratios[k] > 0.0) {
            continue;
        }
        for &later in &ratios[k + 1..] {
            if later > 0.0 {
                worst = worst.max(later / ratios[k]);
            }
        }
    }
    worst
}

/// Tip energy, continuity probe, flux and lemma ratios at dyadic times approaching the apex.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DyadicScan {
    pub times: Vec<f64>,
    pub tip_energy: Vec<f64>,
    pub sup_probe: Vec<f64>,
    pub flux_decay: Vec<f64>,
    pub cone_energy: Vec<f64>,
    /// Lemma reports over `K(0, T_k)`.
    pub lemma: Vec<LemmaReport>,
}

impl DyadicScan {
    /// Ratios of the named bound across the scan, `0` where undefined.
    pub fn ratios(&self, name: &str) -> Vec<f64> {
        self.lemma.iter().map(|r| r.get(name).and_then(|b| b.ratio).unwrap_or(0.0)).collect()
    }

    /// Largest growth of each bound's ratio towards the apex.
    pub fn growth(&self) -> Vec<(String, f64)> {
        [SURFACE, VOLUME, SLICE, U_UT].iter().map(|n| (n.to_string(), growth_factor(&self.ratios(n)))).collect()
    }

    /// `max / min` of each bound's positive ratios across the scan.
    pub fn spread(&self) -> Vec<(String, f64)> {
        [SURFACE, VOLUME, SLICE, U_UT]
            .iter()
            .map(|n| {
                let r: Vec<f64> = self.ratios(n).into_iter().filter(|x| *x > 0.0).collect();
                let max = r.iter().cloned().fold(0.0, f64::max);
                let min = r.iter().cloned().fold(f64::INFINITY, f64::min);
                (n.to_string(), if r.is_empty() { 1.0 } else { max / min })
            })
            .collect()
    }
}

pub fn dyadic_scan(history: &RunHistory, t_max: f64, levels: usize) -> Result<DyadicScan, DiagnosticsError> {
    let view = ConeView::new(history)?;
    let times = dyadic_times(t_max, levels);
    let mut scan = DyadicScan {
        times: times.clone(),
        tip_energy: Vec::new(),
        sup_probe: Vec::new(),
        flux_decay: Vec::new(),
        cone_energy: Vec::new(),
        lemma: Vec::new(),
    };
    for &t in &times {
        let slice = view.slice(t)?;
        scan.tip_energy.push(tip_energy(&slice, t, &history.grid, &view.model)?);
        scan.cone_energy.push(cone_energy(&slice, t, &history.grid, &view.model)?);
        scan.sup_probe.push(sup_probe(history, t)?);
        scan.flux_decay.push(flux_decay(history, t)?);
        let start = history.reflected_window().map_or(0.0, |w| w.0);
        scan.lemma.push(lemma_bounds(history, &ConeRegion::new(start, t)?)?);
    }
    Ok(scan)
}
