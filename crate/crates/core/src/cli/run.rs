use serde::Serialize;

use crate::diagnostics::{
    bogomolny_check, cone_energy, dyadic_scan, energy_flux_residual, energy_ledger, energyint_decomposition, flux,
    lemma_bounds, multiplier_residual, ConeRegion, DiagnosticsError, DyadicScan, EnergyIntLedger,
    LemmaReport, Multiplier, ResidualReport,
};
use crate::nonlinearity::{check_hypotheses, HypothesisReport};
use crate::solver::{evolve, BlowUpReason, FieldState, RunHistory, SolverError};

use super::config::{Check, RunConfig};
use super::CliError;

/// Everything `run` records in `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub config: RunConfig,
    pub run: RunInfo,
    pub hypotheses: HypothesisReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<EnergySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bogomolny: Option<BogomolnySection>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub multiplier: Vec<ResidualReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub energyint: Vec<EnergyIntLedger>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub lemma: Vec<LemmaReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dyadic: Option<DyadicSection>,
    pub acceptance: Acceptance,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunInfo {
    pub steps: usize,
    pub dt: f64,
    pub h: f64,
    pub cells: usize,
    pub radius: f64,
    pub apex: f64,
    /// Reflected-time window `[apex - t_end, apex - t0]`.
    pub window: [f64; 2],
    pub retained_slices: usize,
    pub initial_energy: f64,
    pub final_energy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blowup: Option<BlowUpInfo>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowUpInfo {
    pub step: usize,
    pub t: f64,
    pub reason: BlowUpReason,
    pub last_good_t: f64,
}

/// `E(T) - E(S) - F(S,T)` on one configured region.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyRegion {
    pub region: ConeRegion,
    pub energy_s: f64,
    pub energy_t: f64,
    pub flux: f64,
    pub residual: f64,
    /// `|residual| / E(T)`, `0` when both vanish.
    pub relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergySection {
    pub times: Vec<f64>,
    pub energies: Vec<f64>,
    pub cumulative_flux: Vec<f64>,
    pub min_pair_flux: f64,
    pub max_energy_decrease: f64,
    pub max_abs_step_residual: f64,
    pub regions: Vec<EnergyRegion>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BogomolnySection {
    pub slices_checked: usize,
    pub max_violation: f64,
    pub witness_r: f64,
    /// Reflected time of the worst slice.
    pub witness_t: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DyadicSection {
    pub scan: DyadicScan,
    /// Largest growth of each lemma ratio towards the apex.
    pub growth: Vec<(String, f64)>,
    /// `max / min` of each lemma ratio.
    pub spread: Vec<(String, f64)>,
    pub tip_strictly_decreasing: bool,
    pub sup_strictly_decreasing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Acceptance {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy_flux_ok: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bogomolny_ok: Option<bool>,
    pub passed: bool,
}

/// Successful or interrupted run, with everything needed to write the artifacts.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: Report,
    pub history: RunHistory,
    pub last_good: Option<FieldState>,
}

impl RunOutput {
    pub fn blew_up(&self) -> bool {
        self.report.run.blowup.is_some()
    }
}

/// `true` when every entry is strictly below its predecessor and the last is at most
/// `ratio` times the first.
pub fn strictly_decaying(values: &[f64], ratio: f64) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
        && match (values.first(), values.last()) {
            (Some(a), Some(b)) => values.len() > 1 && *b <= ratio * a,
            _ => false,
        }
}

fn diag<T>(r: Result<T, DiagnosticsError>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Config(format!("diagnostics: {e}")))
}

/// Evolves the configured data and computes every requested diagnostic.
pub fn execute(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let model = cfg.model.build()?;
    let grid = cfg.grid.build()?;
    let data = cfg.data.build(&grid, cfg.solver.t0)?;
    let solver = cfg.solver_config();
    let hypotheses = check_hypotheses(&model.profile, &model.params, (cfg.check.range[0], cfg.check.range[1]), cfg.check.samples)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let regions = cfg.diagnostics.regions()?;
    let apex = cfg.apex();

    let (history, blowup, last_good) = match evolve(&solver, data, &grid, &model) {
        Ok(h) => (h, None, None),
        Err(SolverError::BlowUpSuspected { step, t, reason, last_good, history }) => {
            let info = BlowUpInfo { step, t, reason, last_good_t: last_good.t };
            (*history, Some(info), Some(*last_good))
        }
        Err(e) => return Err(e.into()),
    };
    let first = history.records.first().map_or(0.0, |r| r.energy);
    let last = history.records.last().map_or(0.0, |r| r.energy);
    let window = [apex - solver.t_end, apex - solver.t0];
    let run = RunInfo {
        steps: history.steps,
        dt: history.dt,
        h: grid.h(),
        cells: grid.cells(),
        radius: grid.radius(),
        apex,
        window,
        retained_slices: history.slices.len(),
        initial_energy: first,
        final_energy: last,
        blowup,
    };
    let mut report = Report {
        config: cfg.resolved(&grid),
        run,
        hypotheses,
        energy: None,
        bogomolny: None,
        multiplier: Vec::new(),
        energyint: Vec::new(),
        lemma: Vec::new(),
        dyadic: None,
        acceptance: Acceptance { energy_flux_ok: None, bogomolny_ok: None, passed: false },
    };
    if report.run.blowup.is_some() {
        return Ok(RunOutput { report, history, last_good });
    }

    let d = &cfg.diagnostics;
    if d.enabled(Check::Energy) {
        let ledger = diag(energy_ledger(&history))?;
        let mut rows = Vec::with_capacity(regions.len());
        for region in &regions {
            let residual = diag(energy_flux_residual(&history, region.s, region.t))?;
            let e_t = diag(history.reflected_slice(region.t).ok_or(DiagnosticsError::NotRetained { time: region.t }))?;
            let e_s = diag(history.reflected_slice(region.s).ok_or(DiagnosticsError::NotRetained { time: region.s }))?;
            let energy_t = diag(cone_energy(&e_t, region.t, &grid, &model))?;
            let energy_s = diag(cone_energy(&e_s, region.s, &grid, &model))?;
            let relative = if energy_t > 0.0 { residual.abs() / energy_t } else if residual == 0.0 { 0.0 } else { f64::INFINITY };
            rows.push(EnergyRegion {
                region: *region,
                energy_s,
                energy_t,
                flux: diag(flux(&history, region.s, region.t))?,
                residual,
                relative,
            });
        }
        report.acceptance.energy_flux_ok = Some(rows.iter().all(|r| r.relative <= d.energy_tolerance));
        report.energy = Some(EnergySection {
            min_pair_flux: ledger.min_pair_flux(),
            max_energy_decrease: ledger.max_energy_decrease(),
            max_abs_step_residual: ledger.max_abs_residual(),
            times: ledger.times,
            energies: ledger.energies,
            cumulative_flux: ledger.cumulative_flux,
            regions: rows,
        });
    }
    if d.enabled(Check::Bogomolny) {
        let mut section =
            BogomolnySection { slices_checked: 0, max_violation: 0.0, witness_r: 0.0, witness_t: 0.0, skipped: None };
        let mut worst = f64::NEG_INFINITY;
        for slice in &history.slices {
            match bogomolny_check(slice, &grid, &model) {
                Ok(rep) => {
                    section.slices_checked += 1;
                    if rep.max_violation > worst {
                        worst = rep.max_violation;
                        section.max_violation = rep.max_violation;
                        section.witness_r = rep.witness;
                        section.witness_t = apex - slice.t;
                    }
                }
                Err(DiagnosticsError::AlphaBelowThreshold { .. }) => {
                    section.skipped = Some(format!("alpha = {} < 2(n-1): the bound is not claimed", model.params.alpha));
                    break;
                }
                Err(e) => return Err(CliError::Config(format!("diagnostics: {e}"))),
            }
        }
        if section.skipped.is_none() {
            report.acceptance.bogomolny_ok = Some(section.max_violation <= d.bogomolny_tolerance);
        }
        report.bogomolny = Some(section);
    }
    if d.enabled(Check::Multiplier) {
        for region in &regions {
            for mult in [Multiplier::energy(), Multiplier::scaling(model.params.n)] {
                report.multiplier.push(diag(multiplier_residual(&history, &mult, region))?);
            }
        }
    }
    if d.enabled(Check::Energyint) {
        for region in &regions {
            report.energyint.push(diag(energyint_decomposition(&history, region))?);
        }
    }
    if d.enabled(Check::Lemma) {
        for region in &regions {
            report.lemma.push(diag(lemma_bounds(&history, region))?);
        }
    }
    if d.enabled(Check::Dyadic) && d.dyadic_levels > 0 {
        let t_max = d.dyadic_t_max.unwrap_or(0.5 * (window[0].max(0.0) + window[1]));
        let scan = diag(dyadic_scan(&history, t_max, d.dyadic_levels))?;
        let growth = scan.growth();
        let spread = scan.spread();
        report.dyadic = Some(DyadicSection {
            tip_strictly_decreasing: strictly_decaying(&scan.tip_energy, 1.0),
            sup_strictly_decreasing: strictly_decaying(&scan.sup_probe, 1.0),
            growth,
            spread,
            scan,
        });
    }
    report.acceptance.passed =
        report.acceptance.energy_flux_ok.unwrap_or(true) && report.acceptance.bogomolny_ok.unwrap_or(true);
    Ok(RunOutput { report, history, last_good: None })
}
