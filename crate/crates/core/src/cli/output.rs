use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::diagnostics::densities;
use crate::mms::ConvergenceReport;
use crate::solver::{FieldState, RunHistory};

use super::config::{Format, OutputSection};
use super::run::{Report, RunOutput};
use super::CliError;

pub const SERIES_FILE: &str = "series.ndjson";
pub const SLICES_FILE: &str = "slices.csv";
pub const REPORT_FILE: &str = "report.json";
pub const SUMMARY_FILE: &str = "summary.txt";
pub const LAST_GOOD_FILE: &str = "last_good.json";
pub const AGGREGATE_FILE: &str = "aggregate.csv";
pub const MMS_FILE: &str = "mms.json";
pub const CONVERGENCE_FILE: &str = "convergence.csv";

fn io(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Pretty JSON with non-finite numbers written as `null`.
pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let v = serde_json::to_value(value).map_err(|e| CliError::Io(e.to_string()))?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| io(path, e))
}

/// One JSON object per step: `step`, `t`, `energy`, `sup_abs` and the cone sample.
pub fn write_series(path: &Path, history: &RunHistory) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| io(path, e))?;
    let mut w = BufWriter::new(file);
    for rec in &history.records {
        let line = serde_json::to_string(rec).map_err(|e| CliError::Io(e.to_string()))?;
        writeln!(w, "{line}").map_err(|e| io(path, e))?;
    }
    w.flush().map_err(|e| io(path, e))
}

/// Retained slices in lab time, `t,r,u,ut,ur,e_plus,m`.
pub fn write_slices(path: &Path, history: &RunHistory, every: usize) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| io(path, e))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "t,r,u,ut,ur,e_plus,m").map_err(|e| io(path, e))?;
    let every = every.max(1);
    let last = history.slices.len().saturating_sub(1);
    for (k, slice) in history.slices.iter().enumerate() {
        if k % every != 0 && k != last {
            continue;
        }
        let d = densities(slice, &history.grid, &history.model);
        for j in 0..slice.len() {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                slice.t,
                history.grid.r(j),
                slice.u[j],
                slice.v[j],
                d.ur[j],
                d.e_plus[j],
                d.m[j]
            )
            .map_err(|e| io(path, e))?;
        }
    }
    w.flush().map_err(|e| io(path, e))
}

fn fmt_seq(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:.4e}")).collect::<Vec<_>>().join(" ")
}

/// Plain-text digest of a report.
pub fn summary(report: &Report) -> String {
    let mut s = String::new();
    let cfg = &report.config;
    let run = &report.run;
    let _ = writeln!(s, "model: n = {}, alpha = {}, profile = {}", cfg.model.n, cfg.model.alpha, cfg.model.profile);
    let _ = writeln!(s, "grid: R = {}, h = {}, cells = {}", run.radius, run.h, run.cells);
    let _ = writeln!(s, "steps: {} of dt = {:e}, retained slices: {}", run.steps, run.dt, run.retained_slices);
    let _ = writeln!(s, "apex: {}, reflected window: [{}, {}]", run.apex, run.window[0], run.window[1]);
    let _ = writeln!(s, "global energy: {:e} -> {:e}", run.initial_energy, run.final_energy);
    let h = &report.hypotheses;
    let _ = writeln!(
        s,
        "hypotheses: alpha_ok = {} (threshold {}), f(0) = 0: {}, f'(0) = {} ({}), sign condition: {}, I divergence: {}",
        h.alpha_ok,
        h.alpha_threshold,
        h.f_zero_ok,
        h.f_prime_at_zero,
        if h.f_prime_zero_ok { "nonzero" } else { "ZERO" },
        h.sign_condition.ok,
        h.divergence.ok
    );
    if let Some(b) = &run.blowup {
        let _ = writeln!(s, "BLOW-UP SUSPECTED at step {} (t = {}): {}", b.step, b.t, b.reason);
        return s;
    }
    if let Some(e) = &report.energy {
        for r in &e.regions {
            let _ = writeln!(
                s,
                "energy-flux [{}, {}]: E(S) = {:.6e}, E(T) = {:.6e}, F = {:.6e}, residual = {:.3e} (relative {:.3e})",
                r.region.s, r.region.t, r.energy_s, r.energy_t, r.flux, r.residual, r.relative
            );
        }
        let _ = writeln!(
            s,
            "flux: min over pairs = {:.3e}; largest energy decrease = {:.3e}",
            e.min_pair_flux, e.max_energy_decrease
        );
    }
    if let Some(b) = &report.bogomolny {
        match &b.skipped {
            Some(why) => {
                let _ = writeln!(s, "bogomolny: skipped, {why}");
            }
            None => {
                let _ = writeln!(
                    s,
                    "bogomolny: max violation {:.3e} at r = {}, t = {} over {} slices",
                    b.max_violation, b.witness_r, b.witness_t, b.slices_checked
                );
            }
        }
    }
    for m in &report.multiplier {
        let _ = writeln!(s, "multiplier {} on [{}, {}]: residual {:.3e}", m.multiplier, m.region.s, m.region.t, m.residual);
    }
    for e in &report.energyint {
        let _ = writeln!(s, "energyint on [{}, {}]: signed sum {:.3e}", e.region.s, e.region.t, e.signed_sum);
    }
    if let Some(d) = &report.dyadic {
        let _ = writeln!(s, "dyadic T: {}", fmt_seq(&d.scan.times));
        let _ = writeln!(s, "tip energy: {} (strictly decreasing: {})", fmt_seq(&d.scan.tip_energy), d.tip_strictly_decreasing);
        let _ = writeln!(s, "sup probe: {} (strictly decreasing: {})", fmt_seq(&d.scan.sup_probe), d.sup_strictly_decreasing);
        let _ = writeln!(s, "flux decay: {}", fmt_seq(&d.scan.flux_decay));
        for (name, g) in &d.growth {
            let _ = writeln!(s, "lemma {name}: growth towards apex {g:.3}");
        }
    }
    let _ = writeln!(s, "acceptance: {}", if report.acceptance.passed { "PASS" } else { "FAIL" });
    s
}

/// Writes every requested artifact of a run into `dir`.
pub fn write_run(dir: &Path, out: &RunOutput, formats: &OutputSection) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    if formats.wants(Format::Ndjson) {
        write_series(&dir.join(SERIES_FILE), &out.history)?;
    }
    if formats.wants(Format::Csv) {
        write_slices(&dir.join(SLICES_FILE), &out.history, formats.slice_every)?;
    }
    if formats.wants(Format::Json) {
        write_text(&dir.join(REPORT_FILE), &to_json(&out.report)?)?;
    }
    if formats.wants(Format::Txt) {
        write_text(&dir.join(SUMMARY_FILE), &summary(&out.report))?;
    }
    if let Some(state) = &out.last_good {
        write_last_good(&dir.join(LAST_GOOD_FILE), state)?;
    }
    Ok(())
}

pub fn write_last_good(path: &Path, state: &FieldState) -> Result<(), CliError> {
    write_text(path, &to_json(state)?)
}

/// Table of errors and observed orders.
pub fn convergence_table(rep: &ConvergenceReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "case: {}", rep.case);
    let _ = writeln!(s, "{:>12} {:>8} {:>12} {:>12} {:>12} {:>12}", "h", "steps", "max err", "energy err", "max (int)", "energy (int)");
    for l in &rep.levels {
        let _ = writeln!(
            s,
            "{:>12.6e} {:>8} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}",
            l.h, l.steps, l.max_error, l.energy_error, l.max_error_interior, l.energy_error_interior
        );
    }
    let o = |x: Option<f64>| x.map_or("exact".to_string(), |v| format!("{v:.3}"));
    let _ = writeln!(s, "{:>12} {:>12} {:>12} {:>12} {:>12}", "pair from h", "max", "energy", "max (int)", "energy (int)");
    for p in &rep.orders {
        let _ = writeln!(
            s,
            "{:>12.6e} {:>12} {:>12} {:>12} {:>12}",
            p.h,
            o(p.max),
            o(p.energy),
            o(p.max_interior),
            o(p.energy_interior)
        );
    }
    s
}

pub fn convergence_csv(rep: &ConvergenceReport) -> String {
    let mut s = String::from("h,steps,dt,max_error,energy_error,max_error_interior,energy_error_interior\n");
    for l in &rep.levels {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            l.h, l.steps, l.dt, l.max_error, l.energy_error, l.max_error_interior, l.energy_error_interior
        );
    }
    s
}
