use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::diagnostics::ConeRegion;
use crate::mms::{ManufacturedCase, SolutionSpec, StudyConfig};
use crate::nonlinearity::{Model, Profile};
use crate::solver::{BumpSpec, FieldState, OriginClosure, RadialGrid, SolverConfig, VelocityProfile};

use super::CliError;

/// Complete configuration of a `check`, `run`, `mms` or `sweep` invocation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub model: ModelSection,
    pub grid: GridSection,
    pub solver: SolverSection,
    pub data: DataSection,
    pub diagnostics: DiagnosticsSection,
    pub output: OutputSection,
    pub check: CheckSection,
    pub mms: MmsSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub n: u32,
    pub alpha: f64,
    /// One of `adkins_nappi`, `linear`, `cubic`, `sine`, `power`.
    pub profile: String,
    /// Scalar parameters of the profile, e.g. `exponent` for `power`.
    pub profile_params: BTreeMap<String, f64>,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection { n: 3, alpha: 4.0, profile: "adkins_nappi".into(), profile_params: BTreeMap::new() }
    }
}

impl ModelSection {
    pub fn profile(&self) -> Result<Profile, CliError> {
        Profile::from_name(&self.profile, self.profile_params.iter().map(|(k, v)| (k.as_str(), *v)))
            .map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn build(&self) -> Result<Model, CliError> {
        Model::new(self.n, self.alpha, self.profile()?).map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Radial mesh on `[0, radius]`, given by either `h` or `cells`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub radius: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cells: Option<usize>,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection { radius: 4.0, h: None, cells: None }
    }
}

pub const DEFAULT_H: f64 = 1.0 / 512.0;

impl GridSection {
    pub fn build(&self) -> Result<RadialGrid, CliError> {
        let grid = match (self.h, self.cells) {
            (Some(h), None) => RadialGrid::with_radius(self.radius, h),
            (None, Some(cells)) => RadialGrid::new(self.radius / cells as f64, cells),
            (None, None) => RadialGrid::with_radius(self.radius, DEFAULT_H),
            (Some(h), Some(cells)) => {
                let grid = RadialGrid::with_radius(self.radius, h)?;
                if grid.cells() != cells {
                    return Err(CliError::Config(format!(
                        "grid.h = {h} gives {} cells on radius {}, but grid.cells = {cells}",
                        grid.cells(),
                        self.radius
                    )));
                }
                Ok(grid)
            }
        };
        Ok(grid?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub cfl: f64,
    pub t0: f64,
    pub t_end: f64,
    pub snapshot_stride: usize,
    /// Defaults to `50 sup|u(t0)| + 10`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blowup_threshold: Option<f64>,
    /// `odd` (correct) or `even` (test hook).
    pub origin_closure: OriginClosure,
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection { cfl: 0.5, t0: 0.0, t_end: 1.0, snapshot_stride: 4, blowup_threshold: None, origin_closure: OriginClosure::Odd }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataFamily {
    #[default]
    Bump,
    Zero,
}

/// Initial data at `t0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataSection {
    pub family: DataFamily,
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
    pub velocity: VelocityProfile,
}

impl Default for DataSection {
    fn default() -> Self {
        let b = BumpSpec::default();
        DataSection { family: DataFamily::Bump, amplitude: b.amplitude, center: b.center, width: b.width, velocity: b.velocity }
    }
}

impl DataSection {
    pub fn build(&self, grid: &RadialGrid, t0: f64) -> Result<FieldState, CliError> {
        match self.family {
            DataFamily::Zero => Ok(FieldState::zeros(t0, grid.cells())),
            DataFamily::Bump => {
                let spec = BumpSpec { amplitude: self.amplitude, center: self.center, width: self.width, velocity: self.velocity };
                Ok(crate::solver::make_bump(&spec, grid, t0)?)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// Cone energies, fluxes and the energy–flux residual on every region.
    Energy,
    /// The Bogomolny bound on every retained slice.
    Bogomolny,
    /// The multiplier identity for `(1, 0, 0)` and `(t, r, (n-1)/2)`.
    Multiplier,
    /// Named terms of the integrated scaling identity.
    Energyint,
    /// Surface, volume and slice bounds on every region.
    Lemma,
    /// Tip energy, sup probe, flux decay and lemma ratios at dyadic times.
    Dyadic,
}

pub const ALL_CHECKS: [Check; 6] = [Check::Energy, Check::Bogomolny, Check::Multiplier, Check::Energyint, Check::Lemma, Check::Dyadic];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsSection {
    /// Lab time of the cone apex; defaults to `solver.t_end`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub apex: Option<f64>,
    pub checks: Vec<Check>,
    /// Cone regions `[S, T]` in reflected time.
    pub regions: Vec<[f64; 2]>,
    pub dyadic_levels: usize,
    /// Largest dyadic time; defaults to half the recorded window.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dyadic_t_max: Option<f64>,
    /// Bound on `|E(T) - E(S) - F(S,T)| / E(T)` for the run to pass.
    pub energy_tolerance: f64,
    /// Bound on the Bogomolny violation for the run to pass.
    pub bogomolny_tolerance: f64,
}

impl Default for DiagnosticsSection {
    fn default() -> Self {
        DiagnosticsSection {
            apex: None,
            checks: ALL_CHECKS.to_vec(),
            regions: vec![[0.25, 1.0]],
            dyadic_levels: 5,
            dyadic_t_max: None,
            energy_tolerance: 1e-4,
            bogomolny_tolerance: 1e-6,
        }
    }
}

impl DiagnosticsSection {
    pub fn enabled(&self, check: Check) -> bool {
        self.checks.contains(&check)
    }

    pub fn regions(&self) -> Result<Vec<ConeRegion>, CliError> {
        self.regions
            .iter()
            .map(|[s, t]| ConeRegion::new(*s, *t).map_err(|e| CliError::Config(format!("diagnostics.regions: {e}"))))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    /// `series.ndjson`.
    Ndjson,
    /// `slices.csv`.
    Csv,
    /// `report.json`.
    Json,
    /// `summary.txt`.
    Txt,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: String,
    pub formats: Vec<Format>,
    /// Write every `slice_every`-th retained slice to `slices.csv` (the last is always written).
    pub slice_every: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: "radialcone-out".into(),
            formats: vec![Format::Ndjson, Format::Csv, Format::Json, Format::Txt],
            slice_every: 16,
        }
    }
}

impl OutputSection {
    pub fn wants(&self, format: Format) -> bool {
        self.formats.contains(&format)
    }
}

/// Sampling for the hypothesis checker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CheckSection {
    pub range: [f64; 2],
    pub samples: usize,
}

impl Default for CheckSection {
    fn default() -> Self {
        CheckSection { range: [-10.0, 10.0], samples: 2001 }
    }
}

/// Manufactured-solution convergence study on the configured model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MmsSection {
    pub solution: SolutionSpec,
    /// Cell widths, each half the previous.
    pub levels: Vec<f64>,
    pub radius: f64,
    pub t0: f64,
    pub t_end: f64,
    pub cfl: f64,
    /// `even` is a deliberately wrong closure used to check that the study detects it.
    pub origin_closure: OriginClosure,
    /// Admissible band for the observed max-norm order.
    pub order_band: [f64; 2],
}

impl Default for MmsSection {
    fn default() -> Self {
        let s = StudyConfig::default();
        MmsSection {
            solution: SolutionSpec::default(),
            levels: vec![1.0 / 128.0, 1.0 / 256.0, 1.0 / 512.0],
            radius: s.radius,
            t0: s.t0,
            t_end: s.t_end,
            cfl: s.cfl,
            origin_closure: s.origin_closure,
            order_band: [1.8, 2.2],
        }
    }
}

impl MmsSection {
    pub fn study(&self) -> StudyConfig {
        StudyConfig { radius: self.radius, t0: self.t0, t_end: self.t_end, cfl: self.cfl, origin_closure: self.origin_closure }
    }

    pub fn case(&self, model: Model) -> ManufacturedCase {
        ManufacturedCase::new(self.solution.build(), model)
    }
}

/// Cartesian parameter grid; an empty list keeps the base value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub amplitude: Vec<f64>,
    pub alpha: Vec<f64>,
    pub n: Vec<u32>,
    pub profile: Vec<String>,
}

impl SweepSection {
    /// One configuration per point of the parameter grid, in lexicographic order
    /// `(n, alpha, profile, amplitude)`.
    pub fn expand(&self, base: &RunConfig) -> Vec<RunConfig> {
        let ns = if self.n.is_empty() { vec![base.model.n] } else { self.n.clone() };
        let alphas = if self.alpha.is_empty() { vec![base.model.alpha] } else { self.alpha.clone() };
        let profiles = if self.profile.is_empty() { vec![base.model.profile.clone()] } else { self.profile.clone() };
        let amps = if self.amplitude.is_empty() { vec![base.data.amplitude] } else { self.amplitude.clone() };
        let mut out = Vec::new();
        for &n in &ns {
            for &alpha in &alphas {
                for profile in &profiles {
                    for &amplitude in &amps {
                        let mut cfg = base.clone();
                        cfg.sweep = None;
                        cfg.model.n = n;
                        cfg.model.alpha = alpha;
                        cfg.model.profile = profile.clone();
                        cfg.data.amplitude = amplitude;
                        out.push(cfg);
                    }
                }
            }
        }
        out
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn apex(&self) -> f64 {
        self.diagnostics.apex.unwrap_or(self.solver.t_end)
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            cfl: self.solver.cfl,
            t0: self.solver.t0,
            t_end: self.solver.t_end,
            snapshot_stride: self.solver.snapshot_stride,
            blowup_threshold: self.solver.blowup_threshold,
            apex: Some(self.apex()),
            origin_closure: self.solver.origin_closure,
        }
    }

    /// The configuration with every default filled in and the output location removed, as
    /// recorded in `report.json`.
    pub fn resolved(&self, grid: &RadialGrid) -> RunConfig {
        let mut cfg = self.clone();
        cfg.grid.h = Some(grid.h());
        cfg.grid.cells = Some(grid.cells());
        cfg.diagnostics.apex = Some(self.apex());
        cfg.output = OutputSection { dir: String::new(), ..self.output.clone() };
        cfg.sweep = None;
        cfg
    }
}
