#![allow(dead_code)]

use radialcone::nonlinearity::{Model, Profile};
use radialcone::solver::{evolve, make_bump, BumpSpec, RadialGrid, RunHistory, SolverConfig};

pub const RADIUS: f64 = 4.0;
pub const APEX: f64 = 1.0;
pub const STRIDE: usize = 4;

/// Wide bump that fills the backward cone from `t = 0` to the apex.
pub fn wide_bump() -> BumpSpec {
    BumpSpec { amplitude: 1e-3, center: 1.2, width: 0.8, ..Default::default() }
}

pub fn model(n: u32, alpha: f64) -> Model {
    let profile = if n == 3 { Profile::AdkinsNappi } else { Profile::Linear };
    Model::new(n, alpha, profile).unwrap()
}

/// Evolves `spec` on `[0, RADIUS]` from `t = 0` to the apex at `t = 1`.
pub fn cone_run(model: &Model, spec: &BumpSpec, h: f64) -> RunHistory {
    let grid = RadialGrid::with_radius(RADIUS, h).unwrap();
    let cfg = SolverConfig { t0: 0.0, t_end: APEX, apex: Some(APEX), snapshot_stride: STRIDE, ..Default::default() };
    let data = make_bump(spec, &grid, 0.0).unwrap();
    evolve(&cfg, data, &grid, model).unwrap()
}

pub fn path_to_config(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}
