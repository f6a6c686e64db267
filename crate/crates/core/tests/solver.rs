mod common;

use proptest::prelude::*;
use radialcone::nonlinearity::{Model, Profile};
use radialcone::solver::{
    evolve, make_bump, BumpSpec, FieldState, OriginClosure, RadialGrid, SolverConfig, SolverError, SpatialOperator,
};

fn an() -> Model {
    Model::new(3, 4.0, Profile::AdkinsNappi).unwrap()
}

#[test]
fn energy_drift_over_100_steps_at_h_512() {
    let h = 1.0 / 512.0;
    let grid = RadialGrid::with_radius(4.0, h).unwrap();
    let data = make_bump(&BumpSpec::default(), &grid, 0.0).unwrap();
    let cfg = SolverConfig { t_end: 100.0 * 0.5 * h, ..Default::default() };
    let hist = evolve(&cfg, data, &grid, &an()).unwrap();
    assert_eq!(hist.steps, 100);
    let e0 = hist.records[0].energy;
    let drift = hist.records.iter().map(|r| (r.energy - e0).abs()).fold(0.0, f64::max);
    assert!(drift <= 1e-6 * e0, "drift {drift:e} of {e0:e}");
}

#[test]
fn finite_speed_of_propagation() {
    let h = 1.0 / 1024.0;
    let tau = 0.5;
    let spec = BumpSpec::default();
    let grid = RadialGrid::with_radius(4.0, h).unwrap();
    let data = make_bump(&spec, &grid, 0.0).unwrap();
    let cfg = SolverConfig { t_end: tau, snapshot_stride: usize::MAX, ..Default::default() };
    let hist = evolve(&cfg, data, &grid, &an()).unwrap();
    let (lo, hi) = spec.support();
    let (lo, hi) = (lo - tau - 4.0 * h, hi + tau + 4.0 * h);
    let last = hist.final_state();
    let outside = (0..grid.cells())
        .filter(|&j| grid.r(j) < lo || grid.r(j) > hi)
        .map(|j| last.u[j].abs())
        .fold(0.0, f64::max);
    assert!(outside <= 1e-8, "{outside:e}");
}

fn reversal_error(h: f64) -> f64 {
    let tau = 0.25;
    let spec = BumpSpec { velocity: radialcone::solver::VelocityProfile::Outgoing, ..BumpSpec::default() };
    let grid = RadialGrid::with_radius(4.0, h).unwrap();
    let data = make_bump(&spec, &grid, 0.0).unwrap();
    let cfg = SolverConfig { t_end: tau, snapshot_stride: usize::MAX, ..Default::default() };
    let forward = evolve(&cfg, data.clone(), &grid, &an()).unwrap();
    let mid = forward.final_state();
    let back = FieldState { t: 0.0, u: mid.u.clone(), v: mid.v.iter().map(|x| -x).collect() };
    let end = evolve(&cfg, back, &grid, &an()).unwrap();
    let fin = end.final_state();
    (0..grid.cells())
        .map(|j| (fin.u[j] - data.u[j]).abs().max((fin.v[j] + data.v[j]).abs()))
        .fold(0.0, f64::max)
}

#[test]
fn time_reversal_returns_to_the_data() {
    let coarse = reversal_error(1.0 / 128.0);
    let fine = reversal_error(1.0 / 256.0);
    let amplitude = BumpSpec::default().amplitude;
    assert!(fine <= 0.05 * amplitude, "{coarse:e} {fine:e}");
    assert!(coarse / fine >= 3.0, "{coarse:e} {fine:e}");
}

#[test]
fn small_bump_from_t1_to_t2_has_bounded_energy() {
    let grid = RadialGrid::with_radius(4.0, 1.0 / 256.0).unwrap();
    let data = make_bump(&BumpSpec::default(), &grid, 1.0).unwrap();
    let cfg = SolverConfig { t0: 1.0, t_end: 2.0, snapshot_stride: 16, ..Default::default() };
    let hist = evolve(&cfg, data, &grid, &an()).unwrap();
    assert_eq!(hist.final_state().t, 2.0);
    let e0 = hist.records[0].energy;
    for w in hist.records.windows(2) {
        assert!(w[1].energy <= w[0].energy * (1.0 + 1e-12), "energy rose at step {}", w[1].step);
    }
    let loss = 1.0 - hist.records.last().unwrap().energy / e0;
    assert!((0.0..=1e-4).contains(&loss), "{loss:e}");
}

#[test]
fn runs_are_bit_identical() {
    let m = common::model(3, 4.0);
    let a = common::cone_run(&m, &common::wide_bump(), 1.0 / 128.0);
    let b = common::cone_run(&m, &common::wide_bump(), 1.0 / 128.0);
    assert_eq!(a, b);
}

#[test]
fn blow_up_carries_last_good_state() {
    let grid = RadialGrid::with_radius(4.0, 1.0 / 64.0).unwrap();
    let data = make_bump(&BumpSpec::default(), &grid, 0.0).unwrap();
    let cfg = SolverConfig { blowup_threshold: Some(0.0), ..Default::default() };
    match evolve(&cfg, data.clone(), &grid, &an()) {
        Err(SolverError::BlowUpSuspected { step, last_good, .. }) => {
            assert_eq!(step, 1);
            assert_eq!(*last_good, data);
        }
        other => panic!("{other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn operator_is_odd(seed in proptest::collection::vec(-1.0f64..1.0, 32), n in 2u32..5, alpha in 2.0f64..5.0) {
        let grid = RadialGrid::new(0.05, 32).unwrap();
        for profile in [Profile::AdkinsNappi, Profile::Linear, Profile::Cubic] {
            let op = SpatialOperator::new(grid, Model::new(n, alpha, profile).unwrap(), OriginClosure::Odd);
            let neg: Vec<f64> = seed.iter().map(|x| -x).collect();
            let a = op.evaluate(&seed, 0.0).unwrap();
            let b = op.evaluate(&neg, 0.0).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert_eq!(*x, -*y);
            }
        }
    }

    #[test]
    fn bumps_vanish_at_origin_and_outside_support(
        a in -1.0f64..1.0, c in 0.3f64..3.0, w in 0.05f64..0.9,
    ) {
        prop_assume!(c - w > 0.05 && c + w < 4.0);
        let grid = RadialGrid::with_radius(4.0, 1.0 / 128.0).unwrap();
        let spec = BumpSpec { amplitude: a, center: c, width: w, ..Default::default() };
        let s = make_bump(&spec, &grid, 0.0).unwrap();
        prop_assert!(s.satisfies_origin_condition());
        for j in 0..grid.cells() {
            let r = grid.r(j);
            if r <= c - w || r >= c + w {
                prop_assert_eq!(s.u[j], 0.0);
            }
        }
    }

    #[test]
    fn zero_data_stays_zero(n in 2u32..5, alpha in 2.0f64..5.0, cfl in 0.05f64..0.9) {
        let grid = RadialGrid::with_radius(2.0, 1.0 / 32.0).unwrap();
        let m = Model::new(n, alpha, Profile::AdkinsNappi).unwrap();
        let cfg = SolverConfig { cfl, t_end: 0.25, ..Default::default() };
        let h = evolve(&cfg, FieldState::zeros(0.0, grid.cells()), &grid, &m).unwrap();
        prop_assert!(h.slices.iter().all(|s| s.u.iter().chain(&s.v).all(|x| *x == 0.0)));
    }
}
