mod common;

use approx::assert_relative_eq;
use common::quadrature_k;
use proptest::prelude::*;
use susco::constellation::{RoutePath, SatelliteId};
use susco::power::{
    life_consumption, offload_energy, path_energy, service_life_cost, step_battery, BatteryState,
    EnergyParams,
};

fn battery(level: f64, q: f64) -> BatteryState {
    BatteryState {
        level,
        remaining_lifespan: q,
        max_lifespan: 1000.0,
        chemistry: 1.0,
        capacity: 360_000.0,
    }
}

#[test]
fn known_drop_against_quadrature() {
    let k = life_consumption(0.8, 0.7, 1.0).unwrap();
    assert_relative_eq!(k, quadrature_k(0.8, 0.7, 1.0), epsilon = 1e-9);
    assert_relative_eq!(k, 0.0281607, epsilon = 1e-6);
    // full discharge consumes F(0) - F(1) = 1
    assert_relative_eq!(life_consumption(1.0, 0.0, 1.0).unwrap(), 1.0, epsilon = 1e-12);
}

#[test]
fn fresh_battery_has_unit_wear() {
    let b = battery(1.0, 1000.0);
    assert_eq!(b.wear_multiplier(), 1.0);
    assert_relative_eq!(service_life_cost(&[0.1, 0.2], &b), 0.3, epsilon = 1e-15);
    let worn = battery(1.0, 500.0);
    assert_relative_eq!(worn.wear_multiplier(), 1f64.exp(), epsilon = 1e-12);
    assert_eq!(service_life_cost(&[0.1], &battery(1.0, 0.0)), f64::INFINITY);
}

#[test]
fn eclipse_drains_and_sunlight_charges() {
    let params = EnergyParams::default();
    let b = battery(0.8, 900.0);
    let dark = step_battery(&b, &params, 100.0, true, 60.0);
    assert_relative_eq!(dark.level, 0.8 - 100.0 * 60.0 / 360_000.0, epsilon = 1e-12);
    let k = life_consumption(0.8, dark.level, 1.0).unwrap();
    assert_relative_eq!(dark.remaining_lifespan, 900.0 - k, epsilon = 1e-12);

    let lit = step_battery(&b, &params, 100.0, false, 60.0);
    assert!(lit.level > b.level);
    assert_eq!(lit.remaining_lifespan, 900.0);

    let full = step_battery(&battery(1.0, 900.0), &params, 0.0, false, 60.0);
    assert_eq!(full.level, 1.0);
    assert_eq!(step_battery(&b, &params, 100.0, true, 0.0), b);
}

#[test]
fn split_energy_counts_each_path() {
    let short = RoutePath {
        sats: vec![SatelliteId(0), SatelliteId(1)],
        hop_latencies: vec![1.0],
    };
    let long = RoutePath {
        sats: vec![SatelliteId(0), SatelliteId(1), SatelliteId(2)],
        hop_latencies: vec![1.0, 1.0],
    };
    assert_relative_eq!(path_energy(100.0, &long, 0.08), 24.0, epsilon = 1e-12);
    let e = offload_energy(100.0, &[40.0, 60.0], &[&short, &long], 0.08).unwrap();
    assert_relative_eq!(e, 40.0 * 0.08 * 2.0 + 60.0 * 0.08 * 3.0, epsilon = 1e-12);
    assert!(offload_energy(100.0, &[40.0, 50.0], &[&short, &long], 0.08).is_err());
}

proptest! {
    #[test]
    fn closed_form_matches_quadrature(x in 0.0f64..=1.0, y in 0.0f64..=1.0, a in 0.1f64..3.0) {
        let (before, after) = (x.max(y), x.min(y));
        let k = life_consumption(before, after, a).unwrap();
        prop_assert!((k - quadrature_k(before, after, a)).abs() < 1e-9);
    }

    #[test]
    fn consumption_is_additive(a in 0.0f64..=1.0, b in 0.0f64..=1.0, c in 0.0f64..=1.0) {
        let mut v = [a, b, c];
        v.sort_by(|p, q| q.total_cmp(p));
        let whole = life_consumption(v[0], v[2], 1.0).unwrap();
        let parts = life_consumption(v[0], v[1], 1.0).unwrap() + life_consumption(v[1], v[2], 1.0).unwrap();
        prop_assert!((whole - parts).abs() < 1e-12);
    }

    #[test]
    fn deeper_drop_costs_more(before in 0.0f64..=1.0, d1 in 0.0f64..1.0, d2 in 0.0f64..1.0) {
        let (lo, hi) = (d1.min(d2), d1.max(d2));
        let shallow = life_consumption(before, before * (1.0 - lo), 1.0).unwrap();
        let deep = life_consumption(before, before * (1.0 - hi), 1.0).unwrap();
        prop_assert!(deep >= shallow);
        prop_assert!(shallow >= 0.0);
    }

    #[test]
    fn life_cost_rises_as_lifespan_falls(k in 0.0f64..2.0, q1 in 1.0f64..1000.0, q2 in 1.0f64..1000.0) {
        let (lo, hi) = (q1.min(q2), q1.max(q2));
        let worn = service_life_cost(&[k], &battery(0.5, lo));
        let fresh = service_life_cost(&[k], &battery(0.5, hi));
        prop_assert!(worn >= fresh);
    }

    #[test]
    fn stepping_keeps_state_in_range(level in 0.0f64..=1.0, q in 0.0f64..=1000.0, load in 0.0f64..5000.0, dark: bool) {
        let b = battery(level, q);
        let next = step_battery(&b, &EnergyParams::default(), load, dark, 60.0);
        prop_assert!((0.0..=1.0).contains(&next.level));
        prop_assert!(next.remaining_lifespan <= q && next.remaining_lifespan >= 0.0);
    }
}
