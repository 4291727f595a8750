//! Battery level and lifespan dynamics.
//!
//! Life consumption follows the depth-of-discharge integral
//! `∫ 10^(-Aψ) (1 + A ln10 (1 - ψ)) dψ`, whose antiderivative is
//! `-(1 - ψ) 10^(-Aψ)`. Consumption is reported as a non-negative magnitude
//! and is zero whenever the level does not drop.

use serde::{Deserialize, Serialize};

use crate::constellation::RoutePath;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatteryState {
    /// charge fraction ψ in [0, 1]
    pub level: f64,
    /// remaining lifespan Q
    pub remaining_lifespan: f64,
    /// Q^max
    pub max_lifespan: f64,
    /// battery chemistry constant A
    pub chemistry: f64,
    /// J
    pub capacity: f64,
}

impl BatteryState {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.level) {
            return Err(Error::BatteryDomain(self.level));
        }
        if !(self.max_lifespan > 0.0)
            || !(0.0..=self.max_lifespan).contains(&self.remaining_lifespan)
            || !(self.chemistry > 0.0)
            || !(self.capacity > 0.0)
        {
            return Err(Error::InvalidConfig(format!("invalid battery state {self:?}")));
        }
        Ok(())
    }

    /// Multiplier `e^((Q^max - Q) / Q)`; infinite for an exhausted battery.
    pub fn wear_multiplier(&self) -> f64 {
        if self.remaining_lifespan <= 0.0 {
            f64::INFINITY
        } else {
            ((self.max_lifespan - self.remaining_lifespan) / self.remaining_lifespan).exp()
        }
    }

    /// Level after drawing `joules` from the battery, floored at zero.
    pub fn level_after(&self, joules: f64) -> f64 {
        (self.level - joules / self.capacity).clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnergyParams {
    /// J per Mb routed through a satellite
    pub epsilon: f64,
    /// W
    pub solar_charge_rate: f64,
    /// W
    pub idle_draw: f64,
}

impl Default for EnergyParams {
    fn default() -> Self {
        Self {
            epsilon: 0.08,
            solar_charge_rate: 120.0,
            idle_draw: 60.0,
        }
    }
}

fn antiderivative(level: f64, chemistry: f64) -> f64 {
    (1.0 - level) * 10f64.powf(-chemistry * level)
}

/// Battery life consumed by a drop from `before` to `after`.
pub fn life_consumption(before: f64, after: f64, chemistry: f64) -> Result<f64> {
    for v in [before, after] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::BatteryDomain(v));
        }
    }
    if before <= after {
        return Ok(0.0);
    }
    Ok((antiderivative(after, chemistry) - antiderivative(before, chemistry)).max(0.0))
}

/// `Σ K · e^((Q^max - Q)/Q)`, or infinity when the battery is exhausted.
pub fn service_life_cost(consumptions: &[f64], battery: &BatteryState) -> f64 {
    if battery.remaining_lifespan <= 0.0 {
        return f64::INFINITY;
    }
    consumptions.iter().sum::<f64>() * battery.wear_multiplier()
}

/// Energy spent routing `traffic` Mb through every satellite of `path`.
pub fn path_energy(traffic_mb: f64, path: &RoutePath, epsilon: f64) -> f64 {
    traffic_mb * epsilon * path.len() as f64
}

/// Energy of a split offload: each split only traverses its own offload path.
/// `splits` and `paths` are parallel slices.
pub fn offload_energy(
    task_traffic: f64,
    splits: &[f64],
    paths: &[&RoutePath],
    epsilon: f64,
) -> Result<f64> {
    let total: f64 = splits.iter().sum();
    if (total - task_traffic).abs() > 1e-9 * task_traffic.abs().max(1.0) {
        return Err(Error::SplitMismatch {
            expected: task_traffic,
            actual: total,
        });
    }
    Ok(splits
        .iter()
        .zip(paths)
        .map(|(s, p)| path_energy(*s, p, epsilon))
        .sum())
}

/// Advances a battery by one interval. `net_load_watts` is everything the
/// satellite draws; in sunlight the panels supply `solar_charge_rate` on top.
pub fn step_battery(
    state: &BatteryState,
    params: &EnergyParams,
    net_load_watts: f64,
    in_eclipse: bool,
    interval_length: f64,
) -> BatteryState {
    if interval_length <= 0.0 {
        return *state;
    }
    let supply = if in_eclipse {
        0.0
    } else {
        params.solar_charge_rate
    };
    let delta = (supply - net_load_watts) * interval_length / state.capacity;
    let level = (state.level + delta).clamp(0.0, 1.0);
    let consumed = life_consumption(state.level, level, state.chemistry).unwrap_or(0.0);
    BatteryState {
        level,
        remaining_lifespan: (state.remaining_lifespan - consumed).max(0.0),
        ..*state
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::SatelliteId;
    use approx::assert_relative_eq;

    fn battery() -> BatteryState {
        BatteryState {
            level: 1.0,
            remaining_lifespan: 1000.0,
            max_lifespan: 1000.0,
            chemistry: 1.0,
            capacity: 100_000.0,
        }
    }

    fn path(n: u32) -> RoutePath {
        RoutePath {
            sats: (0..n).map(SatelliteId).collect(),
            hop_latencies: vec![1.0; n.saturating_sub(1) as usize],
        }
    }

    #[test]
    fn no_drop_no_consumption() {
        assert_eq!(life_consumption(0.5, 0.5, 1.0).unwrap(), 0.0);
        assert_eq!(life_consumption(0.5, 0.6, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn closed_form_value() {
        let k = life_consumption(0.8, 0.7, 1.0).unwrap();
        let expected = 0.3 * 10f64.powf(-0.7) - 0.2 * 10f64.powf(-0.8);
        assert_relative_eq!(k, expected, epsilon = 1e-15);
        assert_relative_eq!(k, 0.0281607, epsilon = 1e-6);
    }

    #[test]
    fn domain_errors() {
        assert!(life_consumption(1.1, 0.5, 1.0).is_err());
        assert!(life_consumption(0.5, -0.1, 1.0).is_err());
    }

    #[test]
    fn service_life_multipliers() {
        let mut b = battery();
        assert_relative_eq!(service_life_cost(&[0.1, 0.2], &b), 0.3, epsilon = 1e-15);
        b.remaining_lifespan = 500.0;
        assert_relative_eq!(service_life_cost(&[1.0], &b), std::f64::consts::E);
        b.remaining_lifespan = 0.0;
        assert_eq!(service_life_cost(&[0.0], &b), f64::INFINITY);
    }

    #[test]
    fn routing_energy() {
        assert_relative_eq!(path_energy(300.0, &path(3), 0.08), 72.0, epsilon = 1e-12);
        assert_eq!(path_energy(0.0, &path(3), 0.08), 0.0);
        assert_relative_eq!(path_energy(300.0, &path(1), 0.08), 24.0, epsilon = 1e-12);
    }

    #[test]
    fn split_energy() {
        let p = path(2);
        let single = offload_energy(300.0, &[300.0], &[&p], 0.08).unwrap();
        assert_relative_eq!(single, path_energy(300.0, &p, 0.08));
        let double = offload_energy(300.0, &[150.0, 150.0], &[&p, &p], 0.08).unwrap();
        assert_relative_eq!(single, double, epsilon = 1e-12);
        assert!(matches!(
            offload_energy(300.0, &[100.0], &[&p], 0.08),
            Err(Error::SplitMismatch { .. })
        ));
        let empty = RoutePath {
            sats: vec![],
            hop_latencies: vec![],
        };
        assert_eq!(offload_energy(10.0, &[10.0], &[&empty], 0.08).unwrap(), 0.0);
    }

    #[test]
    fn full_battery_in_sun_stays_full() {
        let p = EnergyParams::default();
        let b = step_battery(&battery(), &p, 0.0, false, 60.0);
        assert_eq!(b.level, 1.0);
        assert_eq!(b.remaining_lifespan, 1000.0);
    }

    #[test]
    fn eclipse_drain_costs_life() {
        let p = EnergyParams::default();
        let start = BatteryState {
            level: 0.9,
            ..battery()
        };
        // 10% of 100 kJ over 100 s
        let b = step_battery(&start, &p, 100.0, true, 100.0);
        assert_relative_eq!(b.level, 0.8, epsilon = 1e-12);
        let k = life_consumption(0.9, 0.8, 1.0).unwrap();
        assert_relative_eq!(b.remaining_lifespan, 1000.0 - k, epsilon = 1e-12);
    }

    #[test]
    fn zero_interval_is_identity() {
        let p = EnergyParams::default();
        let start = BatteryState {
            level: 0.3,
            ..battery()
        };
        assert_eq!(step_battery(&start, &p, 500.0, true, 0.0), start);
    }
}
