use serde::{Deserialize, Serialize};

use super::{great_circle_km, DishSite, GeoPoint, Vec3, SPEED_OF_LIGHT_KM_S};
use crate::{Error, Result};

/// Link and terrestrial delay parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LatencyParams {
    /// Mb
    pub packet_size_mb: f64,
    /// Mb/s
    pub link_rate_mbps: f64,
    /// ms; queuing delay at 50% load
    pub queue_base_ms: f64,
    /// km/s
    pub terrestrial_speed_km_s: f64,
    /// ms
    pub terrestrial_overhead_ms: f64,
}

impl Default for LatencyParams {
    fn default() -> Self {
        Self {
            packet_size_mb: 0.012,
            link_rate_mbps: 10_000.0,
            queue_base_ms: 5.0,
            terrestrial_speed_km_s: SPEED_OF_LIGHT_KM_S * 2.0 / 3.0,
            terrestrial_overhead_ms: 10.0,
        }
    }
}

impl LatencyParams {
    pub fn transmission_ms(&self) -> f64 {
        if self.packet_size_mb == 0.0 {
            0.0
        } else {
            1000.0 * self.packet_size_mb / self.link_rate_mbps
        }
    }
}

/// Propagation + transmission + load-dependent queuing delay (ms).
pub fn link_latency(a: Vec3, b: Vec3, load_fraction: f64, params: &LatencyParams) -> Result<f64> {
    if !(0.0..1.0).contains(&load_fraction) {
        return Err(Error::SaturatedLink(load_fraction));
    }
    let propagation = 1000.0 * a.distance(b) / SPEED_OF_LIGHT_KM_S;
    let queuing = params.queue_base_ms * load_fraction / (1.0 - load_fraction);
    Ok(propagation + params.transmission_ms() + queuing)
}

/// Estimated latency from a dish to a ground destination over fibre (ms).
pub fn terrestrial_latency(dish: &DishSite, destination: &GeoPoint, params: &LatencyParams) -> f64 {
    let km = great_circle_km(&dish.location, destination);
    1000.0 * km / params.terrestrial_speed_km_s + params.terrestrial_overhead_ms
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::{DishId, DishKind};
    use approx::assert_relative_eq;

    fn bare() -> LatencyParams {
        LatencyParams {
            packet_size_mb: 0.0,
            queue_base_ms: 2.0,
            terrestrial_overhead_ms: 7.0,
            ..LatencyParams::default()
        }
    }

    #[test]
    fn thousand_km_vacuum() {
        let l = link_latency(Vec3::default(), Vec3::new(1000.0, 0.0, 0.0), 0.0, &bare()).unwrap();
        assert_relative_eq!(l, 3.33564095, epsilon = 1e-8);
    }

    #[test]
    fn zero_distance_is_transmission_only() {
        let p = LatencyParams::default();
        let l = link_latency(Vec3::default(), Vec3::default(), 0.0, &p).unwrap();
        assert_relative_eq!(l, 1000.0 * 0.012 / 10_000.0);
    }

    #[test]
    fn half_load_adds_base() {
        let l = link_latency(Vec3::default(), Vec3::default(), 0.5, &bare()).unwrap();
        assert_relative_eq!(l, 2.0);
    }

    #[test]
    fn saturated_link_errors() {
        assert!(matches!(
            link_latency(Vec3::default(), Vec3::default(), 1.0, &bare()),
            Err(Error::SaturatedLink(_))
        ));
    }

    #[test]
    fn terrestrial_cases() {
        let dish = DishSite {
            id: DishId(1),
            location: GeoPoint::new(0.0, 0.0, 0.0).unwrap(),
            bandwidth: 100.0,
            true_failure_rate: 0.0,
            kind: DishKind::GroundStation,
        };
        let p = bare();
        assert_relative_eq!(terrestrial_latency(&dish, &dish.location, &p), 7.0);
        let anti = GeoPoint::new(0.0, -180.0, 0.0).unwrap();
        let far = terrestrial_latency(&dish, &anti, &p) - 7.0;
        assert_relative_eq!(far, 100.14, epsilon = 0.01);
        let mid = GeoPoint::new(0.0, 90.0, 0.0).unwrap();
        let half = terrestrial_latency(&dish, &mid, &p) - 7.0;
        assert_relative_eq!(far, 2.0 * half, epsilon = 1e-9);
    }
}
