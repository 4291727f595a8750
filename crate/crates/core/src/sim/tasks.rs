//! Per-interval task generation.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ScenarioConfig;
use crate::auction::{Task, TaskId};
use crate::constellation::{great_circle_km, GeoPoint, TopologySnapshot};

/// Ground endpoints tasks travel between: (name, latitude, longitude).
pub const ENDPOINTS: [(&str, f64, f64); 24] = [
    ("new-york", 40.71, -74.01),
    ("los-angeles", 34.05, -118.24),
    ("chicago", 41.88, -87.63),
    ("mexico-city", 19.43, -99.13),
    ("bogota", 4.71, -74.07),
    ("sao-paulo", -23.55, -46.63),
    ("buenos-aires", -34.60, -58.38),
    ("london", 51.51, -0.13),
    ("madrid", 40.42, -3.70),
    ("berlin", 52.52, 13.40),
    ("moscow", 55.76, 37.62),
    ("cairo", 30.04, 31.24),
    ("lagos", 6.52, 3.38),
    ("nairobi", -1.29, 36.82),
    ("johannesburg", -26.20, 28.05),
    ("dubai", 25.20, 55.27),
    ("mumbai", 19.08, 72.88),
    ("singapore", 1.35, 103.82),
    ("beijing", 39.90, 116.41),
    ("tokyo", 35.68, 139.69),
    ("seoul", 37.57, 126.98),
    ("sydney", -33.87, 151.21),
    ("auckland", -36.85, 174.76),
    ("anchorage", 61.22, -149.90),
];

pub fn endpoint(index: usize) -> GeoPoint {
    let (_, lat, lon) = ENDPOINTS[index];
    GeoPoint {
        latitude: lat,
        longitude: lon,
        altitude: 0.0,
    }
}

/// A task plus the ground endpoints it was drawn from. The budget is left
/// infinite; the engine fills it in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratedTask {
    pub task: Task,
    pub source_endpoint: usize,
    pub destination_endpoint: usize,
}

impl GeneratedTask {
    pub fn destination(&self) -> GeoPoint {
        endpoint(self.destination_endpoint)
    }
}

/// Draws this interval's tasks. Each source splits
/// `source_rate * interval_length` Mb into several tasks; sources whose
/// endpoints are not covered by any satellite are skipped.
pub fn generate_tasks(
    snapshot: &TopologySnapshot,
    config: &ScenarioConfig,
    first_id: u32,
    rng: &mut ChaCha8Rng,
) -> Vec<GeneratedTask> {
    let t = &config.tasks;
    let total = t.source_rate * config.interval_length;
    let min_elevation = config.constellation_config().min_elevation;
    let mut out = Vec::new();
    if total <= 0.0 {
        return out;
    }
    let mut next_id = first_id;
    for _ in 0..t.sources_per_interval {
        let src = rng.gen_range(0..ENDPOINTS.len());
        let mut dst = rng.gen_range(0..ENDPOINTS.len());
        for _ in 0..32 {
            if dst != src && great_circle_km(&endpoint(src), &endpoint(dst)) >= t.min_endpoint_distance_km {
                break;
            }
            dst = rng.gen_range(0..ENDPOINTS.len());
        }
        let count = rng.gen_range(t.tasks_per_source[0]..=t.tasks_per_source[1]);
        let weights: Vec<f64> = (0..count).map(|_| rng.gen_range(0.2..1.0)).collect();
        let qos: Vec<(f64, f64)> = (0..count)
            .map(|_| {
                (
                    rng.gen_range(t.delay_ms.lo..=t.delay_ms.hi),
                    rng.gen_range(t.bandwidth_mbps.lo..=t.bandwidth_mbps.hi),
                )
            })
            .collect();
        if dst == src {
            continue;
        }
        let (Some(src_sat), Some(dst_sat)) = (
            snapshot.nearest_visible_satellite(&endpoint(src), min_elevation),
            snapshot.nearest_visible_satellite(&endpoint(dst), min_elevation),
        ) else {
            continue;
        };
        let wsum: f64 = weights.iter().sum();
        for (w, (delay, bandwidth)) in weights.iter().zip(qos) {
            out.push(GeneratedTask {
                task: Task {
                    id: TaskId(next_id),
                    source_sat: src_sat,
                    dest_sat: dst_sat,
                    delay_req: delay,
                    bandwidth_req: bandwidth,
                    data_amount: total * w / wsum,
                    budget: f64::INFINITY,
                },
                source_endpoint: src,
                destination_endpoint: dst,
            });
            next_id += 1;
        }
    }
    out
}
