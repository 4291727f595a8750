use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{
    elevation_deg, link_latency, sun_direction, ConstellationConfig, DishId, GeoPoint,
    LatencyParams, OrbitalState, SatelliteId, Vec3, SPEED_OF_LIGHT_KM_S,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DishKind {
    GroundStation,
    BaseStation,
}

impl DishKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DishKind::GroundStation => "ground_station",
            DishKind::BaseStation => "base_station",
        }
    }
}

impl std::str::FromStr for DishKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "ground_station" => Ok(DishKind::GroundStation),
            "base_station" => Ok(DishKind::BaseStation),
            other => Err(format!("unknown dish kind `{other}`")),
        }
    }
}

/// A commercial dish offering receive capacity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DishSite {
    pub id: DishId,
    pub location: GeoPoint,
    /// Mb/s
    pub bandwidth: f64,
    pub true_failure_rate: f64,
    pub kind: DishKind,
}

impl DishSite {
    pub fn validate(&self) -> Result<()> {
        self.location.validate()?;
        if !(self.bandwidth > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "dish {} bandwidth must be positive",
                self.id
            )));
        }
        if !(0.0..=1.0).contains(&self.true_failure_rate) {
            return Err(Error::InvalidConfig(format!(
                "dish {} failure rate {} outside [0, 1]",
                self.id, self.true_failure_rate
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IslEdge {
    pub a: SatelliteId,
    pub b: SatelliteId,
    pub latency_ms: f64,
}

/// Frozen network state for one interval.
#[derive(Debug, Clone)]
pub struct TopologySnapshot {
    pub interval: u32,
    /// Midpoint time (s) at which positions were sampled.
    pub time: f64,
    /// Inertial positions at the midpoint, indexed by satellite id.
    pub sat_positions: Vec<Vec3>,
    pub dish_positions: BTreeMap<DishId, Vec3>,
    /// Each undirected edge once, with `a < b`.
    pub isl_edges: Vec<IslEdge>,
    adjacency: Vec<Vec<(SatelliteId, f64)>>,
    /// Dishes that keep a GSL with each satellite through the whole interval.
    pub visibility: Vec<BTreeSet<DishId>>,
    pub sun_direction: Vec3,
}

impl TopologySnapshot {
    pub fn len(&self) -> usize {
        self.sat_positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sat_positions.is_empty()
    }

    pub fn contains(&self, id: SatelliteId) -> bool {
        (id.0 as usize) < self.sat_positions.len()
    }

    pub fn position(&self, id: SatelliteId) -> Vec3 {
        self.sat_positions[id.0 as usize]
    }

    pub fn neighbors(&self, id: SatelliteId) -> &[(SatelliteId, f64)] {
        &self.adjacency[id.0 as usize]
    }

    pub fn edge_latency(&self, a: SatelliteId, b: SatelliteId) -> Option<f64> {
        self.neighbors(a)
            .iter()
            .find(|(n, _)| *n == b)
            .map(|&(_, l)| l)
    }

    pub fn visible(&self, id: SatelliteId) -> &BTreeSet<DishId> {
        &self.visibility[id.0 as usize]
    }

    /// Vacuum propagation delay of the satellite-to-dish link (ms).
    pub fn gsl_latency(&self, sat: SatelliteId, dish: DishId) -> Option<f64> {
        let d = self.dish_positions.get(&dish)?;
        Some(1000.0 * self.position(sat).distance(*d) / SPEED_OF_LIGHT_KM_S)
    }

    /// Satellite whose position is closest to a ground point among those that
    /// see it above `min_elevation`.
    pub fn nearest_visible_satellite(
        &self,
        point: &GeoPoint,
        min_elevation: f64,
    ) -> Option<SatelliteId> {
        let site = point.to_inertial(self.time);
        self.sat_positions
            .iter()
            .enumerate()
            .filter(|(_, p)| elevation_deg(site, **p) >= min_elevation)
            .min_by(|a, b| site.distance(*a.1).total_cmp(&site.distance(*b.1)))
            .map(|(i, _)| SatelliteId(i as u32))
    }

    pub fn build_from_parts(
        interval: u32,
        time: f64,
        sat_positions: Vec<Vec3>,
        dish_positions: BTreeMap<DishId, Vec3>,
        isl_edges: Vec<IslEdge>,
        visibility: Vec<BTreeSet<DishId>>,
        sun_direction: Vec3,
    ) -> Result<Self> {
        let n = sat_positions.len();
        if visibility.len() != n {
            return Err(Error::InvalidConfig(format!(
                "visibility has {} entries for {} satellites",
                visibility.len(),
                n
            )));
        }
        let mut adjacency = vec![Vec::new(); n];
        for e in &isl_edges {
            let (a, b) = (e.a.0 as usize, e.b.0 as usize);
            if a >= n || b >= n || a == b {
                return Err(Error::InvalidConfig(format!(
                    "edge {}-{} references unknown satellite",
                    e.a, e.b
                )));
            }
            adjacency[a].push((e.b, e.latency_ms));
            adjacency[b].push((e.a, e.latency_ms));
        }
        for adj in &mut adjacency {
            adj.sort_by_key(|(id, _)| *id);
        }
        Ok(Self {
            interval,
            time,
            sat_positions,
            dish_positions,
            isl_edges,
            adjacency,
            visibility,
            sun_direction,
        })
    }
}

/// Dishes that see `sat` at or above `min_elevation`.
pub fn visible_dishes(sat: Vec3, dishes: &[(DishId, Vec3)], min_elevation: f64) -> BTreeSet<DishId> {
    dishes
        .iter()
        .filter(|(_, site)| elevation_deg(*site, sat) >= min_elevation)
        .map(|(id, _)| *id)
        .collect()
}

/// +Grid neighbours: previous/next slot in the plane and the same slot in
/// the adjacent planes, seam links included.
pub fn isl_neighbors(config: &ConstellationConfig, id: SatelliteId) -> Vec<SatelliteId> {
    let (p, s) = config.slot(id);
    let (np, ns) = (config.num_orbits, config.sats_per_orbit);
    let mut out = vec![
        config.id_of(p, (s + 1) % ns),
        config.id_of(p, (s + ns - 1) % ns),
        config.id_of((p + 1) % np, s),
        config.id_of((p + np - 1) % np, s),
    ];
    out.sort();
    out.dedup();
    out.retain(|n| *n != id);
    out
}

/// Settings shared by every snapshot of a run.
#[derive(Debug, Clone)]
pub struct SnapshotSettings<'a> {
    pub config: &'a ConstellationConfig,
    pub interval_length: f64,
    pub epoch: f64,
    pub sun_longitude_deg: f64,
    pub latency: &'a LatencyParams,
}

/// Builds the topology for interval `interval`. `load` gives the load
/// fraction of the ISL between two satellites (called with the smaller id first).
pub fn build_snapshot(
    settings: &SnapshotSettings<'_>,
    states: &[OrbitalState],
    dishes: &[DishSite],
    interval: u32,
    mut load: impl FnMut(SatelliteId, SatelliteId) -> f64,
) -> Result<TopologySnapshot> {
    let cfg = settings.config;
    let t0 = settings.epoch + interval as f64 * settings.interval_length;
    let tm = t0 + settings.interval_length / 2.0;
    let t1 = t0 + settings.interval_length;

    let samples: Vec<(Vec<Vec3>, Vec<(DishId, Vec3)>)> = [t0, tm, t1]
        .iter()
        .map(|&t| {
            let sats = states.iter().map(|s| s.position_at(t)).collect();
            let ds = dishes
                .iter()
                .map(|d| (d.id, d.location.to_inertial(t)))
                .collect();
            (sats, ds)
        })
        .collect();

    let n = states.len();
    let mut visibility = Vec::with_capacity(n);
    for i in 0..n {
        let mut vis = visible_dishes(samples[1].0[i], &samples[1].1, cfg.min_elevation);
        for (sats, ds) in [&samples[0], &samples[2]].map(|s| (&s.0, &s.1)) {
            if vis.is_empty() {
                break;
            }
            let held = visible_dishes(sats[i], ds, cfg.min_elevation);
            vis.retain(|d| held.contains(d));
        }
        visibility.push(vis);
    }

    let positions = samples[1].0.clone();
    let mut edges = Vec::new();
    for s in states {
        for nb in isl_neighbors(cfg, s.id) {
            if nb > s.id {
                let lat = link_latency(
                    positions[s.id.0 as usize],
                    positions[nb.0 as usize],
                    load(s.id, nb),
                    settings.latency,
                )?;
                edges.push(IslEdge {
                    a: s.id,
                    b: nb,
                    latency_ms: lat,
                });
            }
        }
    }

    let dish_positions = samples[1].1.iter().copied().collect();
    TopologySnapshot::build_from_parts(
        interval,
        tm,
        positions,
        dish_positions,
        edges,
        visibility,
        sun_direction(tm, settings.sun_longitude_deg),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::{generate_walker, Preset};

    #[test]
    fn single_plane_has_only_intra_plane_links() {
        let cfg = ConstellationConfig {
            num_orbits: 1,
            sats_per_orbit: 8,
            altitude: 550.0,
            inclination: 53.0,
            phasing_offset: 0.0,
            min_elevation: 25.0,
        };
        for i in 0..8 {
            let n = isl_neighbors(&cfg, SatelliteId(i));
            assert_eq!(n.len(), 2);
            for nb in n {
                assert_eq!(cfg.slot(nb).0, 0);
            }
        }
    }

    #[test]
    fn starlink_grid_degree_four() {
        let cfg = Preset::Starlink.config();
        for i in 0..cfg.len() as u32 {
            assert_eq!(isl_neighbors(&cfg, SatelliteId(i)).len(), 4);
        }
    }

    #[test]
    fn tiny_grids_dedupe() {
        let cfg = ConstellationConfig {
            num_orbits: 2,
            sats_per_orbit: 2,
            altitude: 550.0,
            inclination: 53.0,
            phasing_offset: 0.0,
            min_elevation: 25.0,
        };
        assert_eq!(isl_neighbors(&cfg, SatelliteId(0)).len(), 2);
        let solo = ConstellationConfig {
            num_orbits: 1,
            sats_per_orbit: 1,
            ..cfg
        };
        assert!(isl_neighbors(&solo, SatelliteId(0)).is_empty());
    }

    #[test]
    fn snapshot_edges_symmetric() {
        let cfg = Preset::Telesat.config();
        let states = generate_walker(&cfg, 0.0);
        let lat = LatencyParams::default();
        let settings = SnapshotSettings {
            config: &cfg,
            interval_length: 60.0,
            epoch: 0.0,
            sun_longitude_deg: 0.0,
            latency: &lat,
        };
        let snap = build_snapshot(&settings, &states, &[], 3, |_, _| 0.2).unwrap();
        assert_eq!(snap.isl_edges.len(), 72 * 2);
        for e in &snap.isl_edges {
            assert_eq!(snap.edge_latency(e.a, e.b), snap.edge_latency(e.b, e.a));
            assert!(snap.neighbors(e.a).len() <= 4);
        }
    }
}
