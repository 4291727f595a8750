//! Constellation geometry and per-interval network topology.
//!
//! Circular two-body orbits on a spherical Earth. Positions are expressed in
//! an Earth-centred inertial frame; ground sites are rotated into it at the
//! query time.

mod catalog;
mod geometry;
mod latency;
mod routing;
mod topology;
mod walker;

pub use catalog::{load_catalog, write_catalog};
pub use geometry::{
    elevation_deg, great_circle_km, in_eclipse, sun_direction, GeoPoint, Vec3,
};
pub use latency::{link_latency, terrestrial_latency, LatencyParams};
pub use routing::{original_path, RoutePath};
pub use topology::{
    build_snapshot, isl_neighbors, visible_dishes, DishKind, DishSite, IslEdge, SnapshotSettings,
    TopologySnapshot,
};
pub use walker::{
    generate_walker, orbital_period_s, propagate, ConstellationConfig, OrbitalState, Preset,
};

use serde::{Deserialize, Serialize};

/// Mean Earth radius (km).
pub const EARTH_RADIUS_KM: f64 = 6371.0;
/// Earth gravitational parameter (km^3/s^2).
pub const MU_EARTH: f64 = 398_600.441_8;
/// Speed of light in vacuum (km/s).
pub const SPEED_OF_LIGHT_KM_S: f64 = 299_792.458;
/// Sidereal rotation rate of the Earth (rad/s).
pub const EARTH_ROTATION_RAD_S: f64 = 7.292_115_9e-5;
/// Seconds in a (Julian) year, used to advance the sun direction.
pub const SECONDS_PER_YEAR: f64 = 365.25 * 86_400.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SatelliteId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DishId(pub u32);

impl std::fmt::Display for SatelliteId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::fmt::Display for DishId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}
