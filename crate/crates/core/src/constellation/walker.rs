use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{SatelliteId, Vec3, EARTH_RADIUS_KM, MU_EARTH};
use crate::{Error, Result};

/// Walker-delta shell parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstellationConfig {
    pub num_orbits: u32,
    pub sats_per_orbit: u32,
    /// km above the mean Earth radius
    pub altitude: f64,
    /// degrees
    pub inclination: f64,
    /// Extra mean-anomaly offset between adjacent planes (degrees).
    #[serde(default)]
    pub phasing_offset: f64,
    /// degrees
    pub min_elevation: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    #[default]
    Telesat,
    Kuiper,
    Starlink,
    #[serde(rename = "2xstarlink")]
    DoubleStarlink,
}

impl Preset {
    pub const ALL: [Preset; 4] = [
        Preset::Telesat,
        Preset::Kuiper,
        Preset::Starlink,
        Preset::DoubleStarlink,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Telesat => "telesat",
            Preset::Kuiper => "kuiper",
            Preset::Starlink => "starlink",
            Preset::DoubleStarlink => "2xstarlink",
        }
    }

    pub fn from_name(name: &str) -> Option<Preset> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(name))
    }

    pub fn config(self) -> ConstellationConfig {
        match self {
            Preset::Telesat => ConstellationConfig {
                num_orbits: 6,
                sats_per_orbit: 12,
                altitude: 1015.0,
                inclination: 99.5,
                phasing_offset: 15.0,
                min_elevation: 10.0,
            },
            Preset::Kuiper => ConstellationConfig {
                num_orbits: 28,
                sats_per_orbit: 28,
                altitude: 590.0,
                inclination: 33.0,
                phasing_offset: 5.0,
                min_elevation: 35.0,
            },
            Preset::Starlink => ConstellationConfig {
                num_orbits: 72,
                sats_per_orbit: 22,
                altitude: 550.0,
                inclination: 53.0,
                phasing_offset: 5.0,
                min_elevation: 25.0,
            },
            Preset::DoubleStarlink => ConstellationConfig {
                num_orbits: 144,
                sats_per_orbit: 22,
                altitude: 550.0,
                inclination: 53.0,
                phasing_offset: 2.5,
                min_elevation: 25.0,
            },
        }
    }
}

impl ConstellationConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.num_orbits < 1 || self.sats_per_orbit < 1 {
            return bad(format!(
                "constellation needs at least one orbit and one satellite per orbit (got {}x{})",
                self.num_orbits, self.sats_per_orbit
            ));
        }
        if !(self.inclination > 0.0 && self.inclination <= 180.0) {
            return bad(format!("inclination {} outside (0, 180]", self.inclination));
        }
        if !(0.0..90.0).contains(&self.min_elevation) {
            return bad(format!("min_elevation {} outside [0, 90)", self.min_elevation));
        }
        if !(self.altitude > 0.0) {
            return bad(format!("altitude {} must be positive", self.altitude));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        (self.num_orbits * self.sats_per_orbit) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn semi_major_axis(&self) -> f64 {
        EARTH_RADIUS_KM + self.altitude
    }

    /// Plane and in-plane slot for a satellite id.
    pub fn slot(&self, id: SatelliteId) -> (u32, u32) {
        (id.0 / self.sats_per_orbit, id.0 % self.sats_per_orbit)
    }

    pub fn id_of(&self, plane: u32, slot: u32) -> SatelliteId {
        SatelliteId(plane * self.sats_per_orbit + slot)
    }
}

/// Circular orbit state of one satellite at the epoch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitalState {
    pub id: SatelliteId,
    pub plane: u32,
    pub slot: u32,
    /// km
    pub semi_major_axis: f64,
    /// rad
    pub inclination: f64,
    /// rad
    pub raan: f64,
    /// argument of latitude at the epoch (rad)
    pub arg_latitude: f64,
    /// s
    pub epoch: f64,
}

impl OrbitalState {
    pub fn mean_motion(&self) -> f64 {
        (MU_EARTH / self.semi_major_axis.powi(3)).sqrt()
    }

    pub fn position_at(&self, t: f64) -> Vec3 {
        let u = self.arg_latitude + self.mean_motion() * (t - self.epoch);
        let (su, cu) = u.sin_cos();
        let (so, co) = self.raan.sin_cos();
        let (si, ci) = self.inclination.sin_cos();
        Vec3::new(
            co * cu - so * su * ci,
            so * cu + co * su * ci,
            su * si,
        ) * self.semi_major_axis
    }
}

pub fn orbital_period_s(semi_major_axis_km: f64) -> f64 {
    TAU * (semi_major_axis_km.powi(3) / MU_EARTH).sqrt()
}

/// Satellites ordered plane by plane; id = plane * sats_per_orbit + slot.
pub fn generate_walker(config: &ConstellationConfig, epoch: f64) -> Vec<OrbitalState> {
    let planes = config.num_orbits;
    let per = config.sats_per_orbit;
    let a = config.semi_major_axis();
    let inc = config.inclination.to_radians();
    let phase = config.phasing_offset.to_radians();
    let mut out = Vec::with_capacity(config.len());
    for p in 0..planes {
        for s in 0..per {
            out.push(OrbitalState {
                id: config.id_of(p, s),
                plane: p,
                slot: s,
                semi_major_axis: a,
                inclination: inc,
                raan: TAU * p as f64 / planes as f64,
                arg_latitude: (TAU * s as f64 / per as f64 + phase * p as f64).rem_euclid(TAU),
                epoch,
            });
        }
    }
    out
}

pub fn propagate(states: &[OrbitalState], t: f64) -> BTreeMap<SatelliteId, Vec3> {
    states.iter().map(|s| (s.id, s.position_at(t))).collect()
}
