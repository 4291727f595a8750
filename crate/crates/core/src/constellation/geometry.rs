use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use super::{EARTH_RADIUS_KM, EARTH_ROTATION_RAD_S, SECONDS_PER_YEAR};

/// Obliquity of the ecliptic (degrees).
const OBLIQUITY_DEG: f64 = 23.44;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(self, other: Vec3) -> f64 {
        (self - other).norm()
    }

    pub fn normalized(self) -> Vec3 {
        let n = self.norm();
        if n == 0.0 {
            self
        } else {
            self * (1.0 / n)
        }
    }

    /// Rotation about the z axis by `angle` radians.
    pub fn rotate_z(self, angle: f64) -> Vec3 {
        let (s, c) = angle.sin_cos();
        Vec3::new(c * self.x - s * self.y, s * self.x + c * self.y, self.z)
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, k: f64) -> Vec3 {
        Vec3::new(self.x * k, self.y * k, self.z * k)
    }
}

/// A location on or above the spherical Earth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub latitude: f64,
    pub longitude: f64,
    #[serde(default)]
    pub altitude: f64,
}

impl GeoPoint {
    pub fn new(latitude: f64, longitude: f64, altitude: f64) -> crate::Result<Self> {
        let p = Self {
            latitude,
            longitude,
            altitude,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> crate::Result<()> {
        if !(-90.0..=90.0).contains(&self.latitude) {
            return Err(crate::Error::InvalidConfig(format!(
                "latitude {} outside [-90, 90]",
                self.latitude
            )));
        }
        if !(-180.0..180.0).contains(&self.longitude) {
            return Err(crate::Error::InvalidConfig(format!(
                "longitude {} outside [-180, 180)",
                self.longitude
            )));
        }
        if !(self.altitude >= 0.0) {
            return Err(crate::Error::InvalidConfig(format!(
                "altitude {} is negative",
                self.altitude
            )));
        }
        Ok(())
    }

    /// Earth-fixed Cartesian position (km).
    pub fn to_ecef(&self) -> Vec3 {
        let r = EARTH_RADIUS_KM + self.altitude;
        let (slat, clat) = self.latitude.to_radians().sin_cos();
        let (slon, clon) = self.longitude.to_radians().sin_cos();
        Vec3::new(r * clat * clon, r * clat * slon, r * slat)
    }

    /// Inertial position at `t` seconds after the epoch, when the Greenwich
    /// meridian is aligned with the inertial x axis.
    pub fn to_inertial(&self, t: f64) -> Vec3 {
        self.to_ecef().rotate_z(EARTH_ROTATION_RAD_S * t)
    }
}

/// Elevation (degrees) of `target` above the local horizon of `site`.
pub fn elevation_deg(site: Vec3, target: Vec3) -> f64 {
    let up = site.normalized();
    let los = target - site;
    let range = los.norm();
    if range == 0.0 {
        return 90.0;
    }
    (los.dot(up) / range).clamp(-1.0, 1.0).asin().to_degrees()
}

/// Haversine distance on the mean-radius sphere (km).
pub fn great_circle_km(a: &GeoPoint, b: &GeoPoint) -> f64 {
    let (lat1, lat2) = (a.latitude.to_radians(), b.latitude.to_radians());
    let dlat = lat2 - lat1;
    let dlon = (b.longitude - a.longitude).to_radians();
    let h = (dlat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * h.sqrt().min(1.0).asin()
}

/// Cylindrical Earth-shadow test.
pub fn in_eclipse(sat: Vec3, sun_dir: Vec3) -> bool {
    let along = sat.dot(sun_dir);
    if along >= 0.0 {
        return false;
    }
    let perp = sat - sun_dir * along;
    perp.norm() < EARTH_RADIUS_KM
}

/// Unit vector towards the sun `t` seconds after the epoch. The sun starts at
/// ecliptic longitude `initial_longitude_deg` and advances 360 degrees a year.
pub fn sun_direction(t: f64, initial_longitude_deg: f64) -> Vec3 {
    let lon = initial_longitude_deg.to_radians() + std::f64::consts::TAU * t / SECONDS_PER_YEAR;
    let eps = OBLIQUITY_DEG.to_radians();
    Vec3::new(lon.cos(), lon.sin() * eps.cos(), lon.sin() * eps.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zenith_is_ninety_degrees() {
        let site = GeoPoint::new(10.0, 20.0, 0.0).unwrap();
        let above = GeoPoint::new(10.0, 20.0, 550.0).unwrap();
        assert_relative_eq!(
            elevation_deg(site.to_ecef(), above.to_ecef()),
            90.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn antipodal_distance() {
        let a = GeoPoint::new(0.0, 0.0, 0.0).unwrap();
        let b = GeoPoint::new(0.0, -180.0, 0.0).unwrap();
        assert_relative_eq!(
            great_circle_km(&a, &b),
            std::f64::consts::PI * EARTH_RADIUS_KM,
            epsilon = 1e-6
        );
    }

    #[test]
    fn eclipse_cases() {
        let sun = Vec3::new(1.0, 0.0, 0.0);
        let r = EARTH_RADIUS_KM + 550.0;
        assert!(!in_eclipse(Vec3::new(r, 0.0, 0.0), sun));
        assert!(in_eclipse(Vec3::new(-r, 0.0, 0.0), sun));
        assert!(!in_eclipse(Vec3::new(-r, 7000.0, 0.0), sun));
        // Terminator plane counts as lit.
        assert!(!in_eclipse(Vec3::new(0.0, 1000.0, 0.0), sun));
    }

    #[test]
    fn rejects_bad_points() {
        assert!(GeoPoint::new(91.0, 0.0, 0.0).is_err());
        assert!(GeoPoint::new(0.0, 180.0, 0.0).is_err());
        assert!(GeoPoint::new(0.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn sun_direction_is_unit() {
        for t in [0.0, 1e5, 3e7] {
            assert_relative_eq!(sun_direction(t, 30.0).norm(), 1.0, epsilon = 1e-12);
        }
    }
}
