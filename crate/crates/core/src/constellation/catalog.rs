use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DishId, DishKind, DishSite, GeoPoint};
use crate::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    dish_id: u32,
    lat_deg: f64,
    lon_deg: f64,
    bandwidth_mbps: f64,
    failure_rate: f64,
    kind: String,
}

/// Reads a dish catalog with header
/// `dish_id,lat_deg,lon_deg,bandwidth_mbps,failure_rate,kind`.
pub fn load_catalog(path: &Path) -> Result<Vec<DishSite>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let expected = ["dish_id", "lat_deg", "lon_deg", "bandwidth_mbps", "failure_rate", "kind"];
    let headers = reader.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::Catalog {
            path: path.to_path_buf(),
            message: format!("expected header `{}`", expected.join(",")),
        });
    }
    let mut out: Vec<DishSite> = Vec::new();
    for (line, row) in reader.deserialize::<Row>().enumerate() {
        let row = row?;
        let err = |message: String| Error::Catalog {
            path: path.to_path_buf(),
            message: format!("row {}: {message}", line + 1),
        };
        let kind = row.kind.parse::<DishKind>().map_err(err)?;
        let site = DishSite {
            id: DishId(row.dish_id),
            location: GeoPoint {
                latitude: row.lat_deg,
                longitude: row.lon_deg,
                altitude: 0.0,
            },
            bandwidth: row.bandwidth_mbps,
            true_failure_rate: row.failure_rate,
            kind,
        };
        site.validate().map_err(|e| err(e.to_string()))?;
        if out.iter().any(|d| d.id == site.id) {
            return Err(err(format!("duplicate dish id {}", site.id)));
        }
        out.push(site);
    }
    Ok(out)
}

pub fn write_catalog(path: &Path, dishes: &[DishSite]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for d in dishes {
        w.serialize(Row {
            dish_id: d.id.0,
            lat_deg: d.location.latitude,
            lon_deg: d.location.longitude,
            bandwidth_mbps: d.bandwidth,
            failure_rate: d.true_failure_rate,
            kind: d.kind.as_str().to_string(),
        })?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}
