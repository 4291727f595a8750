//! Scenario configuration, read from TOML.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::auction::{CgscParams, Prices, UtilityWeights};
use crate::baselines::SchemeChoice;
use crate::constellation::{ConstellationConfig, LatencyParams, Preset};
use crate::power::EnergyParams;
use crate::{Error, Result};

/// Parameters accepted by [`ScenarioConfig::set_param`].
pub const SWEEPABLE: [&str; 6] = [
    "budget",
    "unreliable_failure_rate",
    "unreliable_fraction",
    "scheme",
    "seed",
    "num_intervals",
];

/// Closed range `[lo, hi]` written as a two-element array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    fn check(&self, name: &str, min: f64, max: f64) -> Result<()> {
        if !(self.lo <= self.hi && self.lo >= min && self.hi <= max) {
            return Err(Error::InvalidConfig(format!(
                "{name} must satisfy {min} <= lo <= hi <= {max} (got [{}, {}])",
                self.lo, self.hi
            )));
        }
        Ok(())
    }
}

impl From<[f64; 2]> for Range {
    fn from(v: [f64; 2]) -> Self {
        Self::new(v[0], v[1])
    }
}

impl From<Range> for [f64; 2] {
    fn from(r: Range) -> Self {
        [r.lo, r.hi]
    }
}

/// A preset, optionally with individual fields overridden.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstellationSection {
    pub preset: Preset,
    pub num_orbits: Option<u32>,
    pub sats_per_orbit: Option<u32>,
    pub altitude: Option<f64>,
    pub inclination: Option<f64>,
    pub phasing_offset: Option<f64>,
    pub min_elevation: Option<f64>,
}

impl ConstellationSection {
    pub fn resolve(&self) -> ConstellationConfig {
        let mut c = self.preset.config();
        if let Some(v) = self.num_orbits {
            c.num_orbits = v;
        }
        if let Some(v) = self.sats_per_orbit {
            c.sats_per_orbit = v;
        }
        if let Some(v) = self.altitude {
            c.altitude = v;
        }
        if let Some(v) = self.inclination {
            c.inclination = v;
        }
        if let Some(v) = self.phasing_offset {
            c.phasing_offset = v;
        }
        if let Some(v) = self.min_elevation {
            c.min_elevation = v;
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaskSection {
    /// Mb/s of data arriving at each source
    pub source_rate: f64,
    pub sources_per_interval: u32,
    pub tasks_per_source: [u32; 2],
    /// 𝒟 range, ms
    pub delay_ms: Range,
    /// ℬ range, Mb/s
    pub bandwidth_mbps: Range,
    pub min_endpoint_distance_km: f64,
    /// Task budget as a multiple of the cheapest feasible group's cost.
    pub budget_factor: f64,
}

impl Default for TaskSection {
    fn default() -> Self {
        Self {
            source_rate: 300.0,
            sources_per_interval: 4,
            tasks_per_source: [1, 8],
            delay_ms: Range::new(50.0, 200.0),
            bandwidth_mbps: Range::new(50.0, 200.0),
            min_endpoint_distance_km: 3000.0,
            budget_factor: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuctionSection {
    pub layers: usize,
    pub top_m: usize,
    pub weights: UtilityWeights,
    pub prices: Prices,
    /// Each dish scales both prices by a factor drawn from [1 - s, 1 + s].
    pub price_spread: f64,
}

impl Default for AuctionSection {
    fn default() -> Self {
        let p = CgscParams::default();
        Self {
            layers: p.layers,
            top_m: p.top_m,
            weights: UtilityWeights::default(),
            prices: Prices::default(),
            price_spread: 0.5,
        }
    }
}

impl AuctionSection {
    pub fn cgsc_params(&self) -> CgscParams {
        CgscParams {
            layers: self.layers,
            top_m: self.top_m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BatterySection {
    pub chemistry: f64,
    pub max_lifespan: f64,
    /// J
    pub capacity: f64,
    /// Initial remaining lifespan as a fraction of the maximum.
    pub initial_lifespan: Range,
    pub initial_level: Range,
}

impl Default for BatterySection {
    fn default() -> Self {
        Self {
            chemistry: 1.0,
            max_lifespan: 1000.0,
            capacity: 360_000.0,
            initial_lifespan: Range::new(0.3, 1.0),
            initial_level: Range::new(0.5, 1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkSection {
    /// Per-link ISL load fraction, drawn per interval.
    pub isl_load: Range,
    pub sun_longitude_deg: f64,
    pub epoch: f64,
}

impl Default for NetworkSection {
    fn default() -> Self {
        Self {
            isl_load: Range::new(0.5, 0.9),
            sun_longitude_deg: 0.0,
            epoch: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReliabilitySection {
    /// Share of dishes marked unreliable. Zero keeps catalog failure rates
    /// unless `reliable_failure_rate` is set.
    pub unreliable_fraction: f64,
    pub unreliable_failure_rate: f64,
    /// Failure rate of the remaining dishes; 0.01 when unset and some dishes
    /// are unreliable.
    pub reliable_failure_rate: Option<f64>,
}

impl Default for ReliabilitySection {
    fn default() -> Self {
        Self {
            unreliable_fraction: 0.0,
            unreliable_failure_rate: 0.5,
            reliable_failure_rate: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub scheme: SchemeChoice,
    pub num_intervals: u32,
    /// s
    pub interval_length: f64,
    /// Relative paths are resolved against the config file's directory.
    pub dish_catalog: PathBuf,
    pub constellation: ConstellationSection,
    pub tasks: TaskSection,
    pub auction: AuctionSection,
    pub battery: BatterySection,
    pub energy: EnergyParams,
    pub latency: LatencyParams,
    pub network: NetworkSection,
    pub reliability: ReliabilitySection,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            scheme: SchemeChoice::Susco,
            num_intervals: 100,
            interval_length: 60.0,
            dish_catalog: PathBuf::from("dishes.csv"),
            constellation: ConstellationSection::default(),
            tasks: TaskSection::default(),
            auction: AuctionSection::default(),
            battery: BatterySection::default(),
            energy: EnergyParams::default(),
            latency: LatencyParams::default(),
            network: NetworkSection::default(),
            reliability: ReliabilitySection::default(),
            base_dir: PathBuf::new(),
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut cfg: ScenarioConfig =
            toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.base_dir = base_dir.into();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml_str(&text, base).map_err(|e| match e {
            Error::InvalidConfig(m) => Error::InvalidConfig(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serialises")
    }

    pub fn catalog_path(&self) -> PathBuf {
        if self.dish_catalog.is_absolute() {
            self.dish_catalog.clone()
        } else {
            self.base_dir.join(&self.dish_catalog)
        }
    }

    pub fn constellation_config(&self) -> ConstellationConfig {
        self.constellation.resolve()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        self.constellation_config().validate()?;
        if !(self.interval_length > 0.0) {
            return bad(format!("interval_length must be positive (got {})", self.interval_length));
        }
        let t = &self.tasks;
        if !(t.source_rate >= 0.0) {
            return bad("tasks.source_rate must be non-negative".into());
        }
        if t.tasks_per_source[0] == 0 || t.tasks_per_source[0] > t.tasks_per_source[1] {
            return bad("tasks.tasks_per_source must be [lo, hi] with 1 <= lo <= hi".into());
        }
        t.delay_ms.check("tasks.delay_ms", f64::MIN_POSITIVE, f64::INFINITY)?;
        t.bandwidth_mbps.check("tasks.bandwidth_mbps", f64::MIN_POSITIVE, f64::INFINITY)?;
        if !(t.budget_factor > 0.0) {
            return bad("tasks.budget_factor must be positive".into());
        }
        if !(t.min_endpoint_distance_km >= 0.0) {
            return bad("tasks.min_endpoint_distance_km must be non-negative".into());
        }
        let a = &self.auction;
        if a.layers == 0 || a.top_m == 0 {
            return bad("auction.layers and auction.top_m must be at least 1".into());
        }
        a.weights.validate()?;
        if !(a.prices.per_gb >= 0.0 && a.prices.per_second >= 0.0) {
            return bad("auction.prices must be non-negative".into());
        }
        if !(0.0..1.0).contains(&a.price_spread) {
            return bad("auction.price_spread must be in [0, 1)".into());
        }
        let b = &self.battery;
        if !(b.chemistry > 0.0 && b.max_lifespan > 0.0 && b.capacity > 0.0) {
            return bad("battery chemistry, max_lifespan and capacity must be positive".into());
        }
        b.initial_lifespan.check("battery.initial_lifespan", 0.0, 1.0)?;
        b.initial_level.check("battery.initial_level", 0.0, 1.0)?;
        if !(self.energy.epsilon > 0.0 && self.energy.solar_charge_rate >= 0.0 && self.energy.idle_draw >= 0.0) {
            return bad("energy.epsilon must be positive and power terms non-negative".into());
        }
        let l = &self.latency;
        if !(l.packet_size_mb >= 0.0 && l.link_rate_mbps > 0.0 && l.queue_base_ms >= 0.0)
            || !(l.terrestrial_speed_km_s > 0.0 && l.terrestrial_overhead_ms >= 0.0)
        {
            return bad("latency parameters out of range".into());
        }
        self.network.isl_load.check("network.isl_load", 0.0, 0.999_999)?;
        let r = &self.reliability;
        for (name, v) in [
            ("reliability.unreliable_fraction", r.unreliable_fraction),
            ("reliability.unreliable_failure_rate", r.unreliable_failure_rate),
            ("reliability.reliable_failure_rate", r.reliable_failure_rate.unwrap_or(0.0)),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} must be in [0, 1] (got {v})"));
            }
        }
        Ok(())
    }

    /// Overrides one sweepable parameter from its textual value.
    pub fn set_param(&mut self, name: &str, value: &str) -> Result<()> {
        let num = || {
            value
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidConfig(format!("`{value}` is not a number for {name}")))
        };
        match name {
            "budget" => self.tasks.budget_factor = num()?,
            "unreliable_failure_rate" => self.reliability.unreliable_failure_rate = num()?,
            "unreliable_fraction" => self.reliability.unreliable_fraction = num()?,
            "scheme" => self.scheme = value.trim().parse()?,
            "seed" => {
                self.seed = value
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidConfig(format!("`{value}` is not a seed")))?
            }
            "num_intervals" => {
                self.num_intervals = value
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidConfig(format!("`{value}` is not an interval count")))?
            }
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "unknown sweep parameter `{name}` (expected one of {})",
                    SWEEPABLE.join(", ")
                )))
            }
        }
        self.validate()
    }
}
