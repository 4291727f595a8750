//! C ABI over the simulator.
//!
//! Every function returns a [`SuscoStatus`]. On failure a message is kept in
//! thread-local storage and can be read with [`susco_last_error_message`].
//! Simulations are opaque handles created by `susco_simulation_from_*` and
//! released with [`susco_simulation_free`]. Panics never cross the boundary;
//! they surface as `SUSCO_STATUS_PANIC`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use susco::auction::{dish_cost, Prices};
use susco::power::life_consumption;
use susco::sim::{output, IntervalMetrics, ScenarioConfig, Simulation};
use susco::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuscoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidConfig = 3,
    Io = 4,
    Runtime = 5,
    OutOfRange = 6,
    Panic = 7,
}

/// One interval's metrics. Energy in J, life in lifespan units, latency in ms.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SuscoIntervalMetrics {
    pub interval: u32,
    pub tasks_total: u32,
    pub tasks_offloaded: u32,
    pub tasks_unserved: u32,
    pub tasks_failed: u32,
    pub reduced_energy: f64,
    pub reduced_life_consumption: f64,
    pub reduced_latency: f64,
    pub total_payment: f64,
    pub total_budget: f64,
    pub sum_utility: f64,
    pub sum_cost: f64,
    pub utility_cost_ratio: f64,
}

impl From<&IntervalMetrics> for SuscoIntervalMetrics {
    fn from(m: &IntervalMetrics) -> Self {
        Self {
            interval: m.interval,
            tasks_total: m.tasks_total,
            tasks_offloaded: m.tasks_offloaded,
            tasks_unserved: m.tasks_unserved,
            tasks_failed: m.tasks_failed,
            reduced_energy: m.reduced_energy,
            reduced_life_consumption: m.reduced_life_consumption,
            reduced_latency: m.reduced_latency,
            total_payment: m.total_payment,
            total_budget: m.total_budget,
            sum_utility: m.sum_utility,
            sum_cost: m.sum_cost,
            utility_cost_ratio: m.utility_cost_ratio,
        }
    }
}

/// Opaque simulation handle.
pub struct SuscoSimulation {
    inner: Simulation,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> SuscoStatus {
    match e {
        Error::InvalidConfig(_) | Error::Catalog { .. } => SuscoStatus::InvalidConfig,
        Error::Io { .. } | Error::Csv(_) => SuscoStatus::Io,
        _ => SuscoStatus::Runtime,
    }
}

/// Runs `f`, recording errors and converting panics.
fn guard(f: impl FnOnce() -> Result<(), (SuscoStatus, String)>) -> SuscoStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SuscoStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("internal panic: {msg}"));
            SuscoStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (SuscoStatus, String) {
    (status_of(&e), e.to_string())
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, (SuscoStatus, String)> {
    if p.is_null() {
        return Err((SuscoStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (SuscoStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

fn null(name: &str) -> (SuscoStatus, String) {
    (SuscoStatus::NullPointer, format!("{name} is null"))
}

fn store(out: *mut *mut SuscoSimulation, cfg: ScenarioConfig) -> Result<(), (SuscoStatus, String)> {
    let sim = Simulation::new(cfg).map_err(lib_err)?;
    unsafe { *out = Box::into_raw(Box::new(SuscoSimulation { inner: sim })) };
    Ok(())
}

/// Creates a simulation from a TOML config file. The dish catalog is
/// resolved relative to the file.
#[no_mangle]
pub unsafe extern "C" fn susco_simulation_from_file(
    path: *const c_char,
    out: *mut *mut SuscoSimulation,
) -> SuscoStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let path = str_arg(path, "path")?;
        let cfg = ScenarioConfig::from_file(Path::new(path)).map_err(lib_err)?;
        store(out, cfg)
    })
}

/// Creates a simulation from TOML text. Relative catalog paths resolve
/// against `base_dir`, which may be null for the working directory.
#[no_mangle]
pub unsafe extern "C" fn susco_simulation_from_toml(
    toml: *const c_char,
    base_dir: *const c_char,
    out: *mut *mut SuscoSimulation,
) -> SuscoStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = str_arg(toml, "toml")?;
        let base = if base_dir.is_null() { "" } else { str_arg(base_dir, "base_dir")? };
        let cfg = ScenarioConfig::from_toml_str(text, base).map_err(lib_err)?;
        store(out, cfg)
    })
}

unsafe fn sim_mut<'a>(p: *mut SuscoSimulation) -> Result<&'a mut Simulation, (SuscoStatus, String)> {
    p.as_mut().map(|s| &mut s.inner).ok_or_else(|| null("simulation"))
}

unsafe fn sim_ref<'a>(p: *const SuscoSimulation) -> Result<&'a Simulation, (SuscoStatus, String)> {
    p.as_ref().map(|s| &s.inner).ok_or_else(|| null("simulation"))
}

/// Advances one interval. Returns `SUSCO_STATUS_OUT_OF_RANGE` once every
/// configured interval has run.
#[no_mangle]
pub unsafe extern "C" fn susco_simulation_step(sim: *mut SuscoSimulation) -> SuscoStatus {
    guard(|| {
        let sim = sim_mut(sim)?;
        if sim.is_finished() {
            return Err((SuscoStatus::OutOfRange, "all intervals have run".into()));
        }
        sim.step().map(|_| ()).map_err(lib_err)
    })
}

/// Runs every remaining interval.
#[no_mangle]
pub unsafe extern "C" fn susco_simulation_run(sim: *mut SuscoSimulation) -> SuscoStatus {
    guard(|| sim_mut(sim)?.run().map_err(lib_err))
}

/// Number of intervals completed so far.
#[no_mangle]
pub unsafe extern "C" fn susco_simulation_interval_count(
    sim: *const SuscoSimulation,
    out: *mut u32,
) -> SuscoStatus {
    guard(|| {
        let sim = sim_ref(sim)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = sim.metrics().len() as u32;
        Ok(())
    })
}

/// Copies the metrics of completed interval `index`.
#[no_mangle]
pub unsafe extern "C" fn susco_simulation_metrics(
    sim: *const SuscoSimulation,
    index: u32,
    out: *mut SuscoIntervalMetrics,
) -> SuscoStatus {
    guard(|| {
        let sim = sim_ref(sim)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let m = sim.metrics().get(index as usize).ok_or_else(|| {
            (
                SuscoStatus::OutOfRange,
                format!("interval {index} has not run ({} completed)", sim.metrics().len()),
            )
        })?;
        *out = m.into();
        Ok(())
    })
}

/// Writes metrics.csv, transcript.csv, summary.txt and config.toml into `dir`.
#[no_mangle]
pub unsafe extern "C" fn susco_simulation_write_outputs(
    sim: *const SuscoSimulation,
    dir: *const c_char,
) -> SuscoStatus {
    guard(|| {
        let sim = sim_ref(sim)?;
        let dir = str_arg(dir, "dir")?;
        output::write_outputs(Path::new(dir), &sim.result(), Some(sim.config()))
            .map(|_| ())
            .map_err(lib_err)
    })
}

/// Releases a handle. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn susco_simulation_free(sim: *mut SuscoSimulation) {
    if !sim.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(sim))));
    }
}

/// Cost a dish charges for `capacity_mb` at `bandwidth_mbps`.
#[no_mangle]
pub unsafe extern "C" fn susco_dish_cost(
    capacity_mb: f64,
    bandwidth_mbps: f64,
    per_gb: f64,
    per_second: f64,
    out: *mut f64,
) -> SuscoStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        if !(capacity_mb >= 0.0 && bandwidth_mbps > 0.0) {
            return Err((SuscoStatus::OutOfRange, "capacity must be >= 0 and bandwidth > 0".into()));
        }
        *out = dish_cost(capacity_mb, bandwidth_mbps, &Prices { per_gb, per_second });
        Ok(())
    })
}

/// Battery life consumed by a level drop from `before` to `after`.
#[no_mangle]
pub unsafe extern "C" fn susco_life_consumption(
    before: f64,
    after: f64,
    chemistry: f64,
    out: *mut f64,
) -> SuscoStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = life_consumption(before, after, chemistry).map_err(|e| (SuscoStatus::OutOfRange, e.to_string()))?;
        Ok(())
    })
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn susco_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn susco_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
