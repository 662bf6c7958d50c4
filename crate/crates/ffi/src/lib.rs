//! C ABI over the simulator.
//!
//! Handles are opaque and owned by the caller once returned; release them with the
//! matching `*_free` function. Every fallible call returns an [`RtsimStatus`]; on
//! failure [`rtsim_last_error`] describes the most recent error on the calling thread.
//! Strings passed in must be NUL-terminated UTF-8.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use rtsim::chart::write_charts;
use rtsim::error::ConfigError;
use rtsim::experiments::{scenario_by_name, ScenarioSpec};
use rtsim::metrics::to_csv;
use rtsim::RunSummary;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RtsimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    UnknownScenario = 3,
    UnknownKey = 4,
    BadValue = 5,
    NotApplicable = 6,
    InvalidConfig = 7,
    IndexOutOfRange = 8,
    Io = 9,
    Panic = 10,
}

/// A scenario definition that overrides can still be applied to.
pub struct RtsimScenario {
    spec: ScenarioSpec,
}

/// Results of one completed run.
pub struct RtsimRun {
    summary: RunSummary,
}

/// One virtual second of observations.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RtsimSnapshot {
    pub second: u64,
    pub sent: u64,
    pub received: u64,
    pub enqueued: u64,
    pub dropped_disabled: u64,
    pub dropped_full: u64,
    pub processed: u64,
    pub cycles_completed: u64,
    /// Summed cycle lateness in percent of one period.
    pub lateness_pct: f64,
    pub queue_len: u64,
    pub interrupts_off_fraction: f64,
    pub cpu_isr_us: u64,
    pub cpu_tick_us: u64,
    pub cpu_driver_us: u64,
    pub cpu_critical_us: u64,
    pub cpu_idle_us: u64,
}

/// Whole-run counters.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RtsimTotals {
    pub sent: u64,
    pub received: u64,
    pub enqueued: u64,
    pub dropped_disabled: u64,
    pub dropped_full: u64,
    pub processed: u64,
    pub cycles_completed: u64,
    pub lateness_us: u64,
    pub end_time_us: u64,
    pub final_queue_len: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

type Failure = (RtsimStatus, String);

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RtsimStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RtsimStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal error: simulator panicked".into());
            RtsimStatus::Panic
        }
    }
}

fn config_failure(e: ConfigError) -> Failure {
    let status = match e {
        ConfigError::UnknownScenario { .. } => RtsimStatus::UnknownScenario,
        ConfigError::UnknownKey(_) => RtsimStatus::UnknownKey,
        ConfigError::BadValue { .. } => RtsimStatus::BadValue,
        ConfigError::NotApplicable { .. } => RtsimStatus::NotApplicable,
        ConfigError::Invalid(_) | ConfigError::OutOfRange { .. } => RtsimStatus::InvalidConfig,
    };
    (status, e.to_string())
}

fn null(what: &str) -> Failure {
    (RtsimStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (RtsimStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

static NAMES: [&CStr; 8] = [
    c"baseline-equal",
    c"baseline-priority",
    c"burst",
    c"hysteresis",
    c"budget",
    c"queue-100",
    c"queue-500",
    c"queue-750",
];

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn rtsim_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Number of builtin scenarios.
#[no_mangle]
pub extern "C" fn rtsim_scenario_count() -> usize {
    NAMES.len()
}

/// Name of builtin scenario `index`, or null when out of range. The string is static.
#[no_mangle]
pub extern "C" fn rtsim_scenario_name(index: usize) -> *const c_char {
    NAMES.get(index).map_or(ptr::null(), |n| n.as_ptr())
}

/// Message for the last failed call on this thread, or null. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn rtsim_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Creates a scenario handle from a builtin name.
///
/// # Safety
/// `name` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rtsim_scenario_new(name: *const c_char, out: *mut *mut RtsimScenario) -> RtsimStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let name = read_str(name, "name")?;
        let spec = scenario_by_name(name).map_err(config_failure)?;
        *out = Box::into_raw(Box::new(RtsimScenario { spec }));
        Ok(())
    })
}

/// Applies one override, using the same keys as the command-line flags
/// without the leading dashes (`"capacity"`, `"queue-size"`, ...).
///
/// # Safety
/// `scenario` must come from [`rtsim_scenario_new`]; `key` and `value` must be valid C strings.
#[no_mangle]
pub unsafe extern "C" fn rtsim_scenario_set(
    scenario: *mut RtsimScenario,
    key: *const c_char,
    value: *const c_char,
) -> RtsimStatus {
    guard(|| {
        let s = scenario.as_mut().ok_or_else(|| null("scenario"))?;
        let key = read_str(key, "key")?;
        let value = read_str(value, "value")?;
        s.spec.set(key, value).map_err(config_failure)
    })
}

/// Simulation length in virtual seconds.
///
/// # Safety
/// `scenario` must be null or come from [`rtsim_scenario_new`].
#[no_mangle]
pub unsafe extern "C" fn rtsim_scenario_duration(scenario: *const RtsimScenario) -> u64 {
    scenario.as_ref().map_or(0, |s| s.spec.duration_s)
}

/// Runs the scenario to completion. The scenario handle stays usable.
///
/// # Safety
/// `scenario` must come from [`rtsim_scenario_new`] and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rtsim_scenario_run(scenario: *const RtsimScenario, out: *mut *mut RtsimRun) -> RtsimStatus {
    guard(|| {
        let s = deref(scenario, "scenario")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let summary = s.spec.run().map_err(config_failure)?;
        *out = Box::into_raw(Box::new(RtsimRun { summary }));
        Ok(())
    })
}

/// # Safety
/// `scenario` must be null or come from [`rtsim_scenario_new`], and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rtsim_scenario_free(scenario: *mut RtsimScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Number of per-second snapshots in a run.
///
/// # Safety
/// `run` must be null or come from [`rtsim_scenario_run`].
#[no_mangle]
pub unsafe extern "C" fn rtsim_run_snapshot_count(run: *const RtsimRun) -> usize {
    run.as_ref().map_or(0, |r| r.summary.snapshots.len())
}

/// Copies snapshot `index` into `out`.
///
/// # Safety
/// `run` must come from [`rtsim_scenario_run`] and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rtsim_run_snapshot(run: *const RtsimRun, index: usize, out: *mut RtsimSnapshot) -> RtsimStatus {
    guard(|| {
        let r = deref(run, "run")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let s = r.summary.snapshots.get(index).ok_or_else(|| {
            (
                RtsimStatus::IndexOutOfRange,
                format!("snapshot {index} of {}", r.summary.snapshots.len()),
            )
        })?;
        *out = RtsimSnapshot {
            second: s.second,
            sent: s.sent,
            received: s.received(),
            enqueued: s.enqueued,
            dropped_disabled: s.dropped_disabled,
            dropped_full: s.dropped_full,
            processed: s.processed,
            cycles_completed: s.cycles_completed,
            lateness_pct: s.lateness_pct(),
            queue_len: s.queue_len_end,
            interrupts_off_fraction: s.interrupts_disabled_fraction,
            cpu_isr_us: s.cpu.isr,
            cpu_tick_us: s.cpu.tick,
            cpu_driver_us: s.cpu.driver,
            cpu_critical_us: s.cpu.critical,
            cpu_idle_us: s.cpu.idle,
        };
        Ok(())
    })
}

/// # Safety
/// `run` must come from [`rtsim_scenario_run`] and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rtsim_run_totals(run: *const RtsimRun, out: *mut RtsimTotals) -> RtsimStatus {
    guard(|| {
        let r = deref(run, "run")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let t = &r.summary.totals;
        *out = RtsimTotals {
            sent: t.sent,
            received: t.isr_executed,
            enqueued: t.enqueued,
            dropped_disabled: t.dropped_disabled,
            dropped_full: t.dropped_full,
            processed: t.processed,
            cycles_completed: t.cycles_completed,
            lateness_us: t.lateness_us,
            end_time_us: r.summary.end_time.as_micros(),
            final_queue_len: r.summary.final_queue_len,
        };
        Ok(())
    })
}

/// The run as CSV text, or null on a null handle. Release with [`rtsim_string_free`].
///
/// # Safety
/// `run` must be null or come from [`rtsim_scenario_run`].
#[no_mangle]
pub unsafe extern "C" fn rtsim_run_csv(run: *const RtsimRun) -> *mut c_char {
    match run.as_ref() {
        Some(r) => CString::new(to_csv(&r.summary.snapshots)).map_or(ptr::null_mut(), CString::into_raw),
        None => {
            set_error("run is null".into());
            ptr::null_mut()
        }
    }
}

/// Writes `packets.svg` and `critical.svg` into `dir`, creating it if needed.
///
/// # Safety
/// `run` must come from [`rtsim_scenario_run`]; `dir` must be a valid C string.
#[no_mangle]
pub unsafe extern "C" fn rtsim_run_write_charts(run: *const RtsimRun, dir: *const c_char) -> RtsimStatus {
    guard(|| {
        let r = deref(run, "run")?;
        let dir = read_str(dir, "dir")?;
        write_charts(&r.summary.snapshots, Path::new(dir)).map_err(|e| (RtsimStatus::Io, format!("{dir}: {e}")))
    })
}

/// # Safety
/// `run` must be null or come from [`rtsim_scenario_run`], and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rtsim_run_free(run: *mut RtsimRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library, released once.
#[no_mangle]
pub unsafe extern "C" fn rtsim_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
