//! C ABI over `gme-core`.
//!
//! Every entry point returns a [`GmeStatus`]. Objects cross the boundary as opaque
//! pointers that the caller releases with the matching `*_free` function. The message
//! for the last failure on the calling thread is available from [`gme_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gme_core::config::{ScenarioConfig, ScenarioName};
use gme_core::dynamics::Trajectory;
use gme_core::runner::{self, RunPoint};
use gme_core::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GmeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Numerical = 4,
    Io = 5,
    Panic = 6,
}

/// A validated scenario configuration.
pub struct GmeConfig {
    inner: ScenarioConfig,
    points: Vec<RunPoint>,
}

/// Sampled observables of one propagation.
pub struct GmeTrajectory {
    inner: Trajectory,
    names: Vec<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = s);
}

fn status_of(e: &Error) -> GmeStatus {
    match e {
        Error::Config(_) => GmeStatus::Config,
        Error::Io(_) => GmeStatus::Io,
        e if e.is_numerical() => GmeStatus::Numerical,
        _ => GmeStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (GmeStatus, String)>) -> GmeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GmeStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            GmeStatus::Panic
        }
    }
}

fn lift<T>(r: gme_core::Result<T>) -> Result<T, (GmeStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null() -> (GmeStatus, String) {
    (GmeStatus::NullPointer, "null pointer argument".into())
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, (GmeStatus, String)> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s).to_str().map_err(|_| (GmeStatus::InvalidArgument, "string is not UTF-8".into()))
}

fn config_handle(c: ScenarioConfig) -> Result<*mut GmeConfig, (GmeStatus, String)> {
    lift(c.validate())?;
    let points = runner::run_points(&c);
    Ok(Box::into_raw(Box::new(GmeConfig { inner: c, points })))
}

/// Message of the last failure on this thread. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn gme_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gme_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses and validates a JSON configuration.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn gme_config_from_json(json: *const c_char, out: *mut *mut GmeConfig) -> GmeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let c = lift(ScenarioConfig::from_json(read_str(json)?))?;
        *out = config_handle(c)?;
        Ok(())
    })
}

/// Configuration of a preset scenario (`rabi-temp-sweep`, `rabi-compare`, `dce`, `hu-failure`).
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn gme_config_preset(name: *const c_char, out: *mut *mut GmeConfig) -> GmeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let name = lift(ScenarioName::parse(read_str(name)?))?;
        *out = config_handle(lift(ScenarioConfig::preset(name))?)?;
        Ok(())
    })
}

/// # Safety
/// `config` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn gme_config_free(config: *mut GmeConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Number of (temperature, method) points the configuration expands to.
///
/// # Safety
/// `config` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn gme_config_num_points(config: *const GmeConfig, out: *mut usize) -> GmeStatus {
    guard(|| {
        let c = config.as_ref().ok_or_else(null)?;
        *out.as_mut().ok_or_else(null)? = c.points.len();
        Ok(())
    })
}

/// Propagates point `index` of the configuration.
///
/// # Safety
/// `config` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn gme_simulate(config: *const GmeConfig, index: usize, out: *mut *mut GmeTrajectory) -> GmeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let c = config.as_ref().ok_or_else(null)?;
        let point = *c
            .points
            .get(index)
            .ok_or_else(|| (GmeStatus::InvalidArgument, format!("point {index} out of range ({})", c.points.len())))?;
        let (traj, _) = lift(runner::simulate(&c.inner, point, 0))?;
        let names = traj.names.iter().map(|n| CString::new(n.as_str()).unwrap_or_default()).collect();
        *out = Box::into_raw(Box::new(GmeTrajectory { inner: traj, names }));
        Ok(())
    })
}

/// # Safety
/// `traj` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn gme_trajectory_free(traj: *mut GmeTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// # Safety
/// `traj` must be a live handle; `samples` and `series` writable pointers.
#[no_mangle]
pub unsafe extern "C" fn gme_trajectory_shape(traj: *const GmeTrajectory, samples: *mut usize, series: *mut usize) -> GmeStatus {
    guard(|| {
        let t = traj.as_ref().ok_or_else(null)?;
        *samples.as_mut().ok_or_else(null)? = t.inner.times.len();
        *series.as_mut().ok_or_else(null)? = t.inner.series.len();
        Ok(())
    })
}

/// Name of series `index`; the string lives as long as the trajectory.
///
/// # Safety
/// `traj` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn gme_trajectory_name(traj: *const GmeTrajectory, index: usize, out: *mut *const c_char) -> GmeStatus {
    guard(|| {
        let t = traj.as_ref().ok_or_else(null)?;
        let out = out.as_mut().ok_or_else(null)?;
        let n = t.names.get(index).ok_or_else(|| (GmeStatus::InvalidArgument, format!("series {index} out of range")))?;
        *out = n.as_ptr();
        Ok(())
    })
}

unsafe fn copy_out(src: &[f64], dst: *mut f64, len: usize) -> Result<(), (GmeStatus, String)> {
    if dst.is_null() {
        return Err(null());
    }
    if len < src.len() {
        return Err((GmeStatus::InvalidArgument, format!("buffer holds {len} values, need {}", src.len())));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len());
    Ok(())
}

/// Copies the sample times into `dst`, which must hold at least the sample count.
///
/// # Safety
/// `traj` must be a live handle and `dst` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn gme_trajectory_times(traj: *const GmeTrajectory, dst: *mut f64, len: usize) -> GmeStatus {
    guard(|| copy_out(&traj.as_ref().ok_or_else(null)?.inner.times, dst, len))
}

/// Copies series `index` into `dst`. Undefined correlation samples are NaN.
///
/// # Safety
/// `traj` must be a live handle and `dst` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn gme_trajectory_series(traj: *const GmeTrajectory, index: usize, dst: *mut f64, len: usize) -> GmeStatus {
    guard(|| {
        let t = traj.as_ref().ok_or_else(null)?;
        let s = t.inner.series.get(index).ok_or_else(|| (GmeStatus::InvalidArgument, format!("series {index} out of range")))?;
        copy_out(s, dst, len)
    })
}

/// Spectrum report (energies, transition tables, doublet) as a JSON string.
/// Release it with [`gme_string_free`].
///
/// # Safety
/// `config` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn gme_spectrum_json(config: *const GmeConfig, out: *mut *mut c_char) -> GmeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let c = config.as_ref().ok_or_else(null)?;
        let report = lift(runner::spectrum(&c.inner))?;
        let text = serde_json::to_string(&report).map_err(|e| (GmeStatus::InvalidArgument, e.to_string()))?;
        *out = CString::new(text).map_err(|e| (GmeStatus::InvalidArgument, e.to_string()))?.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn gme_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
