//! C ABI for the percolation quantum walk simulator.
//!
//! The surface is deliberately small: hand in the same JSON run
//! configuration the `pqw` binary takes, get back an opaque experiment
//! handle, and copy the averaged curves (Stokes parameters, distance from
//! the asymptotic state, position distributions) out through plain double
//! buffers. Every fallible call returns a [`PqwStatus`]; the last failure's
//! text is available from [`pqw_last_error_message`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};

use libc::{c_char, c_double};

use pqw::config::RunConfig;
use pqw::runner::{execute, ExperimentResult};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PqwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// The configuration failed to parse or validate.
    InvalidConfig = 3,
    /// Pattern enumeration exceeded the configured cap.
    ResourceCapExceeded = 4,
    /// The simulated signal vanished (all amplitudes attenuated away).
    SignalExtinction = 5,
    /// The caller's buffer is smaller than the data.
    BufferTooSmall = 6,
    /// The requested data is absent for the configured mode.
    NotAvailable = 7,
    RunFailed = 8,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &pqw::Error) -> PqwStatus {
    match err {
        pqw::Error::Config(_) => PqwStatus::InvalidConfig,
        pqw::Error::PatternCapExceeded { .. } => PqwStatus::ResourceCapExceeded,
        pqw::Error::SignalExtinction { .. } => PqwStatus::SignalExtinction,
        _ => PqwStatus::RunFailed,
    }
}

/// Opaque experiment handle. Create with [`pqw_experiment_run`], release
/// with [`pqw_experiment_free`].
pub struct PqwExperiment {
    result: ExperimentResult,
}

/// Runs the experiment described by a JSON configuration (the same schema
/// the CLI takes; the output section is ignored — nothing is written).
///
/// On success writes a handle to `out` and returns `Ok`. On failure leaves
/// `out` untouched; consult [`pqw_last_error_message`].
///
/// # Safety
/// `config_json` must be a valid NUL-terminated string and `out` a valid
/// pointer to pointer storage.
#[no_mangle]
pub unsafe extern "C" fn pqw_experiment_run(
    config_json: *const c_char,
    out: *mut *mut PqwExperiment,
) -> PqwStatus {
    if config_json.is_null() || out.is_null() {
        set_last_error("null pointer argument");
        return PqwStatus::NullPointer;
    }
    let text = match CStr::from_ptr(config_json).to_str() {
        Ok(text) => text,
        Err(_) => {
            set_last_error("config is not valid UTF-8");
            return PqwStatus::InvalidUtf8;
        }
    };
    let config = match RunConfig::from_json(text) {
        Ok(config) => config,
        Err(err) => {
            set_last_error(&err.to_string());
            return status_of(&err);
        }
    };
    match execute(&config) {
        Ok(result) => {
            *out = Box::into_raw(Box::new(PqwExperiment { result }));
            PqwStatus::Ok
        }
        Err(err) => {
            set_last_error(&err.to_string());
            status_of(&err)
        }
    }
}

/// Releases an experiment handle. A null handle is a no-op.
///
/// # Safety
/// `handle` must have come from [`pqw_experiment_run`] and not been freed.
#[no_mangle]
pub unsafe extern "C" fn pqw_experiment_free(handle: *mut PqwExperiment) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Number of evolution steps n; every per-step buffer holds n + 1 entries
/// (step 0 is the initial state).
///
/// # Safety
/// `handle` must be a live experiment handle.
#[no_mangle]
pub unsafe extern "C" fn pqw_experiment_steps(handle: *const PqwExperiment) -> usize {
    match handle.as_ref() {
        Some(exp) => exp.result.distances.len().saturating_sub(1),
        None => 0,
    }
}

/// Number of graph vertices.
///
/// # Safety
/// `handle` must be a live experiment handle.
#[no_mangle]
pub unsafe extern "C" fn pqw_experiment_num_vertices(handle: *const PqwExperiment) -> usize {
    match handle.as_ref() {
        Some(exp) => exp.result.labels.len(),
        None => 0,
    }
}

unsafe fn copy_out(data: &[f64], out: *mut c_double, len: usize) -> PqwStatus {
    if out.is_null() {
        set_last_error("null output buffer");
        return PqwStatus::NullPointer;
    }
    if len < data.len() {
        set_last_error(&format!("buffer holds {len} values but {} are needed", data.len()));
        return PqwStatus::BufferTooSmall;
    }
    std::ptr::copy_nonoverlapping(data.as_ptr(), out, data.len());
    PqwStatus::Ok
}

/// Copies the per-step squared Hilbert-Schmidt distances from the
/// maximally mixed coin state; `len` must be at least steps + 1.
///
/// # Safety
/// `handle` must be live and `out` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn pqw_experiment_distances(
    handle: *const PqwExperiment,
    out: *mut c_double,
    len: usize,
) -> PqwStatus {
    let Some(exp) = handle.as_ref() else {
        set_last_error("null experiment handle");
        return PqwStatus::NullPointer;
    };
    copy_out(&exp.result.distances, out, len)
}

/// Copies the distance error bars (errorbars mode only); `len` must be at
/// least steps + 1.
///
/// # Safety
/// `handle` must be live and `out` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn pqw_experiment_distance_errorbars(
    handle: *const PqwExperiment,
    out: *mut c_double,
    len: usize,
) -> PqwStatus {
    let Some(exp) = handle.as_ref() else {
        set_last_error("null experiment handle");
        return PqwStatus::NullPointer;
    };
    match &exp.result.distance_errorbars {
        Some(bars) => copy_out(bars, out, len),
        None => {
            set_last_error("error bars only exist in errorbars mode");
            PqwStatus::NotAvailable
        }
    }
}

/// Copies the per-step Stokes parameters, row-major (s0, s1, s2, s3) per
/// step; `len` must be at least 4 * (steps + 1).
///
/// # Safety
/// `handle` must be live and `out` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn pqw_experiment_stokes(
    handle: *const PqwExperiment,
    out: *mut c_double,
    len: usize,
) -> PqwStatus {
    let Some(exp) = handle.as_ref() else {
        set_last_error("null experiment handle");
        return PqwStatus::NullPointer;
    };
    let flat: Vec<f64> = exp
        .result
        .stokes
        .iter()
        .flat_map(|s| [s.s0, s.s1, s.s2, s.s3])
        .collect();
    copy_out(&flat, out, len)
}

/// Copies the averaged position distribution at `step`; `len` must be at
/// least the number of vertices.
///
/// # Safety
/// `handle` must be live and `out` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn pqw_experiment_positions(
    handle: *const PqwExperiment,
    step: usize,
    out: *mut c_double,
    len: usize,
) -> PqwStatus {
    let Some(exp) = handle.as_ref() else {
        set_last_error("null experiment handle");
        return PqwStatus::NullPointer;
    };
    let Some(row) = exp.result.positions.get(step) else {
        set_last_error(&format!(
            "step {step} out of range 0..={}",
            exp.result.positions.len().saturating_sub(1)
        ));
        return PqwStatus::NotAvailable;
    };
    copy_out(row, out, len)
}

/// Copies the vertex labels (centered on 0); `len` must be at least the
/// number of vertices.
///
/// # Safety
/// `handle` must be live and `out` must point to `len` 64-bit integers.
#[no_mangle]
pub unsafe extern "C" fn pqw_experiment_vertex_labels(
    handle: *const PqwExperiment,
    out: *mut i64,
    len: usize,
) -> PqwStatus {
    let Some(exp) = handle.as_ref() else {
        set_last_error("null experiment handle");
        return PqwStatus::NullPointer;
    };
    if out.is_null() {
        set_last_error("null output buffer");
        return PqwStatus::NullPointer;
    }
    if len < exp.result.labels.len() {
        set_last_error("label buffer too small");
        return PqwStatus::BufferTooSmall;
    }
    std::ptr::copy_nonoverlapping(exp.result.labels.as_ptr(), out, exp.result.labels.len());
    PqwStatus::Ok
}

/// Text of the most recent failure on this thread. Never null; valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pqw_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn pqw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
