//! C ABI for the graphforms library.
//!
//! Problems and reports are opaque handles; every function returns a status
//! code and writes results through out-pointers. Strings returned by this
//! library are heap-allocated and must be released with
//! [`gf_string_free`]. The most recent error message per thread is available
//! through [`gf_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use graphforms::driver::{run_command, RunOptions};
use graphforms::error::Error;
use graphforms::problem::{build_problem, parse_problem, BuiltProblem};
use graphforms::report::Report;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GfStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    IoError = 3,
    ParseError = 4,
    DomainError = 5,
}

/// Opaque handle for a parsed and validated problem.
pub struct GfProblem {
    built: BuiltProblem,
    raw: Vec<u8>,
}

/// Opaque handle for a finished report.
pub struct GfReport {
    report: Report,
}

/// Options for [`gf_run`]. `mu_max <= 0` and `grid == 0` mean
/// "use the problem's solver configuration".
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GfRunOptions {
    pub seed: u64,
    pub trials: u32,
    pub tol: f64,
    pub mu_max: f64,
    pub grid: u32,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> GfStatus {
    match err {
        Error::Io(_) => GfStatus::IoError,
        Error::SchemaError(_) | Error::DimensionMismatch(_) => GfStatus::ParseError,
        _ => GfStatus::DomainError,
    }
}

/// Default options: seed 0, 20 trials, tolerance 1e-9, solver settings from
/// the problem file.
#[no_mangle]
pub extern "C" fn gf_run_options_default() -> GfRunOptions {
    GfRunOptions { seed: 0, trials: 20, tol: 1e-9, mu_max: 0.0, grid: 0 }
}

/// Parses a problem file from disk. On success writes a handle to `out`.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gf_problem_load(
    path: *const c_char,
    out: *mut *mut GfProblem,
) -> GfStatus {
    if path.is_null() || out.is_null() {
        return GfStatus::NullArgument;
    }
    let path = match CStr::from_ptr(path).to_str() {
        Ok(s) => s,
        Err(_) => return GfStatus::InvalidUtf8,
    };
    let raw = match std::fs::read(Path::new(path)) {
        Ok(b) => b,
        Err(e) => {
            set_error(format!("{e}"));
            return GfStatus::IoError;
        }
    };
    match parse_problem(Path::new(path)) {
        Ok(built) => {
            *out = Box::into_raw(Box::new(GfProblem { built, raw }));
            GfStatus::Ok
        }
        Err(e) => {
            set_error(format!("{e}"));
            *out = ptr::null_mut();
            status_of(&e)
        }
    }
}

/// Parses a problem document from a JSON string.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gf_problem_from_json(
    json: *const c_char,
    out: *mut *mut GfProblem,
) -> GfStatus {
    if json.is_null() || out.is_null() {
        return GfStatus::NullArgument;
    }
    let bytes = CStr::from_ptr(json).to_bytes();
    match build_problem(bytes) {
        Ok(built) => {
            *out = Box::into_raw(Box::new(GfProblem { built, raw: bytes.to_vec() }));
            GfStatus::Ok
        }
        Err(e) => {
            set_error(format!("{e}"));
            *out = ptr::null_mut();
            status_of(&e)
        }
    }
}

/// Loads one of the bundled presets by name.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gf_problem_preset(
    name: *const c_char,
    out: *mut *mut GfProblem,
) -> GfStatus {
    if name.is_null() || out.is_null() {
        return GfStatus::NullArgument;
    }
    let name = match CStr::from_ptr(name).to_str() {
        Ok(s) => s,
        Err(_) => return GfStatus::InvalidUtf8,
    };
    match graphforms::presets::lookup(name) {
        Some(doc) => {
            let c = CString::new(doc).expect("presets contain no NUL");
            gf_problem_from_json(c.as_ptr(), out)
        }
        None => {
            set_error(format!(
                "unknown preset `{name}`; presets: {}",
                graphforms::presets::names().join(", ")
            ));
            GfStatus::ParseError
        }
    }
}

/// Releases a problem handle. Null is ignored.
///
/// # Safety
/// `p` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn gf_problem_free(p: *mut GfProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Runs a verification command (`betti`, `index`, `hodge`, `spectrum`,
/// `relations`, `metric-kernel`, `metric-spectrum`, `scatter`, `curvature`,
/// `fuzz`) and writes a report handle to `out`.
///
/// # Safety
/// All pointers must be valid; `command` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn gf_run(
    problem: *const GfProblem,
    command: *const c_char,
    options: *const GfRunOptions,
    out: *mut *mut GfReport,
) -> GfStatus {
    if problem.is_null() || command.is_null() || out.is_null() {
        return GfStatus::NullArgument;
    }
    let command = match CStr::from_ptr(command).to_str() {
        Ok(s) => s,
        Err(_) => return GfStatus::InvalidUtf8,
    };
    let opts = if options.is_null() { gf_run_options_default() } else { *options };
    let run_opts = RunOptions {
        seed: opts.seed,
        trials: opts.trials as usize,
        tol: opts.tol,
        mu_max: if opts.mu_max > 0.0 { Some(opts.mu_max) } else { None },
        grid: if opts.grid > 0 { Some(opts.grid as usize) } else { None },
    };
    let p = &*problem;
    match run_command(command, &p.built, &p.raw, &run_opts) {
        Ok(report) => {
            *out = Box::into_raw(Box::new(GfReport { report }));
            GfStatus::Ok
        }
        Err(e) => {
            set_error(format!("{e}"));
            *out = ptr::null_mut();
            status_of(&e)
        }
    }
}

/// 1 when every check in the report passed, 0 otherwise.
///
/// # Safety
/// `report` must be a live handle from [`gf_run`].
#[no_mangle]
pub unsafe extern "C" fn gf_report_passed(report: *const GfReport) -> i32 {
    if report.is_null() {
        return 0;
    }
    i32::from((*report).report.all_pass())
}

/// JSON rendering of the report; free with [`gf_string_free`].
///
/// # Safety
/// `report` must be a live handle from [`gf_run`].
#[no_mangle]
pub unsafe extern "C" fn gf_report_json(report: *const GfReport) -> *mut c_char {
    if report.is_null() {
        return ptr::null_mut();
    }
    let json = (*report).report.to_json();
    CString::new(json).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Text-table rendering of the report; free with [`gf_string_free`].
///
/// # Safety
/// `report` must be a live handle from [`gf_run`].
#[no_mangle]
pub unsafe extern "C" fn gf_report_text(report: *const GfReport) -> *mut c_char {
    if report.is_null() {
        return ptr::null_mut();
    }
    let text = (*report).report.to_text();
    CString::new(text).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Releases a report handle. Null is ignored.
///
/// # Safety
/// `r` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn gf_report_free(r: *mut GfReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Copy of the most recent error message on this thread, or null; free with
/// [`gf_string_free`].
#[no_mangle]
pub extern "C" fn gf_last_error() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(msg) => msg.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// Releases a string allocated by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn gf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
