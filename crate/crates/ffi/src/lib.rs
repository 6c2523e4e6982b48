//! C interface to the asbec optimizer.
//!
//! Every function returns an [`AsbecStatus`]; on failure a description is
//! kept per thread and can be read with [`asbec_last_error_message`]. Runs are
//! opaque [`AsbecRun`] handles released with [`asbec_run_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::OnceLock;

use asbec::experiment::{ConfigSpec, ExperimentConfig, Resolved};
use asbec::{Error, FunctionId, RunOutcome};

/// Result code of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AsbecStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    UnknownFunction = 3,
    UnknownConfig = 4,
    InvalidConfig = 5,
    OutOfRange = 6,
    BufferTooSmall = 7,
    Internal = 8,
}

/// One entry of a best-so-far trace.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AsbecPoint {
    pub evals: u64,
    pub time: u64,
    pub best_f: f64,
}

/// A finished run.
pub struct AsbecRun {
    outcome: RunOutcome,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: AsbecStatus, msg: impl Into<String>) -> AsbecStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> AsbecStatus {
    let status = match e {
        Error::UnknownFunction(_) => AsbecStatus::UnknownFunction,
        Error::UnknownConfig(_) => AsbecStatus::UnknownConfig,
        Error::Config(_) | Error::Json(_) => AsbecStatus::InvalidConfig,
        Error::InvalidArgument(_) => AsbecStatus::InvalidArgument,
        _ => AsbecStatus::Internal,
    };
    fail(status, e.to_string())
}

/// Runs `f`, turning a panic into `Internal`.
fn guard(f: impl FnOnce() -> AsbecStatus) -> AsbecStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(AsbecStatus::Internal, format!("internal error: {msg}"))
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, AsbecStatus> {
    if p.is_null() {
        return Err(fail(AsbecStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(AsbecStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

fn finish(resolved: Resolved, id: FunctionId, seed: u64, out: *mut *mut AsbecRun) -> AsbecStatus {
    match resolved.run(id, seed) {
        Ok(outcome) => {
            // SAFETY: checked non-null by the callers.
            unsafe { *out = Box::into_raw(Box::new(AsbecRun { outcome })) };
            AsbecStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// Message of the last failed call on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn asbec_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Number of benchmark functions.
#[no_mangle]
pub extern "C" fn asbec_function_count() -> usize {
    FunctionId::ALL.len()
}

/// Id of function `index` as a static string, or null when out of range.
#[no_mangle]
pub extern "C" fn asbec_function_name(index: usize) -> *const c_char {
    static NAMES: OnceLock<Vec<CString>> = OnceLock::new();
    let names = NAMES.get_or_init(|| {
        FunctionId::ALL
            .iter()
            .map(|id| CString::new(id.as_str()).expect("ids have no NUL"))
            .collect()
    });
    names.get(index).map_or(ptr::null(), |c| c.as_ptr())
}

/// Runs the named configuration on `function` and stores the handle in `*out`.
///
/// # Safety
/// `function` and `config` must be NUL-terminated strings and `out` a valid
/// pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn asbec_run_new(
    function: *const c_char,
    config: *const c_char,
    seed: u64,
    budget: u64,
    out: *mut *mut AsbecRun,
) -> AsbecStatus {
    guard(|| {
        if out.is_null() {
            return fail(AsbecStatus::NullPointer, "out is null");
        }
        let (function, config) = match (read_str(function, "function"), read_str(config, "config")) {
            (Ok(f), Ok(c)) => (f, c),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let id: FunctionId = match function.parse() {
            Ok(id) => id,
            Err(e) => return from_error(e),
        };
        match Resolved::preset(config, budget) {
            Ok(r) => finish(r, id, seed, out),
            Err(e) => from_error(e),
        }
    })
}

/// Like [`asbec_run_new`], with the configuration given as a JSON object
/// (`label`, optional `tech`, `plan` and `budget`). The budget defaults to 1600.
///
/// # Safety
/// Same as [`asbec_run_new`].
#[no_mangle]
pub unsafe extern "C" fn asbec_run_from_json(
    function: *const c_char,
    json: *const c_char,
    seed: u64,
    out: *mut *mut AsbecRun,
) -> AsbecStatus {
    guard(|| {
        if out.is_null() {
            return fail(AsbecStatus::NullPointer, "out is null");
        }
        let (function, json) = match (read_str(function, "function"), read_str(json, "json")) {
            (Ok(f), Ok(j)) => (f, j),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let id: FunctionId = match function.parse() {
            Ok(id) => id,
            Err(e) => return from_error(e),
        };
        let spec: ConfigSpec = match serde_json::from_str(json) {
            Ok(s) => s,
            Err(e) => return from_error(e.into()),
        };
        match ExperimentConfig::default().resolve(&spec) {
            Ok(r) => finish(r, id, seed, out),
            Err(e) => from_error(e),
        }
    })
}

/// Releases a run. Null is ignored.
///
/// # Safety
/// `run` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn asbec_run_free(run: *mut AsbecRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Number of trace points, one per function evaluation. Zero for null.
///
/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn asbec_run_len(run: *const AsbecRun) -> usize {
    run.as_ref().map_or(0, |r| r.outcome.combined.len())
}

/// Copies trace point `index` into `*point`.
///
/// # Safety
/// `run` must be a live handle and `point` writable.
#[no_mangle]
pub unsafe extern "C" fn asbec_run_point(run: *const AsbecRun, index: usize, point: *mut AsbecPoint) -> AsbecStatus {
    let (Some(r), false) = (run.as_ref(), point.is_null()) else {
        return fail(AsbecStatus::NullPointer, "run or point is null");
    };
    match r.outcome.combined.points().get(index) {
        Some(p) => {
            *point = AsbecPoint {
                evals: p.evals,
                time: p.time,
                best_f: p.best_f,
            };
            AsbecStatus::Ok
        }
        None => fail(
            AsbecStatus::OutOfRange,
            format!("index {index} out of range for {} points", r.outcome.combined.len()),
        ),
    }
}

/// Best objective value found.
///
/// # Safety
/// `run` must be a live handle and `best_f` writable.
#[no_mangle]
pub unsafe extern "C" fn asbec_run_best_f(run: *const AsbecRun, best_f: *mut f64) -> AsbecStatus {
    let (Some(r), false) = (run.as_ref(), best_f.is_null()) else {
        return fail(AsbecStatus::NullPointer, "run or best_f is null");
    };
    *best_f = r.outcome.best_f;
    AsbecStatus::Ok
}

/// Copies the best position into `buf`. `*dim` receives the dimension in
/// every case; a short buffer yields `BufferTooSmall` and nothing is copied,
/// so a null `buf` with `len` 0 queries the size.
///
/// # Safety
/// `run` must be a live handle, `dim` writable, and `buf` valid for `len`
/// doubles when `len` is non-zero.
#[no_mangle]
pub unsafe extern "C" fn asbec_run_best_position(
    run: *const AsbecRun,
    buf: *mut f64,
    len: usize,
    dim: *mut usize,
) -> AsbecStatus {
    let (Some(r), false) = (run.as_ref(), dim.is_null()) else {
        return fail(AsbecStatus::NullPointer, "run or dim is null");
    };
    let x = &r.outcome.best_position;
    *dim = x.len();
    if len < x.len() {
        return fail(
            AsbecStatus::BufferTooSmall,
            format!("buffer holds {len} values, position has {}", x.len()),
        );
    }
    if buf.is_null() {
        return fail(AsbecStatus::NullPointer, "buf is null");
    }
    ptr::copy_nonoverlapping(x.as_ptr(), buf, x.len());
    AsbecStatus::Ok
}
