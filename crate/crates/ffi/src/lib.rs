//! C ABI for the iqpls solver.
//!
//! Problems and results are opaque handles owned by the caller and released
//! with the matching `*_free` function. Fallible calls return an
//! [`IqplsError`] code; the message for the last failure on the calling
//! thread is available from [`iqpls_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use iqpls::operators::PairTheta;
use iqpls::{normalize, parse_canonical, parse_qplib, solve, Problem, SolveResult, SolverConfig, Status};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IqplsError {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    Model = 5,
    Config = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IqplsFormat {
    Qplib = 0,
    Canonical = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IqplsStatus {
    Feasible = 0,
    /// No feasible assignment found before the cutoff.
    NotFound = 1,
}

/// Solver settings. Fill with [`iqpls_config_default`] before changing fields.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct IqplsConfig {
    pub time_limit: f64,
    pub seed: u64,
    pub bms_samples: u32,
    pub obj_weight_cap: u64,
    pub disable_exp: bool,
    pub disable_inc: bool,
    pub disable_free: bool,
    /// Use the objective slice of both variables in the equality move.
    pub literal_both_theta: bool,
    /// Iteration budget, 0 for none.
    pub max_iterations: u64,
    /// Iterations without a new best before a random reassignment, 0 to
    /// disable.
    pub stagnation_limit: u64,
}

pub struct IqplsProblem(Problem);

pub struct IqplsResult(SolveResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(code: IqplsError, msg: impl Into<String>) -> IqplsError {
    set_error(msg);
    code
}

fn guard(f: impl FnOnce() -> IqplsError) -> IqplsError {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => code,
        Err(_) => fail(IqplsError::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, IqplsError> {
    if s.is_null() {
        return Err(fail(IqplsError::NullPointer, "null string argument"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| fail(IqplsError::InvalidUtf8, e.to_string()))
}

fn build(text: &str, format: IqplsFormat) -> Result<Problem, IqplsError> {
    let raw = match format {
        IqplsFormat::Qplib => parse_qplib(text),
        IqplsFormat::Canonical => parse_canonical(text),
    }
    .map_err(|e| fail(IqplsError::Parse, e.to_string()))?;
    normalize(raw).map_err(|e| fail(IqplsError::Model, e.to_string()))
}

unsafe fn store<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn iqpls_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn iqpls_config_default() -> IqplsConfig {
    let d = SolverConfig::default();
    IqplsConfig {
        time_limit: d.time_limit,
        seed: d.seed,
        bms_samples: d.bms_samples as u32,
        obj_weight_cap: d.zeta,
        disable_exp: d.disable_exp,
        disable_inc: d.disable_inc,
        disable_free: d.disable_free,
        literal_both_theta: d.pair_theta == PairTheta::Both,
        max_iterations: d.max_iterations.unwrap_or(0),
        stagnation_limit: d.stagnation_limit,
    }
}

/// Parses a problem from a NUL-terminated string.
///
/// # Safety
/// `text` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn iqpls_problem_from_str(
    text: *const c_char,
    format: IqplsFormat,
    out: *mut *mut IqplsProblem,
) -> IqplsError {
    guard(|| {
        if out.is_null() {
            return fail(IqplsError::NullPointer, "null output pointer");
        }
        let text = match read_str(text) {
            Ok(t) => t,
            Err(code) => return code,
        };
        match build(text, format) {
            Ok(p) => {
                store(out, IqplsProblem(p));
                IqplsError::Ok
            }
            Err(code) => code,
        }
    })
}

/// Reads and parses a problem file.
///
/// # Safety
/// `path` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn iqpls_problem_from_file(
    path: *const c_char,
    format: IqplsFormat,
    out: *mut *mut IqplsProblem,
) -> IqplsError {
    guard(|| {
        if out.is_null() {
            return fail(IqplsError::NullPointer, "null output pointer");
        }
        let path = match read_str(path) {
            Ok(p) => p,
            Err(code) => return code,
        };
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return fail(IqplsError::Io, format!("{path}: {e}")),
        };
        match build(&text, format) {
            Ok(p) => {
                store(out, IqplsProblem(p));
                IqplsError::Ok
            }
            Err(code) => code,
        }
    })
}

/// # Safety
/// `problem` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn iqpls_problem_free(problem: *mut IqplsProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// # Safety
/// `problem` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn iqpls_problem_num_vars(problem: *const IqplsProblem) -> usize {
    problem.as_ref().map_or(0, |p| p.0.num_vars())
}

/// # Safety
/// `problem` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn iqpls_problem_num_constraints(problem: *const IqplsProblem) -> usize {
    problem.as_ref().map_or(0, |p| p.0.num_constraints())
}

/// Runs the solver. A null `config` uses the defaults.
///
/// # Safety
/// `problem` must be a live handle, `config` null or valid, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn iqpls_solve(
    problem: *const IqplsProblem,
    config: *const IqplsConfig,
    out: *mut *mut IqplsResult,
) -> IqplsError {
    guard(|| {
        let Some(problem) = problem.as_ref() else {
            return fail(IqplsError::NullPointer, "null problem");
        };
        if out.is_null() {
            return fail(IqplsError::NullPointer, "null output pointer");
        }
        let c = config.as_ref().copied().unwrap_or_else(|| iqpls_config_default());
        let config = SolverConfig {
            time_limit: c.time_limit,
            seed: c.seed,
            bms_samples: c.bms_samples as usize,
            zeta: c.obj_weight_cap,
            disable_exp: c.disable_exp,
            disable_inc: c.disable_inc,
            disable_free: c.disable_free,
            pair_theta: if c.literal_both_theta { PairTheta::Both } else { PairTheta::Union },
            max_iterations: (c.max_iterations > 0).then_some(c.max_iterations),
            stagnation_limit: c.stagnation_limit,
        };
        match solve(&problem.0, &config) {
            Ok(r) => {
                store(out, IqplsResult(r));
                IqplsError::Ok
            }
            Err(e) => fail(IqplsError::Config, e.to_string()),
        }
    })
}

/// # Safety
/// `result` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn iqpls_result_free(result: *mut IqplsResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn iqpls_result_status(result: *const IqplsResult) -> IqplsStatus {
    match result.as_ref().map(|r| r.0.status) {
        Some(Status::Feasible) => IqplsStatus::Feasible,
        _ => IqplsStatus::NotFound,
    }
}

/// Best objective in the problem's declared sense. Writes nothing and
/// returns false when no feasible assignment was found.
///
/// # Safety
/// `result` must be a live handle and `objective` valid.
#[no_mangle]
pub unsafe extern "C" fn iqpls_result_objective(result: *const IqplsResult, objective: *mut f64) -> bool {
    match (result.as_ref().and_then(|r| r.0.objective), objective.is_null()) {
        (Some(v), false) => {
            *objective = v;
            true
        }
        _ => false,
    }
}

/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn iqpls_result_iterations(result: *const IqplsResult) -> u64 {
    result.as_ref().map_or(0, |r| r.0.stats.iterations)
}

/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn iqpls_result_elapsed(result: *const IqplsResult) -> f64 {
    result.as_ref().map_or(0.0, |r| r.0.stats.elapsed)
}

/// Copies the best assignment into `values`, which holds `len` entries.
/// `written` receives the number of variables even when the buffer is too
/// small. Fails with `Model` when the result has no assignment.
///
/// # Safety
/// `result` must be a live handle, `values` valid for `len` writes, and
/// `written` null or valid.
#[no_mangle]
pub unsafe extern "C" fn iqpls_result_values(
    result: *const IqplsResult,
    values: *mut i64,
    len: usize,
    written: *mut usize,
) -> IqplsError {
    guard(|| {
        let Some(result) = result.as_ref() else {
            return fail(IqplsError::NullPointer, "null result");
        };
        let Some(x) = result.0.assignment.as_deref() else {
            return fail(IqplsError::Model, "no feasible assignment");
        };
        if !written.is_null() {
            *written = x.len();
        }
        if len < x.len() {
            return fail(IqplsError::BufferTooSmall, format!("need {} values, got {len}", x.len()));
        }
        if values.is_null() {
            return fail(IqplsError::NullPointer, "null value buffer");
        }
        ptr::copy_nonoverlapping(x.as_ptr(), values, x.len());
        IqplsError::Ok
    })
}
