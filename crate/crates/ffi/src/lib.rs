//! C interface to the `catmads` solver.
//!
//! Objects cross the boundary as opaque handles created by `*_new` style
//! functions and released with the matching `*_free`. Every fallible call
//! returns a [`CatmadsStatus`]; on failure, [`catmads_last_error`] gives a
//! message for the calling thread. Strings returned by the library must be
//! released with [`catmads_string_free`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, c_int, c_void, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use catmads::blackbox::{make_problem, Blackbox, ProblemSpec, RawOutcome};
use catmads::domain::{Domain, Point, ProblemFile};
use catmads::solver::{solve, SolveResult, SolverConfig};
use catmads::Error;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatmadsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    UnknownProblem = 4,
    Domain = 5,
    NoFiniteDoe = 6,
    External = 7,
    Io = 8,
    /// The requested value does not exist (for example no feasible point).
    NotFound = 9,
    Panic = 10,
    Other = 11,
}

/// A problem: variables plus a blackbox.
pub struct CatmadsProblem {
    inner: ProblemSpec,
}

/// Solver settings.
pub struct CatmadsConfig {
    inner: SolverConfig,
}

/// Outcome of a solve.
pub struct CatmadsResult {
    inner: SolveResult,
}

/// User evaluation callback. `point_json` is
/// `{"cat":[labels],"int":[...],"cont":[...]}`. The callback writes the
/// objective to `f` and `n_constraints` values to `g`, returning 0 on success
/// and any other value for a failed evaluation.
pub type CatmadsEvalFn = Option<
    unsafe extern "C" fn(
        user_data: *mut c_void,
        point_json: *const c_char,
        f: *mut f64,
        g: *mut f64,
    ) -> c_int,
>;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> CatmadsStatus {
    match e {
        Error::Config(_) | Error::Json(_) | Error::OutOfRange(_) => CatmadsStatus::Config,
        Error::UnknownProblem { .. } => CatmadsStatus::UnknownProblem,
        Error::Domain(_) | Error::Structure(_) | Error::CategoryIndex { .. } => {
            CatmadsStatus::Domain
        }
        Error::NoFiniteDoe => CatmadsStatus::NoFiniteDoe,
        Error::External(_) => CatmadsStatus::External,
        Error::Io(_) | Error::Csv(_) | Error::Trace(_) => CatmadsStatus::Io,
        _ => CatmadsStatus::Other,
    }
}

/// Runs `f`, recording errors and converting panics.
fn guard(f: impl FnOnce() -> Result<(), (CatmadsStatus, String)>) -> CatmadsStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CatmadsStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CatmadsStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (CatmadsStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (CatmadsStatus, String) {
    (CatmadsStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (CatmadsStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (CatmadsStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), (CatmadsStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn catmads_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn catmads_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by the library.
#[no_mangle]
pub unsafe extern "C" fn catmads_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates a built-in problem by registry name.
#[no_mangle]
pub unsafe extern "C" fn catmads_problem_builtin(
    name: *const c_char,
    out: *mut *mut CatmadsProblem,
) -> CatmadsStatus {
    guard(|| {
        let name = read_str(name, "name")?;
        let inner = make_problem(name).map_err(lib_err)?;
        put(out, CatmadsProblem { inner })
    })
}

struct Callback {
    f: unsafe extern "C" fn(*mut c_void, *const c_char, *mut f64, *mut f64) -> c_int,
    user_data: *mut c_void,
    n_constraints: usize,
}

// The caller guarantees that the callback and its user data may be used
// from any thread for the lifetime of the problem.
unsafe impl Send for Callback {}
unsafe impl Sync for Callback {}

impl Blackbox for Callback {
    fn n_constraints(&self) -> usize {
        self.n_constraints
    }

    fn evaluate(&self, domain: &Domain, point: &Point) -> RawOutcome {
        let Ok(json) = CString::new(domain.point_to_json(point)) else {
            return RawOutcome::Fail;
        };
        let mut f = f64::NAN;
        let mut g = vec![f64::NAN; self.n_constraints];
        let code = catch_unwind(AssertUnwindSafe(|| unsafe {
            (self.f)(self.user_data, json.as_ptr(), &mut f, g.as_mut_ptr())
        }));
        match code {
            Ok(0) => RawOutcome::Ok { f, g },
            _ => RawOutcome::Fail,
        }
    }
}

/// Creates a problem from a definition (JSON, the problem-file format) and a
/// callback evaluating it. The callback may run on several threads when the
/// parallel mode is enabled.
#[no_mangle]
pub unsafe extern "C" fn catmads_problem_callback(
    definition_json: *const c_char,
    callback: CatmadsEvalFn,
    user_data: *mut c_void,
    out: *mut *mut CatmadsProblem,
) -> CatmadsStatus {
    guard(|| {
        let text = read_str(definition_json, "definition")?;
        let f = callback.ok_or_else(|| null("callback"))?;
        let file: ProblemFile =
            serde_json::from_str(text).map_err(|e| (CatmadsStatus::Config, e.to_string()))?;
        let domain = file.domain().map_err(lib_err)?;
        let bb = Callback {
            f,
            user_data,
            n_constraints: file.n_constraints,
        };
        put(
            out,
            CatmadsProblem {
                inner: ProblemSpec::new("callback", domain, Arc::new(bb)),
            },
        )
    })
}

/// Number of variables of a problem, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn catmads_problem_dimension(problem: *const CatmadsProblem) -> usize {
    problem.as_ref().map_or(0, |p| p.inner.domain.n())
}

#[no_mangle]
pub unsafe extern "C" fn catmads_problem_free(problem: *mut CatmadsProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Default solver settings.
#[no_mangle]
pub unsafe extern "C" fn catmads_config_default(out: *mut *mut CatmadsConfig) -> CatmadsStatus {
    guard(|| {
        put(
            out,
            CatmadsConfig {
                inner: SolverConfig::default(),
            },
        )
    })
}

/// Solver settings from JSON using the configuration field names.
#[no_mangle]
pub unsafe extern "C" fn catmads_config_from_json(
    json: *const c_char,
    out: *mut *mut CatmadsConfig,
) -> CatmadsStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        let inner = SolverConfig::from_json(text).map_err(lib_err)?;
        put(out, CatmadsConfig { inner })
    })
}

#[no_mangle]
pub unsafe extern "C" fn catmads_config_set_seed(
    config: *mut CatmadsConfig,
    seed: u64,
) -> CatmadsStatus {
    guard(|| {
        let c = config.as_mut().ok_or_else(|| null("config"))?;
        c.inner.seed = seed;
        Ok(())
    })
}

/// Sets the evaluation budget; 0 restores the per-variable default.
#[no_mangle]
pub unsafe extern "C" fn catmads_config_set_budget(
    config: *mut CatmadsConfig,
    budget: u64,
) -> CatmadsStatus {
    guard(|| {
        let c = config.as_mut().ok_or_else(|| null("config"))?;
        c.inner.budget = (budget > 0).then_some(budget);
        Ok(())
    })
}

/// Sets the extended-poll trigger; infinities are allowed, NaN is not.
#[no_mangle]
pub unsafe extern "C" fn catmads_config_set_xi(
    config: *mut CatmadsConfig,
    xi: f64,
) -> CatmadsStatus {
    guard(|| {
        let c = config.as_mut().ok_or_else(|| null("config"))?;
        if xi.is_nan() {
            return Err((CatmadsStatus::Config, "xi must not be NaN".into()));
        }
        c.inner.xi = xi;
        Ok(())
    })
}

/// Configuration as JSON; release with [`catmads_string_free`].
#[no_mangle]
pub unsafe extern "C" fn catmads_config_to_json(config: *const CatmadsConfig) -> *mut c_char {
    match config.as_ref() {
        Some(c) => serde_json::to_string(&c.inner).map_or(ptr::null_mut(), to_c_string),
        None => ptr::null_mut(),
    }
}

#[no_mangle]
pub unsafe extern "C" fn catmads_config_free(config: *mut CatmadsConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Runs the solver. Neither input handle is consumed.
#[no_mangle]
pub unsafe extern "C" fn catmads_solve(
    problem: *const CatmadsProblem,
    config: *const CatmadsConfig,
    out: *mut *mut CatmadsResult,
) -> CatmadsStatus {
    guard(|| {
        let p = problem.as_ref().ok_or_else(|| null("problem"))?;
        let c = config.as_ref().ok_or_else(|| null("config"))?;
        let inner = solve(p.inner.clone(), c.inner.clone()).map_err(lib_err)?;
        put(out, CatmadsResult { inner })
    })
}

/// Objective value of the best feasible point.
#[no_mangle]
pub unsafe extern "C" fn catmads_result_best_f(
    result: *const CatmadsResult,
    f: *mut f64,
) -> CatmadsStatus {
    guard(|| {
        let r = result.as_ref().ok_or_else(|| null("result"))?;
        if f.is_null() {
            return Err(null("output pointer"));
        }
        let v = r.inner.best_f().ok_or_else(|| {
            (
                CatmadsStatus::NotFound,
                "no feasible point was found".to_string(),
            )
        })?;
        *f = v;
        Ok(())
    })
}

/// Best feasible point as JSON, or null when there is none.
#[no_mangle]
pub unsafe extern "C" fn catmads_result_best_point(result: *const CatmadsResult) -> *mut c_char {
    match result
        .as_ref()
        .and_then(|r| r.inner.best_feasible.as_ref().map(|b| (r, b)))
    {
        Some((r, (p, _))) => to_c_string(r.inner.domain.point_to_json(p)),
        None => ptr::null_mut(),
    }
}

/// Number of blackbox evaluations spent.
#[no_mangle]
pub unsafe extern "C" fn catmads_result_evaluations(result: *const CatmadsResult) -> u64 {
    result.as_ref().map_or(0, |r| r.inner.evaluations)
}

/// Evaluation trace as CSV text.
#[no_mangle]
pub unsafe extern "C" fn catmads_result_trace_csv(result: *const CatmadsResult) -> *mut c_char {
    result
        .as_ref()
        .map_or(ptr::null_mut(), |r| to_c_string(r.inner.trace_csv()))
}

/// Termination reason: `"budget"` or `"mesh_minimum"`; release with
/// [`catmads_string_free`].
#[no_mangle]
pub unsafe extern "C" fn catmads_result_termination(result: *const CatmadsResult) -> *mut c_char {
    result.as_ref().map_or(ptr::null_mut(), |r| {
        to_c_string(r.inner.termination.to_string())
    })
}

#[no_mangle]
pub unsafe extern "C" fn catmads_result_free(result: *mut CatmadsResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}
