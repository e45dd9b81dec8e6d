//! C interface to the simulator.
//!
//! Objects are opaque handles created by `*_new`/`*_from_json` and released by the matching
//! `*_free`. Every fallible function returns one of the `MUSKAT_*` status codes; the message
//! of the most recent failure on the calling thread is available from
//! [`muskat_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use muskat::evolution::Simulation;
use muskat::io::{parse_scenario_str, Scenario};
use muskat::linear;
use muskat::MuskatError;

pub const MUSKAT_OK: c_int = 0;
pub const MUSKAT_ERR_NULL: c_int = 1;
pub const MUSKAT_ERR_UTF8: c_int = 2;
pub const MUSKAT_ERR_VALIDATION: c_int = 3;
pub const MUSKAT_ERR_PARAMETER: c_int = 4;
pub const MUSKAT_ERR_COLLISION: c_int = 5;
pub const MUSKAT_ERR_NUMERICAL: c_int = 6;
pub const MUSKAT_ERR_BUFFER: c_int = 7;
pub const MUSKAT_ERR_PANIC: c_int = 8;
pub const MUSKAT_ERR_OTHER: c_int = 9;

/// A parsed and validated scenario.
pub struct MuskatScenario {
    inner: Scenario,
}

/// A running two-interface simulation.
pub struct MuskatSimulation {
    inner: Simulation,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn code_of(e: &MuskatError) -> c_int {
    match e {
        MuskatError::Validation { .. } | MuskatError::InvalidInput(_) => MUSKAT_ERR_VALIDATION,
        MuskatError::Parameter(_) => MUSKAT_ERR_PARAMETER,
        MuskatError::ContourCollision { .. } => MUSKAT_ERR_COLLISION,
        MuskatError::NumericalFailure { .. } => MUSKAT_ERR_NUMERICAL,
        _ => MUSKAT_ERR_OTHER,
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), c_int>) -> c_int {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MUSKAT_OK,
        Ok(Err(code)) => code,
        Err(_) => {
            set_error("internal panic");
            MUSKAT_ERR_PANIC
        }
    }
}

fn fail(e: MuskatError) -> c_int {
    let code = code_of(&e);
    set_error(e.to_string());
    code
}

fn null(what: &str) -> c_int {
    set_error(format!("{what} is null"));
    MUSKAT_ERR_NULL
}

/// Copies the last error message of this thread into `buf` (NUL-terminated, truncated to
/// `len`). Returns the full message length in bytes, excluding the terminator.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes of writes.
#[no_mangle]
pub unsafe extern "C" fn muskat_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Parses a scenario document. On success `*out` owns a new handle.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn muskat_scenario_from_json(
    json: *const c_char,
    out: *mut *mut MuskatScenario,
) -> c_int {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|_| {
            set_error("scenario text is not UTF-8");
            MUSKAT_ERR_UTF8
        })?;
        let inner = parse_scenario_str(text).map_err(fail)?;
        *out = Box::into_raw(Box::new(MuskatScenario { inner }));
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a handle from [`muskat_scenario_from_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn muskat_scenario_free(s: *mut MuskatScenario) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Nodes per axis of the scenario grid.
///
/// # Safety
/// `s` must be a live scenario handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn muskat_scenario_resolution(
    s: *const MuskatScenario,
    out: *mut usize,
) -> c_int {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("scenario"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = s.inner.grid.resolution;
        Ok(())
    })
}

/// Builds the initial state of a scenario and prepares to step it.
///
/// # Safety
/// `s` must be a live scenario handle and `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn muskat_simulation_new(
    s: *const MuskatScenario,
    out: *mut *mut MuskatSimulation,
) -> c_int {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("scenario"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let sc = &s.inner;
        let build = || -> muskat::Result<Simulation> {
            let pair = sc.build_pair()?;
            let op = sc.operator(&pair)?;
            Simulation::new(pair, sc.control()?, op)
        };
        let inner = build().map_err(fail)?;
        *out = Box::into_raw(Box::new(MuskatSimulation { inner }));
        Ok(())
    })
}

/// # Safety
/// `sim` must be null or a handle from [`muskat_simulation_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn muskat_simulation_free(sim: *mut MuskatSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Advances one time step (a no-op once the end time is reached).
///
/// # Safety
/// `sim` must be a live simulation handle.
#[no_mangle]
pub unsafe extern "C" fn muskat_simulation_step(sim: *mut MuskatSimulation) -> c_int {
    guard(|| {
        let sim = sim.as_mut().ok_or_else(|| null("simulation"))?;
        sim.inner.step().map_err(fail)
    })
}

/// Steps until the scenario's end time.
///
/// # Safety
/// `sim` must be a live simulation handle.
#[no_mangle]
pub unsafe extern "C" fn muskat_simulation_run_to_end(sim: *mut MuskatSimulation) -> c_int {
    guard(|| {
        let sim = sim.as_mut().ok_or_else(|| null("simulation"))?;
        while !sim.inner.finished() {
            sim.inner.step().map_err(fail)?;
        }
        Ok(())
    })
}

/// Current time and step count.
///
/// # Safety
/// `sim` must be a live simulation handle; `t` and `steps` must each be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn muskat_simulation_time(
    sim: *const MuskatSimulation,
    t: *mut f64,
    steps: *mut u64,
) -> c_int {
    guard(|| {
        let sim = sim.as_ref().ok_or_else(|| null("simulation"))?;
        let state = sim.inner.state();
        if !t.is_null() {
            *t = state.t;
        }
        if !steps.is_null() {
            *steps = state.step_count;
        }
        Ok(())
    })
}

/// Copies both surfaces, row-major, into `f` and `g`, each of length `len = N * N`.
///
/// # Safety
/// `sim` must be a live simulation handle; `f` and `g` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn muskat_simulation_heights(
    sim: *const MuskatSimulation,
    f: *mut f64,
    g: *mut f64,
    len: usize,
) -> c_int {
    guard(|| {
        let sim = sim.as_ref().ok_or_else(|| null("simulation"))?;
        if f.is_null() || g.is_null() {
            return Err(null("output buffer"));
        }
        let pair = &sim.inner.state().pair;
        let (fv, gv) = (pair.f().values(), pair.g().values());
        if len != fv.len() {
            set_error(format!(
                "buffers hold {len} values, surfaces have {}",
                fv.len()
            ));
            return Err(MUSKAT_ERR_BUFFER);
        }
        std::ptr::copy_nonoverlapping(fv.as_ptr(), f, len);
        std::ptr::copy_nonoverlapping(gv.as_ptr(), g, len);
        Ok(())
    })
}

/// Linearized self-interaction rate `-(a/2)|k|`.
#[no_mangle]
pub extern "C" fn muskat_self_symbol(k1: f64, k2: f64, a: f64) -> f64 {
    linear::self_symbol([k1, k2], a)
}

/// Linearized cross-interaction rate `-(a/2)|k| exp(-h|k|)`; `h` must be positive.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn muskat_cross_symbol(
    k1: f64,
    k2: f64,
    a: f64,
    h: f64,
    out: *mut f64,
) -> c_int {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = linear::cross_symbol([k1, k2], a, h).map_err(fail)?;
        Ok(())
    })
}
