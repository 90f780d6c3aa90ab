//! C ABI for `decosim`.
//!
//! Contexts are opaque heap handles created by `decosim_context_from_*` and
//! released with `decosim_context_free`. Every fallible call returns a
//! [`DecosimStatus`]; on failure `decosim_last_error_message` describes the
//! most recent error on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use decosim::config::ScenarioConfig;
use decosim::measure::{self, SearchPolicy};
use decosim::propagation::PropagationContext;
use decosim::qubit::{gate_time, PureState2};
use decosim::Error;
use num_complex::Complex64 as C64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecosimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DomainError = 3,
    ConfigError = 4,
    NoCrossing = 5,
    Internal = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecosimComplex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for DecosimComplex {
    fn from(z: C64) -> Self {
        DecosimComplex { re: z.re, im: z.im }
    }
}

/// Opaque simulation context.
pub struct DecosimContext {
    config: ScenarioConfig,
    ctx: PropagationContext,
    policy: SearchPolicy,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let text = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn fail(status: DecosimStatus, msg: impl Into<String>) -> DecosimStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> DecosimStatus {
    let status = match e {
        Error::Config(_) => DecosimStatus::ConfigError,
        Error::Domain(_) | Error::InvalidState(_) => DecosimStatus::DomainError,
        _ => DecosimStatus::Internal,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> DecosimStatus) -> DecosimStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(DecosimStatus::Internal, "internal panic"),
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, DecosimStatus> {
    if p.is_null() {
        return Err(fail(DecosimStatus::NullPointer, "string argument is null"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(DecosimStatus::InvalidArgument, "string is not valid UTF-8"))
}

fn build(config: ScenarioConfig, out: *mut *mut DecosimContext) -> DecosimStatus {
    match config.context() {
        Ok(ctx) => {
            let policy = config.search_policy();
            // SAFETY: caller checked `out` for null.
            unsafe { *out = Box::into_raw(Box::new(DecosimContext { config, ctx, policy })) };
            DecosimStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// Creates a context from a built-in preset (`"fig1"` or `"fig2"`).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn decosim_context_from_preset(name: *const c_char, out: *mut *mut DecosimContext) -> DecosimStatus {
    guard(|| {
        if out.is_null() {
            return fail(DecosimStatus::NullPointer, "out is null");
        }
        let name = match read_str(name) {
            Ok(s) => s,
            Err(s) => return s,
        };
        match ScenarioConfig::preset(name) {
            Ok(cfg) => build(cfg, out),
            Err(e) => from_error(e),
        }
    })
}

/// Creates a context from a JSON scenario document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn decosim_context_from_json(json: *const c_char, out: *mut *mut DecosimContext) -> DecosimStatus {
    guard(|| {
        if out.is_null() {
            return fail(DecosimStatus::NullPointer, "out is null");
        }
        let text = match read_str(json) {
            Ok(s) => s,
            Err(s) => return s,
        };
        match ScenarioConfig::from_json_str(text) {
            Ok(cfg) => build(cfg, out),
            Err(e) => from_error(e),
        }
    })
}

/// Releases a context. Null is ignored.
///
/// # Safety
/// `ctx` must come from a `decosim_context_from_*` call and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn decosim_context_free(ctx: *mut DecosimContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

unsafe fn context<'a>(ctx: *const DecosimContext) -> Result<&'a DecosimContext, DecosimStatus> {
    ctx.as_ref().ok_or_else(|| fail(DecosimStatus::NullPointer, "context is null"))
}

macro_rules! try_ffi {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

fn check_out<T>(p: *mut T) -> Result<(), DecosimStatus> {
    if p.is_null() {
        Err(fail(DecosimStatus::NullPointer, "output pointer is null"))
    } else {
        Ok(())
    }
}

/// Bath factors `W1(t)` and `W2(t)`.
///
/// # Safety
/// `ctx` must be a live context; `w1` and `w2` must be writable.
#[no_mangle]
pub unsafe extern "C" fn decosim_w_factors(
    ctx: *const DecosimContext,
    t: f64,
    w1: *mut DecosimComplex,
    w2: *mut DecosimComplex,
) -> DecosimStatus {
    guard(|| {
        let c = try_ffi!(context(ctx));
        try_ffi!(check_out(w1));
        try_ffi!(check_out(w2));
        if !t.is_finite() {
            return fail(DecosimStatus::InvalidArgument, "t must be finite");
        }
        let (a, b) = c.ctx.bath().w_factors(t);
        *w1 = a.into();
        *w2 = b.into();
        DecosimStatus::Ok
    })
}

/// λ-norm of the deviation for the pure state `a0|0⟩ + a1|1⟩` (charge basis,
/// normalized internally).
///
/// # Safety
/// `ctx` must be a live context; `norm` must be writable.
#[no_mangle]
pub unsafe extern "C" fn decosim_norm_at(
    ctx: *const DecosimContext,
    a0: DecosimComplex,
    a1: DecosimComplex,
    t: f64,
    norm: *mut f64,
) -> DecosimStatus {
    guard(|| {
        let c = try_ffi!(context(ctx));
        try_ffi!(check_out(norm));
        let state = match PureState2::normalized(C64::new(a0.re, a0.im), C64::new(a1.re, a1.im)) {
            Ok(s) => s,
            Err(e) => return from_error(e),
        };
        match measure::norm_at(&c.ctx, &state, t) {
            Ok(r) => {
                *norm = r.norm;
                DecosimStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// `D(t)` and the maximizer's Bloch angles on the system eigenbasis.
/// `theta` and `phi` may be null.
///
/// # Safety
/// `ctx` must be a live context; `d` must be writable.
#[no_mangle]
pub unsafe extern "C" fn decosim_d_of_t(
    ctx: *const DecosimContext,
    t: f64,
    d: *mut f64,
    theta: *mut f64,
    phi: *mut f64,
) -> DecosimStatus {
    guard(|| {
        let c = try_ffi!(context(ctx));
        try_ffi!(check_out(d));
        match measure::d_of_t(&c.ctx, t, &c.policy) {
            Ok(r) => {
                *d = r.norm;
                let (th, ph) = r.argmax_angles.unwrap_or((0.0, 0.0));
                if !theta.is_null() {
                    *theta = th;
                }
                if !phi.is_null() {
                    *phi = ph;
                }
                DecosimStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// First time `D(t)` reaches `threshold`. A non-positive `horizon` selects
/// the configured one. Returns `DECOSIM_STATUS_NO_CROSSING`, leaving
/// `*t_ld` untouched, when there is none.
///
/// # Safety
/// `ctx` must be a live context; `t_ld` must be writable.
#[no_mangle]
pub unsafe extern "C" fn decosim_low_decoherence_time(
    ctx: *const DecosimContext,
    threshold: f64,
    horizon: f64,
    t_ld: *mut f64,
) -> DecosimStatus {
    guard(|| {
        let c = try_ffi!(context(ctx));
        try_ffi!(check_out(t_ld));
        let horizon = if horizon > 0.0 { horizon } else { c.config.horizon(&c.ctx) };
        match measure::low_decoherence_time(&c.ctx, threshold, horizon, &c.policy) {
            Ok(Some(t)) => {
                *t_ld = t;
                DecosimStatus::Ok
            }
            Ok(None) => fail(DecosimStatus::NoCrossing, format!("no crossing of {threshold:e} within {horizon:e}")),
            Err(e) => from_error(e),
        }
    })
}

/// Gate time `ħ/E_J` in internal units and picoseconds. Either output may be null.
///
/// # Safety
/// Non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn decosim_gate_time(e_j: f64, internal: *mut f64, picoseconds: *mut f64) -> DecosimStatus {
    guard(|| match gate_time(e_j) {
        Ok(g) => {
            if !internal.is_null() {
                *internal = g.internal;
            }
            if !picoseconds.is_null() {
                *picoseconds = g.picoseconds();
            }
            DecosimStatus::Ok
        }
        Err(e) => from_error(e),
    })
}

/// Message for the last failed call on this thread; empty if none. Valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn decosim_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn decosim_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
