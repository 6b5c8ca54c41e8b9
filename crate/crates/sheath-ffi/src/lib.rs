//! C ABI over the sheath solver.
//!
//! Conventions: every fallible call returns a `SheathStatus`; on failure a
//! thread-local message is readable via `sheath_last_error`. Handles are
//! opaque pointers created and destroyed by this library; passing a handle
//! to the wrong `_free` is undefined behavior, passing NULL anywhere is not
//! (it yields `NullArgument`).

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use sheath_core::config::RunConfig;
use sheath_core::diagnostics::quadratic_form_check;
use sheath_core::evolution::{
    evolve, make_initial_perturbation, EvolutionState, PerturbationSpec, StepOptions,
};
use sheath_core::params::{
    classify_regime, degenerate_gamma, derived_constants, RegimeKind, DEFAULT_CLASSIFY_TOL,
};
use sheath_core::stationary::{
    solve_stationary, GridRequest, SheathProfile as CoreProfile, StationaryOptions,
};
use sheath_core::SheathError;

/// Result code for every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SheathStatus {
    Ok = 0,
    /// A required pointer argument was NULL or a buffer was too small.
    NullArgument = 1,
    /// Parameters, configuration text, or regime preconditions were invalid.
    InvalidInput = 2,
    /// A solver failed to converge or a physical guard tripped.
    NumericalFailure = 3,
    /// Filesystem or encoding problem.
    IoFailure = 4,
    /// A bug: the library panicked and the unwind was caught at the boundary.
    InternalPanic = 5,
}

/// Opaque parsed configuration.
pub struct SheathConfig {
    inner: RunConfig,
}

/// Opaque stationary profile on a uniform grid.
pub struct SheathProfileHandle {
    inner: CoreProfile,
}

/// Opaque time-dependent state.
pub struct SheathStateHandle {
    inner: EvolutionState,
}

/// Regime classification and derived constants, by value.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SheathClassify {
    /// 0 subsonic, 1 forbidden band, 2 degenerate, 3 nondegenerate
    pub regime: i32,
    pub margin: f64,
    pub c_crit: f64,
    pub gamma_const: f64,
    pub f_at_c: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &SheathError) -> SheathStatus {
    match err {
        SheathError::InvalidParams(_) | SheathError::Config(_) => SheathStatus::InvalidInput,
        SheathError::Io(_) => SheathStatus::IoFailure,
        _ => SheathStatus::NumericalFailure,
    }
}

fn fail(err: SheathError) -> SheathStatus {
    let code = status_of(&err);
    set_error(&err.to_string());
    code
}

fn guarded(f: impl FnOnce() -> SheathStatus) -> SheathStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => code,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic with non-string payload".into());
            set_error(&format!("internal panic: {msg}"));
            SheathStatus::InternalPanic
        }
    }
}

macro_rules! nonnull {
    ($p:expr) => {
        match unsafe { $p.as_ref() } {
            Some(r) => r,
            None => {
                set_error(concat!(stringify!($p), " is NULL"));
                return SheathStatus::NullArgument;
            }
        }
    };
}

fn write_out<T>(out: *mut T, value: T) -> SheathStatus {
    if out.is_null() {
        set_error("output pointer is NULL");
        return SheathStatus::NullArgument;
    }
    unsafe { out.write(value) };
    SheathStatus::Ok
}

/// Copy the last error message (NUL-terminated, truncated to `cap`) into
/// `buf`. Returns the full message length in bytes, excluding the NUL.
#[no_mangle]
pub extern "C" fn sheath_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            unsafe {
                std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
                buf.add(n).write(0);
            }
        }
        bytes.len()
    })
}

/// Static library version string.
#[no_mangle]
pub extern "C" fn sheath_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Parse a TOML configuration from a NUL-terminated string.
#[no_mangle]
pub extern "C" fn sheath_config_parse(
    text: *const c_char,
    out: *mut *mut SheathConfig,
) -> SheathStatus {
    guarded(|| {
        if text.is_null() {
            set_error("text is NULL");
            return SheathStatus::NullArgument;
        }
        let s = match unsafe { CStr::from_ptr(text) }.to_str() {
            Ok(s) => s,
            Err(_) => {
                set_error("config text is not valid UTF-8");
                return SheathStatus::InvalidInput;
            }
        };
        let cfg = match RunConfig::from_toml_str(s).and_then(|c| {
            c.validate()?;
            Ok(c)
        }) {
            Ok(c) => c,
            Err(e) => return fail(e),
        };
        write_out(out, Box::into_raw(Box::new(SheathConfig { inner: cfg })))
    })
}

#[no_mangle]
pub extern "C" fn sheath_config_free(cfg: *mut SheathConfig) {
    if !cfg.is_null() {
        drop(unsafe { Box::from_raw(cfg) });
    }
}

/// Classify the far-field state and report derived constants.
#[no_mangle]
pub extern "C" fn sheath_classify(
    cfg: *const SheathConfig,
    out: *mut SheathClassify,
) -> SheathStatus {
    guarded(|| {
        let cfg = nonnull!(cfg);
        let params = match cfg.inner.params() {
            Ok(p) => p,
            Err(e) => return fail(e),
        };
        let regime = match classify_regime(&params, DEFAULT_CLASSIFY_TOL) {
            Ok(r) => r,
            Err(e) => return fail(e),
        };
        let derived = match derived_constants(&params, &regime) {
            Ok(d) => d,
            Err(e) => return fail(e),
        };
        let kind = match regime.kind {
            RegimeKind::Subsonic => 0,
            RegimeKind::ForbiddenBand => 1,
            RegimeKind::Degenerate => 2,
            RegimeKind::Nondegenerate => 3,
        };
        write_out(
            out,
            SheathClassify {
                regime: kind,
                margin: regime.margin,
                c_crit: derived.c_crit,
                gamma_const: derived.gamma_const.unwrap_or(f64::NAN),
                f_at_c: derived.f_at_c,
            },
        )
    })
}

/// Solve the boundary-value problem for the stationary profile.
#[no_mangle]
pub extern "C" fn sheath_stationary_solve(
    cfg: *const SheathConfig,
    out: *mut *mut SheathProfileHandle,
) -> SheathStatus {
    guarded(|| {
        let cfg = nonnull!(cfg);
        let params = match cfg.inner.params() {
            Ok(p) => p,
            Err(e) => return fail(e),
        };
        let opts = StationaryOptions {
            eps_tail: cfg.inner.stationary.eps_tail,
            table_segments: cfg.inner.stationary.table_segments,
            quad_tol: cfg.inner.stationary.quad_tol,
            classify_tol: DEFAULT_CLASSIFY_TOL,
        };
        let grid = GridRequest {
            length: cfg.inner.grid.length,
            n_cells: cfg.inner.grid.n_cells,
        };
        match solve_stationary(&params, &grid, &opts) {
            Ok(p) => write_out(out, Box::into_raw(Box::new(SheathProfileHandle { inner: p }))),
            Err(e) => fail(e),
        }
    })
}

/// Number of grid nodes in a profile.
#[no_mangle]
pub extern "C" fn sheath_profile_len(profile: *const SheathProfileHandle) -> usize {
    match unsafe { profile.as_ref() } {
        Some(p) => p.inner.x.len(),
        None => 0,
    }
}

/// Copy profile columns into caller buffers of capacity `cap` nodes.
/// Any of the destination pointers may be NULL to skip that column.
#[no_mangle]
pub extern "C" fn sheath_profile_copy(
    profile: *const SheathProfileHandle,
    x: *mut f64,
    phi: *mut f64,
    n: *mut f64,
    u: *mut f64,
    temp: *mut f64,
    cap: usize,
) -> SheathStatus {
    guarded(|| {
        let p = nonnull!(profile);
        let len = p.inner.x.len();
        if cap < len {
            set_error("destination capacity is smaller than the profile length");
            return SheathStatus::NullArgument;
        }
        let copy = |dst: *mut f64, src: &[f64]| {
            if !dst.is_null() {
                unsafe { std::ptr::copy_nonoverlapping(src.as_ptr(), dst, len) };
            }
        };
        copy(x, &p.inner.x);
        copy(phi, &p.inner.phi);
        copy(n, &p.inner.n);
        copy(u, &p.inner.u);
        copy(temp, &p.inner.t);
        SheathStatus::Ok
    })
}

#[no_mangle]
pub extern "C" fn sheath_profile_free(profile: *mut SheathProfileHandle) {
    if !profile.is_null() {
        drop(unsafe { Box::from_raw(profile) });
    }
}

/// Perturb the profile per the configuration and march to `t_end`
/// (`t_end <= 0` uses the configured horizon).
#[no_mangle]
pub extern "C" fn sheath_evolve(
    cfg: *const SheathConfig,
    profile: *const SheathProfileHandle,
    t_end: f64,
    out: *mut *mut SheathStateHandle,
) -> SheathStatus {
    guarded(|| {
        let cfg = nonnull!(cfg);
        let profile = nonnull!(profile);
        let opts = StepOptions {
            cfl: cfg.inner.evolution.cfl,
            newton_tol: cfg.inner.evolution.newton_tol,
            ..StepOptions::default()
        };
        let pc = &cfg.inner.evolution.perturbation;
        let spec = PerturbationSpec {
            shape: pc.shape,
            amplitude: pc.amplitude,
            center: pc.center.unwrap_or(profile.inner.meta.length / 4.0),
            width: pc.width,
        };
        let horizon = if t_end > 0.0 { t_end } else { cfg.inner.evolution.t_end };
        let initial = match make_initial_perturbation(&profile.inner, &spec, &opts) {
            Ok(s) => s,
            Err(e) => return fail(e),
        };
        let period = cfg.inner.evolution.observer_period;
        match evolve(&initial, &profile.inner, horizon, period, &[], &opts) {
            Ok((state, _)) => {
                write_out(out, Box::into_raw(Box::new(SheathStateHandle { inner: state })))
            }
            Err(e) => fail(e),
        }
    })
}

/// Simulation time of a state, or NaN for NULL.
#[no_mangle]
pub extern "C" fn sheath_state_time(state: *const SheathStateHandle) -> f64 {
    match unsafe { state.as_ref() } {
        Some(s) => s.inner.t,
        None => f64::NAN,
    }
}

/// Number of grid nodes in a state.
#[no_mangle]
pub extern "C" fn sheath_state_len(state: *const SheathStateHandle) -> usize {
    match unsafe { state.as_ref() } {
        Some(s) => s.inner.v.len(),
        None => 0,
    }
}

/// Copy state columns (v = log n, u, T, phi) into caller buffers of
/// capacity `cap` nodes. NULL destinations are skipped.
#[no_mangle]
pub extern "C" fn sheath_state_copy(
    state: *const SheathStateHandle,
    v: *mut f64,
    u: *mut f64,
    temp: *mut f64,
    phi: *mut f64,
    cap: usize,
) -> SheathStatus {
    guarded(|| {
        let s = nonnull!(state);
        let len = s.inner.v.len();
        if cap < len {
            set_error("destination capacity is smaller than the state length");
            return SheathStatus::NullArgument;
        }
        let copy = |dst: *mut f64, src: &[f64]| {
            if !dst.is_null() {
                unsafe { std::ptr::copy_nonoverlapping(src.as_ptr(), dst, len) };
            }
        };
        copy(v, &s.inner.v);
        copy(u, &s.inner.u);
        copy(temp, &s.inner.temp);
        copy(phi, &s.inner.phi);
        SheathStatus::Ok
    })
}

#[no_mangle]
pub extern "C" fn sheath_state_free(state: *mut SheathStateHandle) {
    if !state.is_null() {
        drop(unsafe { Box::from_raw(state) });
    }
}

/// Run the weighted quadratic-form positivity check on x in [0, 100].
/// `beta <= 0` selects the default 0.9 Gamma sqrt(phi_b). On success,
/// `pass` gets 0/1 and `measured_c` the smallest margin of the cubic test.
#[no_mangle]
pub extern "C" fn sheath_q_check(
    cfg: *const SheathConfig,
    epsilon: f64,
    beta: f64,
    pass: *mut i32,
    measured_c: *mut f64,
) -> SheathStatus {
    guarded(|| {
        let cfg = nonnull!(cfg);
        let params = match cfg.inner.params() {
            Ok(p) => p,
            Err(e) => return fail(e),
        };
        let b = if beta > 0.0 {
            beta
        } else {
            0.9 * degenerate_gamma(&params) * params.phi_b.abs().sqrt()
        };
        let xs: Vec<f64> = (0..=1000).map(|i| i as f64 * 0.1).collect();
        let report = match quadratic_form_check(&params, epsilon, b, &xs) {
            Ok(r) => r,
            Err(e) => return fail(e),
        };
        if !pass.is_null() {
            unsafe { pass.write(report.pass as i32) };
        }
        if !measured_c.is_null() {
            unsafe { measured_c.write(report.measured_c) };
        }
        SheathStatus::Ok
    })
}
