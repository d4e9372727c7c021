//! C ABI for `damped-search`.
//!
//! Every fallible entry point returns a [`DgsStatus`] and writes results
//! through out-pointers. On failure a message is kept per thread and can be
//! read with [`dgs_last_error_message`]. Handles (`DgsSpace`,
//! `DgsFullState`) are opaque and must be released with their `_free`
//! function. Panics never cross the boundary; they surface as
//! `DGS_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use damped_search::blochmap::{kraus_step, trajectory, BlochState, DampedMap, SearchSpace};
use damped_search::cost::{
    damped_expected_calls_fixed, schedule_expected_calls, schedule_phi, undamped_expected_calls,
    CostResult, DampingSchedule,
};
use damped_search::fullsim::FullState;
use damped_search::lindblad::{generator_matrix, integrate, LindbladParams};
use damped_search::spectral::{critical_phi_closed, critical_phi_numeric, eigenvalues};
use damped_search::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DgsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NoBracket = 3,
    NotConverged = 4,
    InvariantViolation = 5,
    Panic = 6,
}

/// Reduced state `(Tr ρX, Tr ρZ, Tr ρ)`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DgsBloch {
    pub x: f64,
    pub z: f64,
    pub t: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DgsComplex {
    pub re: f64,
    pub im: f64,
}

/// Expected oracle calls. `best_r` and `horizon` are -1 when absent and
/// `verification_success` is NaN when no verification call is made.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DgsCost {
    pub expected_calls: f64,
    pub best_r: i64,
    pub flip_mass: f64,
    pub survival: f64,
    pub verification_success: f64,
    pub tail: f64,
    pub horizon: i64,
}

/// Search space of `n` items with `m` targets.
pub struct DgsSpace(SearchSpace);

/// State vector of the item register plus ancilla.
pub struct DgsFullState(FullState);

impl From<BlochState> for DgsBloch {
    fn from(s: BlochState) -> Self {
        DgsBloch {
            x: s.x,
            z: s.z,
            t: s.t,
        }
    }
}

impl From<DgsBloch> for BlochState {
    fn from(s: DgsBloch) -> Self {
        BlochState::new(s.x, s.z, s.t)
    }
}

impl From<CostResult> for DgsCost {
    fn from(c: CostResult) -> Self {
        let opt = |v: Option<u64>| v.map_or(-1, |v| i64::try_from(v).unwrap_or(i64::MAX));
        DgsCost {
            expected_calls: c.expected_calls,
            best_r: opt(c.best_r),
            flip_mass: c.breakdown.flip_mass,
            survival: c.breakdown.survival,
            verification_success: c.breakdown.verification_success.unwrap_or(f64::NAN),
            tail: c.tail,
            horizon: opt(c.horizon),
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

struct Failure(DgsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::DegenerateSpace { .. } | Error::PhiOutOfRange(_) | Error::InvalidArgument(_) => {
                DgsStatus::InvalidArgument
            }
            Error::NoBracket { .. } => DgsStatus::NoBracket,
            Error::NotConverged(_) => DgsStatus::NotConverged,
            Error::Invariant(_) => DgsStatus::InvariantViolation,
        };
        Failure(status, e.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(DgsStatus::NullPointer, format!("{name} is null"))
}

fn invalid(msg: String) -> Failure {
    Failure(DgsStatus::InvalidArgument, msg)
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> DgsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DgsStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            DgsStatus::Panic
        }
    }
}

unsafe fn out_ref<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(name))
}

unsafe fn in_ref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn in_slice<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn out_slice<'a, T>(p: *mut T, len: usize, name: &str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dgs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failure on this thread, or NULL if there was none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dgs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn dgs_space_new(n: u64, m: u64, out: *mut *mut DgsSpace) -> DgsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let space = SearchSpace::new(n, m)?;
        *out = Box::into_raw(Box::new(DgsSpace(space)));
        Ok(())
    })
}

/// # Safety
/// `space` must be NULL or a handle from [`dgs_space_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dgs_space_free(space: *mut DgsSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

/// # Safety
/// `space` must be a live handle and `out` valid for one `double`.
#[no_mangle]
pub unsafe extern "C" fn dgs_space_theta(space: *const DgsSpace, out: *mut f64) -> DgsStatus {
    guard(|| {
        let space = in_ref(space, "space")?;
        *out_ref(out, "out")? = space.0.theta();
        Ok(())
    })
}

/// # Safety
/// `space` must be a live handle and `out` valid for one `DgsBloch`.
#[no_mangle]
pub unsafe extern "C" fn dgs_initial_state(
    space: *const DgsSpace,
    out: *mut DgsBloch,
) -> DgsStatus {
    guard(|| {
        let space = in_ref(space, "space")?;
        *out_ref(out, "out")? = BlochState::initial(&space.0).into();
        Ok(())
    })
}

/// Writes the 3×3 damped map row-major into `out[0..9]`.
///
/// # Safety
/// `out` must be valid for nine `double`s.
#[no_mangle]
pub unsafe extern "C" fn dgs_damped_map(theta: f64, phi: f64, out: *mut f64) -> DgsStatus {
    guard(|| {
        let out = out_slice(out, 9, "out")?;
        let map = DampedMap::new(theta, phi)?;
        for r in 0..3 {
            for c in 0..3 {
                out[3 * r + c] = map.matrix()[(r, c)];
            }
        }
        Ok(())
    })
}

/// One damped iteration in Kraus form; `flip` receives the flip probability.
///
/// # Safety
/// `state` must be readable, `out` and `flip` writable.
#[no_mangle]
pub unsafe extern "C" fn dgs_kraus_step(
    state: *const DgsBloch,
    theta: f64,
    phi: f64,
    out: *mut DgsBloch,
    flip: *mut f64,
) -> DgsStatus {
    guard(|| {
        let state = *in_ref(state, "state")?;
        let out = out_ref(out, "out")?;
        let flip = out_ref(flip, "flip")?;
        let (next, q) = kraus_step(&state.into(), theta, phi)?;
        *out = next.into();
        *flip = q;
        Ok(())
    })
}

/// States after `0..=steps` iterations into `out[0..=steps]`. `phis` holds a
/// single angle or at least `steps` angles.
///
/// # Safety
/// `phis` must be readable for `phis_len` values and `out` writable for
/// `out_len` values.
#[no_mangle]
pub unsafe extern "C" fn dgs_trajectory(
    space: *const DgsSpace,
    phis: *const f64,
    phis_len: usize,
    steps: usize,
    out: *mut DgsBloch,
    out_len: usize,
) -> DgsStatus {
    guard(|| {
        let space = in_ref(space, "space")?;
        let phis = in_slice(phis, phis_len, "phis")?;
        if phis.is_empty() {
            return Err(invalid("at least one damping angle is required".into()));
        }
        if out_len < steps + 1 {
            return Err(invalid(format!(
                "out holds {out_len} states, {} needed",
                steps + 1
            )));
        }
        let out = out_slice(out, out_len, "out")?;
        for (slot, s) in out.iter_mut().zip(trajectory(&space.0, phis, steps)?) {
            *slot = s.into();
        }
        Ok(())
    })
}

/// The three eigenvalues of the damped map, ordered by descending real part.
///
/// # Safety
/// `out` must be writable for three `DgsComplex`.
#[no_mangle]
pub unsafe extern "C" fn dgs_eigenvalues(theta: f64, phi: f64, out: *mut DgsComplex) -> DgsStatus {
    guard(|| {
        let out = out_slice(out, 3, "out")?;
        let e = eigenvalues(&DampedMap::new(theta, phi)?);
        for (slot, l) in out.iter_mut().zip(e.values()) {
            *slot = DgsComplex { re: l.re, im: l.im };
        }
        Ok(())
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dgs_critical_phi_closed(theta: f64, out: *mut f64) -> DgsStatus {
    guard(|| {
        *out_ref(out, "out")? = critical_phi_closed(theta)?;
        Ok(())
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dgs_critical_phi_numeric(theta: f64, out: *mut f64) -> DgsStatus {
    guard(|| {
        *out_ref(out, "out")? = critical_phi_numeric(theta)?;
        Ok(())
    })
}

/// # Safety
/// `space` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dgs_undamped_expected_calls(
    space: *const DgsSpace,
    out: *mut DgsCost,
) -> DgsStatus {
    guard(|| {
        let space = in_ref(space, "space")?;
        *out_ref(out, "out")? = undamped_expected_calls(&space.0).into();
        Ok(())
    })
}

/// # Safety
/// `space` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dgs_damped_expected_calls_fixed(
    space: *const DgsSpace,
    phi: f64,
    out: *mut DgsCost,
) -> DgsStatus {
    guard(|| {
        let space = in_ref(space, "space")?;
        let out = out_ref(out, "out")?;
        *out = damped_expected_calls_fixed(&space.0, phi)?.into();
        Ok(())
    })
}

/// Expected calls under the decreasing damping schedule, truncated once the
/// unflipped probability reaches `eps`.
///
/// # Safety
/// `space` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dgs_schedule_expected_calls(
    space: *const DgsSpace,
    eps: f64,
    out: *mut DgsCost,
) -> DgsStatus {
    guard(|| {
        let space = in_ref(space, "space")?;
        let out = out_ref(out, "out")?;
        *out = schedule_expected_calls(&space.0, DampingSchedule::Decreasing, eps)?.into();
        Ok(())
    })
}

/// Damping angle of iteration `n` (1-based) of the decreasing schedule.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dgs_schedule_phi(n: u64, out: *mut f64) -> DgsStatus {
    guard(|| {
        *out_ref(out, "out")? = schedule_phi(n)?;
        Ok(())
    })
}

/// Uniform superposition over `n` items with the listed (zero-based) targets.
///
/// # Safety
/// `targets` must be readable for `targets_len` values and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dgs_fullstate_new(
    n: usize,
    targets: *const usize,
    targets_len: usize,
    out: *mut *mut DgsFullState,
) -> DgsStatus {
    guard(|| {
        let targets = in_slice(targets, targets_len, "targets")?;
        let out = out_ref(out, "out")?;
        let state = FullState::initial(n, targets)?;
        *out = Box::into_raw(Box::new(DgsFullState(state)));
        Ok(())
    })
}

/// Uniform superposition with `m` targets placed from `seed`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dgs_fullstate_new_random(
    n: usize,
    m: usize,
    seed: u64,
    out: *mut *mut DgsFullState,
) -> DgsStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let state = FullState::initial_random(n, m, seed)?;
        *out = Box::into_raw(Box::new(DgsFullState(state)));
        Ok(())
    })
}

/// # Safety
/// `state` must be NULL or a handle from a `dgs_fullstate_new*` call not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn dgs_fullstate_free(state: *mut DgsFullState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

fn checked_phi(phi: f64) -> Result<f64, Failure> {
    if phi.is_finite() && (0.0..=std::f64::consts::FRAC_PI_2).contains(&phi) {
        Ok(phi)
    } else {
        Err(Error::PhiOutOfRange(phi).into())
    }
}

/// # Safety
/// `state` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dgs_fullstate_apply_u(state: *mut DgsFullState, phi: f64) -> DgsStatus {
    guard(|| {
        let state = out_ref(state, "state")?;
        state.0.apply_u(checked_phi(phi)?);
        Ok(())
    })
}

/// # Safety
/// `state` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dgs_fullstate_apply_u_factored(
    state: *mut DgsFullState,
    phi: f64,
) -> DgsStatus {
    guard(|| {
        let state = out_ref(state, "state")?;
        state.0.apply_u_factored(checked_phi(phi)?);
        Ok(())
    })
}

/// Measures the ancilla, keeping the unflipped branch; `flip` receives the
/// flip probability relative to the incoming norm.
///
/// # Safety
/// `state` must be a live handle and `flip` writable.
#[no_mangle]
pub unsafe extern "C" fn dgs_fullstate_measure(
    state: *mut DgsFullState,
    flip: *mut f64,
) -> DgsStatus {
    guard(|| {
        let state = out_ref(state, "state")?;
        *out_ref(flip, "flip")? = state.0.measure_ancilla();
        Ok(())
    })
}

/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dgs_fullstate_reduced(
    state: *const DgsFullState,
    out: *mut DgsBloch,
) -> DgsStatus {
    guard(|| {
        let state = in_ref(state, "state")?;
        let out = out_ref(out, "out")?;
        *out = state.0.reduced_bloch()?.into();
        Ok(())
    })
}

/// Whether every ancilla-up amplitude lies on a target item.
///
/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dgs_fullstate_flip_certain(
    state: *const DgsFullState,
    out: *mut bool,
) -> DgsStatus {
    guard(|| {
        let state = in_ref(state, "state")?;
        *out_ref(out, "out")? = state.0.verify_flip_certainty();
        Ok(())
    })
}

/// Continuous-time evolution sampled every `dt` up to `total_time`.
///
/// `written` always receives the number of samples the run produces; if
/// `out_len` is smaller nothing is written to `out` and the call fails with
/// `DGS_STATUS_INVALID_ARGUMENT`, so a first call with `out_len = 0` sizes
/// the buffer. Sample `k` is at time `min(k·dt, total_time)`.
///
/// # Safety
/// `state0` must be readable, `out` writable for `out_len` values and
/// `written` writable.
#[no_mangle]
pub unsafe extern "C" fn dgs_lindblad_integrate(
    state0: *const DgsBloch,
    c: f64,
    total_time: f64,
    dt: f64,
    out: *mut DgsBloch,
    out_len: usize,
    written: *mut usize,
) -> DgsStatus {
    guard(|| {
        let state0 = *in_ref(state0, "state0")?;
        let written = out_ref(written, "written")?;
        let samples = integrate(&state0.into(), &LindbladParams::new(c)?, total_time, dt)?;
        *written = samples.len();
        if out_len < samples.len() {
            return Err(invalid(format!(
                "out holds {out_len} samples, {} needed",
                samples.len()
            )));
        }
        let out = out_slice(out, out_len, "out")?;
        for (slot, s) in out.iter_mut().zip(samples) {
            *slot = s.state.into();
        }
        Ok(())
    })
}

/// Exact continuous-time evolution `exp(time·A)·state0`.
///
/// # Safety
/// `state0` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dgs_lindblad_propagate(
    state0: *const DgsBloch,
    c: f64,
    time: f64,
    out: *mut DgsBloch,
) -> DgsStatus {
    guard(|| {
        let state0: BlochState = (*in_ref(state0, "state0")?).into();
        let out = out_ref(out, "out")?;
        if !time.is_finite() || time < 0.0 {
            return Err(invalid(format!("time must be finite and >= 0, got {time}")));
        }
        let a = generator_matrix(&LindbladParams::new(c)?);
        *out = BlochState::from_vector(&(a.propagator(time) * state0.to_vector())).into();
        Ok(())
    })
}
