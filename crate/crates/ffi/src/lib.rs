//! C ABI for the `bargmann` estimator.
//!
//! States and estimates are opaque heap handles released with their `*_free`
//! function. Every fallible call returns a [`BgStatus`]; on failure
//! [`bg_last_error`] describes the problem for the calling thread. Strings
//! returned through out-pointers are owned by the caller and released with
//! [`bg_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bargmann::applications::hom_overlap;
use bargmann::fock::{dual_rail_qubit, single_photon_state, truncated_coherent_state, MixedState, ModeLayout, PureState};
use bargmann::oracle::direct_multivariate_trace;
use bargmann::protocol::{estimate_multivariate_trace, sample_count, InvariantEstimate, Mode, SamplingPlan};
use bargmann::Error;
use num_complex::Complex64;

/// Result of an FFI call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidState = 3,
    LayoutMismatch = 4,
    Capacity = 5,
    Truncation = 6,
    Undefined = 7,
    NotConverged = 8,
    Numerical = 9,
    Json = 10,
    Panic = 11,
}

/// Opaque state handle (a pure state or mixture of one system).
pub struct BgState {
    inner: MixedState,
}

/// Opaque protocol result handle.
pub struct BgEstimate {
    inner: InvariantEstimate,
}

/// Estimation mode. `sampled == 0` selects the exact outcome distribution and
/// ignores the other fields; `delta_fail` of 0 means the default 0.05.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct BgMode {
    pub sampled: u32,
    pub shots: u64,
    pub seed: u64,
    pub stream: u64,
    pub delta_fail: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> BgStatus {
    match e {
        Error::InvalidArgument(_) | Error::DimensionMismatch { .. } => BgStatus::InvalidArgument,
        Error::InvalidState(_) => BgStatus::InvalidState,
        Error::LayoutMismatch(_) => BgStatus::LayoutMismatch,
        Error::Capacity { .. } => BgStatus::Capacity,
        Error::Truncation { .. } => BgStatus::Truncation,
        Error::UndefinedEntropy(_) => BgStatus::Undefined,
        Error::SeriesNotConverged { .. } => BgStatus::NotConverged,
        Error::RootFinding(_) | Error::Consistency(_) => BgStatus::Numerical,
    }
}

/// Run `f`, translating errors and panics into a status.
fn guard<F>(f: F) -> BgStatus
where
    F: FnOnce() -> Result<(), (BgStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BgStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside bargmann");
            BgStatus::Panic
        }
    }
}

fn lib(e: Error) -> (BgStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (BgStatus, String) {
    (BgStatus::NullPointer, format!("{what} is null"))
}

/// # Safety
/// `p` is null or valid for writes.
unsafe fn put<T>(p: *mut T, v: T, what: &str) -> Result<(), (BgStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(v);
    Ok(())
}

/// # Safety
/// `p` is null or points to `len` readable values.
unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], (BgStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// # Safety
/// `states` is null or points to `n` handles, each null or live.
unsafe fn gather(states: *const *const BgState, n: usize) -> Result<Vec<MixedState>, (BgStatus, String)> {
    slice(states, n, "states")?
        .iter()
        .map(|&s| s.as_ref().map(|s| s.inner.clone()).ok_or_else(|| null("state handle")))
        .collect()
}

fn complex(re: &[f64], im: &[f64]) -> Vec<Complex64> {
    re.iter().zip(im).map(|(&r, &i)| Complex64::new(r, i)).collect()
}

fn boxed_state(out: *mut *mut BgState, state: MixedState) -> Result<(), (BgStatus, String)> {
    let handle = Box::into_raw(Box::new(BgState { inner: state }));
    // SAFETY: caller passes a writable out-pointer or null
    unsafe {
        put(out, handle, "out").inspect_err(|_| {
            drop(Box::from_raw(handle));
        })
    }
}

fn to_mode(m: &BgMode) -> Result<Mode, (BgStatus, String)> {
    if m.sampled == 0 {
        return Ok(Mode::Exact);
    }
    let mut plan = SamplingPlan::new(m.shots, m.seed).with_stream(m.stream);
    if m.delta_fail != 0.0 {
        plan.delta_fail = m.delta_fail;
    }
    Ok(Mode::Sampled(plan))
}

fn c_string(s: String, out: *mut *mut c_char) -> Result<(), (BgStatus, String)> {
    let c = CString::new(s).map_err(|e| (BgStatus::Json, e.to_string()))?;
    let raw = c.into_raw();
    // SAFETY: caller passes a writable out-pointer or null
    unsafe {
        put(out, raw, "out").inspect_err(|_| {
            drop(CString::from_raw(raw));
        })
    }
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Exact-mode settings.
#[no_mangle]
pub extern "C" fn bg_mode_exact() -> BgMode {
    BgMode {
        sampled: 0,
        shots: 0,
        seed: 0,
        stream: 0,
        delta_fail: 0.0,
    }
}

/// Sampled-mode settings with `shots` draws from `seed`.
#[no_mangle]
pub extern "C" fn bg_mode_sampled(shots: u64, seed: u64) -> BgMode {
    BgMode {
        sampled: 1,
        shots,
        seed,
        stream: 0,
        delta_fail: 0.0,
    }
}

/// Cap on Fock sector sizes for subsequent calls in this process.
#[no_mangle]
pub extern "C" fn bg_set_sector_cap(cap: u64) {
    bargmann::capacity::set_sector_cap(cap);
}

/// Single photon spread over `d` internal modes with amplitudes `re + i·im`
/// (normalized on construction).
///
/// # Safety
/// `re` and `im` point to `d` doubles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bg_state_single_photon(
    re: *const f64,
    im: *const f64,
    d: usize,
    out: *mut *mut BgState,
) -> BgStatus {
    guard(|| {
        let amps = complex(slice(re, d, "re")?, slice(im, d, "im")?);
        let s = single_photon_state(&amps).map_err(lib)?;
        boxed_state(out, s.into())
    })
}

/// Dual-rail qubit `cos(θ/2)|1,0⟩ + e^{iφ} sin(θ/2)|0,1⟩`.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bg_state_dual_rail(theta: f64, phi: f64, out: *mut *mut BgState) -> BgStatus {
    guard(|| boxed_state(out, dual_rail_qubit(theta, phi).into()))
}

/// Fock state with `occupations[α]` photons in internal mode `α`.
///
/// # Safety
/// `occupations` points to `d` values; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bg_state_fock(occupations: *const u32, d: usize, out: *mut *mut BgState) -> BgStatus {
    guard(|| {
        let occ = slice(occupations, d, "occupations")?.to_vec();
        let layout = ModeLayout::single(d).map_err(lib)?;
        boxed_state(out, PureState::fock(layout, occ).map_err(lib)?.into())
    })
}

/// Coherent state truncated at `cutoff` total photons. Fails with
/// `Truncation` if more than `max_tail` probability mass is discarded.
///
/// # Safety
/// `re` and `im` point to `d` doubles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bg_state_coherent(
    re: *const f64,
    im: *const f64,
    d: usize,
    cutoff: usize,
    max_tail: f64,
    out: *mut *mut BgState,
) -> BgStatus {
    guard(|| {
        let beta = complex(slice(re, d, "re")?, slice(im, d, "im")?);
        let s = truncated_coherent_state(&beta, cutoff)
            .and_then(|t| t.within(max_tail))
            .map_err(lib)?;
        boxed_state(out, s.into())
    })
}

/// Parse a pure state (`{"layout", "amplitudes"}`) or mixture
/// (`{"components"}`) document.
///
/// # Safety
/// `json` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bg_state_from_json(json: *const c_char, out: *mut *mut BgState) -> BgStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|e| (BgStatus::Json, e.to_string()))?;
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| (BgStatus::Json, e.to_string()))?;
        let state = if value.get("components").is_some() {
            serde_json::from_value::<MixedState>(value)
        } else {
            serde_json::from_value::<PureState>(value).map(Into::into)
        }
        .map_err(|e| (BgStatus::Json, e.to_string()))?;
        boxed_state(out, state)
    })
}

/// Mixture `Σ weights[i] · states[i]`; every component of a mixed input is
/// carried over with its weight scaled.
///
/// # Safety
/// `states` points to `n` live handles and `weights` to `n` doubles; `out` is
/// writable.
#[no_mangle]
pub unsafe extern "C" fn bg_state_mixture(
    states: *const *const BgState,
    weights: *const f64,
    n: usize,
    out: *mut *mut BgState,
) -> BgStatus {
    guard(|| {
        let parts = gather(states, n)?;
        let w = slice(weights, n, "weights")?;
        let mut components = Vec::new();
        for (m, &wi) in parts.iter().zip(w) {
            for (wj, s) in m.components() {
                components.push((wi * wj, s.clone()));
            }
        }
        boxed_state(out, MixedState::new(components).map_err(lib)?)
    })
}

/// Number of internal modes `d` of a state, or 0 for a null handle.
///
/// # Safety
/// `state` is null or live.
#[no_mangle]
pub unsafe extern "C" fn bg_state_num_internal(state: *const BgState) -> usize {
    state.as_ref().map_or(0, |s| s.inner.layout().num_internal())
}

/// Serialize a state as JSON.
///
/// # Safety
/// `state` is live; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bg_state_to_json(state: *const BgState, out: *mut *mut c_char) -> BgStatus {
    guard(|| {
        let s = state.as_ref().ok_or_else(|| null("state"))?;
        let text = serde_json::to_string(&s.inner).map_err(|e| (BgStatus::Json, e.to_string()))?;
        c_string(text, out)
    })
}

/// # Safety
/// `state` is null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bg_state_free(state: *mut BgState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Estimate `tr(ρ_1 ρ_2 … ρ_n)` by Fourier interferometry.
///
/// # Safety
/// `states` points to `n` live handles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bg_estimate_trace(
    states: *const *const BgState,
    n: usize,
    mode: BgMode,
    out: *mut *mut BgEstimate,
) -> BgStatus {
    guard(|| {
        let states = gather(states, n)?;
        let e = estimate_multivariate_trace(&states, to_mode(&mode)?).map_err(lib)?;
        let handle = Box::into_raw(Box::new(BgEstimate { inner: e }));
        put(out, handle, "out").inspect_err(|_| drop(Box::from_raw(handle)))
    })
}

/// The trace estimate `X_1`.
///
/// # Safety
/// `estimate` is live; `re` and `im` are writable.
#[no_mangle]
pub unsafe extern "C" fn bg_estimate_delta(estimate: *const BgEstimate, re: *mut f64, im: *mut f64) -> BgStatus {
    guard(|| {
        let e = estimate.as_ref().ok_or_else(|| null("estimate"))?;
        put(re, e.inner.delta.re, "re")?;
        put(im, e.inner.delta.im, "im")
    })
}

/// Number of interfering systems `M`, or 0 for a null handle.
///
/// # Safety
/// `estimate` is null or live.
#[no_mangle]
pub unsafe extern "C" fn bg_estimate_num_systems(estimate: *const BgEstimate) -> usize {
    estimate.as_ref().map_or(0, |e| e.inner.num_systems)
}

/// Cyclic expectation `X_k`, `0 ≤ k < M`.
///
/// # Safety
/// `estimate` is live; `re` and `im` are writable.
#[no_mangle]
pub unsafe extern "C" fn bg_estimate_x(estimate: *const BgEstimate, k: usize, re: *mut f64, im: *mut f64) -> BgStatus {
    guard(|| {
        let e = estimate.as_ref().ok_or_else(|| null("estimate"))?;
        let x = e
            .inner
            .x
            .get(k)
            .ok_or_else(|| (BgStatus::InvalidArgument, format!("k = {k} out of range")))?;
        put(re, x.re, "re")?;
        put(im, x.im, "im")
    })
}

/// Copy the binned probabilities `P_0 … P_{M−1}` into `out[0..len]`.
///
/// # Safety
/// `estimate` is live; `out` has room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn bg_estimate_binned(estimate: *const BgEstimate, out: *mut f64, len: usize) -> BgStatus {
    guard(|| {
        let e = estimate.as_ref().ok_or_else(|| null("estimate"))?;
        let p = e.inner.binned.values();
        if len != p.len() {
            return Err((BgStatus::InvalidArgument, format!("buffer holds {len} values, need {}", p.len())));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        ptr::copy_nonoverlapping(p.as_ptr(), out, len);
        Ok(())
    })
}

/// Hoeffding precision of each `P_j` (0 in exact mode).
///
/// # Safety
/// `estimate` is live; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bg_estimate_epsilon(estimate: *const BgEstimate, out: *mut f64) -> BgStatus {
    guard(|| {
        let e = estimate.as_ref().ok_or_else(|| null("estimate"))?;
        put(out, e.inner.epsilon, "out")
    })
}

/// Serialize an estimate as JSON.
///
/// # Safety
/// `estimate` is live; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bg_estimate_to_json(estimate: *const BgEstimate, out: *mut *mut c_char) -> BgStatus {
    guard(|| {
        let e = estimate.as_ref().ok_or_else(|| null("estimate"))?;
        let text = serde_json::to_string(&e.inner).map_err(|e| (BgStatus::Json, e.to_string()))?;
        c_string(text, out)
    })
}

/// # Safety
/// `estimate` is null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bg_estimate_free(estimate: *mut BgEstimate) {
    if !estimate.is_null() {
        drop(Box::from_raw(estimate));
    }
}

/// # Safety
/// `s` is null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `tr(ρ_1 ρ_2 … ρ_n)` computed directly from inner products.
///
/// # Safety
/// `states` points to `n` live handles; `re` and `im` are writable.
#[no_mangle]
pub unsafe extern "C" fn bg_oracle_trace(
    states: *const *const BgState,
    n: usize,
    re: *mut f64,
    im: *mut f64,
) -> BgStatus {
    guard(|| {
        let states = gather(states, n)?;
        let t = direct_multivariate_trace(&states).map_err(lib)?;
        put(re, t.re, "re")?;
        put(im, t.im, "im")
    })
}

/// Shots needed for precision `epsilon` on every binned probability with
/// failure probability `delta`.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bg_sample_count(epsilon: f64, delta: f64, out: *mut u64) -> BgStatus {
    guard(|| put(out, sample_count(epsilon, delta).map_err(lib)?, "out"))
}

/// Overlap `tr(ρ_1 ρ_2)` from two-state interference, `2·P_0 − 1`.
///
/// # Safety
/// `a` and `b` are live; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bg_hom_overlap(a: *const BgState, b: *const BgState, mode: BgMode, out: *mut f64) -> BgStatus {
    guard(|| {
        let a = a.as_ref().ok_or_else(|| null("a"))?;
        let b = b.as_ref().ok_or_else(|| null("b"))?;
        let o = hom_overlap(&a.inner, &b.inner, to_mode(&mode)?).map_err(lib)?;
        put(out, o.value, "out")
    })
}
