//! C ABI over the `watershed` library.
//!
//! Conventions:
//! - Every fallible function returns a [`WsStatus`]; outputs go through
//!   out-pointers that are written only on success.
//! - Objects cross the boundary as opaque handles created by `ws_*_new` or a
//!   producing call and released by the matching `ws_*_free`.
//! - Strings returned to the caller are owned by the caller and must be
//!   released with [`ws_string_free`]. Strings borrowed from a handle live as
//!   long as the handle.
//! - Rationals are `"p/q"` strings.
//! - After a non-`Ok` status, [`ws_last_error`] describes the failure on the
//!   calling thread.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use watershed::bulldozer::{line_from_sequence, unique_unsweepable, unsweepable_towns};
use watershed::hikita::{hikita_distribution, hikita_phi, weights_from_params};
use watershed::perm::{canonicalize, foata, foata_inverse};
use watershed::rational::{format_rational, parse_rational};
use watershed::sampler::{monte_carlo_watershed, ProcessW, RandomSource};
use watershed::watershed::{all_even_count, watershed_brute, watershed_count, watershed_fast};
use watershed::{CyclePermutation, Error, HikitaParams, LinearOrdering};

/// Status codes. Values 2 to 5 match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsStatus {
    Ok = 0,
    Parse = 2,
    Domain = 3,
    InternalContradiction = 4,
    ResourceLimit = 5,
    NullPointer = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> WsStatus {
    match e.exit_code() {
        2 => WsStatus::Parse,
        4 => WsStatus::InternalContradiction,
        5 => WsStatus::ResourceLimit,
        _ => WsStatus::Domain,
    }
}

fn fail(status: WsStatus, msg: impl Into<String>) -> WsStatus {
    set_last_error(msg.into());
    status
}

/// Runs `f`, mapping library errors and panics to status codes.
fn guard(f: impl FnOnce() -> Result<(), WsStatus>) -> WsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WsStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(WsStatus::Panic, "panic inside the watershed library"),
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, WsStatus>;
}

impl<T> OrStatus<T> for watershed::Result<T> {
    fn or_status(self) -> Result<T, WsStatus> {
        self.map_err(|e| fail(status_of(&e), e.to_string()))
    }
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), WsStatus> {
    if p.is_null() {
        Err(fail(WsStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(())
    }
}

unsafe fn input_slice<'a>(data: *const i64, len: usize) -> Result<&'a [i64], WsStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    non_null(data, "data")?;
    Ok(slice::from_raw_parts(data, len))
}

unsafe fn ordering_arg(data: *const i64, len: usize) -> Result<LinearOrdering, WsStatus> {
    LinearOrdering::new(input_slice(data, len)?.to_vec()).or_status()
}

unsafe fn c_str_arg(s: *const c_char, name: &str) -> Result<String, WsStatus> {
    non_null(s, name)?;
    CStr::from_ptr(s)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| fail(WsStatus::Parse, format!("{name} is not UTF-8")))
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).expect("no interior nul").into_raw()
}

/// Message for the most recent failure on this thread, or NULL. Borrowed;
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ws_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by this library. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn ws_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---------------------------------------------------------------------------
// Watershed

/// Watershed by the run-collapse algorithm.
#[no_mangle]
pub unsafe extern "C" fn ws_watershed(data: *const i64, len: usize, out_k: *mut usize) -> WsStatus {
    guard(|| {
        non_null(out_k, "out_k")?;
        let p = ordering_arg(data, len)?;
        *out_k = watershed_fast(&p).or_status()?.0;
        Ok(())
    })
}

/// Watershed by direct search over every split.
#[no_mangle]
pub unsafe extern "C" fn ws_watershed_brute(data: *const i64, len: usize, out_k: *mut usize) -> WsStatus {
    guard(|| {
        non_null(out_k, "out_k")?;
        let p = ordering_arg(data, len)?;
        *out_k = watershed_brute(&p).or_status()?;
        Ok(())
    })
}

/// JSON trace of the run-collapse algorithm; free with `ws_string_free`.
#[no_mangle]
pub unsafe extern "C" fn ws_watershed_trace_json(data: *const i64, len: usize, out: *mut *mut c_char) -> WsStatus {
    guard(|| {
        non_null(out, "out")?;
        let p = ordering_arg(data, len)?;
        let (_, trace) = watershed_fast(&p).or_status()?;
        *out = owned_string(serde_json::to_string(&trace).expect("trace serializes"));
        Ok(())
    })
}

/// `((2n-1)!!)^2` as a decimal string; free with `ws_string_free`.
#[no_mangle]
pub unsafe extern "C" fn ws_all_even_count(n: u64, out: *mut *mut c_char) -> WsStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = owned_string(all_even_count(n).to_string());
        Ok(())
    })
}

/// Number of orderings of {1..2n} with watershed k, as a decimal string.
#[no_mangle]
pub unsafe extern "C" fn ws_watershed_count(n: u64, k: u64, out: *mut *mut c_char) -> WsStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = owned_string(watershed_count(n, k).or_status()?.to_string());
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Cycle permutations

/// Opaque canonical cycle-form permutation.
pub struct WsCyclePermutation(CyclePermutation);

/// Builds a permutation from `n_cycles` cycles laid out back to back in
/// `elements`, with `cycle_lens[i]` entries in cycle `i`. Any rotation is accepted.
#[no_mangle]
pub unsafe extern "C" fn ws_cycle_permutation_new(
    elements: *const i64,
    cycle_lens: *const usize,
    n_cycles: usize,
    out: *mut *mut WsCyclePermutation,
) -> WsStatus {
    guard(|| {
        non_null(out, "out")?;
        let lens: &[usize] = if n_cycles == 0 {
            &[]
        } else {
            non_null(cycle_lens, "cycle_lens")?;
            slice::from_raw_parts(cycle_lens, n_cycles)
        };
        let total = lens.iter().sum();
        let flat = input_slice(elements, total)?;
        let mut cycles = Vec::with_capacity(n_cycles);
        let mut offset = 0;
        for &l in lens {
            cycles.push(flat[offset..offset + l].to_vec());
            offset += l;
        }
        let perm = canonicalize(cycles).or_status()?;
        *out = Box::into_raw(Box::new(WsCyclePermutation(perm)));
        Ok(())
    })
}

/// Inverse Foata map of an ordering.
#[no_mangle]
pub unsafe extern "C" fn ws_foata_inverse(
    data: *const i64,
    len: usize,
    out: *mut *mut WsCyclePermutation,
) -> WsStatus {
    guard(|| {
        non_null(out, "out")?;
        let p = ordering_arg(data, len)?;
        *out = Box::into_raw(Box::new(WsCyclePermutation(foata_inverse(&p))));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ws_cycle_permutation_free(perm: *mut WsCyclePermutation) {
    if !perm.is_null() {
        drop(Box::from_raw(perm));
    }
}

/// Number of cycles; 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn ws_cycle_count(perm: *const WsCyclePermutation) -> usize {
    perm.as_ref().map_or(0, |p| p.0.cycles().len())
}

/// Copies cycle `index` (canonical order) into `buf`. `out_len` always
/// receives the cycle length; `BufferTooSmall` if `capacity` is short.
#[no_mangle]
pub unsafe extern "C" fn ws_cycle_get(
    perm: *const WsCyclePermutation,
    index: usize,
    buf: *mut i64,
    capacity: usize,
    out_len: *mut usize,
) -> WsStatus {
    guard(|| {
        non_null(perm, "perm")?;
        non_null(out_len, "out_len")?;
        let cycles = (*perm).0.cycles();
        let cycle = cycles
            .get(index)
            .ok_or_else(|| fail(WsStatus::Domain, format!("cycle {index} out of range")))?;
        copy_out(cycle, buf, capacity, out_len)
    })
}

unsafe fn copy_out(src: &[i64], buf: *mut i64, capacity: usize, out_len: *mut usize) -> Result<(), WsStatus> {
    *out_len = src.len();
    if src.len() > capacity {
        return Err(fail(
            WsStatus::BufferTooSmall,
            format!("need {} slots, have {capacity}", src.len()),
        ));
    }
    if !src.is_empty() {
        non_null(buf, "buf")?;
        ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    }
    Ok(())
}

/// Foata map: writes the ordering into `buf`.
#[no_mangle]
pub unsafe extern "C" fn ws_foata(
    perm: *const WsCyclePermutation,
    buf: *mut i64,
    capacity: usize,
    out_len: *mut usize,
) -> WsStatus {
    guard(|| {
        non_null(perm, "perm")?;
        non_null(out_len, "out_len")?;
        let ordering = foata(&(*perm).0);
        copy_out(ordering.as_slice(), buf, capacity, out_len)
    })
}

// ---------------------------------------------------------------------------
// Hikita parameters and rationals

/// Opaque validated parameters `a_1..a_n`, `b_1..b_n`, `q`.
pub struct WsHikitaParams(HikitaParams);

/// Opaque list of exact rationals.
pub struct WsRationalVec(Vec<CString>);

#[no_mangle]
pub unsafe extern "C" fn ws_hikita_params_new(
    a: *const u64,
    b: *const u64,
    n: usize,
    q: *const c_char,
    out: *mut *mut WsHikitaParams,
) -> WsStatus {
    guard(|| {
        non_null(out, "out")?;
        if n > 0 {
            non_null(a, "a")?;
            non_null(b, "b")?;
        }
        let (a, b) = if n == 0 {
            (Vec::new(), Vec::new())
        } else {
            (slice::from_raw_parts(a, n).to_vec(), slice::from_raw_parts(b, n).to_vec())
        };
        let q = parse_rational(&c_str_arg(q, "q")?).or_status()?;
        let params = HikitaParams::new(a, b, q).or_status()?;
        *out = Box::into_raw(Box::new(WsHikitaParams(params)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ws_hikita_params_free(params: *mut WsHikitaParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// `phi_k` as a `"p/q"` string; free with `ws_string_free`.
#[no_mangle]
pub unsafe extern "C" fn ws_hikita_phi(params: *const WsHikitaParams, k: usize, out: *mut *mut c_char) -> WsStatus {
    guard(|| {
        non_null(params, "params")?;
        non_null(out, "out")?;
        let phi = hikita_phi(&(*params).0, k).or_status()?;
        *out = owned_string(format_rational(&phi));
        Ok(())
    })
}

fn rational_vec(v: &[watershed::Rational]) -> *mut WsRationalVec {
    let strings = v
        .iter()
        .map(|r| CString::new(format_rational(r)).expect("no interior nul"))
        .collect();
    Box::into_raw(Box::new(WsRationalVec(strings)))
}

/// `[phi_0, ..., phi_n]`, checked to sum to exactly 1.
#[no_mangle]
pub unsafe extern "C" fn ws_hikita_distribution(
    params: *const WsHikitaParams,
    out: *mut *mut WsRationalVec,
) -> WsStatus {
    guard(|| {
        non_null(params, "params")?;
        non_null(out, "out")?;
        let dist = hikita_distribution(&(*params).0).or_status()?;
        *out = rational_vec(&dist);
        Ok(())
    })
}

/// The sampling weights `w_1..w_2n` for these parameters.
#[no_mangle]
pub unsafe extern "C" fn ws_weights_from_params(
    params: *const WsHikitaParams,
    out: *mut *mut WsRationalVec,
) -> WsStatus {
    guard(|| {
        non_null(params, "params")?;
        non_null(out, "out")?;
        *out = rational_vec(weights_from_params(&(*params).0).as_slice());
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ws_rational_vec_len(v: *const WsRationalVec) -> usize {
    v.as_ref().map_or(0, |v| v.0.len())
}

/// Borrowed `"p/q"` string at `index`, or NULL when out of range.
#[no_mangle]
pub unsafe extern "C" fn ws_rational_vec_get(v: *const WsRationalVec, index: usize) -> *const c_char {
    v.as_ref()
        .and_then(|v| v.0.get(index))
        .map_or(ptr::null(), |s| s.as_ptr())
}

#[no_mangle]
pub unsafe extern "C" fn ws_rational_vec_free(v: *mut WsRationalVec) {
    if !v.is_null() {
        drop(Box::from_raw(v));
    }
}

// ---------------------------------------------------------------------------
// Sampling

/// Opaque seeded sampler for the weighted process over {1..2n}.
pub struct WsSampler {
    process: ProcessW,
    rng: RandomSource,
}

#[no_mangle]
pub unsafe extern "C" fn ws_sampler_new(
    params: *const WsHikitaParams,
    seed: u64,
    out: *mut *mut WsSampler,
) -> WsStatus {
    guard(|| {
        non_null(params, "params")?;
        non_null(out, "out")?;
        let process = ProcessW::new(&weights_from_params(&(*params).0));
        *out = Box::into_raw(Box::new(WsSampler { process, rng: RandomSource::new(seed) }));
        Ok(())
    })
}

/// Draws the next ordering of {1..2n} into `buf` (capacity at least 2n).
#[no_mangle]
pub unsafe extern "C" fn ws_sampler_next(
    sampler: *mut WsSampler,
    buf: *mut i64,
    capacity: usize,
    out_len: *mut usize,
) -> WsStatus {
    guard(|| {
        non_null(sampler, "sampler")?;
        non_null(out_len, "out_len")?;
        let s = &mut *sampler;
        if capacity < s.process.len() {
            *out_len = s.process.len();
            return Err(fail(WsStatus::BufferTooSmall, format!("need {} slots", s.process.len())));
        }
        let elements: Vec<i64> = (1..=s.process.len() as i64).collect();
        let p = s.process.sample(&elements, &mut s.rng).or_status()?;
        copy_out(p.as_slice(), buf, capacity, out_len)
    })
}

#[no_mangle]
pub unsafe extern "C" fn ws_sampler_free(sampler: *mut WsSampler) {
    if !sampler.is_null() {
        drop(Box::from_raw(sampler));
    }
}

/// Monte Carlo watershed report as JSON; free with `ws_string_free`.
#[no_mangle]
pub unsafe extern "C" fn ws_monte_carlo_json(
    params: *const WsHikitaParams,
    sample_size: u64,
    seed: u64,
    out: *mut *mut c_char,
) -> WsStatus {
    guard(|| {
        non_null(params, "params")?;
        non_null(out, "out")?;
        let report = monte_carlo_watershed(&(*params).0, sample_size, seed).or_status()?;
        *out = owned_string(serde_json::to_string(&report).expect("report serializes"));
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Bulldozers

/// The unique unsweepable town (1-based) of the line built from an
/// even-length sequence `r_1, l_2, r_2, ..., l_n`.
#[no_mangle]
pub unsafe extern "C" fn ws_bulldozer_unsweepable(data: *const i64, len: usize, out_town: *mut usize) -> WsStatus {
    guard(|| {
        non_null(out_town, "out_town")?;
        let p = ordering_arg(data, len)?;
        let line = line_from_sequence(&p).or_status()?;
        *out_town = unique_unsweepable(&unsweepable_towns(&line).or_status()?).or_status()?;
        Ok(())
    })
}
