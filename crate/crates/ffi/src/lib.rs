//! C ABI for the camellia library.
//!
//! Objects cross the boundary as opaque heap handles that the caller releases
//! with the matching `_free` function. Every fallible call returns a
//! [`CamelliaStatus`]; on failure the message is available from
//! [`camellia_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use camellia::analysis::exact_bit_error;
use camellia::camellia::{correlation_rho, petal_dimension};
use camellia::channel::SymmetricChannel;
use camellia::gf2::BitVector;
use camellia::harness::{Engine, ExperimentConfig};
use camellia::rm::RmCode;
use camellia::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CamelliaStatus {
    CamelliaOk = 0,
    CamelliaErrNull = 1,
    CamelliaErrInvalid = 2,
    CamelliaErrBudget = 3,
    CamelliaErrConfig = 4,
    CamelliaErrBuffer = 5,
    CamelliaErrInternal = 6,
}

/// An RM(m, r) code.
pub struct CamelliaCode(RmCode);

/// A symmetric channel.
pub struct CamelliaChannel(SymmetricChannel);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn fail(status: CamelliaStatus, msg: impl Into<String>) -> CamelliaStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> CamelliaStatus {
    let status = match e {
        Error::BudgetExceeded { .. } => CamelliaStatus::CamelliaErrBudget,
        Error::Config(_) | Error::Parse(_) => CamelliaStatus::CamelliaErrConfig,
        _ => CamelliaStatus::CamelliaErrInvalid,
    };
    fail(status, e.to_string())
}

fn guard<F: FnOnce() -> CamelliaStatus>(f: F) -> CamelliaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(CamelliaStatus::CamelliaErrInternal, "internal panic"),
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(CamelliaStatus::CamelliaErrNull, concat!("`", stringify!($p), "` is null"));
        })+
    };
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn camellia_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn camellia_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn camellia_code_new(
    m: usize,
    r: usize,
    out: *mut *mut CamelliaCode,
) -> CamelliaStatus {
    guard(|| {
        non_null!(out);
        match RmCode::new(m, r) {
            Ok(code) => {
                *out = Box::into_raw(Box::new(CamelliaCode(code)));
                CamelliaStatus::CamelliaOk
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `code` must come from `camellia_code_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn camellia_code_free(code: *mut CamelliaCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// Block length `2^m`, or 0 for a null handle.
///
/// # Safety
/// `code` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn camellia_code_length(code: *const CamelliaCode) -> usize {
    code.as_ref().map_or(0, |c| c.0.n())
}

/// Dimension of the code, or 0 for a null handle.
///
/// # Safety
/// `code` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn camellia_code_dimension(code: *const CamelliaCode) -> usize {
    code.as_ref().map_or(0, |c| c.0.dimension())
}

/// # Safety
/// `code` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn camellia_code_rate(
    code: *const CamelliaCode,
    out: *mut f64,
) -> CamelliaStatus {
    guard(|| {
        non_null!(code, out);
        *out = (*code).0.rate();
        CamelliaStatus::CamelliaOk
    })
}

/// Encodes `message` (one byte per bit, nonzero = 1) into `codeword`.
///
/// # Safety
/// `message` must hold `message_len` bytes and `codeword` `codeword_len`.
#[no_mangle]
pub unsafe extern "C" fn camellia_code_encode(
    code: *const CamelliaCode,
    message: *const u8,
    message_len: usize,
    codeword: *mut u8,
    codeword_len: usize,
) -> CamelliaStatus {
    guard(|| {
        non_null!(code, message, codeword);
        let code = &(*code).0;
        if codeword_len < code.n() {
            return fail(
                CamelliaStatus::CamelliaErrBuffer,
                format!(
                    "codeword buffer holds {codeword_len} bytes, need {}",
                    code.n()
                ),
            );
        }
        let bits = std::slice::from_raw_parts(message, message_len);
        match code.encode(&BitVector::from_bits(bits.iter().map(|&b| b != 0))) {
            Ok(word) => {
                let out = std::slice::from_raw_parts_mut(codeword, code.n());
                for (slot, bit) in out.iter_mut().zip(word.iter()) {
                    *slot = bit as u8;
                }
                CamelliaStatus::CamelliaOk
            }
            Err(e) => from_error(e),
        }
    })
}

unsafe fn channel_out(
    result: camellia::Result<SymmetricChannel>,
    out: *mut *mut CamelliaChannel,
) -> CamelliaStatus {
    match result {
        Ok(ch) => {
            *out = Box::into_raw(Box::new(CamelliaChannel(ch)));
            CamelliaStatus::CamelliaOk
        }
        Err(e) => from_error(e),
    }
}

/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn camellia_channel_bsc(
    eps: f64,
    out: *mut *mut CamelliaChannel,
) -> CamelliaStatus {
    guard(|| {
        non_null!(out);
        channel_out(SymmetricChannel::bsc(eps), out)
    })
}

/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn camellia_channel_bec(
    p: f64,
    out: *mut *mut CamelliaChannel,
) -> CamelliaStatus {
    guard(|| {
        non_null!(out);
        channel_out(SymmetricChannel::bec(p), out)
    })
}

/// Mixture of `count` BSC components with the given weights and crossovers.
///
/// # Safety
/// `weights` and `epsilons` must each hold `count` values.
#[no_mangle]
pub unsafe extern "C" fn camellia_channel_mixture(
    weights: *const f64,
    epsilons: *const f64,
    count: usize,
    out: *mut *mut CamelliaChannel,
) -> CamelliaStatus {
    guard(|| {
        non_null!(weights, epsilons, out);
        let w = std::slice::from_raw_parts(weights, count);
        let e = std::slice::from_raw_parts(epsilons, count);
        let pairs: Vec<(f64, f64)> = w.iter().copied().zip(e.iter().copied()).collect();
        channel_out(SymmetricChannel::mixture(&pairs), out)
    })
}

/// # Safety
/// `channel` must come from a `camellia_channel_*` constructor and not be
/// used afterwards.
#[no_mangle]
pub unsafe extern "C" fn camellia_channel_free(channel: *mut CamelliaChannel) {
    if !channel.is_null() {
        drop(Box::from_raw(channel));
    }
}

/// # Safety
/// `channel` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn camellia_channel_capacity(
    channel: *const CamelliaChannel,
    out: *mut f64,
) -> CamelliaStatus {
    guard(|| {
        non_null!(channel, out);
        *out = (*channel).0.capacity();
        CamelliaStatus::CamelliaOk
    })
}

/// Exact `(2^d - 1) / (2^m - 1)` as numerator and denominator.
///
/// # Safety
/// `numerator` and `denominator` must be valid for one write each.
#[no_mangle]
pub unsafe extern "C" fn camellia_correlation_rho(
    m: usize,
    d: usize,
    numerator: *mut u64,
    denominator: *mut u64,
) -> CamelliaStatus {
    guard(|| {
        non_null!(numerator, denominator);
        match correlation_rho(m, d) {
            Ok(rho) => {
                *numerator = *rho.numer();
                *denominator = *rho.denom();
                CamelliaStatus::CamelliaOk
            }
            Err(e) => from_error(e),
        }
    })
}

/// Default petal dimension for `m >= 5`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn camellia_petal_dimension(m: usize, out: *mut usize) -> CamelliaStatus {
    guard(|| {
        non_null!(out);
        match petal_dimension(m) {
            Ok(d) => {
                *out = d;
                CamelliaStatus::CamelliaOk
            }
            Err(e) => from_error(e),
        }
    })
}

/// Exact per-coordinate error probability of whole-code bit-MAP by noise
/// enumeration (`local` excludes each coordinate's own output). Ties count
/// as errors.
///
/// # Safety
/// `out` must hold `out_len >= camellia_code_length(code)` values.
#[no_mangle]
pub unsafe extern "C" fn camellia_exact_bit_error(
    code: *const CamelliaCode,
    channel: *const CamelliaChannel,
    local: bool,
    out: *mut f64,
    out_len: usize,
) -> CamelliaStatus {
    guard(|| {
        non_null!(code, channel, out);
        let code = &(*code).0;
        if out_len < code.n() {
            return fail(
                CamelliaStatus::CamelliaErrBuffer,
                format!("output buffer holds {out_len} values, need {}", code.n()),
            );
        }
        match exact_bit_error(code, &(*channel).0, local) {
            Ok(errs) => {
                std::slice::from_raw_parts_mut(out, errs.len()).copy_from_slice(&errs);
                CamelliaStatus::CamelliaOk
            }
            Err(e) => from_error(e),
        }
    })
}

/// Runs the experiment described by a JSON config and returns its CSV report
/// in `*out`, to be released with `camellia_string_free`. `threads == 0`
/// uses the default worker count; the output does not depend on it.
///
/// # Safety
/// `config_json` must be a NUL-terminated string; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn camellia_simulate(
    config_json: *const c_char,
    threads: usize,
    out: *mut *mut c_char,
) -> CamelliaStatus {
    guard(|| {
        non_null!(config_json, out);
        let text = match CStr::from_ptr(config_json).to_str() {
            Ok(t) => t,
            Err(_) => return fail(CamelliaStatus::CamelliaErrConfig, "config is not UTF-8"),
        };
        let result = ExperimentConfig::from_json(text)
            .and_then(|cfg| Engine::new((threads > 0).then_some(threads)).run(&cfg));
        match result {
            Ok(report) => {
                let csv = CString::new(report.to_csv()).expect("CSV has no NUL bytes");
                *out = csv.into_raw();
                CamelliaStatus::CamelliaOk
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn camellia_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
