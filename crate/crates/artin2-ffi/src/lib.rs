// SPDX-License-Identifier: Apache-2.0

//! C ABI over the artin2 crate: status codes, string outputs, and an
//! opaque count-report handle.
//!
//! Conventions:
//! - Every fallible call returns [`Artin2Status`]; results go through out
//!   pointers that are written only when the status is `OK`.
//! - Strings handed to the caller are heap-allocated, NUL-terminated
//!   UTF-8; release them with [`artin2_string_free`]. The pointers from
//!   [`artin2_version`] and [`artin2_last_error_message`] are the
//!   exceptions and must not be freed.
//! - Rational arguments are NUL-terminated strings like `"2"`, `"-7/8"`.
//! - On any non-OK status the thread-local message from
//!   [`artin2_last_error_message`] describes the failure; it stays valid
//!   until the next failing call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use artin2::empirics::{count_range, CountReport};
use artin2::error::Error;
use artin2::rational::{torsion_order, NonzeroRational};

/// Result of every fallible call in this ABI.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Artin2Status {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// An argument failed to parse or was rejected by validation.
    InvalidInput = 2,
    /// The pair is multiplicatively dependent; no density is defined here.
    DependentPair = 3,
    /// The pair has torsion; the closed-form coefficient does not apply.
    NotTorsionfree = 4,
    /// A size or bound argument exceeded a documented cap.
    OutOfRange = 5,
    /// The request names a case the library deliberately does not cover.
    Unsupported = 6,
    /// Arithmetic failure or internal panic; see the error message.
    Internal = 7,
}

/// Opaque handle to a membership count over a prime range. Produced by
/// [`artin2_count_range`], read through the `artin2_report_*` accessors,
/// released with [`artin2_report_free`].
pub struct Artin2Report {
    inner: CountReport,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let clean = msg.replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(clean).expect("NUL bytes replaced"));
}

fn status_of(e: &Error) -> Artin2Status {
    match e {
        Error::DependentPair => Artin2Status::DependentPair,
        Error::NotTorsionfree(_) => Artin2Status::NotTorsionfree,
        Error::InvalidInput(_) | Error::BadReduction { .. } => Artin2Status::InvalidInput,
        Error::ValueOutOfRange(_) | Error::CeilingExceeded { .. } => Artin2Status::OutOfRange,
        Error::SquareInput | Error::UnsupportedResidue(_) | Error::NotDivisor { .. } => {
            Artin2Status::Unsupported
        }
        Error::FactorizationFailure(_) | Error::SinkFailure(_) | Error::DegenerateSystem => {
            Artin2Status::Internal
        }
    }
}

fn fail(e: &Error) -> Artin2Status {
    set_error(&e.to_string());
    status_of(e)
}

/// Unwinding across `extern "C"` is undefined behavior; trap panics and
/// report them as `Internal`.
fn guarded<F: FnOnce() -> Artin2Status>(f: F) -> Artin2Status {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            Artin2Status::Internal
        }
    }
}

/// # Safety
/// `s` must be null or a NUL-terminated string.
unsafe fn parse_rational(s: *const c_char) -> Result<NonzeroRational, Artin2Status> {
    if s.is_null() {
        set_error("null rational argument");
        return Err(Artin2Status::NullArgument);
    }
    let text = CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("rational argument is not valid UTF-8");
        Artin2Status::InvalidInput
    })?;
    text.parse().map_err(|e: Error| fail(&e))
}

fn write_string(out: *mut *mut c_char, value: String) -> Artin2Status {
    match CString::new(value) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            Artin2Status::Ok
        }
        Err(_) => {
            set_error("output contained an interior NUL byte");
            Artin2Status::Internal
        }
    }
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn artin2_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message for the most recent failure on this thread; static lifetime
/// until the next failing call on the same thread, do not free.
#[no_mangle]
pub extern "C" fn artin2_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Frees a string returned through an `out` parameter of this ABI.
/// Passing null is a no-op.
///
/// # Safety
/// `s` must be null or a pointer previously returned by this library
/// through a `char **` out parameter, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn artin2_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Writes the universal constant S = prod_p (1 - p/(p^3-1)) rounded to
/// `digits` decimal digits (1..=250), e.g. "0.5759599689" for 10.
///
/// # Safety
/// `out` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn artin2_s_digits(digits: usize, out: *mut *mut c_char) -> Artin2Status {
    guarded(|| {
        if out.is_null() {
            set_error("null out pointer");
            return Artin2Status::NullArgument;
        }
        match artin2::constants::s_digits(digits) {
            Ok(s) => write_string(out, s),
            Err(e) => fail(&e),
        }
    })
}

/// Writes the exact density coefficient c with density = c * S for a
/// torsion-free independent pair, as a fraction string like "9343/9520".
///
/// # Safety
/// `a` and `b` must be null or NUL-terminated strings; `out` must be a
/// valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn artin2_density_coefficient(
    a: *const c_char,
    b: *const c_char,
    out: *mut *mut c_char,
) -> Artin2Status {
    guarded(|| {
        if out.is_null() {
            set_error("null out pointer");
            return Artin2Status::NullArgument;
        }
        let (pa, pb) = match (parse_rational(a), parse_rational(b)) {
            (Ok(pa), Ok(pb)) => (pa, pb),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        match artin2::density::c_torsionfree(&pa, &pb) {
            Ok(c) => write_string(out, c.to_string()),
            Err(e) => fail(&e),
        }
    })
}

/// Writes the torsion order of the pair: the order of the torsion part
/// of the group generated by `a` and `b` modulo sign. 1 means
/// torsion-free. Dependent pairs yield `DEPENDENT_PAIR`.
///
/// # Safety
/// `a` and `b` must be null or NUL-terminated strings; `out` must be a
/// valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn artin2_torsion_order(
    a: *const c_char,
    b: *const c_char,
    out: *mut u64,
) -> Artin2Status {
    guarded(|| {
        if out.is_null() {
            set_error("null out pointer");
            return Artin2Status::NullArgument;
        }
        let (pa, pb) = match (parse_rational(a), parse_rational(b)) {
            (Ok(pa), Ok(pb)) => (pa, pb),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        match torsion_order(&pa, &pb) {
            Ok(t) => {
                *out = t;
                Artin2Status::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Counts primes p in [lo, hi] with b mod p in the subgroup generated by
/// a mod p. On `OK` the caller owns the report handle and must release
/// it with [`artin2_report_free`].
///
/// # Safety
/// `a` and `b` must be null or NUL-terminated strings; `out` must be a
/// valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn artin2_count_range(
    a: *const c_char,
    b: *const c_char,
    lo: u64,
    hi: u64,
    out: *mut *mut Artin2Report,
) -> Artin2Status {
    guarded(|| {
        if out.is_null() {
            set_error("null out pointer");
            return Artin2Status::NullArgument;
        }
        let (pa, pb) = match (parse_rational(a), parse_rational(b)) {
            (Ok(pa), Ok(pb)) => (pa, pb),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        match count_range(&pa, &pb, lo, hi) {
            Ok(report) => {
                *out = Box::into_raw(Box::new(Artin2Report { inner: report }));
                Artin2Status::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

unsafe fn read_report<T>(
    report: *const Artin2Report,
    out: *mut T,
    get: impl FnOnce(&CountReport) -> T,
) -> Artin2Status {
    if report.is_null() || out.is_null() {
        set_error("null report or out pointer");
        return Artin2Status::NullArgument;
    }
    *out = get(&(*report).inner);
    Artin2Status::Ok
}

/// Number of members counted in the range.
///
/// # Safety
/// `report` must be null or a live handle from [`artin2_count_range`];
/// `out` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn artin2_report_members(
    report: *const Artin2Report,
    out: *mut u64,
) -> Artin2Status {
    guarded(|| read_report(report, out, |r| r.members))
}

/// Number of primes with good reduction considered in the range.
///
/// # Safety
/// As for [`artin2_report_members`].
#[no_mangle]
pub unsafe extern "C" fn artin2_report_considered(
    report: *const Artin2Report,
    out: *mut u64,
) -> Artin2Status {
    guarded(|| read_report(report, out, |r| r.primes_considered))
}

/// Number of primes skipped for bad reduction.
///
/// # Safety
/// As for [`artin2_report_members`].
#[no_mangle]
pub unsafe extern "C" fn artin2_report_skipped(
    report: *const Artin2Report,
    out: *mut u64,
) -> Artin2Status {
    guarded(|| read_report(report, out, |r| r.skipped))
}

/// Members divided by primes considered (0 when none were considered).
///
/// # Safety
/// As for [`artin2_report_members`].
#[no_mangle]
pub unsafe extern "C" fn artin2_report_observed_ratio(
    report: *const Artin2Report,
    out: *mut f64,
) -> Artin2Status {
    guarded(|| read_report(report, out, |r| r.observed_ratio))
}

/// Observed ratio divided by the universal constant S.
///
/// # Safety
/// As for [`artin2_report_members`].
#[no_mangle]
pub unsafe extern "C" fn artin2_report_ratio_over_s(
    report: *const Artin2Report,
    out: *mut f64,
) -> Artin2Status {
    guarded(|| read_report(report, out, |r| r.ratio_over_s))
}

/// Writes the full report as a JSON document (same shape as the CLI
/// `count` result). Free the string with [`artin2_string_free`].
///
/// # Safety
/// As for [`artin2_report_members`], with `out` a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn artin2_report_json(
    report: *const Artin2Report,
    out: *mut *mut c_char,
) -> Artin2Status {
    guarded(|| {
        if report.is_null() || out.is_null() {
            set_error("null report or out pointer");
            return Artin2Status::NullArgument;
        }
        write_string(out, (*report).inner.to_json().to_string())
    })
}

/// Releases a report handle. Passing null is a no-op.
///
/// # Safety
/// `report` must be null or a handle from [`artin2_count_range`] not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn artin2_report_free(report: *mut Artin2Report) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
