//! C ABI over `fuplab`: opaque interval-set handles, the porosity certifier, the
//! restriction norm and the δ rule.
//!
//! Every fallible call returns a [`FupStatus`]; on failure a message is kept
//! per thread and read back with [`fup_last_error`]. Panics never cross the
//! boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fuplab::generate::{make_cantor, make_random_porous, CantorSpec};
use fuplab::interval::parse_rational;
use fuplab::operator::{discretize, fup_norm, Grid, GridSet};
use fuplab::porosity::{check_porosity, PorosityParams, PorosityStatus};
use fuplab::theta::choose_delta;
use fuplab::{Error, IntervalSet};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FupStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    ComputationFailed = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FupPorosity {
    Porous = 0,
    NotPorous = 1,
    Unknown = 2,
}

/// Exact finite union of closed rational intervals.
pub struct FupIntervalSet {
    inner: IntervalSet,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> FupStatus {
    match err {
        Error::Parse { .. } => FupStatus::ParseError,
        Error::NotConverged { .. } | Error::Io(_) => FupStatus::ComputationFailed,
        _ => FupStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), FupStatus>) -> FupStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FupStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            FupStatus::Panic
        }
    }
}

fn fail(err: Error) -> FupStatus {
    let s = status_of(&err);
    set_error(err.to_string());
    s
}

fn null(what: &str) -> FupStatus {
    set_error(format!("{what} is null"));
    FupStatus::NullPointer
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, FupStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        FupStatus::InvalidArgument
    })
}

unsafe fn emit(out: *mut *mut FupIntervalSet, set: IntervalSet) {
    *out = Box::into_raw(Box::new(FupIntervalSet { inner: set }));
}

/// Message for the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fup_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses the `intervalset v1` text format.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fup_set_from_text(text: *const c_char, out: *mut *mut FupIntervalSet) -> FupStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = read_str(text, "text")?;
        let set = IntervalSet::from_text(text).map_err(fail)?;
        emit(out, set);
        Ok(())
    })
}

/// Base-`base` Cantor set keeping `digits` at every level.
///
/// # Safety
/// `digits` must point to `n_digits` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fup_set_cantor(
    base: u32,
    digits: *const u32,
    n_digits: usize,
    depth: u32,
    out: *mut *mut FupIntervalSet,
) -> FupStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if digits.is_null() && n_digits > 0 {
            return Err(null("digits"));
        }
        let ds = if n_digits == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(digits, n_digits).to_vec()
        };
        let set = CantorSpec::new(base, ds, depth)
            .and_then(|s| make_cantor(&s))
            .map_err(fail)?;
        emit(out, set);
        Ok(())
    })
}

/// Seeded random `nu`-porous set on scales `2^{-depth}` to 1; `nu` is a
/// rational string such as `"1/10"`.
///
/// # Safety
/// `nu` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fup_set_random_porous(
    nu: *const c_char,
    depth: u32,
    seed: u64,
    out: *mut *mut FupIntervalSet,
) -> FupStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let nu = parse_rational(read_str(nu, "nu")?).map_err(fail)?;
        let set = make_random_porous(&nu, depth, seed).map_err(fail)?;
        emit(out, set);
        Ok(())
    })
}

/// # Safety
/// `set` must be null or a handle from this library that was not freed yet.
#[no_mangle]
pub unsafe extern "C" fn fup_set_free(set: *mut FupIntervalSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Number of maximal intervals; 0 for a null handle.
///
/// # Safety
/// `set` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fup_set_len(set: *const FupIntervalSet) -> usize {
    set.as_ref().map_or(0, |s| s.inner.len())
}

/// Text rendering; free the result with [`fup_string_free`].
///
/// # Safety
/// `set` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fup_set_to_text(set: *const FupIntervalSet, out: *mut *mut c_char) -> FupStatus {
    guard(|| {
        let Some(set) = set.as_ref() else {
            return Err(null("set"));
        };
        if out.is_null() {
            return Err(null("out"));
        }
        *out = CString::new(set.inner.to_text()).unwrap_or_default().into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn fup_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Exact porosity verdict on scales `alpha0..alpha1` (rational strings).
///
/// # Safety
/// String arguments must be NUL-terminated; `set` live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fup_check_porosity(
    set: *const FupIntervalSet,
    nu: *const c_char,
    alpha0: *const c_char,
    alpha1: *const c_char,
    out: *mut FupPorosity,
) -> FupStatus {
    guard(|| {
        let Some(set) = set.as_ref() else {
            return Err(null("set"));
        };
        if out.is_null() {
            return Err(null("out"));
        }
        let parse = |p, what| -> Result<_, FupStatus> { parse_rational(read_str(p, what)?).map_err(fail) };
        let params =
            PorosityParams::new(parse(nu, "nu")?, parse(alpha0, "alpha0")?, parse(alpha1, "alpha1")?).map_err(fail)?;
        let verdict = check_porosity(&set.inner, &params).map_err(fail)?;
        *out = match verdict.status {
            PorosityStatus::CertifiedPorous => FupPorosity::Porous,
            PorosityStatus::CertifiedNotPorous => FupPorosity::NotPorous,
            PorosityStatus::Unknown => FupPorosity::Unknown,
        };
        Ok(())
    })
}

/// `‖1_X F_N 1_Y‖` for index sets on the grid `Z/nZ`.
///
/// # Safety
/// `x` and `y` must point to `nx` and `ny` readable indices; `sigma` writable.
#[no_mangle]
pub unsafe extern "C" fn fup_norm_indices(
    n: usize,
    x: *const usize,
    nx: usize,
    y: *const usize,
    ny: usize,
    tol: f64,
    sigma: *mut f64,
) -> FupStatus {
    guard(|| {
        if sigma.is_null() {
            return Err(null("sigma"));
        }
        if (x.is_null() && nx > 0) || (y.is_null() && ny > 0) {
            return Err(null("index array"));
        }
        let slice = |p: *const usize, len| {
            if len == 0 {
                Vec::new()
            } else {
                std::slice::from_raw_parts(p, len).to_vec()
            }
        };
        let grid = Grid::new(n).map_err(fail)?;
        let gx = GridSet::new(grid, slice(x, nx)).map_err(fail)?;
        let gy = GridSet::new(grid, slice(y, ny)).map_err(fail)?;
        *sigma = fup_norm(&gx, &gy, tol).map_err(fail)?.sigma;
        Ok(())
    })
}

/// Norm of the restriction between `discretize(x, n)` and `discretize(y, n)`.
///
/// # Safety
/// `x`, `y` must be live handles; `sigma` writable.
#[no_mangle]
pub unsafe extern "C" fn fup_norm_sets(
    x: *const FupIntervalSet,
    y: *const FupIntervalSet,
    n: usize,
    tol: f64,
    sigma: *mut f64,
) -> FupStatus {
    guard(|| {
        let (Some(x), Some(y)) = (x.as_ref(), y.as_ref()) else {
            return Err(null("set"));
        };
        if sigma.is_null() {
            return Err(null("sigma"));
        }
        let gx = discretize(&x.inner, n).map_err(fail)?;
        let gy = discretize(&y.inner, n).map_err(fail)?;
        *sigma = fup_norm(&gx, &gy, tol).map_err(fail)?.sigma;
        Ok(())
    })
}

/// `m = ⌈2/ν⌉`, `ε = 1 − log(m−1)/log m` and the δ midpoint for `ν = num/den`.
///
/// # Safety
/// Output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn fup_choose_delta(
    nu_num: i64,
    nu_den: i64,
    delta: *mut f64,
    m: *mut u64,
    epsilon: *mut f64,
) -> FupStatus {
    guard(|| {
        if delta.is_null() || m.is_null() || epsilon.is_null() {
            return Err(null("output"));
        }
        if nu_den == 0 {
            set_error("denominator is zero".into());
            return Err(FupStatus::InvalidArgument);
        }
        let w = choose_delta(&fuplab::interval::rat(nu_num, nu_den)).map_err(fail)?;
        *delta = w.delta;
        *m = w.m;
        *epsilon = w.epsilon;
        Ok(())
    })
}
