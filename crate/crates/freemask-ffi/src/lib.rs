//! C interface to the freemask library.
//!
//! Conventions: every fallible function returns an `FmStatus` and writes
//! its result through an out pointer, which is only written on
//! `FM_STATUS_OK`. On failure a thread-local message is set; read it
//! with `fm_last_error_message` before the next failing call on the same
//! thread. Masks are opaque handles that must be released with
//! `fm_mask_free`, and strings returned by this library with
//! `fm_string_free`. Panics never unwind across the boundary; they come
//! back as `FM_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use freemask::error::Error;
use freemask::expcli::{parse_config, run};
use freemask::freelimits::{
    elliptic_star_moment, mp_cdf, mp_density, mp_moment_closed, mp_moment_nc, MPLaw,
};
use freemask::masks::{epsilon_sets, mask_partition_weight, MaskMatrix};

/// Result of a C API call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FmStatus {
    /// Success.
    Ok = 0,
    /// Mathematically invalid input.
    Domain = 1,
    /// Invalid configuration.
    Config = 2,
    /// Malformed text input.
    Parse = 3,
    /// Enumeration or summation budget exceeded.
    SizeLimit = 4,
    /// Numerical routine failed.
    Numerical = 5,
    /// File system failure.
    Io = 6,
    /// A required pointer was null.
    NullPointer = 7,
    /// Internal panic caught at the boundary.
    Panic = 8,
}

/// Opaque 0/1 mask handle.
pub struct FmMask {
    inner: MaskMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    let c = CString::new(sanitized).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn fail(e: &Error) -> FmStatus {
    set_error(&e.to_string());
    match e {
        Error::Domain(_) => FmStatus::Domain,
        Error::Config(_) => FmStatus::Config,
        Error::Parse { .. } => FmStatus::Parse,
        Error::SizeLimit(_) => FmStatus::SizeLimit,
        Error::Numerical(_) => FmStatus::Numerical,
        Error::Io(_) => FmStatus::Io,
    }
}

fn null_pointer(name: &str) -> FmStatus {
    set_error(&format!("{name} must not be null"));
    FmStatus::NullPointer
}

fn guard(f: impl FnOnce() -> FmStatus) -> FmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            FmStatus::Panic
        }
    }
}

/// Writes a computed value through `out`, mapping errors to a status.
fn complete<T>(out: *mut T, result: Result<T, Error>) -> FmStatus {
    if out.is_null() {
        return null_pointer("out");
    }
    match result {
        Ok(v) => {
            unsafe { *out = v };
            FmStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn fm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// k-th Catalan number.
#[no_mangle]
pub extern "C" fn fm_catalan(k: usize, out: *mut u64) -> FmStatus {
    guard(|| complete(out, freemask::combinat::catalan(k)))
}

/// Limit moment of an elliptic variable for a star pattern: `stars` has
/// `len` entries, nonzero meaning a starred letter.
#[no_mangle]
pub unsafe extern "C" fn fm_elliptic_star_moment(
    stars: *const u8,
    len: usize,
    rho: f64,
    out: *mut f64,
) -> FmStatus {
    guard(|| {
        if stars.is_null() && len > 0 {
            return null_pointer("stars");
        }
        let pattern: Vec<bool> = unsafe { std::slice::from_raw_parts(stars, len) }
            .iter()
            .map(|&b| b != 0)
            .collect();
        complete(out, elliptic_star_moment(&pattern, rho))
    })
}

/// k-th Marchenko-Pastur moment via the non-crossing partition sum.
#[no_mangle]
pub extern "C" fn fm_mp_moment_nc(k: usize, y: f64, out: *mut f64) -> FmStatus {
    guard(|| complete(out, mp_moment_nc(k, y)))
}

/// k-th Marchenko-Pastur moment via the closed binomial form.
#[no_mangle]
pub extern "C" fn fm_mp_moment_closed(k: usize, y: f64, out: *mut f64) -> FmStatus {
    guard(|| complete(out, mp_moment_closed(k, y)))
}

/// Density of the Marchenko-Pastur law with aspect ratio y at x
/// (absolutely continuous part only).
#[no_mangle]
pub extern "C" fn fm_mp_density(x: f64, y: f64, out: *mut f64) -> FmStatus {
    guard(|| complete(out, MPLaw::new(y).map(|law| mp_density(x, &law))))
}

/// Cumulative distribution of the Marchenko-Pastur law with aspect
/// ratio y at x, including the atom at zero when y > 1.
#[no_mangle]
pub extern "C" fn fm_mp_cdf(x: f64, y: f64, out: *mut f64) -> FmStatus {
    guard(|| complete(out, MPLaw::new(y).map(|law| mp_cdf(x, &law))))
}

fn mask_out(out: *mut *mut FmMask, result: Result<MaskMatrix, Error>) -> FmStatus {
    if out.is_null() {
        return null_pointer("out");
    }
    match result {
        Ok(inner) => {
            unsafe { *out = Box::into_raw(Box::new(FmMask { inner })) };
            FmStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// All-ones mask.
#[no_mangle]
pub extern "C" fn fm_mask_full(rows: usize, cols: usize, out: *mut *mut FmMask) -> FmStatus {
    guard(|| mask_out(out, MaskMatrix::full(rows, cols)))
}

/// IID Bernoulli(q) mask drawn from the given seed.
#[no_mangle]
pub extern "C" fn fm_mask_bernoulli(
    rows: usize,
    cols: usize,
    q: f64,
    seed: u64,
    out: *mut *mut FmMask,
) -> FmStatus {
    guard(|| mask_out(out, MaskMatrix::bernoulli(rows, cols, q, seed)))
}

/// Square mask with zeros on the band |i - j| <= width.
#[no_mangle]
pub extern "C" fn fm_mask_band_removed(n: usize, width: usize, out: *mut *mut FmMask) -> FmStatus {
    guard(|| mask_out(out, MaskMatrix::band_removed(n, width)))
}

/// Square mask zeroing the first floor(frac * n) columns.
#[no_mangle]
pub extern "C" fn fm_mask_kill_columns(n: usize, frac: f64, out: *mut *mut FmMask) -> FmStatus {
    guard(|| mask_out(out, MaskMatrix::kill_columns(n, frac)))
}

/// Square parity mask keeping entries with i + j even.
#[no_mangle]
pub extern "C" fn fm_mask_checkerboard(n: usize, out: *mut *mut FmMask) -> FmStatus {
    guard(|| mask_out(out, MaskMatrix::checkerboard(n)))
}

/// Rectangular mask zeroing the top-left alpha x beta block.
#[no_mangle]
pub extern "C" fn fm_mask_block_zero(
    rows: usize,
    cols: usize,
    alpha: f64,
    beta: f64,
    out: *mut *mut FmMask,
) -> FmStatus {
    guard(|| mask_out(out, MaskMatrix::block_zero(rows, cols, alpha, beta)))
}

/// Releases a mask handle. Null is allowed.
#[no_mangle]
pub unsafe extern "C" fn fm_mask_free(mask: *mut FmMask) {
    if !mask.is_null() {
        drop(unsafe { Box::from_raw(mask) });
    }
}

/// Fraction of ones in the mask.
#[no_mangle]
pub unsafe extern "C" fn fm_mask_density(mask: *const FmMask, out: *mut f64) -> FmStatus {
    guard(|| {
        if mask.is_null() {
            return null_pointer("mask");
        }
        let m = unsafe { &(*mask).inner };
        complete(out, Ok(m.density()))
    })
}

/// Density plus the sizes of the epsilon-full row and column sets:
/// rows (columns) missing at most an epsilon fraction of entries.
#[no_mangle]
pub unsafe extern "C" fn fm_mask_epsilon_sets(
    mask: *const FmMask,
    epsilon: f64,
    density: *mut f64,
    row_set_size: *mut usize,
    col_set_size: *mut usize,
) -> FmStatus {
    guard(|| {
        if mask.is_null() {
            return null_pointer("mask");
        }
        if density.is_null() || row_set_size.is_null() || col_set_size.is_null() {
            return null_pointer("out");
        }
        let m = unsafe { &(*mask).inner };
        match epsilon_sets(m, epsilon) {
            Ok(report) => {
                unsafe {
                    *density = report.density;
                    *row_set_size = report.row_set_size;
                    *col_set_size = report.col_set_size;
                }
                FmStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Normalized mask weight of a pair partition: `pairs` holds k pairs
/// flattened as r1, s1, r2, s2, ... with 1-based indices covering
/// {1, ..., 2k}.
#[no_mangle]
pub unsafe extern "C" fn fm_mask_partition_weight(
    mask: *const FmMask,
    pairs: *const usize,
    k: usize,
    out: *mut f64,
) -> FmStatus {
    guard(|| {
        if mask.is_null() {
            return null_pointer("mask");
        }
        if pairs.is_null() && k > 0 {
            return null_pointer("pairs");
        }
        let flat = unsafe { std::slice::from_raw_parts(pairs, 2 * k) };
        let pair_vec: Vec<(usize, usize)> = flat.chunks_exact(2).map(|c| (c[0], c[1])).collect();
        let m = unsafe { &(*mask).inner };
        let result = freemask::combinat::PairPartition::new(pair_vec)
            .and_then(|pi| mask_partition_weight(m, &pi));
        complete(out, result)
    })
}

/// Parses a JSON experiment config, runs it, and returns the JSON report
/// through `out_report_json`. The caller frees the string with
/// `fm_string_free`. A report is returned even when comparisons fail;
/// check its "pass" field.
#[no_mangle]
pub unsafe extern "C" fn fm_run_config_json(
    config_json: *const c_char,
    out_report_json: *mut *mut c_char,
) -> FmStatus {
    guard(|| {
        if config_json.is_null() {
            return null_pointer("config_json");
        }
        if out_report_json.is_null() {
            return null_pointer("out_report_json");
        }
        let text = match unsafe { CStr::from_ptr(config_json) }.to_str() {
            Ok(t) => t,
            Err(_) => {
                set_error("config_json is not valid UTF-8");
                return FmStatus::Parse;
            }
        };
        let report = parse_config(text).and_then(|cfg| run(&cfg)?.report_json());
        match report {
            Ok(json) => {
                let c = CString::new(json.replace('\0', " ")).unwrap_or_default();
                unsafe { *out_report_json = c.into_raw() };
                FmStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Releases a string returned by this library. Null is allowed.
#[no_mangle]
pub unsafe extern "C" fn fm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
