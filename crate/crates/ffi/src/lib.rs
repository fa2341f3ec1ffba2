//! C ABI for `anyonwalk`.
//!
//! Every entry point returns an [`AwStatus`]; on failure the message is kept
//! per thread and read back with [`aw_last_error`]. Distributions live behind
//! the opaque [`AwDistribution`] handle and must be released with
//! [`aw_distribution_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use anyonwalk::braid::{close_link, combined_word, CoinHistory, PathPair, WalkConfig};
use anyonwalk::linkinv::{arf, jones_at_i, linking_profile, tau, Arf};
use anyonwalk::walkdist::{
    anyonic_distribution, classical_rw, coin_z, hadamard_qw, pair_contribution, stats, DistRequest,
    Distribution, McScheme, Method,
};
use anyonwalk::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AwStatus {
    Ok = 0,
    Internal = 1,
    InvalidArgument = 2,
    CapExceeded = 3,
    NullPointer = 5,
    BufferTooSmall = 6,
    Unavailable = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AwMethod {
    Exact = 0,
    Mc = 1,
    Transfer = 2,
    Oracle = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AwMcScheme {
    Pairs = 0,
    Pooled = 1,
}

/// Opaque distribution handle.
pub struct AwDistribution {
    inner: Distribution,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct AwStats {
    pub mean: f64,
    pub variance: f64,
    pub tv_qw: f64,
    pub tv_rw: f64,
}

/// Invariants of one path pair. `tau` and `arf` are -1 for improper links.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct AwPairInvariants {
    pub proper: bool,
    pub components: u32,
    pub z: u32,
    pub tau: i32,
    pub arf: i32,
    pub contribution: i32,
    pub jones_re: f64,
    pub jones_im: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> AwStatus {
    match e.exit_code() {
        2 => AwStatus::InvalidArgument,
        3 => AwStatus::CapExceeded,
        _ => AwStatus::Internal,
    }
}

fn guard<F: FnOnce() -> Result<(), AwStatus>>(f: F) -> AwStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AwStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic inside anyonwalk".into());
            AwStatus::Panic
        }
    }
}

fn lift<T>(r: anyonwalk::Result<T>) -> Result<T, AwStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn null(what: &str) -> AwStatus {
    set_error(format!("{what} is null"));
    AwStatus::NullPointer
}

/// Message of the last failure on this thread, or null. Valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn aw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn aw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Compute a walk distribution. `method` and `scheme` take `aw_method` and
/// `aw_mc_scheme` values. `n = 0` selects `2t + 2` strands and `s0 = 0` the
/// default start; `samples` and `seed` are read only for `AW_METHOD_MC`.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn aw_distribution_compute(
    t: usize,
    n: usize,
    s0: usize,
    method: u32,
    scheme: u32,
    samples: u64,
    seed: u64,
    out: *mut *mut AwDistribution,
) -> AwStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let mut cfg = lift(WalkConfig::new(t, if n == 0 { 2 * t + 2 } else { n }))?;
        if s0 != 0 {
            cfg = lift(cfg.with_s0(s0))?;
        }
        let method = match method {
            m if m == AwMethod::Exact as u32 => Method::Exact,
            m if m == AwMethod::Mc as u32 => Method::Mc,
            m if m == AwMethod::Transfer as u32 => Method::Transfer,
            m if m == AwMethod::Oracle as u32 => Method::Oracle,
            other => {
                set_error(format!("unknown method {other}"));
                return Err(AwStatus::InvalidArgument);
            }
        };
        let mut req = DistRequest::new(method);
        if method == Method::Mc {
            req.samples = Some(samples);
            req.seed = Some(seed);
            req.scheme = match scheme {
                s if s == AwMcScheme::Pairs as u32 => McScheme::Pairs,
                s if s == AwMcScheme::Pooled as u32 => McScheme::Pooled,
                other => {
                    set_error(format!("unknown Monte Carlo scheme {other}"));
                    return Err(AwStatus::InvalidArgument);
                }
            };
        }
        let d = lift(anyonic_distribution(&cfg, &req))?;
        *out = Box::into_raw(Box::new(AwDistribution { inner: d }));
        Ok(())
    })
}

/// # Safety
/// `d` must come from [`aw_distribution_compute`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn aw_distribution_free(d: *mut AwDistribution) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Number of support points `t + 1`, or 0 for a null handle.
///
/// # Safety
/// `d` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn aw_distribution_len(d: *const AwDistribution) -> usize {
    d.as_ref().map_or(0, |d| d.inner.t() + 1)
}

/// Position `x` of support point `s`.
///
/// # Safety
/// `d` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn aw_distribution_position(
    d: *const AwDistribution,
    s: usize,
    out: *mut usize,
) -> AwStatus {
    guard(|| {
        let d = d.as_ref().ok_or_else(|| null("distribution"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        if s > d.inner.t() {
            set_error(format!("s = {s} exceeds t = {}", d.inner.t()));
            return Err(AwStatus::InvalidArgument);
        }
        *out = d.inner.position(s);
        Ok(())
    })
}

unsafe fn copy_out(values: &[f64], buf: *mut f64, len: usize) -> Result<(), AwStatus> {
    if buf.is_null() {
        return Err(null("buffer"));
    }
    if len < values.len() {
        set_error(format!("buffer holds {len} values, {} needed", values.len()));
        return Err(AwStatus::BufferTooSmall);
    }
    ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    Ok(())
}

/// Copy `p(s)`, `s = 0..=t`, into `buf`.
///
/// # Safety
/// `d` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn aw_distribution_probabilities(
    d: *const AwDistribution,
    buf: *mut f64,
    len: usize,
) -> AwStatus {
    guard(|| {
        let d = d.as_ref().ok_or_else(|| null("distribution"))?;
        copy_out(&d.inner.probabilities(), buf, len)
    })
}

/// Standard errors of a Monte Carlo distribution; `AW_STATUS_UNAVAILABLE` for exact ones.
///
/// # Safety
/// `d` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn aw_distribution_stderr(
    d: *const AwDistribution,
    buf: *mut f64,
    len: usize,
) -> AwStatus {
    guard(|| {
        let d = d.as_ref().ok_or_else(|| null("distribution"))?;
        match d.inner.stderr() {
            Some(e) => copy_out(e, buf, len),
            None => {
                set_error("distribution is exact".into());
                Err(AwStatus::Unavailable)
            }
        }
    })
}

/// Mean, variance and distances to the Hadamard and classical walks.
///
/// # Safety
/// `d` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn aw_distribution_stats(
    d: *const AwDistribution,
    out: *mut AwStats,
) -> AwStatus {
    guard(|| {
        let d = d.as_ref().ok_or_else(|| null("distribution"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = d.inner.config();
        let (qw, rw) = (hadamard_qw(cfg), classical_rw(cfg));
        let s = lift(stats(&d.inner, &[&qw, &rw]))?;
        *out = AwStats { mean: s.mean, variance: s.variance, tv_qw: s.tv[0], tv_rw: s.tv[1] };
        Ok(())
    })
}

unsafe fn history(p: *const c_char, what: &str) -> Result<CoinHistory, AwStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    let s = CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not UTF-8"));
        AwStatus::InvalidArgument
    })?;
    lift(s.parse())
}

/// Invariants of the closed link of the pair `(a, b)` given as 0/1 strings.
/// `n = 0` selects `2t + 2` strands.
///
/// # Safety
/// `a` and `b` must be NUL-terminated strings and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn aw_pair_invariants(
    a: *const c_char,
    b: *const c_char,
    n: usize,
    out: *mut AwPairInvariants,
) -> AwStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let (ha, hb) = (history(a, "a")?, history(b, "b")?);
        let t = ha.len();
        let cfg = lift(WalkConfig::new(t, if n == 0 { 2 * t + 2 } else { n }))?;
        let pair = lift(PathPair::new(ha, hb))?;
        let link = close_link(&lift(combined_word(&pair, &cfg))?);
        let proper = lift(linking_profile(&link))?.is_proper();
        let v = lift(jones_at_i(&link))?.to_complex();
        let (tau_v, arf_v) = if proper {
            let a = match lift(arf(&link))? {
                Arf::Defined(x) => x as i32,
                Arf::NotProper => -1,
            };
            (lift(tau(&link))? as i32, a)
        } else {
            (-1, -1)
        };
        *out = AwPairInvariants {
            proper,
            components: link.component_count() as u32,
            z: coin_z(&pair),
            tau: tau_v,
            arf: arf_v,
            contribution: lift(pair_contribution(&pair, &cfg))? as i32,
            jones_re: v.re,
            jones_im: v.im,
        };
        Ok(())
    })
}
