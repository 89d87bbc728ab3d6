//! C ABI for `critval`.
//!
//! Every function returns a [`CritvalStatus`] and writes results through out
//! pointers. On failure the message is kept per thread and can be read with
//! [`critval_last_error`]. Measures are opaque handles released with
//! [`critval_measure_free`].

use critval::limit_law::sigma_mr;
use critval::measure::ks_distance;
use critval::random_matrices::{expected_abs_det_goe, ln_selberg_z, rho_exact_at, semicircle_density, ExactRho};
use critval::torus::{build_spectrum, kac_rice_total};
use critval::{omega_params, spectral_constants, Error, Measure1D, UniformGrid};
use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CritvalStatus {
    Ok = 0,
    InvalidParameter = 1,
    ConstraintViolation = 2,
    NumericalFailure = 3,
    Unsupported = 4,
    NullPointer = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CritvalConstants {
    pub s: f64,
    pub d: f64,
    pub h: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CritvalOmega {
    pub omega_bar: f64,
    pub omega: f64,
    pub s_omega: f64,
}

/// Opaque density on a uniform grid.
pub struct CritvalMeasure(Measure1D);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CritvalStatus {
    match e {
        Error::ConstraintViolation { .. } | Error::RequiresRAtLeastOne(_) => CritvalStatus::ConstraintViolation,
        Error::Unsupported(_) | Error::DimensionCap { .. } => CritvalStatus::Unsupported,
        Error::InvalidParameter(_) | Error::DegenerateVariance | Error::ZeroMass | Error::Unnormalized(_) => {
            CritvalStatus::InvalidParameter
        }
        _ => CritvalStatus::NumericalFailure,
    }
}

// Out pointers are written only after a computation succeeds, so state seen by
// the caller is consistent even if a panic unwinds through the closure.
fn guard<F: FnOnce() -> Result<(), Error>>(f: F) -> CritvalStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CritvalStatus::Ok
        }
        Ok(Err(e)) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            CritvalStatus::Panic
        }
    }
}

macro_rules! require {
    ($($p:expr),+) => {
        $(if $p.is_null() {
            set_error(format!("null pointer: {}", stringify!($p)));
            return CritvalStatus::NullPointer;
        })+
    };
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn critval_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn critval_spectral_constants(m: i64, out: *mut CritvalConstants) -> CritvalStatus {
    require!(out);
    let out = unsafe { &mut *out };
    guard(move || {
        let c = spectral_constants(m)?;
        *out = CritvalConstants { s: c.s, d: c.d, h: c.h };
        Ok(())
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn critval_omega_params(m: i64, l: f64, r: f64, out: *mut CritvalOmega) -> CritvalStatus {
    require!(out);
    let out = unsafe { &mut *out };
    guard(move || {
        let p = omega_params(m, l, r)?;
        *out = CritvalOmega { omega_bar: p.omega_bar, omega: p.omega, s_omega: p.s_omega };
        Ok(())
    })
}

/// `ln Z_m` of the Selberg-type normalization.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn critval_ln_selberg_z(m: u32, out: *mut f64) -> CritvalStatus {
    require!(out);
    let out = unsafe { &mut *out };
    guard(move || {
        *out = ln_selberg_z(m)?;
        Ok(())
    })
}

/// Exact one-point function `rho_{n,v}(x)` for `n <= 4`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn critval_rho_exact(n: usize, v: f64, x: f64, out: *mut f64) -> CritvalStatus {
    require!(out);
    let out = unsafe { &mut *out };
    guard(move || {
        *out = rho_exact_at(n, v, x)?;
        Ok(())
    })
}

/// `E|det(A - c)|` for `A` in the GOE of size `m <= 3` with variance `v`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn critval_expected_abs_det(m: usize, v: f64, c: f64, out: *mut f64) -> CritvalStatus {
    require!(out);
    let out = unsafe { &mut *out };
    guard(move || {
        let rho = ExactRho::new(m + 1, v)?;
        *out = expected_abs_det_goe(m, v, c, &rho)?.value;
        Ok(())
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn critval_semicircle_density(v: f64, x: f64, out: *mut f64) -> CritvalStatus {
    require!(out);
    let out = unsafe { &mut *out };
    guard(move || {
        if !(v > 0.0) {
            return Err(Error::InvalidParameter(format!("v must be positive, got {v}")));
        }
        *out = semicircle_density(v, x);
        Ok(())
    })
}

/// The limit measure `sigma_{m,r}` (`m <= 3`, exact one-point function) on
/// `n` points of `[lo, hi]`.
///
/// # Safety
/// `out` must be valid for writes. The handle must be released with
/// [`critval_measure_free`].
#[no_mangle]
pub unsafe extern "C" fn critval_sigma_mr(
    m: usize,
    r: f64,
    lo: f64,
    hi: f64,
    n: usize,
    out: *mut *mut CritvalMeasure,
) -> CritvalStatus {
    require!(out);
    let out = unsafe { &mut *out };
    guard(move || {
        let grid = UniformGrid::new(lo, hi, n)?;
        let rho = ExactRho::new(m + 1, 1.0)?;
        let s = sigma_mr(m, r, grid, &rho)?;
        *out = Box::into_raw(Box::new(CritvalMeasure(s)));
        Ok(())
    })
}

/// # Safety
/// `measure` must come from this library and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn critval_measure_free(measure: *mut CritvalMeasure) {
    if !measure.is_null() {
        drop(unsafe { Box::from_raw(measure) });
    }
}

/// # Safety
/// `measure` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn critval_measure_len(measure: *const CritvalMeasure) -> usize {
    if measure.is_null() {
        return 0;
    }
    unsafe { (*measure).0.density().len() }
}

/// Copies `min(len, grid size)` density values into `buf` and writes the grid
/// bounds and total mass.
///
/// # Safety
/// `measure` must be a live handle; `buf` valid for `len` writes; the other
/// out pointers valid for writes.
#[no_mangle]
pub unsafe extern "C" fn critval_measure_read(
    measure: *const CritvalMeasure,
    buf: *mut f64,
    len: usize,
    lo: *mut f64,
    hi: *mut f64,
    mass: *mut f64,
) -> CritvalStatus {
    require!(measure, buf, lo, hi, mass);
    let m = unsafe { &(*measure).0 };
    let dst = unsafe { std::slice::from_raw_parts_mut(buf, len) };
    let (lo, hi, mass) = unsafe { (&mut *lo, &mut *hi, &mut *mass) };
    guard(move || {
        let d = m.density();
        let k = len.min(d.len());
        dst[..k].copy_from_slice(&d[..k]);
        let g = m.grid();
        *lo = g.lo;
        *hi = g.hi;
        *mass = m.mass();
        Ok(())
    })
}

/// Kolmogorov-Smirnov distance between two measures.
///
/// # Safety
/// Both handles live; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn critval_ks_distance(
    a: *const CritvalMeasure,
    b: *const CritvalMeasure,
    out: *mut f64,
) -> CritvalStatus {
    require!(a, b, out);
    let (a, b, out) = unsafe { (&(*a).0, &(*b).0, &mut *out) };
    guard(move || {
        *out = ks_distance(a, b)?;
        Ok(())
    })
}

/// Kac-Rice expected number of critical points of the torus field.
///
/// # Safety
/// `value` and `std_error` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn critval_kac_rice_total(
    m: usize,
    l: f64,
    omega: f64,
    samples: usize,
    seed: u64,
    value: *mut f64,
    std_error: *mut f64,
) -> CritvalStatus {
    require!(value, std_error);
    let (value, std_error) = unsafe { (&mut *value, &mut *std_error) };
    guard(move || {
        let s = build_spectrum(m, l)?;
        let e = kac_rice_total(&s, omega, samples, seed)?;
        *value = e.value;
        *std_error = e.std_error;
        Ok(())
    })
}
