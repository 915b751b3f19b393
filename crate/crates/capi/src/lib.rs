//! C ABI over the bmv library: opaque handles, error codes, caller-owned
//! buffers. The header is generated into include/bmv.h by the build script.
//!
//! Conventions:
//! - matrices are passed as row-major n*n arrays of doubles; imaginary parts
//!   may be NULL for real matrices
//! - functions return BMV_OK (0) or a negative error code
//! - results written through out-pointers; handles freed by their *_free

use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use bmv::config::RunConfig;
use bmv::error::Error;
use bmv::linalg::{C64, CMatrix};
use bmv::measure::{assemble_measure, MeasureRepresentation};
use bmv::pair::HermitianPair;
use bmv::reduce::{default_eps_split, reduce_pair};
use bmv::verify::{trace_exp, trace_poly_coeffs, verify};

/// Status codes returned by every fallible function.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BmvStatus {
    /// success
    Ok = 0,
    /// a required pointer was NULL or a size was zero
    NullArgument = -1,
    /// input failed validation (not Hermitian, bad dimension, bad parameter)
    InvalidInput = -2,
    /// a numerical stage failed (radius search, tracking, convergence)
    NumericalFailure = -3,
    /// an output buffer was too small
    BufferTooSmall = -4,
    /// an internal panic was caught; this is a bug
    Internal = -5,
}

fn status_of(err: &Error) -> BmvStatus {
    match err.exit_code() {
        2 => BmvStatus::InvalidInput,
        _ => BmvStatus::NumericalFailure,
    }
}

/// Opaque measure handle.
pub struct BmvMeasure {
    measure: MeasureRepresentation,
    radius: f64,
    n_nodes: usize,
}

/// Flat verification summary (full detail lives in the Rust/CLI report).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct BmvReport {
    pub max_rel_error: f64,
    pub residual_max: f64,
    pub min_density: f64,
    pub max_density: f64,
    pub shift: f64,
    pub radius: f64,
    pub n_nodes: usize,
    /// 1 when every check passed
    pub all_pass: u8,
    pub positivity_pass: u8,
    pub laplace_pass: u8,
    pub residual_pass: u8,
}

unsafe fn matrix_from_parts(n: usize, re: *const f64, im: *const f64) -> Option<CMatrix> {
    if re.is_null() || n == 0 {
        return None;
    }
    let re = unsafe { std::slice::from_raw_parts(re, n * n) };
    let im = if im.is_null() {
        None
    } else {
        Some(unsafe { std::slice::from_raw_parts(im, n * n) })
    };
    let mut m = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let idx = i * n + j;
            m[(i, j)] = C64::new(re[idx], im.map_or(0.0, |s| s[idx]));
        }
    }
    Some(m)
}

unsafe fn pair_from_parts(
    n: usize,
    a_re: *const f64,
    a_im: *const f64,
    b_re: *const f64,
    b_im: *const f64,
) -> Result<HermitianPair, BmvStatus> {
    let a = unsafe { matrix_from_parts(n, a_re, a_im) }.ok_or(BmvStatus::NullArgument)?;
    let b = unsafe { matrix_from_parts(n, b_re, b_im) }.ok_or(BmvStatus::NullArgument)?;
    HermitianPair::new(a, b).map_err(|e| status_of(&e))
}

fn guarded<F: FnOnce() -> BmvStatus>(f: F) -> BmvStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(BmvStatus::Internal)
}

/// Compute the representing measure of Tr exp(A - tB).
///
/// `eps_split <= 0` selects the default splitting scale. On success writes a
/// handle to `out`; free it with `bmv_measure_free`.
///
/// # Safety
/// `a_re`, `b_re` must point to n*n doubles; `a_im`, `b_im` to n*n doubles or
/// be NULL; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bmv_measure_compute(
    n: usize,
    a_re: *const f64,
    a_im: *const f64,
    b_re: *const f64,
    b_im: *const f64,
    eps_split: f64,
    out: *mut *mut BmvMeasure,
) -> BmvStatus {
    guarded(|| {
        if out.is_null() {
            return BmvStatus::NullArgument;
        }
        let pair = match unsafe { pair_from_parts(n, a_re, a_im, b_re, b_im) } {
            Ok(p) => p,
            Err(code) => return code,
        };
        let eps = if eps_split > 0.0 {
            eps_split
        } else {
            match default_eps_split(pair.b()) {
                Ok(e) => e,
                Err(e) => return status_of(&e),
            }
        };
        let red = match reduce_pair(&pair, eps) {
            Ok(r) => r,
            Err(e) => return status_of(&e),
        };
        match assemble_measure(&red, &RunConfig::default()) {
            Ok(asm) => {
                let handle = Box::new(BmvMeasure {
                    measure: asm.measure,
                    radius: asm.contour.radius(),
                    n_nodes: asm.contour.n_nodes(),
                });
                unsafe { *out = Box::into_raw(handle) };
                BmvStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// # Safety
/// `handle` must come from `bmv_measure_compute` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn bmv_measure_free(handle: *mut BmvMeasure) {
    if !handle.is_null() {
        drop(unsafe { Box::from_raw(handle) });
    }
}

/// Number of atoms (always the dimension n).
///
/// # Safety
/// `handle` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn bmv_measure_atom_count(handle: *const BmvMeasure) -> usize {
    if handle.is_null() {
        return 0;
    }
    unsafe { &*handle }.measure.atoms.len()
}

/// Number of density samples ((n-1) * points_per_interval).
///
/// # Safety
/// `handle` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn bmv_measure_density_count(handle: *const BmvMeasure) -> usize {
    if handle.is_null() {
        return 0;
    }
    unsafe { &*handle }.measure.density.len()
}

/// Spectrum shift applied during reduction (atom locations are in reduced
/// coordinates; subtract the shift for original-B coordinates).
///
/// # Safety
/// `handle` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn bmv_measure_shift(handle: *const BmvMeasure) -> f64 {
    if handle.is_null() {
        return f64::NAN;
    }
    unsafe { &*handle }.measure.shift
}

/// Contour radius the measure was computed on.
///
/// # Safety
/// `handle` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn bmv_measure_radius(handle: *const BmvMeasure) -> f64 {
    if handle.is_null() {
        return f64::NAN;
    }
    unsafe { &*handle }.radius
}

/// Node count at convergence.
///
/// # Safety
/// `handle` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn bmv_measure_nodes(handle: *const BmvMeasure) -> usize {
    if handle.is_null() {
        return 0;
    }
    unsafe { &*handle }.n_nodes
}

/// Copy atom locations and weights into caller buffers of capacity `cap`.
///
/// # Safety
/// `locations` and `weights` must each point to at least `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn bmv_measure_atoms(
    handle: *const BmvMeasure,
    locations: *mut f64,
    weights: *mut f64,
    cap: usize,
) -> BmvStatus {
    guarded(|| {
        if handle.is_null() || locations.is_null() || weights.is_null() {
            return BmvStatus::NullArgument;
        }
        let atoms = &unsafe { &*handle }.measure.atoms;
        if cap < atoms.len() {
            return BmvStatus::BufferTooSmall;
        }
        for (i, &(s, w)) in atoms.iter().enumerate() {
            unsafe {
                *locations.add(i) = s;
                *weights.add(i) = w;
            }
        }
        BmvStatus::Ok
    })
}

/// Copy density sample locations and values into caller buffers.
///
/// # Safety
/// `s` and `w` must each point to at least `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn bmv_measure_density(
    handle: *const BmvMeasure,
    s: *mut f64,
    w: *mut f64,
    cap: usize,
) -> BmvStatus {
    guarded(|| {
        if handle.is_null() || s.is_null() || w.is_null() {
            return BmvStatus::NullArgument;
        }
        let density = &unsafe { &*handle }.measure.density;
        if cap < density.len() {
            return BmvStatus::BufferTooSmall;
        }
        for (i, &(si, wi)) in density.iter().enumerate() {
            unsafe {
                *s.add(i) = si;
                *w.add(i) = wi;
            }
        }
        BmvStatus::Ok
    })
}

/// Run the full verification (Laplace round-trip, positivity, contour
/// residual) with default configuration and fill `report`.
///
/// # Safety
/// Matrix pointers as in `bmv_measure_compute`; `report` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bmv_verify(
    n: usize,
    a_re: *const f64,
    a_im: *const f64,
    b_re: *const f64,
    b_im: *const f64,
    report: *mut BmvReport,
) -> BmvStatus {
    guarded(|| {
        if report.is_null() {
            return BmvStatus::NullArgument;
        }
        let pair = match unsafe { pair_from_parts(n, a_re, a_im, b_re, b_im) } {
            Ok(p) => p,
            Err(code) => return code,
        };
        match verify(&pair, &RunConfig::default()) {
            Ok(r) => {
                unsafe {
                    *report = BmvReport {
                        max_rel_error: r.max_rel_error,
                        residual_max: r.residual_max,
                        min_density: r.min_density,
                        max_density: r.max_density,
                        shift: r.shift,
                        radius: r.radius,
                        n_nodes: r.n_nodes,
                        all_pass: u8::from(r.all_pass()),
                        positivity_pass: u8::from(r.positivity_pass),
                        laplace_pass: u8::from(r.laplace_pass),
                        residual_pass: u8::from(r.residual_pass),
                    };
                }
                BmvStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// f(t) = Tr exp(A - tB), written to `out`.
///
/// # Safety
/// Matrix pointers as in `bmv_measure_compute`; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bmv_trace_exp(
    n: usize,
    a_re: *const f64,
    a_im: *const f64,
    b_re: *const f64,
    b_im: *const f64,
    t: f64,
    out: *mut f64,
) -> BmvStatus {
    guarded(|| {
        if out.is_null() {
            return BmvStatus::NullArgument;
        }
        let pair = match unsafe { pair_from_parts(n, a_re, a_im, b_re, b_im) } {
            Ok(p) => p,
            Err(code) => return code,
        };
        match trace_exp(&pair, t) {
            Ok(v) => {
                unsafe { *out = v };
                BmvStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Coefficients c_0..c_p of t -> Tr (A + tB)^p for positive semi-definite B.
/// `coeffs` must hold p + 1 doubles.
///
/// # Safety
/// Matrix pointers as in `bmv_measure_compute`; `coeffs` must point to at
/// least p + 1 doubles.
#[no_mangle]
pub unsafe extern "C" fn bmv_poly_coeffs(
    n: usize,
    a_re: *const f64,
    a_im: *const f64,
    b_re: *const f64,
    b_im: *const f64,
    p: usize,
    coeffs: *mut f64,
) -> BmvStatus {
    guarded(|| {
        if coeffs.is_null() {
            return BmvStatus::NullArgument;
        }
        let pair = match unsafe { pair_from_parts(n, a_re, a_im, b_re, b_im) } {
            Ok(p) => p,
            Err(code) => return code,
        };
        match trace_poly_coeffs(&pair, p) {
            Ok(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    unsafe { *coeffs.add(i) = *c };
                }
                BmvStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Static name for a status code.
#[no_mangle]
pub extern "C" fn bmv_status_name(code: i32) -> *const c_char {
    let name: &'static [u8] = match code {
        0 => b"ok\0",
        -1 => b"null argument\0",
        -2 => b"invalid input\0",
        -3 => b"numerical failure\0",
        -4 => b"buffer too small\0",
        -5 => b"internal error\0",
        _ => b"unknown\0",
    };
    name.as_ptr() as *const c_char
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CStr;

    #[test]
    fn measure_roundtrip_through_c_abi() {
        let n = 2usize;
        let a_re = [0.0, 1.0, 1.0, 0.0];
        let b_re = [1.0, 0.0, 0.0, 2.0];
        let mut handle: *mut BmvMeasure = std::ptr::null_mut();
        let code = unsafe {
            bmv_measure_compute(
                n,
                a_re.as_ptr(),
                std::ptr::null(),
                b_re.as_ptr(),
                std::ptr::null(),
                0.0,
                &mut handle,
            )
        };
        assert_eq!(code, BmvStatus::Ok);
        assert!(!handle.is_null());
        let atom_count = unsafe { bmv_measure_atom_count(handle) };
        assert_eq!(atom_count, 2);
        let density_count = unsafe { bmv_measure_density_count(handle) };
        assert_eq!(density_count, 32);
        let mut locs = vec![0.0; atom_count];
        let mut weights = vec![0.0; atom_count];
        let code = unsafe {
            bmv_measure_atoms(handle, locs.as_mut_ptr(), weights.as_mut_ptr(), atom_count)
        };
        assert_eq!(code, BmvStatus::Ok);
        let shift = unsafe { bmv_measure_shift(handle) };
        assert!((locs[0] - shift - 1.0).abs() < 1e-12);
        assert!((weights[0] - 1.0).abs() < 1e-12);
        let mut s = vec![0.0; density_count];
        let mut w = vec![0.0; density_count];
        let code =
            unsafe { bmv_measure_density(handle, s.as_mut_ptr(), w.as_mut_ptr(), density_count) };
        assert_eq!(code, BmvStatus::Ok);
        assert!(w.iter().all(|&v| v > 0.9 && v < 1.2));
        let code = unsafe { bmv_measure_density(handle, s.as_mut_ptr(), w.as_mut_ptr(), 1) };
        assert_eq!(code, BmvStatus::BufferTooSmall);
        unsafe { bmv_measure_free(handle) };
    }

    #[test]
    fn verify_and_trace_exp_through_c_abi() {
        let n = 2usize;
        let a_re = [0.3, 0.0, 0.0, -0.4];
        let b_re = [1.0, 0.0, 0.0, 2.0];
        let mut report = BmvReport {
            max_rel_error: 0.0,
            residual_max: 0.0,
            min_density: 0.0,
            max_density: 0.0,
            shift: 0.0,
            radius: 0.0,
            n_nodes: 0,
            all_pass: 0,
            positivity_pass: 0,
            laplace_pass: 0,
            residual_pass: 0,
        };
        let code = unsafe {
            bmv_verify(
                n,
                a_re.as_ptr(),
                std::ptr::null(),
                b_re.as_ptr(),
                std::ptr::null(),
                &mut report,
            )
        };
        assert_eq!(code, BmvStatus::Ok);
        assert_eq!(report.all_pass, 1);
        assert!(report.max_rel_error < 1e-10);

        let mut f = 0.0f64;
        let code = unsafe {
            bmv_trace_exp(
                n,
                a_re.as_ptr(),
                std::ptr::null(),
                b_re.as_ptr(),
                std::ptr::null(),
                1.0,
                &mut f,
            )
        };
        assert_eq!(code, BmvStatus::Ok);
        assert!((f - ((0.3f64 - 1.0).exp() + (-0.4f64 - 2.0).exp())).abs() < 1e-12);
    }

    #[test]
    fn error_paths() {
        let n = 2usize;
        // non-Hermitian A
        let a_re = [0.0, 1.0, 0.0, 0.0];
        let b_re = [1.0, 0.0, 0.0, 2.0];
        let mut handle: *mut BmvMeasure = std::ptr::null_mut();
        let code = unsafe {
            bmv_measure_compute(
                n,
                a_re.as_ptr(),
                std::ptr::null(),
                b_re.as_ptr(),
                std::ptr::null(),
                0.0,
                &mut handle,
            )
        };
        assert_eq!(code, BmvStatus::InvalidInput);
        let code = unsafe {
            bmv_measure_compute(
                n,
                std::ptr::null(),
                std::ptr::null(),
                b_re.as_ptr(),
                std::ptr::null(),
                0.0,
                &mut handle,
            )
        };
        assert_eq!(code, BmvStatus::NullArgument);
        let name = unsafe { CStr::from_ptr(bmv_status_name(-2)) };
        assert_eq!(name.to_str().unwrap(), "invalid input");
        // non-PSD B rejected by poly
        let a = [0.0, 0.0, 0.0, 0.0];
        let bneg = [1.0, 0.0, 0.0, -1.0];
        let mut coeffs = [0.0; 3];
        let code = unsafe {
            bmv_poly_coeffs(
                2,
                a.as_ptr(),
                std::ptr::null(),
                bneg.as_ptr(),
                std::ptr::null(),
                2,
                coeffs.as_mut_ptr(),
            )
        };
        assert_eq!(code, BmvStatus::InvalidInput);
    }

    #[test]
    fn poly_through_c_abi() {
        let a = [1.0, 1.0, 1.0, 1.0];
        let b = [1.0, 0.0, 0.0, 0.0];
        let mut coeffs = [0.0f64; 3];
        let code = unsafe {
            bmv_poly_coeffs(
                2,
                a.as_ptr(),
                std::ptr::null(),
                b.as_ptr(),
                std::ptr::null(),
                2,
                coeffs.as_mut_ptr(),
            )
        };
        assert_eq!(code, BmvStatus::Ok);
        assert!((coeffs[0] - 4.0).abs() < 1e-12);
        assert!((coeffs[1] - 2.0).abs() < 1e-12);
        assert!((coeffs[2] - 1.0).abs() < 1e-12);
    }
}
