//! C ABI over the `expsum` library.
//!
//! Signals and optimization results cross the boundary as opaque handles
//! that the caller releases with the matching `*_free` function. Fallible
//! calls return an [`ExpsumStatus`] and write their result through an out
//! pointer; the message for the most recent failure on the calling thread is
//! available from [`expsum_last_error_message`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use expsum::objective::{self, FrequencySet};
use expsum::optimize::{self, OptimizeConfig, OptimizeResult};
use expsum::{Error, SampledSignal, Signal};
use num_complex::Complex64;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpsumStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    IllConditioned = 3,
    MalformedSignal = 4,
    Internal = 5,
    Panic = 6,
}

/// Opaque target function.
pub struct ExpsumSignal {
    inner: Signal,
}

/// Opaque result of `expsum_minimize`.
pub struct ExpsumFit {
    result: OptimizeResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn status_of(err: &Error) -> ExpsumStatus {
    match err {
        Error::InvalidArgument(_) => ExpsumStatus::InvalidArgument,
        Error::IllConditionedBasis { .. } => ExpsumStatus::IllConditioned,
        Error::MalformedSignal(_) => ExpsumStatus::MalformedSignal,
        Error::Internal(_) => ExpsumStatus::Internal,
    }
}

/// Runs `body`, translating errors and panics into status codes.
fn guard<F>(body: F) -> ExpsumStatus
where
    F: FnOnce() -> Result<(), (ExpsumStatus, String)>,
{
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => ExpsumStatus::Ok,
        Ok(Err((status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("panic inside expsum".into());
            ExpsumStatus::Panic
        }
    }
}

fn lib_err(err: Error) -> (ExpsumStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(what: &str) -> (ExpsumStatus, String) {
    (ExpsumStatus::NullPointer, format!("{what} is null"))
}

unsafe fn slice_or_err<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], (ExpsumStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next `expsum_*` call on the same thread.
#[no_mangle]
pub extern "C" fn expsum_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// New handle for `sign(x)`. Never NULL.
#[no_mangle]
pub extern "C" fn expsum_signal_sign() -> *mut ExpsumSignal {
    Box::into_raw(Box::new(ExpsumSignal { inner: Signal::Sign }))
}

/// New handle for samples `f(x_k) = re[k] + i·im[k]` on a uniform odd grid
/// from -π to π.
#[no_mangle]
pub unsafe extern "C" fn expsum_signal_sampled(
    x: *const f64,
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut ExpsumSignal,
) -> ExpsumStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let x = slice_or_err(x, len, "x")?;
        let re = slice_or_err(re, len, "re")?;
        let im = slice_or_err(im, len, "im")?;
        let values = re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        let sampled = SampledSignal::new(x.to_vec(), values).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(ExpsumSignal {
            inner: Signal::Sampled(sampled),
        }));
        Ok(())
    })
}

/// Releases a signal handle. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn expsum_signal_free(signal: *mut ExpsumSignal) {
    if !signal.is_null() {
        drop(Box::from_raw(signal));
    }
}

/// Squared norm `‖f‖²` with the 1/(2π) normalization.
#[no_mangle]
pub unsafe extern "C" fn expsum_signal_norm_sq(
    signal: *const ExpsumSignal,
    out: *mut f64,
) -> ExpsumStatus {
    guard(|| {
        let signal = signal.as_ref().ok_or_else(|| null("signal"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = signal.inner.norm_sq();
        Ok(())
    })
}

/// Minimal squared deflection for the `n` frequencies `re[k] + i·im[k]`.
/// Frequencies closer than `cluster_tol` are merged into expo-polynomials.
#[no_mangle]
pub unsafe extern "C" fn expsum_phi(
    signal: *const ExpsumSignal,
    lambda_re: *const f64,
    lambda_im: *const f64,
    n: usize,
    cluster_tol: f64,
    out: *mut f64,
) -> ExpsumStatus {
    guard(|| {
        let signal = signal.as_ref().ok_or_else(|| null("signal"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let re = slice_or_err(lambda_re, n, "lambda_re")?;
        let im = slice_or_err(lambda_im, n, "lambda_im")?;
        let lambdas = re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        let freqs = FrequencySet::new(lambdas, cluster_tol).map_err(lib_err)?;
        *out = objective::phi(&freqs, &signal.inner).map_err(lib_err)?;
        Ok(())
    })
}

/// Closed-form one-frequency objective of `sign(x)` at `u + iv`.
#[no_mangle]
pub extern "C" fn expsum_phi_sign_one_freq(u: f64, v: f64) -> f64 {
    objective::phi_sign_one_freq(u, v)
}

/// Closed-form objective of `sign(x)` on the double cluster at `iv`.
#[no_mangle]
pub extern "C" fn expsum_phi_sign_cluster_axis(v: f64) -> f64 {
    objective::phi_sign_cluster_axis(v)
}

/// Root of `πv·sin(πv) + cos(πv) = 1` in (0.1, 0.9).
#[no_mangle]
pub unsafe extern "C" fn expsum_solve_v0(out: *mut f64) -> ExpsumStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = optimize::solve_v0().map_err(lib_err)?;
        Ok(())
    })
}

/// Multi-start search for `n` frequencies with default box and tolerances.
#[no_mangle]
pub unsafe extern "C" fn expsum_minimize(
    signal: *const ExpsumSignal,
    n: usize,
    starts: usize,
    seed: u64,
    out: *mut *mut ExpsumFit,
) -> ExpsumStatus {
    guard(|| {
        let signal = signal.as_ref().ok_or_else(|| null("signal"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let config = OptimizeConfig {
            n,
            starts,
            seed,
            ..OptimizeConfig::default()
        };
        let result = optimize::minimize_phi(&signal.inner, &config).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(ExpsumFit { result }));
        Ok(())
    })
}

/// Best objective value; NaN for a NULL handle.
#[no_mangle]
pub unsafe extern "C" fn expsum_fit_phi(fit: *const ExpsumFit) -> f64 {
    fit.as_ref().map_or(f64::NAN, |f| f.result.best_phi)
}

#[no_mangle]
pub unsafe extern "C" fn expsum_fit_evaluations(fit: *const ExpsumFit) -> usize {
    fit.as_ref().map_or(0, |f| f.result.evaluations)
}

/// Number of frequencies (equals the number of basis terms).
#[no_mangle]
pub unsafe extern "C" fn expsum_fit_len(fit: *const ExpsumFit) -> usize {
    fit.as_ref().map_or(0, |f| f.result.best_freqs.len())
}

/// Frequency `index` as found by the search.
#[no_mangle]
pub unsafe extern "C" fn expsum_fit_frequency(
    fit: *const ExpsumFit,
    index: usize,
    re: *mut f64,
    im: *mut f64,
) -> ExpsumStatus {
    guard(|| {
        let fit = fit.as_ref().ok_or_else(|| null("fit"))?;
        let (re, im) = (re.as_mut().ok_or_else(|| null("re"))?, im.as_mut().ok_or_else(|| null("im"))?);
        let lambda = fit.result.best_freqs.lambdas().get(index).ok_or_else(|| {
            (ExpsumStatus::InvalidArgument, format!("frequency index {index} out of range"))
        })?;
        *re = lambda.re;
        *im = lambda.im;
        Ok(())
    })
}

/// Basis term `index`: `coef · x^degree · e^{λx}`.
#[no_mangle]
pub unsafe extern "C" fn expsum_fit_term(
    fit: *const ExpsumFit,
    index: usize,
    degree: *mut u32,
    lambda_re: *mut f64,
    lambda_im: *mut f64,
    coef_re: *mut f64,
    coef_im: *mut f64,
) -> ExpsumStatus {
    guard(|| {
        let fit = fit.as_ref().ok_or_else(|| null("fit"))?;
        let linear = &fit.result.fit;
        let term = linear.basis.terms().get(index).ok_or_else(|| {
            (ExpsumStatus::InvalidArgument, format!("term index {index} out of range"))
        })?;
        let coef = linear.coefficients[index];
        *degree.as_mut().ok_or_else(|| null("degree"))? = term.degree;
        *lambda_re.as_mut().ok_or_else(|| null("lambda_re"))? = term.lambda.re;
        *lambda_im.as_mut().ok_or_else(|| null("lambda_im"))? = term.lambda.im;
        *coef_re.as_mut().ok_or_else(|| null("coef_re"))? = coef.re;
        *coef_im.as_mut().ok_or_else(|| null("coef_im"))? = coef.im;
        Ok(())
    })
}

/// Releases a fit handle. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn expsum_fit_free(fit: *mut ExpsumFit) {
    if !fit.is_null() {
        drop(Box::from_raw(fit));
    }
}
