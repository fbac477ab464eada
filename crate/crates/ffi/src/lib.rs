//! C ABI over the `interpnn` estimator and asymptotic-ratio functions.
//!
//! Models are opaque heap handles created by [`interpnn_model_fit`] and
//! released with [`interpnn_model_free`]. Every fallible call returns an
//! [`InterpnnStatus`]; on failure a message for the calling thread is
//! available from [`interpnn_last_error`] until the next failing call.
//! Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use interpnn::theory::{cis_ratio_same_k, gamma_d, k_ratio, pr, AsymptoticParams};
use interpnn::{Error, FittedModel, LabeledDataset, Task, WeightScheme};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterpnnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidData = 3,
    OutOfRegime = 4,
    KTooLarge = 5,
    TaskMismatch = 6,
    Internal = 7,
}

/// Kind of response a model is fitted for.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterpnnTask {
    Regression = 0,
    Classification = 1,
}

/// Opaque fitted model.
pub struct InterpnnModel {
    inner: FittedModel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> InterpnnStatus {
    match e {
        Error::OutOfRegime { .. } => InterpnnStatus::OutOfRegime,
        Error::KTooLarge { .. } | Error::ZeroK => InterpnnStatus::KTooLarge,
        Error::TaskMismatch { .. } => InterpnnStatus::TaskMismatch,
        Error::InvalidDataset(_)
        | Error::EmptyDataset
        | Error::DimensionMismatch { .. }
        | Error::NonFiniteValue(_)
        | Error::NonBinaryLabel { .. } => InterpnnStatus::InvalidData,
        _ => InterpnnStatus::InvalidArgument,
    }
}

/// Runs `f`, converting errors and panics into a status plus a stored message.
fn guard(f: impl FnOnce() -> Result<(), (InterpnnStatus, String)>) -> InterpnnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => InterpnnStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            InterpnnStatus::Internal
        }
    }
}

fn lib_err(e: Error) -> (InterpnnStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (InterpnnStatus, String) {
    (InterpnnStatus::NullPointer, format!("{what} is null"))
}

/// Message describing the most recent failure on this thread, or NULL.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn interpnn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Fits an interpolated-NN model with exponent `gamma` (0 is plain kNN).
///
/// `coords` holds `n * dim` values in row-major order and `labels` holds
/// `n` responses (0 or 1 for classification). The data are copied.
///
/// # Safety
///
/// `coords` and `labels` must point to arrays of the stated lengths and
/// `out` must be a valid place to store the handle.
#[no_mangle]
pub unsafe extern "C" fn interpnn_model_fit(
    coords: *const f64,
    labels: *const f64,
    n: usize,
    dim: usize,
    task: InterpnnTask,
    gamma: f64,
    k: usize,
    out: *mut *mut InterpnnModel,
) -> InterpnnStatus {
    guard(|| {
        if coords.is_null() {
            return Err(null("coords"));
        }
        if labels.is_null() {
            return Err(null("labels"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let total = n.checked_mul(dim).ok_or((InterpnnStatus::InvalidArgument, "n * dim overflows".into()))?;
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err((InterpnnStatus::InvalidArgument, format!("gamma {gamma} must be finite and nonnegative")));
        }
        // SAFETY: the caller guarantees both arrays have the stated lengths.
        let (xs, ys) = unsafe { (std::slice::from_raw_parts(coords, total), std::slice::from_raw_parts(labels, n)) };
        let task = match task {
            InterpnnTask::Regression => Task::Regression,
            InterpnnTask::Classification => Task::Classification,
        };
        let ds = LabeledDataset::from_flat(dim, xs.to_vec(), ys.to_vec(), task).map_err(lib_err)?;
        let inner = FittedModel::fit(ds, WeightScheme::Interpolated { gamma }, k).map_err(lib_err)?;
        // SAFETY: `out` was checked to be non-null.
        unsafe { *out = Box::into_raw(Box::new(InterpnnModel { inner })) };
        Ok(())
    })
}

/// Releases a model. NULL is ignored.
///
/// # Safety
///
/// `model` must come from [`interpnn_model_fit`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn interpnn_model_free(model: *mut InterpnnModel) {
    if !model.is_null() {
        // SAFETY: ownership returns to Rust exactly once.
        drop(unsafe { Box::from_raw(model) });
    }
}

/// Dimension of the points the model was fitted on, or 0 for NULL.
///
/// # Safety
///
/// `model` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn interpnn_model_dim(model: *const InterpnnModel) -> usize {
    // SAFETY: the caller passes NULL or a live handle.
    unsafe { model.as_ref() }.map_or(0, |m| m.inner.train().dim())
}

unsafe fn query<'a>(
    model: *const InterpnnModel,
    q: *const f64,
    dim: usize,
) -> Result<(&'a FittedModel, &'a [f64]), (InterpnnStatus, String)> {
    // SAFETY: the caller passes NULL or a live handle.
    let m = unsafe { model.as_ref() }.ok_or_else(|| null("model"))?;
    if q.is_null() {
        return Err(null("query"));
    }
    // SAFETY: the caller guarantees `dim` readable values at `q`.
    Ok((&m.inner, unsafe { std::slice::from_raw_parts(q, dim) }))
}

/// Weighted-average prediction at one query point of length `dim`.
///
/// # Safety
///
/// `model` must be a live handle, `q` must hold `dim` values and `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn interpnn_model_predict(
    model: *const InterpnnModel,
    q: *const f64,
    dim: usize,
    out: *mut f64,
) -> InterpnnStatus {
    guard(|| {
        // SAFETY: forwarded caller guarantees.
        let (m, q) = unsafe { query(model, q, dim) }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let v = m.score(q).map_err(lib_err)?;
        // SAFETY: `out` was checked to be non-null.
        unsafe { *out = v };
        Ok(())
    })
}

/// Class 0 or 1 at one query point; the model must be a classifier.
///
/// # Safety
///
/// Same contract as [`interpnn_model_predict`].
#[no_mangle]
pub unsafe extern "C" fn interpnn_model_predict_class(
    model: *const InterpnnModel,
    q: *const f64,
    dim: usize,
    out: *mut u8,
) -> InterpnnStatus {
    guard(|| {
        // SAFETY: forwarded caller guarantees.
        let (m, q) = unsafe { query(model, q, dim) }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let c = m.predict_class(q).map_err(lib_err)?;
        // SAFETY: `out` was checked to be non-null.
        unsafe { *out = c };
        Ok(())
    })
}

fn theory_call(
    d: usize,
    gamma: f64,
    out: *mut f64,
    f: fn(AsymptoticParams) -> interpnn::Result<f64>,
) -> InterpnnStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let v = AsymptoticParams::new(d, gamma).and_then(f).map_err(lib_err)?;
        // SAFETY: `out` was checked to be non-null.
        unsafe { *out = v };
        Ok(())
    })
}

/// Asymptotic optimal-risk ratio of interpolated-NN to kNN; needs `gamma < d/3`.
///
/// # Safety
///
/// `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn interpnn_pr(d: usize, gamma: f64, out: *mut f64) -> InterpnnStatus {
    theory_call(d, gamma, out, pr)
}

/// Ratio of the optimal `k` of interpolated-NN to that of kNN.
///
/// # Safety
///
/// `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn interpnn_k_ratio(d: usize, gamma: f64, out: *mut f64) -> InterpnnStatus {
    theory_call(d, gamma, out, k_ratio)
}

/// Classification-instability ratio at a shared `k`.
///
/// # Safety
///
/// `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn interpnn_cis_ratio_same_k(d: usize, gamma: f64, out: *mut f64) -> InterpnnStatus {
    theory_call(d, gamma, out, cis_ratio_same_k)
}

/// Right edge of the window where interpolation beats kNN.
///
/// # Safety
///
/// `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn interpnn_gamma_d(d: usize, out: *mut f64) -> InterpnnStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if d == 0 {
            return Err((InterpnnStatus::InvalidArgument, "d must be positive".into()));
        }
        // SAFETY: `out` was checked to be non-null.
        unsafe { *out = gamma_d(d) };
        Ok(())
    })
}
