use std::ffi::CStr;
use std::ptr;

use interpnn_ffi::*;

fn last_error() -> String {
    let p = interpnn_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn fit(coords: &[f64], labels: &[f64], dim: usize, task: InterpnnTask, gamma: f64, k: usize) -> (InterpnnStatus, *mut InterpnnModel) {
    let mut m = ptr::null_mut();
    let s = unsafe {
        interpnn_model_fit(coords.as_ptr(), labels.as_ptr(), labels.len(), dim, task, gamma, k, &mut m)
    };
    (s, m)
}

#[test]
fn regression_round_trip() {
    let (s, m) = fit(&[0.0, 1.0, 3.0], &[0.0, 1.0, 0.0], 1, InterpnnTask::Regression, 0.5, 2);
    assert_eq!(s, InterpnnStatus::Ok);
    assert_eq!(unsafe { interpnn_model_dim(m) }, 1);
    let mut y = f64::NAN;
    assert_eq!(unsafe { interpnn_model_predict(m, [1.0].as_ptr(), 1, &mut y) }, InterpnnStatus::Ok);
    assert_eq!(y, 1.0);
    // from 2.0 the two nearest are equidistant and get equal weights
    assert_eq!(unsafe { interpnn_model_predict(m, [2.0].as_ptr(), 1, &mut y) }, InterpnnStatus::Ok);
    assert!((y - 0.5).abs() < 1e-12);
    let mut c = 0u8;
    assert_eq!(unsafe { interpnn_model_predict_class(m, [1.0].as_ptr(), 1, &mut c) }, InterpnnStatus::TaskMismatch);
    unsafe { interpnn_model_free(m) };
}

#[test]
fn classification_round_trip() {
    let (s, m) = fit(&[0.0, 0.0, 1.0, 1.0, 5.0, 5.0], &[0.0, 0.0, 1.0], 2, InterpnnTask::Classification, 1.0, 1);
    assert_eq!(s, InterpnnStatus::Ok);
    let mut c = 9u8;
    assert_eq!(unsafe { interpnn_model_predict_class(m, [4.0, 4.0].as_ptr(), 2, &mut c) }, InterpnnStatus::Ok);
    assert_eq!(c, 1);
    unsafe { interpnn_model_free(m) };
}

#[test]
fn errors_map_to_status_codes() {
    let (s, m) = fit(&[0.0, 1.0], &[0.0, 2.0], 1, InterpnnTask::Classification, 0.0, 1);
    assert_eq!((s, m.is_null()), (InterpnnStatus::InvalidData, true));
    assert!(last_error().contains("label"));

    let (s, _) = fit(&[0.0, 1.0], &[0.0, 1.0], 1, InterpnnTask::Regression, 0.0, 2);
    assert_eq!(s, InterpnnStatus::KTooLarge);

    let (s, _) = fit(&[0.0, 1.0], &[0.0, 1.0], 1, InterpnnTask::Regression, -1.0, 1);
    assert_eq!(s, InterpnnStatus::InvalidArgument);

    let s = unsafe { interpnn_model_fit(ptr::null(), ptr::null(), 0, 1, InterpnnTask::Regression, 0.0, 1, ptr::null_mut()) };
    assert_eq!(s, InterpnnStatus::NullPointer);

    let (_, m) = fit(&[0.0, 1.0, 2.0], &[0.0, 1.0, 0.0], 1, InterpnnTask::Regression, 0.0, 1);
    let mut y = 0.0;
    assert_eq!(unsafe { interpnn_model_predict(m, [1.0, 2.0].as_ptr(), 2, &mut y) }, InterpnnStatus::InvalidData);
    assert_eq!(unsafe { interpnn_model_predict(ptr::null(), [1.0].as_ptr(), 1, &mut y) }, InterpnnStatus::NullPointer);
    unsafe { interpnn_model_free(m) };
    unsafe { interpnn_model_free(ptr::null_mut()) };
}

#[test]
fn theory_functions() {
    let mut v = 0.0;
    assert_eq!(unsafe { interpnn_pr(2, 0.5, &mut v) }, InterpnnStatus::Ok);
    assert!((v - 0.9760464552457487).abs() < 1e-12);
    assert_eq!(unsafe { interpnn_gamma_d(2, &mut v) }, InterpnnStatus::Ok);
    assert!((v - (2.0 - 2f64.sqrt())).abs() < 1e-9);
    assert_eq!(unsafe { interpnn_cis_ratio_same_k(2, 0.0, &mut v) }, InterpnnStatus::Ok);
    assert_eq!(v, 1.0);
    assert_eq!(unsafe { interpnn_k_ratio(2, 2.0 / 3.0, &mut v) }, InterpnnStatus::OutOfRegime);
    assert!(last_error().contains("regime"));
    assert_eq!(unsafe { interpnn_gamma_d(0, &mut v) }, InterpnnStatus::InvalidArgument);
}
