use std::ffi::CStr;
use std::ptr;

use bandframe_ffi::*;

const PI: f64 = std::f64::consts::PI;

fn frame(t0: f64) -> *mut BfFrame {
    let mut f = ptr::null_mut();
    assert_eq!(bf_frame_new(PI, t0, 256, &mut f), BfStatus::Ok);
    assert!(!f.is_null());
    f
}

fn last_error() -> String {
    let mut buf = [0 as std::ffi::c_char; 256];
    bf_last_error_message(buf.as_mut_ptr(), buf.len());
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn frame_accessors_and_check() {
    let f = frame(1.25);
    assert_eq!(bf_frame_length(f), 2);
    assert!((bf_frame_h(f) - 1.6 * PI).abs() < 1e-12);
    assert_eq!(bf_frame_regime(f), 0);
    let (mut is_frame, mut is_riesz) = (false, true);
    assert_eq!(bf_frame_check(f, 32.0, &mut is_frame, &mut is_riesz), BfStatus::Ok);
    assert!(is_frame && !is_riesz);
    bf_frame_free(f);
}

#[test]
fn null_and_domain_errors() {
    assert_eq!(bf_frame_length(ptr::null()), 0);
    assert_eq!(bf_frame_regime(ptr::null()), -1);
    let mut f = ptr::null_mut();
    assert_eq!(bf_frame_new(PI, -1.0, 256, &mut f), BfStatus::Domain);
    assert!(f.is_null());
    assert!(last_error().contains("t0"));
    assert_eq!(bf_frame_new(PI, 1.25, 256, ptr::null_mut()), BfStatus::NullPointer);
    let (mut a, mut b) = (false, false);
    assert_eq!(bf_frame_check(ptr::null(), 32.0, &mut a, &mut b), BfStatus::NullPointer);
    bf_frame_free(ptr::null_mut());
}

#[test]
fn dual_values() {
    let f = frame(1.25);
    let (mut re, mut im) = ([0.0; 2], [0.0; 2]);
    assert_eq!(bf_dual_fourier(f, 0.0, re.as_mut_ptr(), im.as_mut_ptr(), 2), BfStatus::Ok);
    assert!((re[0] - 1.0 / (1.6 * PI)).abs() < 1e-15 && im[1].abs() < 1e-15);
    assert_eq!(bf_dual_fourier(f, 0.0, re.as_mut_ptr(), im.as_mut_ptr(), 1), BfStatus::BufferTooSmall);
    let mut t = [0.0; 2];
    assert_eq!(bf_dual_time(f, 0.0, t.as_mut_ptr(), 2), BfStatus::Ok);
    assert!(t[1].abs() < 1e-15 && t[0] > 0.0);
    bf_frame_free(f);
}

#[test]
fn sample_recover_reconstruct() {
    let f = frame(1.25);
    let (w, s) = ([1.0, -0.7], [2.1, -1.7]);
    let (n0, count) = (-60i64, 121usize);
    let mut buf = vec![0.0; 2 * count];
    assert_eq!(bf_sample_sinc_sum(f, w.as_ptr(), s.as_ptr(), 2, n0, count, buf.as_mut_ptr()), BfStatus::Ok);
    let truth = buf.clone();
    let missing = [-4i64, 2];
    for &n in &missing {
        for j in 0..2 {
            buf[j * count + (n - n0) as usize] = 0.0;
        }
    }
    let mut cond = 0.0;
    assert_eq!(bf_recover(f, buf.as_mut_ptr(), n0, count, missing.as_ptr(), 2, 2, &mut cond), BfStatus::Ok);
    assert!(cond > 1.0 && cond < 10.0);
    let err = buf.iter().zip(&truth).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err < 2e-2, "{err}");

    let xs = [0.0, 1.3];
    let mut out = [0.0; 2];
    assert_eq!(bf_reconstruct(f, truth.as_ptr(), n0, count, xs.as_ptr(), 2, out.as_mut_ptr()), BfStatus::Ok);
    let f_true = bandframe::signal::Signal::new(PI, vec![
        bandframe::signal::SincTerm { weight: 1.0, shift: 2.1 },
        bandframe::signal::SincTerm { weight: -0.7, shift: -1.7 },
    ]);
    for (x, y) in xs.iter().zip(out) {
        assert!((y - f_true.eval(*x, 0).unwrap()).abs() < 5e-3, "{x}: {y}");
    }
    bf_frame_free(f);
}

#[test]
fn endpoint_is_not_recoverable() {
    let f = frame(2.0);
    assert_eq!(bf_frame_regime(f), 2);
    let count = 41usize;
    let mut buf = vec![0.1; 2 * count];
    let missing = [0i64];
    let st = bf_recover(f, buf.as_mut_ptr(), -20, count, missing.as_ptr(), 1, 2, ptr::null_mut());
    assert_eq!(st, BfStatus::NotRecoverable);
    assert!(last_error().contains("not recoverable"));
    bf_frame_free(f);
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(bf_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_is_generated() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/bandframe.h")).unwrap();
    for sym in ["bf_frame_new", "bf_recover", "BF_STATUS_NOT_RECOVERABLE", "typedef struct BfFrame BfFrame"] {
        assert!(h.contains(sym), "{sym} missing from header");
    }
}
