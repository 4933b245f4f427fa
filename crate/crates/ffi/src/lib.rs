//! C ABI for `bandframe`.
//!
//! A `BfFrame` owns the frame parameters, the derivative generators and
//! their canonical duals. Every function returns a `BfStatus`; on failure
//! the message is kept per thread and can be read with
//! `bf_last_error_message`. Sample buffers are channel-major:
//! `samples[j * count + (n - n0)]` holds channel `j` at index `n`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use bandframe::duals::DualSet;
use bandframe::quad::QuadOptions;
use bandframe::recovery::{build_recovery_system, default_correlation_opts, recover, MissingIndexSet};
use bandframe::sampling::{reconstruct_many, take_samples, SampleSet};
use bandframe::signal::{Signal, SincTerm};
use bandframe::{compute_params, derivative_generators, verify_frame, Error, FrameParams, GeneratorSet, Regime};

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BfStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Unsupported = 3,
    Shape = 4,
    IllConditioned = 5,
    Accuracy = 6,
    MaskedSamples = 7,
    Consistency = 8,
    NotRecoverable = 9,
    Undecidable = 10,
    BufferTooSmall = 11,
    Panic = 12,
}

/// Frame parameters, generators and duals.
pub struct BfFrame {
    params: FrameParams,
    gens: GeneratorSet,
    duals: DualSet,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> BfStatus {
    match e {
        Error::Domain(_) => BfStatus::Domain,
        Error::UnsupportedOrder { .. } | Error::Unsupported(_) => BfStatus::Unsupported,
        Error::Shape(_) => BfStatus::Shape,
        Error::IllConditioned { .. } => BfStatus::IllConditioned,
        Error::Accuracy { .. } => BfStatus::Accuracy,
        Error::MaskedSamples { .. } => BfStatus::MaskedSamples,
        Error::Consistency(_) => BfStatus::Consistency,
        Error::NotRecoverable { .. } => BfStatus::NotRecoverable,
        Error::Undecidable(_) => BfStatus::Undecidable,
    }
}

enum Fail {
    Lib(Error),
    Null(&'static str),
    Buffer(usize, usize),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> BfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BfStatus::Ok,
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null(name))) => {
            set_error(format!("{name} is null"));
            BfStatus::NullPointer
        }
        Ok(Err(Fail::Buffer(need, got))) => {
            set_error(format!("buffer holds {got} values, {need} needed"));
            BfStatus::BufferTooSmall
        }
        Err(_) => {
            set_error("internal panic".into());
            BfStatus::Panic
        }
    }
}

fn frame_ref<'a>(f: *const BfFrame) -> Result<&'a BfFrame, Fail> {
    // SAFETY: non-null handles come from `bf_frame_new` and are live until
    // `bf_frame_free`.
    unsafe { f.as_ref() }.ok_or(Fail::Null("frame"))
}

fn slice_in<'a, T>(p: *const T, len: usize, name: &'static str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(name));
    }
    // SAFETY: the caller guarantees `len` readable elements at `p`.
    Ok(unsafe { slice::from_raw_parts(p, len) })
}

fn slice_out<'a, T>(p: *mut T, len: usize, name: &'static str) -> Result<&'a mut [T], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Fail::Null(name));
    }
    // SAFETY: the caller guarantees `len` writable elements at `p`.
    Ok(unsafe { slice::from_raw_parts_mut(p, len) })
}

fn write_out<T>(p: *mut T, v: T, name: &'static str) -> Result<(), Fail> {
    if p.is_null() {
        return Err(Fail::Null(name));
    }
    // SAFETY: checked non-null; the caller provides a writable location.
    unsafe { p.write(v) };
    Ok(())
}

fn sample_set(f: &BfFrame, samples: &[f64], n0: i64, count: usize) -> Result<SampleSet, Fail> {
    if count == 0 {
        return Err(Error::Domain("empty sample window".into()).into());
    }
    let l = f.params.length;
    let mut s = SampleSet::zeros(&f.params, l, (n0, n0 + count as i64 - 1))?;
    for j in 0..l {
        s.values[j].copy_from_slice(&samples[j * count..(j + 1) * count]);
    }
    Ok(s)
}

/// Creates the derivative frame of the length implied by `omega` and `t0`.
/// Duals are closed form for length 2 and computed on `grid_points`
/// frequencies per zone otherwise.
#[no_mangle]
pub extern "C" fn bf_frame_new(omega: f64, t0: f64, grid_points: usize, out: *mut *mut BfFrame) -> BfStatus {
    guard(|| {
        let params = compute_params(omega, t0)?;
        let gens = derivative_generators(params.length, omega)?;
        let duals = DualSet::for_derivative_frame(&gens, &params, grid_points)?;
        let handle = Box::into_raw(Box::new(BfFrame { params, gens, duals }));
        write_out(out, handle, "out").inspect_err(|_| {
            // SAFETY: just allocated above and not shared.
            drop(unsafe { Box::from_raw(handle) });
        })
    })
}

/// Releases a frame; null is ignored.
#[no_mangle]
pub extern "C" fn bf_frame_free(f: *mut BfFrame) {
    if !f.is_null() {
        // SAFETY: `f` was produced by `bf_frame_new` and is freed once.
        drop(unsafe { Box::from_raw(f) });
    }
}

/// Number of generators (and of sample channels); 0 for null.
#[no_mangle]
pub extern "C" fn bf_frame_length(f: *const BfFrame) -> usize {
    frame_ref(f).map(|f| f.params.length).unwrap_or(0)
}

/// `h = 2π/t0`; NaN for null.
#[no_mangle]
pub extern "C" fn bf_frame_h(f: *const BfFrame) -> f64 {
    frame_ref(f).map(|f| f.params.h).unwrap_or(f64::NAN)
}

/// 0 even, 1 odd, 2 even endpoint, 3 odd endpoint; -1 for null.
#[no_mangle]
pub extern "C" fn bf_frame_regime(f: *const BfFrame) -> i32 {
    match frame_ref(f).map(|f| f.params.regime) {
        Ok(Regime::Even) => 0,
        Ok(Regime::Odd) => 1,
        Ok(Regime::RieszEndpointEven) => 2,
        Ok(Regime::RieszEndpointOdd) => 3,
        Err(_) => -1,
    }
}

/// Grid check of the frame conditions.
#[no_mangle]
pub extern "C" fn bf_frame_check(
    f: *const BfFrame,
    grid_density: f64,
    is_frame: *mut bool,
    is_riesz: *mut bool,
) -> BfStatus {
    guard(|| {
        let f = frame_ref(f)?;
        let rep = verify_frame(&f.gens, &f.params, grid_density)?;
        write_out(is_frame, rep.is_frame, "is_frame")?;
        write_out(is_riesz, rep.is_riesz, "is_riesz")
    })
}

/// Fourier transforms of the duals at `xi`; `re` and `im` hold `len`
/// values, at least the frame length.
#[no_mangle]
pub extern "C" fn bf_dual_fourier(f: *const BfFrame, xi: f64, re: *mut f64, im: *mut f64, len: usize) -> BfStatus {
    guard(|| {
        let f = frame_ref(f)?;
        let l = f.params.length;
        if len < l {
            return Err(Fail::Buffer(l, len));
        }
        let (re, im) = (slice_out(re, l, "re")?, slice_out(im, l, "im")?);
        for (k, v) in f.duals.fourier_all(xi).into_iter().enumerate() {
            re[k] = v.re;
            im[k] = v.im;
        }
        Ok(())
    })
}

/// Time-domain duals at `t`.
#[no_mangle]
pub extern "C" fn bf_dual_time(f: *const BfFrame, t: f64, out: *mut f64, len: usize) -> BfStatus {
    guard(|| {
        let f = frame_ref(f)?;
        let l = f.params.length;
        if len < l {
            return Err(Fail::Buffer(l, len));
        }
        let out = slice_out(out, l, "out")?;
        out.copy_from_slice(&f.duals.time_all(t, &QuadOptions::with_abs_tol(1e-13))?);
        Ok(())
    })
}

/// Samples `Σ w_i sinc(omega (x - s_i))` on every channel for
/// `n = n0 .. n0 + count - 1`; `out` holds `length * count` values.
#[no_mangle]
pub extern "C" fn bf_sample_sinc_sum(
    f: *const BfFrame,
    weights: *const f64,
    shifts: *const f64,
    terms: usize,
    n0: i64,
    count: usize,
    out: *mut f64,
) -> BfStatus {
    guard(|| {
        let f = frame_ref(f)?;
        let (w, s) = (slice_in(weights, terms, "weights")?, slice_in(shifts, terms, "shifts")?);
        let sig = Signal::new(
            f.params.omega,
            w.iter().zip(s).map(|(&weight, &shift)| SincTerm { weight, shift }).collect(),
        );
        if count == 0 {
            return Err(Error::Domain("empty sample window".into()).into());
        }
        let set = take_samples(&sig, &f.params, (n0, n0 + count as i64 - 1))?;
        let out = slice_out(out, f.params.length * count, "out")?;
        for (j, v) in set.values.iter().enumerate() {
            out[j * count..(j + 1) * count].copy_from_slice(v);
        }
        Ok(())
    })
}

/// Truncated reconstruction at `nx` points.
#[no_mangle]
pub extern "C" fn bf_reconstruct(
    f: *const BfFrame,
    samples: *const f64,
    n0: i64,
    count: usize,
    xs: *const f64,
    nx: usize,
    out: *mut f64,
) -> BfStatus {
    guard(|| {
        let f = frame_ref(f)?;
        let samples = slice_in(samples, f.params.length * count, "samples")?;
        let s = sample_set(f, samples, n0, count)?;
        let xs = slice_in(xs, nx, "xs")?;
        let vals = reconstruct_many(&s, &f.duals, xs)?;
        slice_out(out, nx, "out")?.copy_from_slice(&vals);
        Ok(())
    })
}

/// Recovers the samples at `missing` on channels `1..=lambda`, writing them
/// into `samples` in place. `cond` receives the condition number of the
/// system and may be null.
#[no_mangle]
pub extern "C" fn bf_recover(
    f: *const BfFrame,
    samples: *mut f64,
    n0: i64,
    count: usize,
    missing: *const i64,
    n_missing: usize,
    lambda: usize,
    cond: *mut f64,
) -> BfStatus {
    guard(|| {
        let f = frame_ref(f)?;
        let l = f.params.length;
        let buf = slice_out(samples, l * count, "samples")?;
        let mut s = sample_set(f, buf, n0, count)?;
        let miss = MissingIndexSet::new(slice_in(missing, n_missing, "missing")?.to_vec(), lambda, l)?;
        miss.apply(&mut s)?;
        let mut sys = build_recovery_system(&f.gens, &f.duals, &f.params, &miss, &s, &default_correlation_opts())?;
        let outcome = recover(&mut sys)?;
        for &((j, n), v) in &outcome.values {
            buf[j * count + (n - n0) as usize] = v.re;
        }
        if !cond.is_null() {
            write_out(cond, outcome.cond, "cond")?;
        }
        Ok(())
    })
}

/// Copies the last error message of this thread, NUL terminated, into
/// `buf` (truncated to `len - 1` bytes). Returns the full message length.
#[no_mangle]
pub extern "C" fn bf_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            // SAFETY: the caller provides `len` writable bytes at `buf`.
            unsafe {
                std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), n);
                *buf.add(n) = 0;
            }
        }
        bytes.len()
    })
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bf_version() -> *const c_char {
    static V: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(c) => c,
        Err(_) => panic!("version contains NUL"),
    };
    V.as_ptr()
}
