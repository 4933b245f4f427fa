//! Derivative frames: generators `(ix)^{j-1}` on the band, the Vandermonde
//! minors behind their cross vectors, and the explicit duals for `L = 2`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::generators::{GeneratorSet, PiecewisePoly};
use crate::linalg::{self, CMatrix, I, ONE, ZERO};
use crate::params::FrameParams;
use crate::poly::Poly;
use crate::quad::{self, QuadOptions};
use crate::signal::sinc;

/// `phi_j^(x) = (ix)^{j-1}` on `[-omega, omega]`, `j = 1..=L`.
pub fn derivative_generators(l: usize, omega: f64) -> Result<GeneratorSet> {
    if l == 0 {
        return Err(Error::Domain("derivative frame order must be at least 1".into()));
    }
    let gens = (0..l)
        .map(|d| {
            let mut c = vec![ZERO; d + 1];
            c[d] = I.powu(d as u32);
            PiecewisePoly::single(-omega, omega, Poly::new(c))
        })
        .collect::<Result<Vec<_>>>()?;
    GeneratorSet::new(omega, gens)
}

/// Matrix with rows `(1, i(x+kh), ..., (i(x+kh))^n)`, `k = 1..=n`.
pub fn vandermonde_matrix(n: usize, x: f64, h: f64) -> CMatrix {
    CMatrix::from_fn(n, n + 1, |k, p| (I * (x + (k + 1) as f64 * h)).powu(p as u32))
}

/// Determinant of the Vandermonde matrix with column `r` removed.
pub fn vandermonde_minor_det(n: usize, r: usize, x: f64, h: f64) -> Result<Complex64> {
    if r > n {
        return Err(Error::Domain(format!("column {r} out of range 0..={n}")));
    }
    let m = vandermonde_matrix(n, x, h).remove_column(r);
    Ok(linalg::det(&m))
}

/// `det M_{n,n} = Π_{k<j} ih(j-k) = (ih)^{n(n-1)/2} Π_{p=1}^{n-1} p!`.
pub fn vandermonde_constant(n: usize, h: f64) -> Complex64 {
    let pairs = n * n.saturating_sub(1) / 2;
    let mut fact_prod = 1.0;
    let mut fact = 1.0;
    for p in 1..n {
        fact *= p as f64;
        fact_prod *= fact;
    }
    (I * h).powu(pairs as u32) * fact_prod
}

fn require_l2(params: &FrameParams) -> Result<()> {
    if params.length != 2 {
        return Err(Error::Unsupported(format!(
            "explicit duals exist only for length 2, got length {}",
            params.length
        )));
    }
    Ok(())
}

/// Fourier transforms of the two canonical duals of the first-derivative
/// frame, `H = h - omega`.
pub fn dual2_fourier(x: f64, params: &FrameParams) -> Result<(Complex64, Complex64)> {
    require_l2(params)?;
    Ok(dual2_fourier_unchecked(x, params.omega, params.h))
}

pub(crate) fn dual2_fourier_unchecked(x: f64, omega: f64, h: f64) -> (Complex64, Complex64) {
    let ax = x.abs();
    if ax > omega {
        return (ZERO, ZERO);
    }
    let big_h = h - omega;
    if ax < big_h {
        let d = h * (1.0 + x * x);
        (ONE / d, I * x / d)
    } else {
        (
            Complex64::new((1.0 - ax / h) / h, 0.0),
            I * x.signum() / (h * h),
        )
    }
}

/// Time-domain duals of the first-derivative frame by Fourier inversion.
///
/// The piecewise-linear part is closed form; the rational part leaves
/// `∫_0^H cos(tx)/(1+t^2) dt` and `∫_0^H t sin(tx)/(1+t^2) dt`, which are
/// integrated adaptively.
pub fn dual2_time(x: f64, params: &FrameParams) -> Result<(f64, f64)> {
    require_l2(params)?;
    dual2_time_unchecked(x, params.omega, params.h, &QuadOptions::with_abs_tol(1e-13))
}

pub(crate) fn dual2_time_unchecked(x: f64, omega: f64, h: f64, opts: &QuadOptions) -> Result<(f64, f64)> {
    let big_h = h - omega;
    let c = 1.0 / (2.0 * PI).sqrt();
    let ss = sinc(h * x / 2.0) * sinc((omega - big_h) * x / 2.0);
    let (ic, is) = if big_h > 0.0 {
        let r = quad::integrate(
            |t| {
                let d = 1.0 + t * t;
                let (s, co) = (t * x).sin_cos();
                Complex64::new(co / d, t * s / d)
            },
            0.0,
            big_h,
            quad::oscillation_panels(big_h, x),
            opts,
        )?;
        (r.value.re, r.value.im)
    } else {
        (0.0, 0.0)
    };
    let d1 = 2.0 * omega * big_h / (h * h) * (sinc(omega * x) - sinc(big_h * x))
        + (omega - big_h) / h * ss
        + 2.0 / h * ic;
    let d2 = -(omega - big_h) * x / h * ss - 2.0 / h * is;
    Ok((c * d1, c * d2))
}
