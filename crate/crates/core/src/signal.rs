//! Finite sinc combinations: band-limited test signals whose derivatives of
//! every order are known in closed form.

use std::f64::consts::PI;

use rand::Rng;

use crate::error::{Error, Result};

/// Highest derivative order `eval` supports.
pub const MAX_DERIVATIVE_ORDER: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SincTerm {
    pub weight: f64,
    pub shift: f64,
}

/// `f(x) = Σ w_i sinc(omega (x - s_i))` with `sinc(u) = sin(u)/u`.
#[derive(Clone, Debug, PartialEq)]
pub struct Signal {
    pub omega: f64,
    pub terms: Vec<SincTerm>,
}

impl Signal {
    pub fn new(omega: f64, terms: Vec<SincTerm>) -> Self {
        Signal { omega, terms }
    }

    pub fn zero(omega: f64) -> Self {
        Signal { omega, terms: Vec::new() }
    }

    /// `sinc(π(x - 2.1)) - 0.7 sinc(π(x + 1.7))`.
    pub fn ferreira() -> Self {
        Signal::new(
            PI,
            vec![
                SincTerm { weight: 1.0, shift: 2.1 },
                SincTerm { weight: -0.7, shift: -1.7 },
            ],
        )
    }

    /// Random combination of `terms` atoms with weights in `[-1, 1]` and
    /// shifts in `[-spread, spread]`.
    pub fn random<R: Rng>(rng: &mut R, omega: f64, terms: usize, spread: f64) -> Self {
        let terms = (0..terms)
            .map(|_| SincTerm {
                weight: rng.gen_range(-1.0..=1.0),
                shift: rng.gen_range(-spread..=spread),
            })
            .collect();
        Signal { omega, terms }
    }

    /// Translate: `g(x) = f(x + a)`.
    pub fn translated(&self, a: f64) -> Self {
        Signal {
            omega: self.omega,
            terms: self
                .terms
                .iter()
                .map(|t| SincTerm { weight: t.weight, shift: t.shift - a })
                .collect(),
        }
    }

    /// `k`-th derivative at `x`.
    pub fn eval(&self, x: f64, k: usize) -> Result<f64> {
        eval_signal(self, x, k)
    }
}

pub fn eval_signal(f: &Signal, x: f64, k: usize) -> Result<f64> {
    if k > MAX_DERIVATIVE_ORDER {
        return Err(Error::UnsupportedOrder { order: k, max: MAX_DERIVATIVE_ORDER });
    }
    let scale = f.omega.powi(k as i32);
    Ok(f
        .terms
        .iter()
        .map(|t| t.weight * scale * sinc_derivative(f.omega * (x - t.shift), k))
        .sum())
}

/// `sinc(u) = sin(u)/u`, `sinc(0) = 1`.
pub fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        let u2 = u * u;
        1.0 - u2 / 6.0 + u2 * u2 / 120.0
    } else {
        u.sin() / u
    }
}

const SERIES_RADIUS: f64 = 4.0;

/// `k`-th derivative of `sinc` at `u`.
///
/// Near the origin the Taylor series is summed term by term; elsewhere the
/// Leibniz rule applied to `sin(u) * u^{-1}` is exact.
pub fn sinc_derivative(u: f64, k: usize) -> f64 {
    if u.abs() < SERIES_RADIUS {
        sinc_derivative_series(u, k)
    } else {
        sinc_derivative_leibniz(u, k)
    }
}

fn sinc_derivative_series(u: f64, k: usize) -> f64 {
    // sinc(u) = Σ_n (-1)^n u^{2n} / (2n+1)!
    // d^k/du^k u^{2n} = (2n)!/(2n-k)! u^{2n-k}
    let mut sum = 0.0;
    let n0 = k.div_ceil(2);
    for n in n0..n0 + 40 {
        let p = 2 * n;
        // (2n)! / ((2n-k)! (2n+1)!) = 1 / ((2n-k)! * (2n+1))
        let mut coeff = 1.0 / (p as f64 + 1.0);
        for q in 1..=(p - k) {
            coeff /= q as f64;
        }
        let term = coeff * u.powi((p - k) as i32);
        let signed = if n % 2 == 0 { term } else { -term };
        sum += signed;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) && n > n0 + 2 {
            break;
        }
    }
    sum
}

fn sinc_derivative_leibniz(u: f64, k: usize) -> f64 {
    let (s, c) = u.sin_cos();
    let mut binom = 1.0;
    let mut total = 0.0;
    for m in 0..=k {
        if m > 0 {
            binom = binom * (k - m + 1) as f64 / m as f64;
        }
        let sin_m = match m % 4 {
            0 => s,
            1 => c,
            2 => -s,
            _ => -c,
        };
        // d^r u^{-1} = (-1)^r r! u^{-r-1}
        let r = k - m;
        let mut fact = 1.0;
        for q in 2..=r {
            fact *= q as f64;
        }
        let inv = if r % 2 == 0 { fact } else { -fact } / u.powi(r as i32 + 1);
        total += binom * sin_m * inv;
    }
    total
}
