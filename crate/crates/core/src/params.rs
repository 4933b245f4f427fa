//! Frame parameters and the partition of the frequency period `[0, h)`.
//!
//! For a band limit `omega` and a sampling step `t0` the space of band-limited
//! functions is shift-invariant under multiples of `t0`. Its length (the least
//! number of generators) depends only on `h = 2π / t0` through the integer
//! index `ell`, and `[0, h)` splits into three intervals on which the
//! pre-Gramian of a minimal generator set is either invertible or has a single
//! vanishing row.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// Relative tolerance used to detect integral ratios and Riesz endpoints.
pub const ENDPOINT_RTOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `omega/ell < h < omega/(ell - 1/2)`, length `2 ell`.
    Even,
    /// `omega/(ell - 1/2) < h < omega/(ell - 1)`, length `2 ell - 1`.
    Odd,
    /// `h = omega/ell`: the translates of a minimal generator set can at best
    /// form a Riesz basis.
    RieszEndpointEven,
    /// `h = omega/(ell - 1/2)`.
    RieszEndpointOdd,
}

impl Regime {
    pub fn is_even(self) -> bool {
        matches!(self, Regime::Even | Regime::RieszEndpointEven)
    }

    pub fn is_endpoint(self) -> bool {
        matches!(self, Regime::RieszEndpointEven | Regime::RieszEndpointOdd)
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::Even => "even",
            Regime::Odd => "odd",
            Regime::RieszEndpointEven => "riesz-endpoint-even",
            Regime::RieszEndpointOdd => "riesz-endpoint-odd",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameParams {
    pub omega: f64,
    pub t0: f64,
    /// `2π / t0`.
    pub h: f64,
    pub ell: usize,
    pub regime: Regime,
    /// Length of the band-limited space as a `t0`-shift-invariant space.
    pub length: usize,
}

/// Computes `h`, `ell`, the regime and the length for a band limit and step.
///
/// `ell = [omega/h] + 1` where `[a]` is the greatest integer strictly less
/// than `a`, so an exactly integral ratio gives `ell = omega/h`.
pub fn compute_params(omega: f64, t0: f64) -> Result<FrameParams> {
    compute_params_with_tol(omega, t0, ENDPOINT_RTOL)
}

pub fn compute_params_with_tol(omega: f64, t0: f64, rtol: f64) -> Result<FrameParams> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::Domain(format!("omega must be positive and finite, got {omega}")));
    }
    if !(t0.is_finite() && t0 > 0.0) {
        return Err(Error::Domain(format!("t0 must be positive and finite, got {t0}")));
    }
    let h = 2.0 * PI / t0;
    let ratio = omega / h;
    let nearest = ratio.round();
    let ell = if nearest >= 1.0 && (ratio - nearest).abs() <= rtol * ratio {
        nearest as usize
    } else {
        ratio.floor() as usize + 1
    };
    let ell_f = ell as f64;

    let odd_lower = omega / (ell_f - 0.5);
    let even_lower = omega / ell_f;
    let regime = if (h - odd_lower).abs() <= rtol * odd_lower {
        Regime::RieszEndpointOdd
    } else if h > odd_lower {
        Regime::Odd
    } else if (h - even_lower).abs() <= rtol * even_lower {
        Regime::RieszEndpointEven
    } else {
        Regime::Even
    };
    let length = if regime.is_even() { 2 * ell } else { 2 * ell - 1 };

    Ok(FrameParams {
        omega,
        t0,
        h,
        ell,
        regime,
        length,
    })
}

impl FrameParams {
    /// Parameters for the step `t0 = 2π/h`.
    pub fn from_h(omega: f64, h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::Domain(format!("h must be positive and finite, got {h}")));
        }
        compute_params(omega, 2.0 * PI / h)
    }

    pub fn partition(&self) -> FrequencyPartition {
        partition(self)
    }

    /// Range of shifts `j` with `x + j h` inside `[-omega, omega]`.
    pub fn support_shifts(&self, x: f64) -> std::ops::RangeInclusive<i64> {
        let lo = ((-self.omega - x) / self.h).ceil() as i64;
        let hi = ((self.omega - x) / self.h).floor() as i64;
        lo..=hi
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Zone {
    Left,
    Middle,
    Right,
}

impl Zone {
    pub fn name(self) -> &'static str {
        match self {
            Zone::Left => "left",
            Zone::Middle => "middle",
            Zone::Right => "right",
        }
    }
}

/// Open interval `(lo, hi)`; empty when `hi <= lo`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo).max(0.0)
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrequencyPartition {
    pub even: bool,
    pub h: f64,
    /// First breakpoint.
    pub a: f64,
    /// Second breakpoint.
    pub b: f64,
    pub left: Interval,
    pub middle: Interval,
    pub right: Interval,
}

/// Splits `[0, h)` into the three intervals `I_-, I, I_+` (even regimes) or
/// `K_-, K, K_+` (odd regimes).
pub fn partition(params: &FrameParams) -> FrequencyPartition {
    let FrameParams { omega, h, ell, regime, .. } = *params;
    let ell_f = ell as f64;
    let even = regime.is_even();
    let (mut a, mut b) = if even {
        (-omega + ell_f * h, omega - (ell_f - 1.0) * h)
    } else {
        (omega - (ell_f - 1.0) * h, -omega + ell_f * h)
    };
    match regime {
        Regime::RieszEndpointEven => {
            a = 0.0;
            b = h;
        }
        Regime::RieszEndpointOdd => {
            let m = 0.5 * (a + b);
            a = m;
            b = m;
        }
        _ => {}
    }
    let a = a.clamp(0.0, h);
    let b = b.clamp(a, h);
    FrequencyPartition {
        even,
        h,
        a,
        b,
        left: Interval { lo: 0.0, hi: a },
        middle: Interval { lo: a, hi: b },
        right: Interval { lo: b, hi: h },
    }
}

impl FrequencyPartition {
    pub fn interval(&self, zone: Zone) -> Interval {
        match zone {
            Zone::Left => self.left,
            Zone::Middle => self.middle,
            Zone::Right => self.right,
        }
    }

    /// Zones where a minimal generator set has a pre-Gramian of rank `L - 1`.
    pub fn is_rank_deficient(&self, zone: Zone) -> bool {
        if self.even {
            zone != Zone::Middle
        } else {
            zone == Zone::Middle
        }
    }

    /// Non-empty zones in increasing order.
    pub fn zones(&self) -> Vec<(Zone, Interval)> {
        [Zone::Left, Zone::Middle, Zone::Right]
            .into_iter()
            .map(|z| (z, self.interval(z)))
            .filter(|(_, iv)| !iv.is_empty())
            .collect()
    }

    pub fn deficient_zones(&self) -> Vec<(Zone, Interval)> {
        self.zones()
            .into_iter()
            .filter(|(z, _)| self.is_rank_deficient(*z))
            .collect()
    }

    pub fn invertible_zones(&self) -> Vec<(Zone, Interval)> {
        self.zones()
            .into_iter()
            .filter(|(z, _)| !self.is_rank_deficient(*z))
            .collect()
    }

    /// Zone of `x` under the half-open convention `[lo, hi)`.
    pub fn zone_of(&self, x: f64) -> Result<Zone> {
        if !(0.0..self.h).contains(&x) {
            return Err(Error::Domain(format!(
                "frequency {x} outside [0, {}); reduce modulo h first",
                self.h
            )));
        }
        Ok(if x < self.a {
            Zone::Left
        } else if x < self.b {
            Zone::Middle
        } else {
            Zone::Right
        })
    }
}
