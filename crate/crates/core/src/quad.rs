//! Globally adaptive 21-point Gauss–Kronrod quadrature for complex-valued
//! integrands on finite intervals.
//!
//! Oscillatory integrands `g(x) e^{i tau x}` are handled by seeding the
//! interval list with enough panels to resolve the oscillation before any
//! adaptive bisection starts.

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_370_767_260,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the abscissae XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-12,
            rel_tol: 1e-13,
            max_intervals: 200_000,
        }
    }
}

impl QuadOptions {
    pub fn with_abs_tol(abs_tol: f64) -> Self {
        QuadOptions { abs_tol, ..Default::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

fn gk21<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Panel {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    for i in 0..10 {
        let dx = half * XGK[i];
        let sum = f(centre - dx) + f(centre + dx);
        kronrod += sum * WGK[i];
        if i % 2 == 1 {
            gauss += sum * WG[i / 2];
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).norm();
    Panel { a, b, value, error }
}

/// Integrates `f` over `[a, b]`, starting from `initial_panels` equal panels.
pub fn integrate<F>(f: F, a: f64, b: f64, initial_panels: usize, opts: &QuadOptions) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    if a == b {
        return Ok(QuadResult { value: Complex64::new(0.0, 0.0), error: 0.0 });
    }
    let n0 = initial_panels.max(1);
    let width = (b - a) / n0 as f64;
    let mut panels: Vec<Panel> = (0..n0)
        .map(|k| {
            let lo = a + width * k as f64;
            let hi = if k + 1 == n0 { b } else { a + width * (k + 1) as f64 };
            gk21(&f, lo, hi)
        })
        .collect();

    loop {
        let total: Complex64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.error).sum();
        let target = opts.abs_tol.max(opts.rel_tol * total.norm());
        if err <= target {
            return Ok(QuadResult { value: total, error: err });
        }
        if panels.len() >= opts.max_intervals {
            return Err(Error::Accuracy { achieved: err, requested: target });
        }
        // Bisect every panel whose error exceeds its share of the target.
        let share = target / (panels.len() as f64 * 4.0);
        let mut next = Vec::with_capacity(panels.len() * 2);
        let mut split_any = false;
        for p in panels {
            let tiny = (p.b - p.a).abs() <= 1e-14 * (p.a.abs() + p.b.abs()).max(1e-300);
            if p.error > share && !tiny {
                let m = 0.5 * (p.a + p.b);
                next.push(gk21(&f, p.a, m));
                next.push(gk21(&f, m, p.b));
                split_any = true;
            } else {
                next.push(p);
            }
        }
        panels = next;
        if !split_any {
            let total: Complex64 = panels.iter().map(|p| p.value).sum();
            let err: f64 = panels.iter().map(|p| p.error).sum();
            let target = opts.abs_tol.max(opts.rel_tol * total.norm());
            if err <= target {
                return Ok(QuadResult { value: total, error: err });
            }
            return Err(Error::Accuracy { achieved: err, requested: target });
        }
    }
}

/// Integrates over consecutive breakpoints; each piece gets panels in
/// proportion to `width * oscillation`, where `oscillation` is the largest
/// angular frequency present in the integrand.
pub fn integrate_pieces<F>(f: F, breaks: &[f64], oscillation: f64, opts: &QuadOptions) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let pieces = breaks.len().saturating_sub(1).max(1);
    let piece_opts = QuadOptions {
        abs_tol: opts.abs_tol / pieces as f64,
        ..*opts
    };
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let r = integrate(&f, a, b, oscillation_panels(b - a, oscillation), &piece_opts)?;
        value += r.value;
        error += r.error;
    }
    Ok(QuadResult { value, error })
}

/// Panels so that each spans at most about two radians of phase.
pub fn oscillation_panels(width: f64, oscillation: f64) -> usize {
    ((width * oscillation.abs()) / 2.0).ceil() as usize + 1
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI_F * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 1..n {
                let p2 = ((2 * k + 1) as f64 * z * p1 - k as f64 * p0) / (k + 1) as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

const PI_F: f64 = std::f64::consts::PI;

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn weights_are_normalised() {
        let k: f64 = 2.0 * WGK[..10].iter().sum::<f64>() + WGK[10];
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((k - 2.0).abs() < 1e-15);
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn gauss_nodes_are_legendre_roots() {
        fn legendre(n: usize, x: f64) -> f64 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 1..n {
                let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
                p0 = p1;
                p1 = p2;
            }
            p1
        }
        for i in (1..10).step_by(2) {
            assert!(legendre(10, XGK[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn exact_for_high_degree_polynomials() {
        let r = integrate(|x| Complex64::new(x.powi(20), x.powi(3)), -1.0, 2.0, 1, &QuadOptions::default()).unwrap();
        let exact_re = (2f64.powi(21) + 1.0) / 21.0;
        let exact_im = (16.0 - 1.0) / 4.0;
        assert!((r.value.re - exact_re).abs() < 1e-9 * exact_re);
        assert!((r.value.im - exact_im).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_fourier_integral() {
        // ∫_{-π}^{π} e^{i tau x} dx = 2 sin(π tau)/tau
        for &tau in &[0.5, 13.0, 250.7, 1800.3] {
            let r = integrate_pieces(
                |x| Complex64::new(0.0, tau * x).exp(),
                &[-PI, PI],
                tau,
                &QuadOptions::default(),
            )
            .unwrap();
            let exact = 2.0 * (PI * tau).sin() / tau;
            assert!((r.value.re - exact).abs() < 1e-11, "tau={tau}");
            assert!(r.value.im.abs() < 1e-11);
        }
    }

    #[test]
    fn gauss_legendre_rules() {
        for n in [1, 2, 5, 64] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13, "n={n}");
            // exact for degree 2n - 1
            let d = 2 * n - 2;
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(d as i32)).sum();
            assert!((q - 2.0 / (d as f64 + 1.0)).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn kink_handled_by_bisection() {
        let r = integrate(|x| Complex64::new(x.abs().sqrt(), 0.0), -1.0, 1.0, 1, &QuadOptions::with_abs_tol(1e-10)).unwrap();
        assert!((r.value.re - 4.0 / 3.0).abs() < 1e-9);
    }
}
