//! Multichannel derivative samples and truncated reconstruction.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::io::{Read, Write};

use rayon::prelude::*;

use crate::duals::{csv_err, DualSet};
use crate::error::{Error, Result};
use crate::params::FrameParams;
use crate::quad::QuadOptions;
use crate::signal::Signal;

/// Samples `f_j(n t0) = sqrt(2π) (-1)^{j-1} f^{(j-1)}(n t0)` for channels
/// `j = 1..=channels` and `n` in an inclusive window.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    pub params: FrameParams,
    pub channels: usize,
    pub window: (i64, i64),
    /// `values[j][n - window.0]`, channel `j` 0-based.
    pub values: Vec<Vec<f64>>,
    /// Missing `(channel, n)` pairs, channel 0-based.
    pub mask: BTreeSet<(usize, i64)>,
}

impl SampleSet {
    pub fn zeros(params: &FrameParams, channels: usize, window: (i64, i64)) -> Result<Self> {
        if window.1 < window.0 {
            return Err(Error::Domain(format!("empty window [{}, {}]", window.0, window.1)));
        }
        let len = (window.1 - window.0 + 1) as usize;
        Ok(SampleSet {
            params: *params,
            channels,
            window,
            values: vec![vec![0.0; len]; channels],
            mask: BTreeSet::new(),
        })
    }

    pub fn contains(&self, n: i64) -> bool {
        n >= self.window.0 && n <= self.window.1
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<i64> {
        self.window.0..=self.window.1
    }

    pub fn get(&self, channel: usize, n: i64) -> Option<f64> {
        if channel >= self.channels || !self.contains(n) || self.mask.contains(&(channel, n)) {
            return None;
        }
        Some(self.values[channel][(n - self.window.0) as usize])
    }

    pub fn set(&mut self, channel: usize, n: i64, v: f64) -> Result<()> {
        if channel >= self.channels || !self.contains(n) {
            return Err(Error::Domain(format!("sample ({}, {n}) outside the set", channel + 1)));
        }
        self.values[channel][(n - self.window.0) as usize] = v;
        Ok(())
    }

    /// Marks `(channel, n)` missing and clears its value.
    pub fn mask_entry(&mut self, channel: usize, n: i64) -> Result<()> {
        self.set(channel, n, 0.0)?;
        self.mask.insert((channel, n));
        Ok(())
    }

    /// Sets `(channel, n)` to zero without marking it missing.
    pub fn zero_entry(&mut self, channel: usize, n: i64) -> Result<()> {
        self.set(channel, n, 0.0)
    }

    /// `a * self + b * other` over the same window and channels.
    pub fn combine(&self, a: f64, other: &SampleSet, b: f64) -> Result<SampleSet> {
        if self.window != other.window || self.channels != other.channels {
            return Err(Error::Shape("sample sets differ in window or channels".into()));
        }
        let mut out = self.clone();
        for (o, r) in out.values.iter_mut().zip(&other.values) {
            for (x, y) in o.iter_mut().zip(r) {
                *x = a * *x + b * y;
            }
        }
        out.mask.extend(other.mask.iter().copied());
        Ok(out)
    }
}

/// Samples every channel of the derivative frame of length `params.length`.
pub fn take_samples(f: &Signal, params: &FrameParams, window: (i64, i64)) -> Result<SampleSet> {
    let mut s = SampleSet::zeros(params, params.length, window)?;
    let root = (2.0 * PI).sqrt();
    for j in 0..s.channels {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        for n in window.0..=window.1 {
            let v = root * sign * f.eval(n as f64 * params.t0, j)?;
            s.values[j][(n - window.0) as usize] = v;
        }
    }
    Ok(s)
}

/// Window indices ordered by `|n|` ascending, `n` before `-n`.
fn summation_order(window: (i64, i64)) -> Vec<i64> {
    let mut v: Vec<i64> = (window.0..=window.1).collect();
    v.sort_by_key(|&n| (n.unsigned_abs(), n < 0));
    v
}

pub(crate) fn time_quad_opts() -> QuadOptions {
    QuadOptions::with_abs_tol(1e-13)
}

/// `Σ_j Σ_n f_j(n t0) phi*_j(x - n t0)` over the window.
pub fn reconstruct(s: &SampleSet, duals: &DualSet, x: f64) -> Result<f64> {
    if !s.mask.is_empty() {
        return Err(Error::MaskedSamples { count: s.mask.len() });
    }
    if duals.len() != s.channels {
        return Err(Error::Consistency(format!("{} duals for {} channels", duals.len(), s.channels)));
    }
    let opts = time_quad_opts();
    let mut acc = 0.0;
    for n in summation_order(s.window) {
        let phi = duals.time_all(x - n as f64 * s.params.t0, &opts)?;
        let idx = (n - s.window.0) as usize;
        for (j, p) in phi.iter().enumerate() {
            acc += s.values[j][idx] * p;
        }
    }
    Ok(acc)
}

/// `reconstruct` at many points, summed on the frequency side.
pub fn reconstruct_many(s: &SampleSet, duals: &DualSet, xs: &[f64]) -> Result<Vec<f64>> {
    crate::spectral::reconstruct_spectral(s, duals, xs)
}

/// `reconstruct` at many points by direct time-domain summation.
pub fn reconstruct_many_direct(s: &SampleSet, duals: &DualSet, xs: &[f64]) -> Result<Vec<f64>> {
    xs.par_iter().map(|&x| reconstruct(s, duals, x)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReconstructionMetrics {
    pub sup: f64,
    pub rms: f64,
    /// Dual evaluation path, `"closed-form"` or `"numeric"`.
    pub path: &'static str,
    pub xs: Vec<f64>,
    pub truth: Vec<f64>,
    pub recon: Vec<f64>,
}

/// `grid` uniform points of `[a, b]`, endpoints included.
pub fn uniform_points(a: f64, b: f64, grid: usize) -> Vec<f64> {
    match grid {
        0 => Vec::new(),
        1 => vec![0.5 * (a + b)],
        _ => (0..grid).map(|k| a + (b - a) * k as f64 / (grid - 1) as f64).collect(),
    }
}

pub fn reconstruction_error(
    f: &Signal,
    s: &SampleSet,
    duals: &DualSet,
    interval: (f64, f64),
    grid: usize,
) -> Result<ReconstructionMetrics> {
    let xs = uniform_points(interval.0, interval.1, grid);
    let recon = reconstruct_many(s, duals, &xs)?;
    let truth = xs.iter().map(|&x| f.eval(x, 0)).collect::<Result<Vec<_>>>()?;
    let errs: Vec<f64> = recon.iter().zip(&truth).map(|(r, t)| (r - t).abs()).collect();
    let sup = errs.iter().copied().fold(0.0, f64::max);
    let rms = if errs.is_empty() {
        0.0
    } else {
        (errs.iter().map(|e| e * e).sum::<f64>() / errs.len() as f64).sqrt()
    };
    Ok(ReconstructionMetrics { sup, rms, path: duals.path(), xs, truth, recon })
}

/// Columns `channel, n, value, missing`; channels are 1-based and missing
/// values are left empty.
pub fn write_samples_csv<W: Write>(s: &SampleSet, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["channel", "n", "value", "missing"]).map_err(csv_err)?;
    for j in 0..s.channels {
        for n in s.indices() {
            let missing = s.mask.contains(&(j, n));
            let value = if missing { String::new() } else { format!("{:.16e}", s.values[j][(n - s.window.0) as usize]) };
            w.write_record([(j + 1).to_string(), n.to_string(), value, u8::from(missing).to_string()])
                .map_err(csv_err)?;
        }
    }
    w.flush().map_err(|e| Error::Consistency(format!("writing csv: {e}")))
}

/// Reads the format of [`write_samples_csv`]. The window and channel count
/// are taken from the file and must form a full rectangle.
pub fn read_samples_csv<R: Read>(params: &FrameParams, input: R) -> Result<SampleSet> {
    let mut r = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::Domain(format!("samples line {}: {e}", line + 2)))?;
        let bad = |what: &str| Error::Domain(format!("samples line {}: bad {what}", line + 2));
        let channel: usize = rec.get(0).and_then(|v| v.trim().parse().ok()).ok_or_else(|| bad("channel"))?;
        let n: i64 = rec.get(1).and_then(|v| v.trim().parse().ok()).ok_or_else(|| bad("index"))?;
        let missing = rec.get(3).map(|v| v.trim() == "1").unwrap_or(false);
        let value: f64 = if missing {
            0.0
        } else {
            rec.get(2).and_then(|v| v.trim().parse().ok()).ok_or_else(|| bad("value"))?
        };
        if channel == 0 {
            return Err(bad("channel"));
        }
        rows.push((channel - 1, n, value, missing));
    }
    if rows.is_empty() {
        return Err(Error::Domain("samples file has no rows".into()));
    }
    let channels = rows.iter().map(|r| r.0).max().unwrap_or(0) + 1;
    let lo = rows.iter().map(|r| r.1).min().unwrap_or(0);
    let hi = rows.iter().map(|r| r.1).max().unwrap_or(0);
    let expected = channels * (hi - lo + 1) as usize;
    if rows.len() != expected {
        return Err(Error::Domain(format!(
            "samples file has {} rows, expected {expected} for {channels} channels over [{lo}, {hi}]",
            rows.len()
        )));
    }
    let mut s = SampleSet::zeros(params, channels, (lo, hi))?;
    for (j, n, v, missing) in rows {
        s.set(j, n, v)?;
        if missing {
            s.mask.insert((j, n));
        }
    }
    Ok(s)
}

/// Columns `x, f_true, f_recon, abs_err`.
pub fn write_reconstruction_csv<W: Write>(m: &ReconstructionMetrics, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "f_true", "f_recon", "abs_err"]).map_err(csv_err)?;
    for ((x, t), r) in m.xs.iter().zip(&m.truth).zip(&m.recon) {
        w.write_record([
            format!("{x:.16e}"),
            format!("{t:.16e}"),
            format!("{r:.16e}"),
            format!("{:.16e}", (r - t).abs()),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Consistency(format!("writing csv: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::compute_params;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn l2() -> (FrameParams, DualSet) {
        let p = compute_params(PI, 1.25).unwrap();
        let d = DualSet::closed_form_l2(&p).unwrap();
        (p, d)
    }

    #[test]
    fn zero_signal_samples_vanish() {
        let (p, _) = l2();
        let s = take_samples(&Signal::zero(PI), &p, (-5, 5)).unwrap();
        assert!(s.values.iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn channel_signs_follow_convention() {
        let (p, _) = l2();
        let f = Signal::ferreira();
        let s = take_samples(&f, &p, (-2, 2)).unwrap();
        let root = (2.0 * PI).sqrt();
        assert!((s.get(0, 0).unwrap() - root * f.eval(0.0, 0).unwrap()).abs() < 1e-15);
        assert!((s.get(1, 0).unwrap() + root * f.eval(0.0, 1).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn masked_sets_are_rejected() {
        let (p, d) = l2();
        let mut s = take_samples(&Signal::ferreira(), &p, (-3, 3)).unwrap();
        s.mask_entry(0, 1).unwrap();
        assert!(matches!(reconstruct(&s, &d, 0.0), Err(Error::MaskedSamples { count: 1 })));
    }

    #[test]
    fn zero_samples_reconstruct_to_zero() {
        let (p, d) = l2();
        let s = SampleSet::zeros(&p, 2, (-4, 4)).unwrap();
        assert_eq!(reconstruct(&s, &d, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn reconstruction_is_linear() {
        let (p, d) = l2();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = Signal::random(&mut rng, PI, 3, 4.0);
        let g = Signal::random(&mut rng, PI, 3, 4.0);
        let sf = take_samples(&f, &p, (-10, 10)).unwrap();
        let sg = take_samples(&g, &p, (-10, 10)).unwrap();
        let mix = sf.combine(0.7, &sg, -1.3).unwrap();
        for &x in &[-2.0, 0.1, 3.7] {
            let lhs = reconstruct(&mix, &d, x).unwrap();
            let rhs = 0.7 * reconstruct(&sf, &d, x).unwrap() - 1.3 * reconstruct(&sg, &d, x).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
        }
    }

    #[test]
    fn reconstruction_commutes_with_shift() {
        let (p, d) = l2();
        let f = Signal::ferreira();
        let g = f.translated(p.t0);
        let sf = take_samples(&f, &p, (-12, 12)).unwrap();
        let sg = take_samples(&g, &p, (-13, 11)).unwrap();
        for &x in &[-1.5, 0.0, 2.2] {
            let a = reconstruct(&sg, &d, x).unwrap();
            let b = reconstruct(&sf, &d, x + p.t0).unwrap();
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn truncation_error_decreases_with_window() {
        let (p, d) = l2();
        let f = Signal::ferreira();
        let errs: Vec<f64> = [40, 60, 80]
            .iter()
            .map(|&r| {
                let s = take_samples(&f, &p, (-r, r)).unwrap();
                reconstruction_error(&f, &s, &d, (-10.0, 10.0), 81).unwrap().sup
            })
            .collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    }

    #[test]
    fn csv_round_trip() {
        let (p, _) = l2();
        let mut s = take_samples(&Signal::ferreira(), &p, (-3, 4)).unwrap();
        s.mask_entry(1, 2).unwrap();
        let mut buf = Vec::new();
        write_samples_csv(&s, &mut buf).unwrap();
        let back = read_samples_csv(&p, buf.as_slice()).unwrap();
        assert_eq!(back.window, s.window);
        assert_eq!(back.mask, s.mask);
        for j in 0..2 {
            for n in s.indices() {
                assert_eq!(back.get(j, n), s.get(j, n));
            }
        }
    }
}
