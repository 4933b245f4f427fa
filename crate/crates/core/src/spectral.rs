//! Frequency-side evaluation of the window sums.
//!
//! Both the reconstruction sum and the known-sample term of the recovery
//! system are sums over the window of integrals against `e^{-i n t0 x}`.
//! Swapping sum and integral leaves a single integral against the sample
//! spectrum `S_j(x) = Σ_n f_j(n t0) e^{-i n t0 x}`, which is evaluated once
//! at fixed Gauss–Legendre nodes. The result equals the direct sums up to
//! quadrature error; the direct routes remain the reference.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::duals::DualSet;
use crate::error::{Error, Result};
use crate::generators::{sort_dedup, GeneratorSet};
use crate::linalg::ZERO;
use crate::quad::gauss_legendre;
use crate::recovery::{correlation_breaks, MissingIndexSet};
use crate::sampling::SampleSet;

const GL_ORDER: usize = 64;
/// Largest phase `max_freq * width` carried by one panel.
const PANEL_PHASE: f64 = 80.0;
const BLOCK: usize = 8;

/// Composite Gauss–Legendre rule over `[breaks[0], breaks[last]]`, fine
/// enough for integrands of bandwidth `max_freq` that are smooth between
/// consecutive breakpoints.
#[derive(Clone, Debug)]
pub struct PanelRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

pub fn panel_rule(breaks: &[f64], max_freq: f64) -> PanelRule {
    let (gx, gw) = gauss_legendre(GL_ORDER);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let panels = ((b - a) * max_freq.abs() / PANEL_PHASE).ceil().max(1.0) as usize;
        let step = (b - a) / panels as f64;
        for p in 0..panels {
            let lo = a + p as f64 * step;
            let half = 0.5 * step;
            for (x, wt) in gx.iter().zip(&gw) {
                nodes.push(lo + half * (1.0 + x));
                weights.push(half * wt);
            }
        }
    }
    PanelRule { nodes, weights }
}

/// `S_j(x)` for every channel at every node, known samples only.
/// Indexed `[channel][node]`.
pub fn sample_spectrum(s: &SampleSet, nodes: &[f64]) -> Vec<Vec<Complex64>> {
    let t0 = s.params.t0;
    let (n0, n1) = s.window;
    (0..s.channels)
        .map(|j| {
            let coeffs: Vec<f64> = (n0..=n1).rev().map(|n| s.get(j, n).unwrap_or(0.0)).collect();
            let mut out = vec![ZERO; nodes.len()];
            out.par_chunks_mut(BLOCK)
                .zip(nodes.par_chunks(BLOCK))
                .for_each(|(o, xs)| horner_block(&coeffs, xs, n0, t0, o));
            out
        })
        .collect()
}

/// `Σ_q c_q z_q^q` with `z = e^{-i t0 x}`, coefficients highest first,
/// scaled by `z^{n0}`. Blocks of nodes advance together so the loop
/// vectorises.
fn horner_block(coeffs: &[f64], xs: &[f64], n0: i64, t0: f64, out: &mut [Complex64]) {
    let m = xs.len();
    let mut zr = [0.0; BLOCK];
    let mut zi = [0.0; BLOCK];
    for (q, &x) in xs.iter().enumerate() {
        let (s, c) = (-t0 * x).sin_cos();
        zr[q] = c;
        zi[q] = s;
    }
    let mut ar = [0.0; BLOCK];
    let mut ai = [0.0; BLOCK];
    for &c in coeffs {
        for q in 0..BLOCK {
            let r = ar[q] * zr[q] - ai[q] * zi[q] + c;
            let i = ar[q] * zi[q] + ai[q] * zr[q];
            ar[q] = r;
            ai[q] = i;
        }
    }
    for q in 0..m {
        let shift = Complex64::new(0.0, -(n0 as f64) * t0 * xs[q]).exp();
        out[q] = Complex64::new(ar[q], ai[q]) * shift;
    }
}

fn band_breaks(mut b: Vec<f64>, omega: f64) -> Vec<f64> {
    b.extend([-omega, omega]);
    b.retain(|&v| v >= -omega && v <= omega);
    sort_dedup(&mut b, 1e-12 * omega);
    b
}

fn window_reach(s: &SampleSet) -> f64 {
    s.window.0.unsigned_abs().max(s.window.1.unsigned_abs()) as f64 * s.params.t0
}

/// The truncated reconstruction `Σ_j Σ_n f_j(n t0) phi*_j(x - n t0)` at
/// every point of `xs`, summed on the frequency side.
pub fn reconstruct_spectral(s: &SampleSet, duals: &DualSet, xs: &[f64]) -> Result<Vec<f64>> {
    if !s.mask.is_empty() {
        return Err(Error::MaskedSamples { count: s.mask.len() });
    }
    if duals.len() != s.channels {
        return Err(Error::Consistency(format!("{} duals for {} channels", duals.len(), s.channels)));
    }
    let omega = s.params.omega;
    let reach = xs.iter().fold(0.0_f64, |m, x| m.max(x.abs())) + window_reach(s);
    let rule = panel_rule(&band_breaks(duals.breakpoints(), omega), reach);
    let spec = sample_spectrum(s, &rule.nodes);
    let g: Vec<Complex64> = rule
        .nodes
        .par_iter()
        .enumerate()
        .map(|(q, &xi)| {
            let d = duals.fourier_all(xi);
            let acc: Complex64 = d.iter().enumerate().map(|(j, dj)| dj * spec[j][q]).sum();
            acc * rule.weights[q]
        })
        .collect();
    let c = 1.0 / (2.0 * PI).sqrt();
    Ok(xs
        .par_iter()
        .map(|&x| {
            let v: Complex64 = g
                .iter()
                .zip(&rule.nodes)
                .map(|(gq, &xi)| gq * Complex64::new(0.0, x * xi).exp())
                .sum();
            c * v.re
        })
        .collect())
}

/// Known-sample term of the recovery system,
/// `B_k(m) = Σ_j ∫ phi*_j^ conj(phi_k^) S_j(x) e^{i l_m t0 x} dx`.
pub fn b_vector_spectral(
    gens: &GeneratorSet,
    duals: &DualSet,
    miss: &MissingIndexSet,
    s: &SampleSet,
) -> Result<DVector<Complex64>> {
    let t0 = s.params.t0;
    let lmax = miss.indices.iter().fold(0u64, |m, &l| m.max(l.unsigned_abs())) as f64 * t0;
    let rule = panel_rule(&band_breaks(correlation_breaks(duals, gens), gens.omega), lmax + window_reach(s));
    let spec = sample_spectrum(s, &rule.nodes);
    let lambda = miss.lambda;
    // g[q][k] = w_q Σ_j phi*_j^ conj(phi_k^) S_j at node q
    let g: Vec<Vec<Complex64>> = rule
        .nodes
        .par_iter()
        .enumerate()
        .map(|(q, &xi)| {
            let d = duals.fourier_all(xi);
            let ds: Complex64 = d.iter().enumerate().map(|(j, dj)| dj * spec[j][q]).sum();
            (0..lambda).map(|k| ds * gens.eval(k, xi).conj() * rule.weights[q]).collect()
        })
        .collect();
    let mut b = DVector::from_element(miss.len() * lambda, ZERO);
    for (m, &lm) in miss.indices.iter().enumerate() {
        let tau = lm as f64 * t0;
        let mut acc = vec![ZERO; lambda];
        for (gq, &xi) in g.iter().zip(&rule.nodes) {
            let e = Complex64::new(0.0, tau * xi).exp();
            for k in 0..lambda {
                acc[k] += gq[k] * e;
            }
        }
        for k in 0..lambda {
            b[miss.position(k, m)] = acc[k];
        }
    }
    Ok(b)
}
