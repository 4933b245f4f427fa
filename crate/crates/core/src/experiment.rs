//! Runs assembled from the library pieces: frame check, duals, sampling,
//! reconstruction and missing-sample recovery for a configuration.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{ExperimentConfig, SignalSpec};
use crate::derivative::derivative_generators;
use crate::duals::{numeric_duals_with_threshold, DualSet};
use crate::error::{Error, Result};
use crate::generators::GeneratorSet;
use crate::params::{compute_params, FrameParams};
use crate::quad::QuadOptions;
use crate::recovery::{build_recovery_system, recover_with_threshold, MissingIndexSet, RecoveryOutcome};
use crate::sampling::{reconstruct_many, take_samples, uniform_points, SampleSet};
use crate::signal::Signal;

/// Frame parameters, generators and duals of a configuration.
pub struct Setup {
    pub params: FrameParams,
    pub gens: GeneratorSet,
    pub signal: Signal,
}

impl Setup {
    /// Generators follow `order` when given, otherwise the frame length.
    pub fn new(cfg: &ExperimentConfig, seed: u64) -> Result<Self> {
        let params = compute_params(cfg.omega, cfg.t0)?;
        let order = cfg.order.unwrap_or(params.length);
        let gens = derivative_generators(order, cfg.omega)?;
        let signal = match &cfg.signal {
            SignalSpec::Terms(t) => Signal::new(cfg.omega, t.clone()),
            SignalSpec::Random { terms, spread } => {
                Signal::random(&mut ChaCha8Rng::seed_from_u64(seed), cfg.omega, *terms, *spread)
            }
        };
        Ok(Setup { params, gens, signal })
    }

    /// Requires the generator count to match the frame length.
    pub fn require_frame_length(&self) -> Result<()> {
        if self.gens.len() != self.params.length {
            return Err(Error::Domain(format!(
                "order {} differs from the frame length {} implied by omega and t0",
                self.gens.len(),
                self.params.length
            )));
        }
        Ok(())
    }

    /// Closed-form duals for length 2, numeric duals otherwise.
    pub fn duals(&self, cfg: &ExperimentConfig) -> Result<DualSet> {
        self.require_frame_length()?;
        if self.params.length == 2 {
            DualSet::closed_form_l2(&self.params)
        } else {
            Ok(DualSet::Numeric(numeric_duals_with_threshold(
                &self.gens,
                &self.params,
                cfg.grid_points,
                cfg.dual_cond_threshold,
            )?))
        }
    }
}

pub fn quad_options(cfg: &ExperimentConfig) -> QuadOptions {
    QuadOptions { abs_tol: cfg.quad_tol, rel_tol: (cfg.quad_tol * 0.1).max(1e-15), ..QuadOptions::default() }
}

#[derive(Clone, Debug)]
pub struct RecoveryRun {
    pub miss: MissingIndexSet,
    pub outcome: RecoveryOutcome,
    pub hermitian_defect: f64,
    pub truth: BTreeMap<(usize, i64), f64>,
    pub max_abs: f64,
    pub max_rel: f64,
    pub xs: Vec<f64>,
    pub f_true: Vec<f64>,
    pub f_full: Vec<f64>,
    pub f_zeroed: Vec<f64>,
    pub f_recovered: Vec<f64>,
}

fn sup_err(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

impl RecoveryRun {
    pub fn sup_full(&self) -> f64 {
        sup_err(&self.f_full, &self.f_true)
    }
    pub fn sup_zeroed(&self) -> f64 {
        sup_err(&self.f_zeroed, &self.f_true)
    }
    pub fn sup_recovered(&self) -> f64 {
        sup_err(&self.f_recovered, &self.f_true)
    }
}

/// Samples the signal, withholds the missing samples, recovers them from
/// the recovery window and reconstructs on the evaluation grid from the
/// reconstruction window with (a) all true samples, (b) the missing
/// samples set to zero and (c) the recovered samples.
pub fn run_recovery(cfg: &ExperimentConfig, setup: &Setup, duals: &DualSet) -> Result<RecoveryRun> {
    setup.require_frame_length()?;
    let params = &setup.params;
    let lambda = cfg.lambda.unwrap_or(params.length);
    let miss = MissingIndexSet::new(cfg.missing.clone(), lambda, params.length)?;
    let rr = cfg.recovery_window();
    let wr = cfg.window_radius;

    let full = take_samples(&setup.signal, params, (-rr, rr))?;
    let truth: BTreeMap<(usize, i64), f64> =
        miss.entries().into_iter().map(|(j, n)| ((j, n), full.get(j, n).unwrap_or(f64::NAN))).collect();
    let mut masked = full.clone();
    miss.apply(&mut masked)?;
    let mut sys = build_recovery_system(&setup.gens, duals, params, &miss, &masked, &quad_options(cfg))?;
    let outcome = recover_with_threshold(&mut sys, cfg.cond_threshold)?;
    let (mut max_abs, mut max_rel) = (0.0_f64, 0.0_f64);
    for &((j, n), v) in &outcome.values {
        let t = truth[&(j, n)];
        max_abs = max_abs.max((v.re - t).abs());
        max_rel = max_rel.max((v.re - t).abs() / t.abs());
    }

    let window = restrict(&full, wr)?;
    let mut zeroed = window.clone();
    for &(j, n) in &miss.entries() {
        zeroed.zero_entry(j, n)?;
    }
    let mut recovered = window.clone();
    for &((j, n), v) in &outcome.values {
        recovered.set(j, n, v.re)?;
    }
    let xs = uniform_points(cfg.eval_from, cfg.eval_to, cfg.eval_points);
    let f_true = xs.iter().map(|&x| setup.signal.eval(x, 0)).collect::<Result<Vec<_>>>()?;
    Ok(RecoveryRun {
        hermitian_defect: sys.hermitian_defect,
        f_full: reconstruct_many(&window, duals, &xs)?,
        f_zeroed: reconstruct_many(&zeroed, duals, &xs)?,
        f_recovered: reconstruct_many(&recovered, duals, &xs)?,
        miss,
        outcome,
        truth,
        max_abs,
        max_rel,
        xs,
        f_true,
    })
}

/// The samples of `s` with `|n| <= radius`.
pub fn restrict(s: &SampleSet, radius: i64) -> Result<SampleSet> {
    let lo = s.window.0.max(-radius);
    let hi = s.window.1.min(radius);
    let mut out = SampleSet::zeros(&s.params, s.channels, (lo, hi))?;
    for j in 0..s.channels {
        for n in lo..=hi {
            match s.get(j, n) {
                Some(v) => out.set(j, n, v)?,
                None => out.mask_entry(j, n)?,
            }
        }
    }
    Ok(out)
}

/// Reconstruction error when the samples at `zeroed` are set to zero on
/// every channel, next to the full-sample baseline: `(baseline, zeroed)`
/// sup errors on the evaluation grid.
pub fn degradation(cfg: &ExperimentConfig, setup: &Setup, duals: &DualSet) -> Result<(f64, f64)> {
    let s = take_samples(&setup.signal, &setup.params, (-cfg.window_radius, cfg.window_radius))?;
    let mut z = s.clone();
    for &n in &cfg.zeroed {
        for j in 0..z.channels {
            z.zero_entry(j, n)?;
        }
    }
    let xs = uniform_points(cfg.eval_from, cfg.eval_to, cfg.eval_points);
    let truth = xs.iter().map(|&x| setup.signal.eval(x, 0)).collect::<Result<Vec<_>>>()?;
    Ok((
        sup_err(&reconstruct_many(&s, duals, &xs)?, &truth),
        sup_err(&reconstruct_many(&z, duals, &xs)?, &truth),
    ))
}
