//! Recovery of finitely many missing samples from the redundancy of a frame.
//!
//! With missing indices `l_1..l_N` on channels `1..=lambda`, the unknowns
//! satisfy `(I - S) X = B`, where `S` collects the correlations
//! `(phi*_j * phi~_k)((l_m - l_p) t0)` and `B` the contribution of all known
//! samples in the window.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::duals::{csv_err, numeric_duals, DualSet};
use crate::error::{Error, Result};
use crate::generators::{sort_dedup, GeneratorSet};
use crate::gramian::{mixed_gramian_at, symbolic_cross_vector};
use crate::linalg::{self, CMatrix, ZERO};
use crate::params::FrameParams;
use crate::quad::{self, QuadOptions};
use crate::sampling::SampleSet;

/// `1 - S` is declared singular when its smallest singular value is at most
/// this fraction of `max(1, |S|)`.
pub const SINGULAR_RTOL: f64 = 1e-10;
/// Above this condition number the solve proceeds with a warning.
pub const DEFAULT_COND_THRESHOLD: f64 = 1e10;
/// Margin below 1 required of the largest eigenvalue in the spectral test.
pub const SPECTRAL_TOL: f64 = 1e-8;

/// Missing indices, in caller order, with the first `lambda` channels
/// missing at each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MissingIndexSet {
    pub indices: Vec<i64>,
    pub lambda: usize,
}

impl MissingIndexSet {
    pub fn new(indices: Vec<i64>, lambda: usize, length: usize) -> Result<Self> {
        if lambda == 0 || lambda > length {
            return Err(Error::Domain(format!("lambda must be in 1..={length}, got {lambda}")));
        }
        let distinct: BTreeSet<i64> = indices.iter().copied().collect();
        if distinct.len() != indices.len() {
            return Err(Error::Domain("missing indices must be distinct".into()));
        }
        Ok(MissingIndexSet { indices, lambda })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// `(channel, index)` pairs, channel 0-based.
    pub fn entries(&self) -> BTreeSet<(usize, i64)> {
        (0..self.lambda)
            .flat_map(|j| self.indices.iter().map(move |&n| (j, n)))
            .collect()
    }

    /// Position of unknown `(channel k, m-th index)` in `X`.
    pub fn position(&self, k: usize, m: usize) -> usize {
        k * self.indices.len() + m
    }

    /// Applies the mask to a sample set.
    pub fn apply(&self, s: &mut SampleSet) -> Result<()> {
        for (j, n) in self.entries() {
            s.mask_entry(j, n)?;
        }
        Ok(())
    }
}

pub(crate) fn correlation_breaks(duals: &DualSet, gens: &GeneratorSet) -> Vec<f64> {
    let mut b = duals.breakpoints();
    b.extend(gens.breakpoints());
    let omega = gens.omega;
    b.retain(|&v| v >= -omega && v <= omega);
    sort_dedup(&mut b, 1e-12 * omega);
    b
}

/// `(phi*_j * phi~_k)(tau) = ∫ phi*_j^(x) conj(phi_k^(x)) e^{i tau x} dx`
/// (channels 0-based).
pub fn correlation(duals: &DualSet, gens: &GeneratorSet, j: usize, k: usize, tau: f64, opts: &QuadOptions) -> Result<Complex64> {
    let breaks = correlation_breaks(duals, gens);
    correlation_on(duals, gens, j, k, tau, &breaks, opts)
}

fn correlation_on(
    duals: &DualSet,
    gens: &GeneratorSet,
    j: usize,
    k: usize,
    tau: f64,
    breaks: &[f64],
    opts: &QuadOptions,
) -> Result<Complex64> {
    let r = quad::integrate_pieces(
        |x| duals.fourier(j, x) * gens.eval(k, x).conj() * Complex64::new(0.0, tau * x).exp(),
        breaks,
        tau,
        opts,
    )?;
    Ok(r.value)
}

/// The same correlation at `tau = n t0`, as the `n`-th Fourier coefficient
/// `(1/h) ∫_0^h [phi*_j^, phi_k^](t) e^{i n t0 t} dt` of the bracket product.
pub fn correlation_via_bracket(
    duals: &DualSet,
    gens: &GeneratorSet,
    params: &FrameParams,
    j: usize,
    k: usize,
    n: i64,
    opts: &QuadOptions,
) -> Result<Complex64> {
    let h = params.h;
    let mut breaks: Vec<f64> = correlation_breaks(duals, gens).iter().map(|b| b.rem_euclid(h)).collect();
    breaks.push(0.0);
    breaks.push(h);
    sort_dedup(&mut breaks, 1e-12 * h);
    breaks.retain(|&v| (0.0..=h).contains(&v));
    let tau = n as f64 * params.t0;
    let r = quad::integrate_pieces(
        |t| {
            let mut acc = ZERO;
            for r in params.support_shifts(t) {
                let x = t + r as f64 * h;
                acc += duals.fourier(j, x) * gens.eval(k, x).conj();
            }
            acc * Complex64::new(0.0, tau * t).exp()
        },
        &breaks,
        tau,
        opts,
    )?;
    Ok(r.value)
}

/// Correlations at integer multiples of `t0`, keyed by `(j, k, d)`.
#[derive(Clone, Debug, Default)]
pub struct CorrelationTable {
    pub values: BTreeMap<(usize, usize, i64), Complex64>,
}

impl CorrelationTable {
    pub fn build(
        duals: &DualSet,
        gens: &GeneratorSet,
        params: &FrameParams,
        keys: BTreeSet<(usize, usize, i64)>,
        opts: &QuadOptions,
    ) -> Result<Self> {
        let breaks = correlation_breaks(duals, gens);
        let keys: Vec<_> = keys.into_iter().collect();
        let vals = keys
            .par_iter()
            .map(|&(j, k, d)| correlation_on(duals, gens, j, k, d as f64 * params.t0, &breaks, opts))
            .collect::<Result<Vec<_>>>()?;
        Ok(CorrelationTable { values: keys.into_iter().zip(vals).collect() })
    }

    pub fn get(&self, j: usize, k: usize, d: i64) -> Complex64 {
        self.values[&(j, k, d)]
    }
}

pub fn default_correlation_opts() -> QuadOptions {
    QuadOptions { abs_tol: 1e-12, rel_tol: 1e-13, ..QuadOptions::default() }
}

#[derive(Clone, Debug)]
pub struct RecoverySystem {
    pub miss: MissingIndexSet,
    pub s: CMatrix,
    pub b: DVector<Complex64>,
    pub x: Option<DVector<Complex64>>,
    pub cond: f64,
    pub hermitian_defect: f64,
    pub min_singular: f64,
    pub s_norm: f64,
}

/// `S` alone, for the spectral recoverability test and the quadratic form.
pub fn system_matrix(
    gens: &GeneratorSet,
    duals: &DualSet,
    params: &FrameParams,
    miss: &MissingIndexSet,
    opts: &QuadOptions,
) -> Result<CMatrix> {
    let lambda = miss.lambda;
    let mut keys = BTreeSet::new();
    for &lm in &miss.indices {
        for &lp in &miss.indices {
            for j in 0..lambda {
                for k in 0..lambda {
                    keys.insert((j, k, lm - lp));
                }
            }
        }
    }
    let table = CorrelationTable::build(duals, gens, params, keys, opts)?;
    Ok(assemble_s(&table, miss))
}

fn assemble_s(table: &CorrelationTable, miss: &MissingIndexSet) -> CMatrix {
    let n = miss.len();
    let dim = n * miss.lambda;
    let mut s = CMatrix::zeros(dim, dim);
    for k in 0..miss.lambda {
        for (m, &lm) in miss.indices.iter().enumerate() {
            for j in 0..miss.lambda {
                for (p, &lp) in miss.indices.iter().enumerate() {
                    s[(miss.position(k, m), miss.position(j, p))] = table.get(j, k, lm - lp);
                }
            }
        }
    }
    s
}

/// How the known-sample term `B` is summed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BAssembly {
    /// One correlation integral per window offset.
    Direct,
    /// A single integral against the sample spectrum.
    Spectral,
    /// `Direct` for windows of at most `AUTO_DIRECT_MAX` samples per channel.
    Auto,
}

pub const AUTO_DIRECT_MAX: usize = 241;

/// Assembles `S` and `B` from the known samples of `s`.
pub fn build_recovery_system(
    gens: &GeneratorSet,
    duals: &DualSet,
    params: &FrameParams,
    miss: &MissingIndexSet,
    s: &SampleSet,
    opts: &QuadOptions,
) -> Result<RecoverySystem> {
    build_recovery_system_with(gens, duals, params, miss, s, opts, BAssembly::Auto)
}

pub fn build_recovery_system_with(
    gens: &GeneratorSet,
    duals: &DualSet,
    params: &FrameParams,
    miss: &MissingIndexSet,
    s: &SampleSet,
    opts: &QuadOptions,
    assembly: BAssembly,
) -> Result<RecoverySystem> {
    if s.mask != miss.entries() {
        return Err(Error::Consistency(format!(
            "sample mask has {} entries, missing set describes {}",
            s.mask.len(),
            miss.entries().len()
        )));
    }
    if let Some(&n) = miss.indices.iter().find(|&&n| !s.contains(n)) {
        return Err(Error::Consistency(format!("missing index {n} outside the sample window")));
    }
    if gens.len() != s.channels || duals.len() != s.channels {
        return Err(Error::Consistency(format!(
            "{} generators, {} duals, {} channels",
            gens.len(),
            duals.len(),
            s.channels
        )));
    }
    let lambda = miss.lambda;
    let dim = miss.len() * lambda;
    let spectral = match assembly {
        BAssembly::Direct => false,
        BAssembly::Spectral => true,
        BAssembly::Auto => s.indices().count() > AUTO_DIRECT_MAX,
    };
    let (smat, b) = if spectral {
        let smat = system_matrix(gens, duals, params, miss, opts)?;
        let b = if dim == 0 {
            DVector::from_element(0, ZERO)
        } else {
            crate::spectral::b_vector_spectral(gens, duals, miss, s)?
        };
        (smat, b)
    } else {
        let mut keys = BTreeSet::new();
        for &lm in &miss.indices {
            for j in 0..s.channels {
                for k in 0..lambda {
                    for n in s.indices() {
                        keys.insert((j, k, lm - n));
                    }
                }
            }
        }
        let table = CorrelationTable::build(duals, gens, params, keys, opts)?;
        let smat = assemble_s(&table, miss);
        let mut b = DVector::from_element(dim, ZERO);
        for k in 0..lambda {
            for (m, &lm) in miss.indices.iter().enumerate() {
                let mut acc = ZERO;
                for j in 0..s.channels {
                    for n in s.indices() {
                        if let Some(v) = s.get(j, n) {
                            acc += table.get(j, k, lm - n) * v;
                        }
                    }
                }
                b[miss.position(k, m)] = acc;
            }
        }
        (smat, b)
    };
    let a = linalg::identity(dim) - &smat;
    let sv = linalg::singular_values(&a);
    let min_singular = sv.last().copied().unwrap_or(1.0);
    let cond = linalg::condition_number(&a);
    Ok(RecoverySystem {
        miss: miss.clone(),
        hermitian_defect: linalg::hermitian_defect(&smat),
        s_norm: linalg::spectral_norm(&smat),
        s: smat,
        b,
        x: None,
        cond,
        min_singular,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecoveryOutcome {
    /// `((channel, index), value)`, channel 0-based, in `X` order.
    pub values: Vec<((usize, i64), Complex64)>,
    pub residual: f64,
    pub cond: f64,
    pub warning: Option<String>,
}

impl RecoveryOutcome {
    /// Writes the real parts of the recovered values into `s` and unmasks
    /// them.
    pub fn fill(&self, s: &mut SampleSet) -> Result<()> {
        for &((j, n), v) in &self.values {
            s.set(j, n, v.re)?;
            s.mask.remove(&(j, n));
        }
        Ok(())
    }
}

/// Solves `(I - S) X = B` by LU with partial pivoting.
pub fn recover(sys: &mut RecoverySystem) -> Result<RecoveryOutcome> {
    recover_with_threshold(sys, DEFAULT_COND_THRESHOLD)
}

pub fn recover_with_threshold(sys: &mut RecoverySystem, cond_threshold: f64) -> Result<RecoveryOutcome> {
    let dim = sys.s.nrows();
    if dim == 0 {
        sys.x = Some(DVector::from_element(0, ZERO));
        return Ok(RecoveryOutcome { values: Vec::new(), residual: 0.0, cond: 1.0, warning: None });
    }
    if sys.min_singular <= SINGULAR_RTOL * sys.s_norm.max(1.0) {
        return Err(Error::NotRecoverable { min_singular: sys.min_singular });
    }
    let a = linalg::identity(dim) - &sys.s;
    // Solve with the indices in ascending order so that the result does not
    // depend on the caller's ordering, then map back.
    let miss = &sys.miss;
    let mut order: Vec<usize> = (0..miss.len()).collect();
    order.sort_by_key(|&m| miss.indices[m]);
    let perm: Vec<usize> = (0..miss.lambda)
        .flat_map(|k| order.iter().map(move |&m| miss.position(k, m)))
        .collect();
    let a_sorted = CMatrix::from_fn(dim, dim, |r, c| a[(perm[r], perm[c])]);
    let b_sorted = DVector::from_fn(dim, |r, _| sys.b[perm[r]]);
    let y = a_sorted
        .lu()
        .solve(&b_sorted)
        .ok_or(Error::NotRecoverable { min_singular: sys.min_singular })?;
    let mut x = DVector::from_element(dim, ZERO);
    for (r, &p) in perm.iter().enumerate() {
        x[p] = y[r];
    }
    let residual = (&a * &x - &sys.b).norm();
    let warning = (sys.cond > cond_threshold).then(|| {
        format!("condition number {:.3e} exceeds {:.3e}; recovered values may be inaccurate", sys.cond, cond_threshold)
    });
    let values = (0..miss.lambda)
        .flat_map(|k| miss.indices.iter().enumerate().map(move |(m, &n)| (k, m, n)))
        .map(|(k, m, n)| ((k, n), x[miss.position(k, m)]))
        .collect();
    sys.x = Some(x);
    Ok(RecoveryOutcome { values, residual, cond: sys.cond, warning })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertificateMethod {
    /// Decided from the polynomial degrees of the cross vector.
    Symbolic,
    /// Decided from the spectrum of `S`.
    Spectral,
    /// Nothing is missing.
    Trivial,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub recoverable: bool,
    pub method: CertificateMethod,
    /// Degrees of the first `lambda` cross-vector components on the piece
    /// that decided the answer (`None` marks an identically zero component).
    pub degrees: Vec<Option<usize>>,
    pub max_eigenvalue: Option<f64>,
    pub hermitian_defect: Option<f64>,
}

/// Decides whether the samples in `miss` can be recovered.
///
/// Polynomial generators are decided symbolically: if the first `lambda`
/// cross-vector components are non-zero polynomials of distinct degrees on
/// some part of a rank-deficient zone, no non-trivial combination with
/// trigonometric coefficients vanishes there. An identically zero component
/// is a witness of dependence. Otherwise the largest eigenvalue of the
/// Hermitian part of `S` decides.
pub fn recoverable(gens: &GeneratorSet, params: &FrameParams, miss: &MissingIndexSet) -> Result<Certificate> {
    if miss.is_empty() {
        return Ok(Certificate {
            recoverable: true,
            method: CertificateMethod::Trivial,
            degrees: Vec::new(),
            max_eigenvalue: None,
            hermitian_defect: None,
        });
    }
    let pieces = symbolic_cross_vector(gens, params)?;
    if !pieces.is_empty() {
        let lam = miss.lambda;
        for c in 0..lam {
            if pieces.iter().all(|p| p.components[c].is_zero(crate::gramian::DEGREE_RTOL)) {
                return Ok(Certificate {
                    recoverable: false,
                    method: CertificateMethod::Symbolic,
                    degrees: pieces[0].degrees()[..lam].to_vec(),
                    max_eigenvalue: None,
                    hermitian_defect: None,
                });
            }
        }
        for p in &pieces {
            let d = p.degrees()[..lam].to_vec();
            let distinct: BTreeSet<usize> = d.iter().flatten().copied().collect();
            if d.iter().all(Option::is_some) && distinct.len() == lam {
                return Ok(Certificate {
                    recoverable: true,
                    method: CertificateMethod::Symbolic,
                    degrees: d,
                    max_eigenvalue: None,
                    hermitian_defect: None,
                });
            }
        }
    }
    spectral_certificate(gens, params, miss)
}

fn spectral_certificate(gens: &GeneratorSet, params: &FrameParams, miss: &MissingIndexSet) -> Result<Certificate> {
    let duals = DualSet::Numeric(numeric_duals(gens, params, 256)?);
    let s = system_matrix(gens, &duals, params, miss, &default_correlation_opts())?;
    let defect = linalg::hermitian_defect(&s);
    if defect > 1e-6 * linalg::spectral_norm(&s).max(1.0) {
        return Err(Error::Undecidable(format!(
            "S is not Hermitian (defect {defect:.3e}); the spectral test does not apply"
        )));
    }
    let herm = (&s + s.adjoint()) * Complex64::new(0.5, 0.0);
    let max_eig = herm.symmetric_eigenvalues().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(Certificate {
        recoverable: max_eig < 1.0 - SPECTRAL_TOL,
        method: CertificateMethod::Spectral,
        degrees: Vec::new(),
        max_eigenvalue: Some(max_eig),
        hermitian_defect: Some(defect),
    })
}

/// `|(X*X - X*SX) - (1/h) ∫ |(I - G(t)) X^(t)|^2 dt|` with
/// `X^_k(t) = Σ_m x_k(m) e^{-i l_m t0 t}`, the integral over the zones where
/// `G` is not the identity.
pub fn quadratic_form_residual(
    sys: &RecoverySystem,
    x: &DVector<Complex64>,
    gens: &GeneratorSet,
    duals: &DualSet,
    params: &FrameParams,
) -> Result<f64> {
    let miss = &sys.miss;
    let l = gens.len();
    if miss.lambda != l {
        return Err(Error::Domain("the quadratic-form identity needs all channels missing".into()));
    }
    if x.len() != sys.s.nrows() {
        return Err(Error::Shape(format!("X has length {}, S is {}x{}", x.len(), sys.s.nrows(), sys.s.ncols())));
    }
    let matrix_side = (x.dotc(x) - x.dotc(&(&sys.s * x))).re;

    let part = params.partition();
    let h = params.h;
    let spread = miss.indices.iter().max().copied().unwrap_or(0) - miss.indices.iter().min().copied().unwrap_or(0);
    let oscillation = 2.0 * spread as f64 * params.t0;
    let mut reduced: Vec<f64> = correlation_breaks(duals, gens).iter().map(|b| b.rem_euclid(h)).collect();
    reduced.extend([0.0, part.a, part.b, h]);
    sort_dedup(&mut reduced, 1e-12 * h);
    let opts = QuadOptions::with_abs_tol(1e-12 * x.norm_squared().max(1e-300));
    let mut integral = 0.0;
    for (_, iv) in part.deficient_zones() {
        let mut cuts: Vec<f64> = reduced.iter().copied().filter(|&b| iv.contains(b)).collect();
        cuts.insert(0, iv.lo);
        cuts.push(iv.hi);
        let r = quad::integrate_pieces(
            |t| {
                let xhat = DVector::from_fn(l, |k, _| {
                    miss.indices
                        .iter()
                        .enumerate()
                        .map(|(m, &lm)| x[miss.position(k, m)] * Complex64::new(0.0, -(lm as f64) * params.t0 * t).exp())
                        .sum::<Complex64>()
                });
                match mixed_gramian_at(gens, duals, params, t) {
                    Ok(g) => {
                        let y = &xhat - &g * &xhat;
                        Complex64::new(y.norm_squared(), 0.0)
                    }
                    Err(_) => Complex64::new(f64::NAN, 0.0),
                }
            },
            &cuts,
            oscillation,
            &opts,
        )?;
        integral += r.value.re;
    }
    let integral_side = integral / h;
    Ok((matrix_side - integral_side).abs())
}

/// Columns `channel, index, true_value, recovered, abs_err, rel_err`.
/// `truth` may be empty when the true values are unknown.
pub fn write_report_csv<W: Write>(outcome: &RecoveryOutcome, truth: &BTreeMap<(usize, i64), f64>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["channel", "index", "true_value", "recovered", "abs_err", "rel_err"])
        .map_err(csv_err)?;
    for &((j, n), v) in &outcome.values {
        let (t, ae, re) = match truth.get(&(j, n)) {
            Some(&t) => {
                let ae = (v.re - t).abs();
                (format!("{t:.16e}"), format!("{ae:.16e}"), format!("{:.16e}", ae / t.abs()))
            }
            None => (String::new(), String::new(), String::new()),
        };
        w.write_record([(j + 1).to_string(), n.to_string(), t, format!("{:.16e}", v.re), ae, re])
            .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Consistency(format!("writing csv: {e}")))
}
