//! Pre-Gramian fibers, cross vectors, frame verification and the mixed
//! Gramian of a generator set against its duals.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::duals::DualSet;
use crate::error::{Error, Result};
use crate::generators::{sort_dedup, GeneratorSet};
use crate::linalg::{self, CMatrix, ZERO};
use crate::params::{FrameParams, FrequencyPartition, Interval, Zone};
use crate::poly::{self, Poly};

/// Relative threshold below which a grid value counts as zero.
pub const POSITIVITY_RTOL: f64 = 1e-10;

/// Row shifts of the pre-Gramian on one zone and the row, if any, that
/// vanishes identically there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZoneLayout {
    pub shifts: Vec<i64>,
    pub zero_row: Option<usize>,
}

pub fn zone_layout(params: &FrameParams, zone: Zone) -> ZoneLayout {
    let l = params.ell as i64;
    if params.regime.is_even() {
        let shifts: Vec<i64> = (-l..l).collect();
        let zero_row = match zone {
            Zone::Left => Some(0),
            Zone::Middle => None,
            Zone::Right => Some(shifts.len() - 1),
        };
        ZoneLayout { shifts, zero_row }
    } else {
        match zone {
            Zone::Left => ZoneLayout { shifts: (-(l - 1)..l).collect(), zero_row: None },
            Zone::Middle => {
                let shifts: Vec<i64> = (-(l - 1)..l).collect();
                let last = shifts.len() - 1;
                ZoneLayout { shifts, zero_row: Some(last) }
            }
            Zone::Right => ZoneLayout { shifts: (-l..l - 1).collect(), zero_row: None },
        }
    }
}

/// The pre-Gramian at one frequency `x` in `[0, h)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PreGramianSlice {
    pub x: f64,
    pub zone: Zone,
    pub shifts: Vec<i64>,
    /// `L x L`, entry `(r, i) = sqrt(h) phi_i^(x + shifts[r] h)`.
    pub full: CMatrix,
    pub zero_row: Option<usize>,
}

impl PreGramianSlice {
    pub fn is_deficient(&self) -> bool {
        self.zero_row.is_some()
    }

    /// The full matrix with the vanishing row removed.
    pub fn reduced(&self) -> CMatrix {
        match self.zero_row {
            Some(r) => self.full.clone().remove_row(r),
            None => self.full.clone(),
        }
    }

    /// Row index of shift `j`, if it belongs to this slice.
    pub fn row_of(&self, j: i64) -> Option<usize> {
        self.shifts.iter().position(|&s| s == j)
    }
}

pub fn pre_gramian_at(gens: &GeneratorSet, params: &FrameParams, x: f64) -> Result<PreGramianSlice> {
    if gens.len() != params.length {
        return Err(Error::Shape(format!(
            "{} generators but the space has length {}",
            gens.len(),
            params.length
        )));
    }
    let part = params.partition();
    let zone = part.zone_of(x)?;
    Ok(slice_in_zone(gens, params, x, zone))
}

pub(crate) fn slice_in_zone(gens: &GeneratorSet, params: &FrameParams, x: f64, zone: Zone) -> PreGramianSlice {
    let ZoneLayout { shifts, zero_row } = zone_layout(params, zone);
    let sh = params.h.sqrt();
    let full = CMatrix::from_fn(shifts.len(), gens.len(), |r, i| {
        if Some(r) == zero_row {
            ZERO
        } else {
            gens.eval(i, x + shifts[r] as f64 * params.h) * sh
        }
    });
    PreGramianSlice { x, zone, shifts, full, zero_row }
}

/// Cross vector of the rows of `h^{-1/2} jred` for an `(L-1) x L` reduced
/// pre-Gramian.
pub fn cross_vector(jred: &CMatrix, h: f64) -> Result<Vec<Complex64>> {
    let scaled = jred / Complex64::new(h.sqrt(), 0.0);
    linalg::cross_product(&scaled)
}

/// Dual pre-Gramian in the row layout of `slice`: `(J*)^{-1}` on invertible
/// zones, the pseudoinverse of `J~*` (with a zero row re-inserted) on
/// rank-deficient zones.
pub fn dual_matrix(slice: &PreGramianSlice, cond_threshold: f64) -> Result<CMatrix> {
    let jr = slice.reduced();
    let cond = linalg::condition_number(&jr);
    if !(cond <= cond_threshold) {
        return Err(Error::IllConditioned { frequency: slice.x, cond, threshold: cond_threshold });
    }
    match slice.zero_row {
        None => {
            let adj = jr.adjoint();
            adj.try_inverse().ok_or(Error::IllConditioned {
                frequency: slice.x,
                cond: f64::INFINITY,
                threshold: cond_threshold,
            })
        }
        Some(r) => {
            let p = linalg::pinv(&jr.adjoint());
            Ok(p.insert_row(r, ZERO))
        }
    }
}

/// Bracket-product matrix `G(x)_{jl} = [phi*_l^, phi_j^](x)` from generator
/// and dual values at every shift that meets `[-omega, omega]`.
pub fn mixed_gramian_at(gens: &GeneratorSet, duals: &DualSet, params: &FrameParams, x: f64) -> Result<CMatrix> {
    let n = gens.len();
    if duals.len() != n {
        return Err(Error::Consistency(format!("{} duals for {} generators", duals.len(), n)));
    }
    let mut g = CMatrix::zeros(n, n);
    for k in params.support_shifts(x) {
        let xi = x + k as f64 * params.h;
        let phi: Vec<Complex64> = (0..n).map(|i| gens.eval(i, xi)).collect();
        let dual = duals.fourier_all(xi);
        for j in 0..n {
            for l in 0..n {
                g[(j, l)] += dual[l] * phi[j].conj() * params.h;
            }
        }
    }
    Ok(g)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub x: f64,
    pub condition: &'static str,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrameReport {
    pub is_frame: bool,
    pub is_riesz: bool,
    /// Infimum of `Σ |phi_i^|^2` on the band grid.
    pub delta: f64,
    /// Supremum of the same sum.
    pub gamma: f64,
    /// Infimum of the `(L-1)`-minor energy on rank-deficient zones (`NaN` if
    /// there are none).
    pub sigma: f64,
    /// Infimum of `|det J|` on invertible zones (`NaN` if there are none).
    pub eta: f64,
    pub grid_density: f64,
    pub violations: Vec<Violation>,
}

const MAX_VIOLATIONS: usize = 64;

impl fmt::Display for FrameReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "is_frame = {}", self.is_frame)?;
        writeln!(f, "is_riesz = {}", self.is_riesz)?;
        writeln!(f, "delta = {:.16e}", self.delta)?;
        writeln!(f, "gamma = {:.16e}", self.gamma)?;
        writeln!(f, "sigma = {:.16e}", self.sigma)?;
        writeln!(f, "eta = {:.16e}", self.eta)?;
        writeln!(f, "grid_density = {:.16e}", self.grid_density)?;
        writeln!(f, "violations = {}", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  {} at x = {:.16e}", v.condition, v.x)?;
        }
        Ok(())
    }
}

/// Cell midpoints of `n = max(ceil(width * density), 8)` equal cells.
pub fn grid(iv: Interval, density: f64) -> Vec<f64> {
    if iv.is_empty() {
        return Vec::new();
    }
    let n = ((iv.width() * density).ceil() as usize).max(8);
    let step = iv.width() / n as f64;
    (0..n).map(|k| iv.lo + (k as f64 + 0.5) * step).collect()
}

/// Grid check of the frame characterisation: a two-sided bound on
/// `Σ |phi_i^|^2`, positive `(L-1)`-minor energy where one row vanishes and
/// a non-vanishing determinant elsewhere.
pub fn verify_frame(gens: &GeneratorSet, params: &FrameParams, grid_density: f64) -> Result<FrameReport> {
    if !(grid_density.is_finite() && grid_density > 0.0) {
        return Err(Error::Domain(format!("grid density must be positive, got {grid_density}")));
    }
    let mut violations = Vec::new();
    let push = |v: &mut Vec<Violation>, x: f64, condition: &'static str| {
        if v.len() < MAX_VIOLATIONS {
            v.push(Violation { x, condition });
        }
    };

    let band = Interval { lo: -params.omega, hi: params.omega };
    let sums: Vec<(f64, f64)> = grid(band, grid_density)
        .into_par_iter()
        .map(|x| (x, (0..gens.len()).map(|i| gens.eval(i, x).norm_sqr()).sum()))
        .collect();
    let gamma = sums.iter().map(|s| s.1).fold(0.0, f64::max);
    let delta = sums.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    for &(x, s) in &sums {
        if !(s > POSITIVITY_RTOL * gamma.max(f64::MIN_POSITIVE)) {
            push(&mut violations, x, "lower-bound");
        }
    }

    if gens.len() != params.length {
        push(&mut violations, f64::NAN, "generator-count");
        return Ok(FrameReport {
            is_frame: false,
            is_riesz: false,
            delta,
            gamma,
            sigma: f64::NAN,
            eta: f64::NAN,
            grid_density,
            violations,
        });
    }

    let part = params.partition();
    let mut sigma = f64::NAN;
    let mut eta = f64::NAN;
    for (zone, iv) in part.zones() {
        let deficient = part.is_rank_deficient(zone);
        let values: Vec<(f64, f64, f64)> = grid(iv, grid_density)
            .into_par_iter()
            .map(|x| {
                let s = slice_in_zone(gens, params, x, zone);
                let jr = s.reduced();
                if deficient {
                    let e = linalg::minor_energy(&jr, jr.nrows()).unwrap_or(0.0);
                    let scale: f64 = jr.row_iter().map(|r| r.norm_squared()).product();
                    (x, e, scale)
                } else {
                    let d = linalg::det(&jr).norm();
                    let scale: f64 = jr.column_iter().map(|c| c.norm()).product();
                    (x, d, scale)
                }
            })
            .collect();
        for &(x, v, scale) in &values {
            if !(v > POSITIVITY_RTOL * scale) {
                push(&mut violations, x, if deficient { "minor-energy" } else { "determinant" });
            }
        }
        let m = values.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
        if deficient {
            sigma = if sigma.is_nan() { m } else { sigma.min(m) };
        } else {
            eta = if eta.is_nan() { m } else { eta.min(m) };
        }
    }

    let is_frame = violations.is_empty();
    Ok(FrameReport {
        is_frame,
        is_riesz: is_frame && params.regime.is_endpoint(),
        delta,
        gamma,
        sigma,
        eta,
        grid_density,
        violations,
    })
}

/// Reduced-frequency breakpoints in `[0, h]`: the zone boundaries and every
/// generator breakpoint taken modulo `h`.
pub fn reduced_breakpoints(gens: &GeneratorSet, part: &FrequencyPartition) -> Vec<f64> {
    let h = part.h;
    let mut b = vec![0.0, part.a, part.b, h];
    for beta in gens.breakpoints() {
        let r = beta.rem_euclid(h);
        b.push(r);
    }
    sort_dedup(&mut b, 1e-13 * h);
    b.retain(|&v| (0.0..=h).contains(&v));
    b
}

/// Cross vector with polynomial components on one smooth sub-interval of a
/// rank-deficient zone.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolicCrossPiece {
    pub zone: Zone,
    pub interval: Interval,
    pub components: Vec<Poly>,
}

/// Degree tolerance for symbolic cross-vector components.
pub const DEGREE_RTOL: f64 = 1e-9;

impl SymbolicCrossPiece {
    pub fn degrees(&self) -> Vec<Option<usize>> {
        self.components.iter().map(|p| p.degree(DEGREE_RTOL)).collect()
    }
}

/// Symbolic cross vector on every rank-deficient zone, split where a
/// generator changes polynomial piece.
pub fn symbolic_cross_vector(gens: &GeneratorSet, params: &FrameParams) -> Result<Vec<SymbolicCrossPiece>> {
    if gens.len() != params.length {
        return Err(Error::Shape(format!(
            "{} generators but the space has length {}",
            gens.len(),
            params.length
        )));
    }
    let part = params.partition();
    let breaks = reduced_breakpoints(gens, &part);
    let mut out = Vec::new();
    for (zone, iv) in part.deficient_zones() {
        let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&b| iv.contains(b)).collect();
        cuts.insert(0, iv.lo);
        cuts.push(iv.hi);
        let layout = zone_layout(params, zone);
        for w in cuts.windows(2) {
            let sub = Interval { lo: w[0], hi: w[1] };
            if sub.is_empty() {
                continue;
            }
            let mid = sub.midpoint();
            let rows: Vec<Vec<Poly>> = layout
                .shifts
                .iter()
                .enumerate()
                .filter(|(r, _)| Some(*r) != layout.zero_row)
                .map(|(_, &j)| {
                    let shift = j as f64 * params.h;
                    gens.gens
                        .iter()
                        .map(|g| match g.piece_at(mid + shift) {
                            Some(p) => p.poly.shifted(shift),
                            None => Poly::zero(),
                        })
                        .collect()
                })
                .collect();
            let m = gens.len();
            let components = (0..m)
                .map(|k| {
                    let minor: Vec<Vec<Poly>> = rows
                        .iter()
                        .map(|row| row.iter().enumerate().filter(|(c, _)| *c != k).map(|(_, p)| p.clone()).collect())
                        .collect();
                    let d = poly::det(&minor);
                    if k % 2 == 0 {
                        d
                    } else {
                        -&d
                    }
                })
                .collect();
            out.push(SymbolicCrossPiece { zone, interval: sub, components });
        }
    }
    Ok(out)
}
