//! Canonical dual generators.
//!
//! For `L = 2` the explicit piecewise rational transforms are used. For any
//! other length the dual pre-Gramian is computed pointwise (inverse adjoint
//! on invertible zones, pseudoinverse of the adjoint reduced matrix where a
//! row vanishes) and represented by Chebyshev interpolants on every interval
//! where it is smooth.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::derivative::{dual2_fourier_unchecked, dual2_time_unchecked};
use crate::error::{Error, Result};
use crate::generators::{sort_dedup, GeneratorSet};
use crate::gramian::{self, dual_matrix, reduced_breakpoints, slice_in_zone};
use crate::linalg::ZERO;
use crate::params::{FrameParams, Zone};
use crate::quad::{self, QuadOptions};

/// Default bound on the pre-Gramian condition number.
pub const DEFAULT_DUAL_COND_THRESHOLD: f64 = 1e12;

const CHEB_DEGREES: [usize; 4] = [16, 32, 64, 128];
const CHEB_TAIL_RTOL: f64 = 1e-14;
const CHEB_MAX_DEPTH: usize = 12;

/// Chebyshev expansions of all dual transforms on `[lo, hi]`.
#[derive(Clone, Debug)]
struct ChebPiece {
    lo: f64,
    hi: f64,
    /// `coeffs[l][m]`, first-kind Chebyshev coefficients of dual `l`.
    coeffs: Vec<Vec<Complex64>>,
}

impl ChebPiece {
    fn eval(&self, xi: f64) -> Vec<Complex64> {
        let t = (2.0 * xi - self.lo - self.hi) / (self.hi - self.lo);
        self.coeffs.iter().map(|c| clenshaw(c, t)).collect()
    }
}

fn clenshaw(c: &[Complex64], t: f64) -> Complex64 {
    let mut b1 = ZERO;
    let mut b2 = ZERO;
    for &ck in c.iter().skip(1).rev() {
        let b0 = ck + b1 * (2.0 * t) - b2;
        b2 = b1;
        b1 = b0;
    }
    c[0] + b1 * t - b2
}

/// Chebyshev coefficients from values at the first-kind nodes
/// `cos(π(k + 1/2)/n)`.
fn cheb_coeffs(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    (0..n)
        .map(|m| {
            let s: Complex64 = values
                .iter()
                .enumerate()
                .map(|(k, v)| v * (PI * m as f64 * (k as f64 + 0.5) / n as f64).cos())
                .sum();
            let w = if m == 0 { 1.0 } else { 2.0 };
            s * (w / n as f64)
        })
        .collect()
}

/// Gridded dual values: one row per grid frequency and non-vanishing shift.
#[derive(Clone, Debug, PartialEq)]
pub struct GridRow {
    /// Reduced frequency in `[0, h)`.
    pub x: f64,
    pub zone: Zone,
    pub shift: i64,
    /// `x + shift * h`, inside `[-omega, omega]`.
    pub xi: f64,
    pub values: Vec<Complex64>,
}

#[derive(Clone, Debug)]
pub struct NumericDuals {
    pub params: FrameParams,
    pub gens: GeneratorSet,
    pub grid_points: usize,
    pub cond_threshold: f64,
    /// Largest pre-Gramian condition number seen on the grid.
    pub max_cond: f64,
    pub table: Vec<GridRow>,
    pieces: Vec<ChebPiece>,
}

impl NumericDuals {
    /// Exact pointwise evaluation through the dual pre-Gramian.
    pub fn exact(&self, xi: f64) -> Result<Vec<Complex64>> {
        exact_duals(&self.gens, &self.params, xi, self.cond_threshold)
    }

    /// Interpolated value; zero outside the band.
    pub fn fourier_all(&self, xi: f64) -> Vec<Complex64> {
        let n = self.gens.len();
        let omega = self.params.omega;
        if !(xi >= -omega && xi <= omega) {
            return vec![ZERO; n];
        }
        let idx = self.pieces.partition_point(|p| p.hi < xi);
        match self.pieces.get(idx.min(self.pieces.len().saturating_sub(1))) {
            Some(p) => p.eval(xi),
            None => vec![ZERO; n],
        }
    }

    /// Breakpoints of the interpolant, covering `[-omega, omega]`.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.pieces.iter().map(|p| p.lo).collect();
        if let Some(p) = self.pieces.last() {
            b.push(p.hi);
        }
        b
    }
}

fn reduce(xi: f64, h: f64) -> (f64, i64) {
    let j = (xi / h).floor();
    let mut x = xi - j * h;
    let mut j = j as i64;
    if x >= h {
        x -= h;
        j += 1;
    }
    if x < 0.0 {
        x += h;
        j -= 1;
    }
    (x, j)
}

fn exact_duals(gens: &GeneratorSet, params: &FrameParams, xi: f64, threshold: f64) -> Result<Vec<Complex64>> {
    let n = gens.len();
    if !(xi >= -params.omega && xi <= params.omega) {
        return Ok(vec![ZERO; n]);
    }
    let (x, j) = reduce(xi, params.h);
    let zone = params.partition().zone_of(x)?;
    let slice = slice_in_zone(gens, params, x, zone);
    let d = dual_matrix(&slice, threshold)?;
    let sh = params.h.sqrt();
    Ok(match slice.row_of(j) {
        Some(r) if Some(r) != slice.zero_row => (0..n).map(|l| d[(r, l)] / sh).collect(),
        _ => vec![ZERO; n],
    })
}

/// Breakpoints in `[-omega, omega]` between which every dual is smooth.
pub fn dual_breakpoints(gens: &GeneratorSet, params: &FrameParams) -> Vec<f64> {
    let part = params.partition();
    let reduced = reduced_breakpoints(gens, &part);
    let (omega, h) = (params.omega, params.h);
    let jmax = (omega / h).ceil() as i64 + 1;
    let mut b = vec![-omega, omega];
    for j in -jmax..=jmax {
        for &p in &reduced {
            let v = p + j as f64 * h;
            if v > -omega && v < omega {
                b.push(v);
            }
        }
    }
    sort_dedup(&mut b, 1e-12 * omega);
    b
}

fn fit_piece(
    gens: &GeneratorSet,
    params: &FrameParams,
    lo: f64,
    hi: f64,
    threshold: f64,
    depth: usize,
    out: &mut Vec<ChebPiece>,
) -> Result<()> {
    let mut last = None;
    for &n in &CHEB_DEGREES {
        let nodes: Vec<f64> = (0..n)
            .map(|k| {
                let t = (PI * (k as f64 + 0.5) / n as f64).cos();
                0.5 * (lo + hi) + 0.5 * (hi - lo) * t
            })
            .collect();
        let vals = nodes
            .iter()
            .map(|&x| exact_duals(gens, params, x, threshold))
            .collect::<Result<Vec<_>>>()?;
        let coeffs: Vec<Vec<Complex64>> = (0..gens.len())
            .map(|l| cheb_coeffs(&vals.iter().map(|v| v[l]).collect::<Vec<_>>()))
            .collect();
        let scale = coeffs
            .iter()
            .flat_map(|c| c.iter().map(|z| z.norm()))
            .fold(0.0, f64::max);
        let tail = coeffs
            .iter()
            .flat_map(|c| c[n - 3..].iter().map(|z| z.norm()))
            .fold(0.0, f64::max);
        if tail <= CHEB_TAIL_RTOL * scale.max(f64::MIN_POSITIVE) || scale == 0.0 {
            out.push(ChebPiece { lo, hi, coeffs: trim(coeffs, scale) });
            return Ok(());
        }
        last = Some(coeffs);
    }
    if depth >= CHEB_MAX_DEPTH {
        let coeffs = last.expect("at least one degree tried");
        out.push(ChebPiece { lo, hi, coeffs });
        return Ok(());
    }
    let mid = 0.5 * (lo + hi);
    fit_piece(gens, params, lo, mid, threshold, depth + 1, out)?;
    fit_piece(gens, params, mid, hi, threshold, depth + 1, out)
}

fn trim(coeffs: Vec<Vec<Complex64>>, scale: f64) -> Vec<Vec<Complex64>> {
    let cut = 1e-17 * scale;
    coeffs
        .into_iter()
        .map(|mut c| {
            while c.len() > 1 && c.last().map_or(false, |z| z.norm() <= cut) {
                c.pop();
            }
            c
        })
        .collect()
}

/// Builds the numeric duals, checking conditioning on a grid of
/// `grid_points` cell midpoints per zone.
pub fn numeric_duals(gens: &GeneratorSet, params: &FrameParams, grid_points: usize) -> Result<NumericDuals> {
    numeric_duals_with_threshold(gens, params, grid_points, DEFAULT_DUAL_COND_THRESHOLD)
}

pub fn numeric_duals_with_threshold(
    gens: &GeneratorSet,
    params: &FrameParams,
    grid_points: usize,
    cond_threshold: f64,
) -> Result<NumericDuals> {
    if gens.len() != params.length {
        return Err(Error::Shape(format!(
            "{} generators but the space has length {}",
            gens.len(),
            params.length
        )));
    }
    if grid_points == 0 {
        return Err(Error::Domain("grid_points must be positive".into()));
    }
    let part = params.partition();
    let sh = params.h.sqrt();
    let mut points = Vec::new();
    for (zone, iv) in part.zones() {
        let step = iv.width() / grid_points as f64;
        points.extend((0..grid_points).map(|k| (zone, iv.lo + (k as f64 + 0.5) * step)));
    }
    let rows: Vec<(f64, Vec<GridRow>)> = points
        .into_par_iter()
        .map(|(zone, x)| {
            let slice = slice_in_zone(gens, params, x, zone);
            let cond = crate::linalg::condition_number(&slice.reduced());
            let d = dual_matrix(&slice, cond_threshold)?;
            let rows = slice
                .shifts
                .iter()
                .enumerate()
                .filter(|(r, _)| Some(*r) != slice.zero_row)
                .map(|(r, &j)| GridRow {
                    x,
                    zone,
                    shift: j,
                    xi: x + j as f64 * params.h,
                    values: (0..gens.len()).map(|l| d[(r, l)] / sh).collect(),
                })
                .collect();
            Ok((cond, rows))
        })
        .collect::<Result<Vec<_>>>()?;
    let max_cond = rows.iter().map(|r| r.0).fold(1.0, f64::max);
    let table: Vec<GridRow> = rows.into_iter().flat_map(|r| r.1).collect();

    let breaks = dual_breakpoints(gens, params);
    let pieces: Vec<Vec<ChebPiece>> = breaks
        .par_windows(2)
        .map(|w| {
            let mut out = Vec::new();
            fit_piece(gens, params, w[0], w[1], cond_threshold, 0, &mut out)?;
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(NumericDuals {
        params: *params,
        gens: gens.clone(),
        grid_points,
        cond_threshold,
        max_cond,
        table,
        pieces: pieces.into_iter().flatten().collect(),
    })
}

#[derive(Clone, Debug)]
pub enum DualSet {
    ClosedFormL2 { params: FrameParams },
    Numeric(NumericDuals),
}

impl DualSet {
    pub fn closed_form_l2(params: &FrameParams) -> Result<Self> {
        if params.length != 2 {
            return Err(Error::Unsupported(format!(
                "explicit duals exist only for length 2, got length {}",
                params.length
            )));
        }
        Ok(DualSet::ClosedFormL2 { params: *params })
    }

    /// Explicit duals for the first-derivative frame, numeric ones otherwise.
    pub fn for_derivative_frame(gens: &GeneratorSet, params: &FrameParams, grid_points: usize) -> Result<Self> {
        if params.length == 2 && gens.len() == 2 {
            DualSet::closed_form_l2(params)
        } else {
            Ok(DualSet::Numeric(numeric_duals(gens, params, grid_points)?))
        }
    }

    pub fn params(&self) -> &FrameParams {
        match self {
            DualSet::ClosedFormL2 { params } => params,
            DualSet::Numeric(n) => &n.params,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            DualSet::ClosedFormL2 { .. } => 2,
            DualSet::Numeric(n) => n.gens.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `"closed-form"` or `"numeric"`.
    pub fn path(&self) -> &'static str {
        match self {
            DualSet::ClosedFormL2 { .. } => "closed-form",
            DualSet::Numeric(_) => "numeric",
        }
    }

    pub fn fourier_all(&self, xi: f64) -> Vec<Complex64> {
        match self {
            DualSet::ClosedFormL2 { params } => {
                let (a, b) = dual2_fourier_unchecked(xi, params.omega, params.h);
                vec![a, b]
            }
            DualSet::Numeric(n) => n.fourier_all(xi),
        }
    }

    pub fn fourier(&self, l: usize, xi: f64) -> Complex64 {
        self.fourier_all(xi)[l]
    }

    /// Points in `[-omega, omega]` between which every dual transform is
    /// smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            DualSet::ClosedFormL2 { params } => {
                let big_h = params.h - params.omega;
                let mut b = vec![-params.omega, -big_h, 0.0, big_h, params.omega];
                sort_dedup(&mut b, 1e-12 * params.omega);
                b
            }
            DualSet::Numeric(n) => n.breakpoints(),
        }
    }

    /// Real parts of the time-domain duals `phi*_l(t)`.
    pub fn time_all(&self, t: f64, opts: &QuadOptions) -> Result<Vec<f64>> {
        match self {
            DualSet::ClosedFormL2 { params } => {
                let (a, b) = dual2_time_unchecked(t, params.omega, params.h, opts)?;
                Ok(vec![a, b])
            }
            DualSet::Numeric(n) => {
                let breaks = n.breakpoints();
                let c = 1.0 / (2.0 * PI).sqrt();
                (0..n.gens.len())
                    .map(|l| {
                        let r = quad::integrate_pieces(
                            |xi| n.fourier_all(xi)[l] * Complex64::new(0.0, t * xi).exp(),
                            &breaks,
                            t,
                            opts,
                        )?;
                        Ok(c * r.value.re)
                    })
                    .collect()
            }
        }
    }
}

/// Largest `|G^2 - G|` and `|G - G*|` (Frobenius) of the mixed Gramian over
/// `points` midpoints of every zone.
pub fn projection_defect(gens: &GeneratorSet, duals: &DualSet, params: &FrameParams, points: usize) -> Result<(f64, f64)> {
    let part = params.partition();
    let mut idem: f64 = 0.0;
    let mut herm: f64 = 0.0;
    for (_, iv) in part.zones() {
        let step = iv.width() / points as f64;
        for k in 0..points {
            let x = iv.lo + (k as f64 + 0.5) * step;
            let g = gramian::mixed_gramian_at(gens, duals, params, x)?;
            idem = idem.max((&g * &g - &g).norm());
            herm = herm.max(crate::linalg::hermitian_defect(&g));
        }
    }
    Ok((idem, herm))
}

/// Writes `xi, re_1, im_1, ...` on `points` uniform cell midpoints of the band.
pub fn write_fourier_csv<W: Write>(duals: &DualSet, points: usize, out: W) -> Result<()> {
    let omega = duals.params().omega;
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["xi".to_string()];
    for l in 1..=duals.len() {
        header.push(format!("re_{l}"));
        header.push(format!("im_{l}"));
    }
    w.write_record(&header).map_err(csv_err)?;
    let step = 2.0 * omega / points as f64;
    for k in 0..points {
        let xi = -omega + (k as f64 + 0.5) * step;
        let mut rec = vec![format!("{xi:.16e}")];
        for v in duals.fourier_all(xi) {
            rec.push(format!("{:.16e}", v.re));
            rec.push(format!("{:.16e}", v.im));
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Consistency(format!("writing csv: {e}")))?;
    Ok(())
}

/// Writes `t, phi_1, ...` for `points` uniform samples of `[from, to]`.
pub fn write_time_csv<W: Write>(duals: &DualSet, from: f64, to: f64, points: usize, out: W) -> Result<()> {
    let opts = QuadOptions::with_abs_tol(1e-12);
    let ts: Vec<f64> = (0..points)
        .map(|k| if points == 1 { from } else { from + (to - from) * k as f64 / (points - 1) as f64 })
        .collect();
    let vals = ts
        .par_iter()
        .map(|&t| duals.time_all(t, &opts))
        .collect::<Result<Vec<_>>>()?;
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    header.extend((1..=duals.len()).map(|l| format!("phi_{l}")));
    w.write_record(&header).map_err(csv_err)?;
    for (t, v) in ts.iter().zip(vals) {
        let mut rec = vec![format!("{t:.16e}")];
        rec.extend(v.iter().map(|x| format!("{x:.16e}")));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Consistency(format!("writing csv: {e}")))?;
    Ok(())
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Consistency(format!("writing csv: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivative::{derivative_generators, dual2_fourier};
    use crate::linalg::{self, identity, CMatrix};
    use crate::params::compute_params;

    #[test]
    fn chebyshev_reproduces_polynomial() {
        let n = 16;
        let vals: Vec<Complex64> = (0..n)
            .map(|k| {
                let t = (PI * (k as f64 + 0.5) / n as f64).cos();
                Complex64::new(3.0 * t * t * t - t + 0.5, t)
            })
            .collect();
        let c = cheb_coeffs(&vals);
        for &t in &[-1.0, -0.3, 0.0, 0.77, 1.0] {
            let expect = Complex64::new(3.0 * t * t * t - t + 0.5, t);
            assert!((clenshaw(&c, t) - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn reduction_is_half_open() {
        assert_eq!(reduce(0.0, 2.0), (0.0, 0));
        assert_eq!(reduce(-2.0, 2.0), (0.0, -1));
        let (x, j) = reduce(-0.5, 2.0);
        assert!((x - 1.5).abs() < 1e-15 && j == -1);
    }

    #[test]
    fn numeric_matches_explicit_l2() {
        let g = derivative_generators(2, PI).unwrap();
        let p = compute_params(PI, 1.25).unwrap();
        let d = numeric_duals(&g, &p, 128).unwrap();
        for row in &d.table {
            let (a, b) = dual2_fourier(row.xi, &p).unwrap();
            assert!((row.values[0] - a).norm() < 1e-12);
            assert!((row.values[1] - b).norm() < 1e-12);
        }
        for k in 0..997 {
            let xi = -PI + 2.0 * PI * (k as f64 + 0.31) / 997.0;
            let (a, b) = dual2_fourier(xi, &p).unwrap();
            let v = d.fourier_all(xi);
            assert!((v[0] - a).norm() < 1e-12 && (v[1] - b).norm() < 1e-12, "xi={xi}");
        }
    }

    #[test]
    fn pseudoinverse_identity_on_deficient_zone() {
        let g = derivative_generators(3, PI).unwrap();
        let p = compute_params(PI, 2.5).unwrap();
        let x = 0.4 * PI;
        let s = crate::gramian::pre_gramian_at(&g, &p, x).unwrap();
        assert!(s.is_deficient());
        let jt = s.reduced().adjoint();
        let r = linalg::pinv(&jt);
        assert!((&jt * &r * &jt - &jt).norm() < 1e-12 * jt.norm());
    }

    #[test]
    fn mixed_gramian_identity_on_invertible_zones() {
        let g = derivative_generators(3, PI).unwrap();
        let p = compute_params(PI, 2.5).unwrap();
        let d = DualSet::Numeric(numeric_duals(&g, &p, 64).unwrap());
        let part = p.partition();
        for (zone, iv) in part.zones() {
            for k in 0..20 {
                let x = iv.lo + iv.width() * (k as f64 + 0.5) / 20.0;
                let gm = crate::gramian::mixed_gramian_at(&g, &d, &p, x).unwrap();
                let target: CMatrix = if part.is_rank_deficient(zone) {
                    let s = crate::gramian::pre_gramian_at(&g, &p, x).unwrap();
                    let w = crate::gramian::cross_vector(&s.reduced(), p.h).unwrap();
                    linalg::complement_projection(&w)
                } else {
                    identity(3)
                };
                assert!((&gm - &target).norm() < 1e-8, "zone {zone:?} x={x}");
            }
        }
    }

    #[test]
    fn ill_conditioning_names_frequency() {
        let g = derivative_generators(2, PI).unwrap();
        let p = compute_params(PI, 1.25).unwrap();
        match numeric_duals_with_threshold(&g, &p, 64, 1.0) {
            Err(Error::IllConditioned { frequency, .. }) => assert!((0.0..p.h).contains(&frequency)),
            other => panic!("expected ill-conditioned error, got {other:?}"),
        }
    }

    #[test]
    fn csv_is_deterministic() {
        let p = compute_params(PI, 1.25).unwrap();
        let d = DualSet::closed_form_l2(&p).unwrap();
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_fourier_csv(&d, 50, &mut a).unwrap();
        write_fourier_csv(&d, 50, &mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("xi,re_1,im_1,re_2,im_2"));
    }
}
