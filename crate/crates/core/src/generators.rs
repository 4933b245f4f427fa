//! Fourier-domain generators given as piecewise polynomials on `[-omega, omega]`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::Poly;

/// A polynomial on the closed interval `[lo, hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub poly: Poly,
}

/// Piecewise polynomial, zero outside its pieces. Pieces are sorted and do
/// not overlap; at a shared endpoint the left piece wins.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PiecewisePoly {
    pub pieces: Vec<Piece>,
}

impl PiecewisePoly {
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        for p in &pieces {
            if !(p.lo.is_finite() && p.hi.is_finite() && p.lo < p.hi) {
                return Err(Error::Domain(format!("invalid piece [{}, {}]", p.lo, p.hi)));
            }
        }
        for w in pieces.windows(2) {
            if w[1].lo < w[0].hi {
                return Err(Error::Domain(format!(
                    "pieces [{}, {}] and [{}, {}] overlap or are unsorted",
                    w[0].lo, w[0].hi, w[1].lo, w[1].hi
                )));
            }
        }
        Ok(PiecewisePoly { pieces })
    }

    /// Single polynomial on `[lo, hi]`.
    pub fn single(lo: f64, hi: f64, poly: Poly) -> Result<Self> {
        Self::new(vec![Piece { lo, hi, poly }])
    }

    pub fn piece_at(&self, x: f64) -> Option<&Piece> {
        self.pieces.iter().find(|p| x >= p.lo && x <= p.hi)
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.piece_at(x).map_or(Complex64::new(0.0, 0.0), |p| p.poly.eval(x))
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        self.pieces.iter().flat_map(|p| [p.lo, p.hi]).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorSet {
    pub omega: f64,
    pub gens: Vec<PiecewisePoly>,
}

impl GeneratorSet {
    /// Checks that every piece lies inside `[-omega, omega]`.
    pub fn new(omega: f64, gens: Vec<PiecewisePoly>) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::Domain(format!("omega must be positive, got {omega}")));
        }
        if gens.is_empty() {
            return Err(Error::Domain("generator set is empty".into()));
        }
        let slack = 1e-12 * omega;
        for (i, g) in gens.iter().enumerate() {
            for p in &g.pieces {
                if p.lo < -omega - slack || p.hi > omega + slack {
                    return Err(Error::Domain(format!(
                        "generator {} has a piece [{}, {}] outside [-{omega}, {omega}]",
                        i + 1,
                        p.lo,
                        p.hi
                    )));
                }
            }
        }
        Ok(GeneratorSet { omega, gens })
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// `phi_i^(x)` for 0-based `i`.
    pub fn eval(&self, i: usize, x: f64) -> Complex64 {
        self.gens[i].eval(x)
    }

    /// Sorted, deduplicated breakpoints of all generators, including `±omega`.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.gens.iter().flat_map(|g| g.breakpoints()).collect();
        b.push(-self.omega);
        b.push(self.omega);
        sort_dedup(&mut b, 1e-13 * self.omega);
        b
    }
}

pub(crate) fn sort_dedup(v: &mut Vec<f64>, tol: f64) {
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() <= tol);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> Poly {
        Poly::constant(Complex64::new(1.0, 0.0))
    }

    #[test]
    fn rejects_overlapping_pieces() {
        let r = PiecewisePoly::new(vec![
            Piece { lo: -1.0, hi: 0.5, poly: one() },
            Piece { lo: 0.0, hi: 1.0, poly: one() },
        ]);
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_support_outside_band() {
        let g = PiecewisePoly::single(-2.0, 1.0, one()).unwrap();
        assert!(GeneratorSet::new(1.0, vec![g]).is_err());
    }

    #[test]
    fn evaluates_zero_outside_support() {
        let g = PiecewisePoly::single(-1.0, 1.0, one()).unwrap();
        assert_eq!(g.eval(1.5), Complex64::new(0.0, 0.0));
        assert_eq!(g.eval(-1.0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn breakpoints_include_band_edges() {
        let g = PiecewisePoly::single(-0.5, 0.25, one()).unwrap();
        let set = GeneratorSet::new(1.0, vec![g]).unwrap();
        assert_eq!(set.breakpoints(), vec![-1.0, -0.5, 0.25, 1.0]);
    }
}
