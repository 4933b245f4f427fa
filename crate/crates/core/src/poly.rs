//! Dense polynomials with complex coefficients, used to carry pre-Gramian
//! entries and their minors symbolically.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

/// `Σ c_k x^k`, coefficients in increasing degree.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Poly {
    pub coeffs: Vec<Complex64>,
}

impl Poly {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Poly { coeffs: vec![c] }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    /// `q(x) = p(x + c)`.
    pub fn shifted(&self, c: f64) -> Poly {
        // Horner in polynomial arithmetic: q = (...(c_n (x+c) + c_{n-1})(x+c) ...)
        let lin = Poly::new(vec![Complex64::new(c, 0.0), Complex64::new(1.0, 0.0)]);
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, &k| &(&acc * &lin) + &Poly::constant(k))
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Degree after discarding leading coefficients with modulus at most
    /// `rtol * max_abs`; `None` for the zero polynomial.
    pub fn degree(&self, rtol: f64) -> Option<usize> {
        let scale = self.max_abs();
        if scale == 0.0 {
            return None;
        }
        self.coeffs.iter().rposition(|c| c.norm() > rtol * scale)
    }

    pub fn is_zero(&self, rtol: f64) -> bool {
        self.degree(rtol).is_none()
    }

    pub fn scale(&self, s: Complex64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let z = Complex64::new(0.0, 0.0);
        Poly::new(
            (0..n)
                .map(|i| *self.coeffs.get(i).unwrap_or(&z) + *rhs.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Poly::zero();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

/// Determinant of a square matrix of polynomials by cofactor expansion along
/// the first row. Sizes here are at most a handful.
pub fn det(m: &[Vec<Poly>]) -> Poly {
    let n = m.len();
    match n {
        0 => Poly::constant(Complex64::new(1.0, 0.0)),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = Poly::zero();
            for col in 0..n {
                if m[0][col].coeffs.is_empty() {
                    continue;
                }
                let minor: Vec<Vec<Poly>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != col)
                            .map(|(_, p)| p.clone())
                            .collect()
                    })
                    .collect();
                let term = &m[0][col] * &det(&minor);
                acc = if col % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
    }
}
