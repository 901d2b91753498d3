use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Real polynomial in `y`, coefficients in ascending powers.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly(Vec<f64>);

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: f64) -> Self {
        Poly::new(vec![c])
    }

    /// `(y^2 - 1)^power`
    pub fn wall_factor(power: u32) -> Self {
        let base = Poly::new(vec![-1.0, 0.0, 1.0]);
        (0..power).fold(Poly::constant(1.0), |acc, _| &acc * &base)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }

    /// Degree of the polynomial; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.iter().rposition(|&c| c != 0.0)
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * y + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(m, &c)| m as f64 * c)
                .collect(),
        )
    }

    pub fn nth_derivative(&self, order: usize) -> Poly {
        (0..order).fold(self.clone(), |p, _| p.derivative())
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly::new(self.0.iter().map(|&c| c * s).collect())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.0.len().max(rhs.0.len());
        Poly::new(
            (0..n)
                .map(|i| self.0.get(i).copied().unwrap_or(0.0) + rhs.0.get(i).copied().unwrap_or(0.0))
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
        self.scale(-1.0)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.0.is_empty() || rhs.0.is_empty() {
            return Poly::zero();
        }
        let mut out = vec![0.0; self.0.len() + rhs.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            for (j, &b) in rhs.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wall_factor_squared_expands() {
        // (y^2-1)^2 = y^4 - 2y^2 + 1
        assert_eq!(Poly::wall_factor(2).coeffs(), &[1.0, 0.0, -2.0, 0.0, 1.0]);
        assert_eq!(Poly::wall_factor(0).coeffs(), &[1.0]);
    }

    #[test]
    fn derivative_and_eval() {
        let p = Poly::new(vec![1.0, 2.0, 3.0]); // 1 + 2y + 3y^2
        assert_eq!(p.eval(2.0), 17.0);
        assert_eq!(p.derivative().coeffs(), &[2.0, 6.0]);
        assert!(p.nth_derivative(3).is_zero());
        assert_eq!(Poly::zero().degree(), None);
        assert_eq!(p.degree(), Some(2));
    }

    #[test]
    fn arithmetic_trims() {
        let p = Poly::new(vec![1.0, 1.0]);
        let q = Poly::new(vec![0.0, -1.0]);
        assert_eq!((&p + &q).coeffs(), &[1.0]);
        assert_eq!((&p * &p).coeffs(), &[1.0, 2.0, 1.0]);
        assert!((&p - &p).is_zero());
    }
}
