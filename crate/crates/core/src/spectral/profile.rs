use super::grid::ChebGrid;
use super::poly::Poly;

/// A function of the wall-normal coordinate, sampled at the collocation
/// points of a [`ChebGrid`], optionally carrying its exact polynomial form.
///
/// When `poly` is present the samples are its values at the grid points and
/// all derivatives and products are taken on the polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct YProfile {
    values: Vec<f64>,
    poly: Option<Poly>,
}

impl YProfile {
    pub fn zeros(n: usize) -> Self {
        YProfile {
            values: vec![0.0; n],
            poly: Some(Poly::zero()),
        }
    }

    pub fn from_values(values: Vec<f64>) -> Self {
        YProfile { values, poly: None }
    }

    pub fn from_poly(grid: &ChebGrid, poly: Poly) -> Self {
        let values = grid.points().iter().map(|&y| poly.eval(y)).collect();
        YProfile {
            values,
            poly: Some(poly),
        }
    }

    pub fn from_fn(grid: &ChebGrid, f: impl Fn(f64) -> f64) -> Self {
        YProfile::from_values(grid.points().iter().map(|&y| f(y)).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn poly(&self) -> Option<&Poly> {
        self.poly.as_ref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        match &self.poly {
            Some(p) => p.is_zero(),
            None => self.values.iter().all(|&v| v == 0.0),
        }
    }

    /// Value at an arbitrary `y` in `[-1, 1]`.
    pub fn eval(&self, grid: &ChebGrid, y: f64) -> f64 {
        match &self.poly {
            Some(p) => p.eval(y),
            None => grid.interpolate(&self.values, y),
        }
    }

    pub fn top(&self) -> f64 {
        self.values[ChebGrid::TOP]
    }

    pub fn bottom(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn derivative(&self, grid: &ChebGrid) -> YProfile {
        match &self.poly {
            Some(p) => YProfile::from_poly(grid, p.derivative()),
            None => YProfile::from_values(grid.differentiate(&self.values)),
        }
    }

    pub fn second_derivative(&self, grid: &ChebGrid) -> YProfile {
        match &self.poly {
            Some(p) => YProfile::from_poly(grid, p.nth_derivative(2)),
            None => YProfile::from_values(grid.differentiate2(&self.values)),
        }
    }

    pub fn scale(&self, s: f64) -> YProfile {
        YProfile {
            values: self.values.iter().map(|v| v * s).collect(),
            poly: self.poly.as_ref().map(|p| p.scale(s)),
        }
    }

    pub fn add(&self, other: &YProfile) -> YProfile {
        self.zip(other, |a, b| a + b, |p, q| p + q)
    }

    pub fn sub(&self, other: &YProfile) -> YProfile {
        self.zip(other, |a, b| a - b, |p, q| p - q)
    }

    /// `self + s * other`
    pub fn add_scaled(&self, s: f64, other: &YProfile) -> YProfile {
        if s == 0.0 {
            return self.clone();
        }
        self.add(&other.scale(s))
    }

    /// Pointwise product.
    pub fn mul(&self, other: &YProfile) -> YProfile {
        self.zip(other, |a, b| a * b, |p, q| p * q)
    }

    fn zip(
        &self,
        other: &YProfile,
        op: impl Fn(f64, f64) -> f64,
        pop: impl Fn(&Poly, &Poly) -> Poly,
    ) -> YProfile {
        debug_assert_eq!(self.len(), other.len());
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| op(a, b))
            .collect();
        let poly = match (&self.poly, &other.poly) {
            (Some(p), Some(q)) => Some(pop(p, q)),
            _ => None,
        };
        YProfile { values, poly }
    }

    /// The same function represented on another grid.
    pub fn resample(&self, from: &ChebGrid, to: &ChebGrid) -> YProfile {
        match &self.poly {
            Some(p) => YProfile::from_poly(to, p.clone()),
            None => YProfile::from_values(from.resample(&self.values, to)),
        }
    }

    /// Drops the exact polynomial, keeping only the samples.
    pub fn without_poly(mut self) -> YProfile {
        self.poly = None;
        self
    }
}
