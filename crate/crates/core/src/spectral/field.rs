use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::grid::ChebGrid;
use super::profile::YProfile;
use crate::error::{Error, Result};

/// Wavenumbers and Reynolds number of a periodic channel problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowParams {
    /// Streamwise wavenumber, `2*pi/L_x`.
    pub alpha: f64,
    /// Spanwise wavenumber, `2*pi/L_z`.
    pub beta: f64,
    pub reynolds: f64,
}

impl FlowParams {
    pub fn new(alpha: f64, beta: f64, reynolds: f64) -> Result<Self> {
        let p = FlowParams {
            alpha,
            beta,
            reynolds,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("reynolds", self.reynolds),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }

    /// `alpha^2 + beta^2`
    pub fn wavenumber_sq(&self) -> f64 {
        self.alpha * self.alpha + self.beta * self.beta
    }

    pub fn wavenumber(&self) -> f64 {
        self.wavenumber_sq().sqrt()
    }

    pub fn lx(&self) -> f64 {
        2.0 * PI / self.alpha
    }

    pub fn lz(&self) -> f64 {
        2.0 * PI / self.beta
    }

    pub fn phase(&self, x: f64, z: f64) -> f64 {
        self.alpha * x + self.beta * z
    }
}

impl Default for FlowParams {
    fn default() -> Self {
        FlowParams {
            alpha: 1.0,
            beta: 1.0,
            reynolds: 80.0,
        }
    }
}

/// Cosine and sine profiles of one harmonic `j` of the phase `alpha*x + beta*z`.
#[derive(Debug, Clone, PartialEq)]
pub struct Harmonic {
    pub cos: YProfile,
    pub sin: YProfile,
}

impl Harmonic {
    pub fn zeros(n: usize) -> Self {
        Harmonic {
            cos: YProfile::zeros(n),
            sin: YProfile::zeros(n),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.cos.is_zero() && self.sin.is_zero()
    }

    fn map(&self, f: impl Fn(&YProfile) -> YProfile) -> Harmonic {
        Harmonic {
            cos: f(&self.cos),
            sin: f(&self.sin),
        }
    }
}

/// Scalar field `sum_j a_j(y) cos(j*theta) + b_j(y) sin(j*theta)`,
/// `theta = alpha*x + beta*z`. Entry `j` of `harmonics` is harmonic `j`.
#[derive(Debug, Clone)]
pub struct ScalarField {
    params: FlowParams,
    grid: Arc<ChebGrid>,
    harmonics: Vec<Harmonic>,
}

impl ScalarField {
    pub fn zero(params: FlowParams, grid: Arc<ChebGrid>) -> Self {
        let n = grid.n();
        ScalarField {
            params,
            grid,
            harmonics: vec![Harmonic::zeros(n)],
        }
    }

    pub fn new(params: FlowParams, grid: Arc<ChebGrid>, harmonics: Vec<Harmonic>) -> Result<Self> {
        let n = grid.n();
        for (j, h) in harmonics.iter().enumerate() {
            if h.cos.len() != n || h.sin.len() != n {
                return Err(Error::Config(format!(
                    "harmonic {j}: profile length does not match grid size {n}"
                )));
            }
        }
        if let Some(h0) = harmonics.first() {
            if !h0.sin.is_zero() {
                return Err(Error::Config(
                    "harmonic 0 cannot carry a sine profile".into(),
                ));
            }
        }
        let mut f = ScalarField {
            params,
            grid,
            harmonics,
        };
        if f.harmonics.is_empty() {
            f.harmonics.push(Harmonic::zeros(n));
        }
        Ok(f)
    }

    pub fn params(&self) -> &FlowParams {
        &self.params
    }

    pub fn grid(&self) -> &Arc<ChebGrid> {
        &self.grid
    }

    pub fn harmonics(&self) -> &[Harmonic] {
        &self.harmonics
    }

    pub fn harmonic(&self, j: usize) -> Option<&Harmonic> {
        self.harmonics.get(j)
    }

    /// Highest harmonic index stored (trailing zero harmonics included).
    pub fn max_harmonic(&self) -> usize {
        self.harmonics.len() - 1
    }

    /// Sets the profiles of harmonic `j`, growing the harmonic list as needed.
    pub fn set_harmonic(&mut self, j: usize, cos: YProfile, sin: YProfile) -> Result<()> {
        let n = self.grid.n();
        if cos.len() != n || sin.len() != n {
            return Err(Error::Config(format!("harmonic {j}: profile length mismatch")));
        }
        if j == 0 && !sin.is_zero() {
            return Err(Error::Config("harmonic 0 cannot carry a sine profile".into()));
        }
        while self.harmonics.len() <= j {
            self.harmonics.push(Harmonic::zeros(n));
        }
        self.harmonics[j] = Harmonic { cos, sin };
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.harmonics.iter().all(Harmonic::is_zero)
    }

    fn check_y(y: f64) -> Result<()> {
        if (-1.0..=1.0).contains(&y) {
            Ok(())
        } else {
            Err(Error::Domain(format!("y = {y} lies outside [-1, 1]")))
        }
    }

    pub fn eval(&self, x: f64, y: f64, z: f64) -> Result<f64> {
        Self::check_y(y)?;
        Ok(self.eval_phase(self.params.phase(x, z), y))
    }

    /// Value at phase `theta` and wall-normal position `y` (unchecked).
    pub fn eval_phase(&self, theta: f64, y: f64) -> f64 {
        self.harmonics
            .iter()
            .enumerate()
            .map(|(j, h)| {
                let jt = j as f64 * theta;
                let mut v = h.cos.eval(&self.grid, y) * jt.cos();
                if j > 0 {
                    v += h.sin.eval(&self.grid, y) * jt.sin();
                }
                v
            })
            .sum()
    }

    fn map(&self, f: impl Fn(usize, &Harmonic) -> Harmonic) -> ScalarField {
        ScalarField {
            params: self.params,
            grid: self.grid.clone(),
            harmonics: self
                .harmonics
                .iter()
                .enumerate()
                .map(|(j, h)| f(j, h))
                .collect(),
        }
    }

    /// Derivative along the phase direction scaled by `wavenumber`:
    /// `d/dx` for `alpha`, `d/dz` for `beta`.
    fn phase_derivative(&self, wavenumber: f64) -> ScalarField {
        self.map(|j, h| {
            let s = j as f64 * wavenumber;
            Harmonic {
                cos: h.sin.scale(s),
                sin: h.cos.scale(-s),
            }
        })
    }

    pub fn dx(&self) -> ScalarField {
        self.phase_derivative(self.params.alpha)
    }

    pub fn dz(&self) -> ScalarField {
        self.phase_derivative(self.params.beta)
    }

    pub fn dy(&self) -> ScalarField {
        let g = self.grid.clone();
        self.map(|_, h| h.map(|p| p.derivative(&g)))
    }

    /// Partial derivative along coordinate `axis` (0 = x, 1 = y, 2 = z).
    pub fn partial(&self, axis: usize) -> ScalarField {
        match axis {
            0 => self.dx(),
            1 => self.dy(),
            2 => self.dz(),
            _ => panic!("axis {axis} out of range"),
        }
    }

    pub fn laplacian(&self) -> ScalarField {
        let g = self.grid.clone();
        let k2 = self.params.wavenumber_sq();
        self.map(|j, h| {
            let s = -((j * j) as f64) * k2;
            h.map(|p| p.second_derivative(&g).add_scaled(s, p))
        })
    }

    pub fn scale(&self, s: f64) -> ScalarField {
        self.map(|_, h| h.map(|p| p.scale(s)))
    }

    pub fn add(&self, other: &ScalarField) -> Result<ScalarField> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &ScalarField) -> Result<ScalarField> {
        self.combine(other, -1.0)
    }

    /// `self + s * other`
    pub fn combine(&self, other: &ScalarField, s: f64) -> Result<ScalarField> {
        self.check_compatible(other)?;
        let n = self.grid.n();
        let len = self.harmonics.len().max(other.harmonics.len());
        let zero = Harmonic::zeros(n);
        let harmonics = (0..len)
            .map(|j| {
                let a = self.harmonics.get(j).unwrap_or(&zero);
                let b = other.harmonics.get(j).unwrap_or(&zero);
                Harmonic {
                    cos: a.cos.add_scaled(s, &b.cos),
                    sin: a.sin.add_scaled(s, &b.sin),
                }
            })
            .collect();
        Ok(ScalarField {
            params: self.params,
            grid: self.grid.clone(),
            harmonics,
        })
    }

    fn check_compatible(&self, other: &ScalarField) -> Result<()> {
        if self.params != other.params {
            return Err(Error::Config("fields have different flow parameters".into()));
        }
        if !self.grid.same_as(&other.grid) {
            return Err(Error::Config(format!(
                "fields live on different grids ({} vs {} points)",
                self.grid.n(),
                other.grid.n()
            )));
        }
        Ok(())
    }

    /// Maximum absolute value over the collocation points and a uniform
    /// sampling of the phase fine enough for the stored harmonics.
    pub fn max_abs(&self) -> f64 {
        let m = 16 * (self.harmonics.len() + 1);
        let mut best: f64 = 0.0;
        for theta in (0..m).map(|i| 2.0 * PI * i as f64 / m as f64) {
            for k in 0..self.grid.n() {
                let v: f64 = self
                    .harmonics
                    .iter()
                    .enumerate()
                    .map(|(j, h)| {
                        let jt = j as f64 * theta;
                        h.cos.values()[k] * jt.cos() + h.sin.values()[k] * jt.sin()
                    })
                    .sum();
                best = best.max(v.abs());
            }
        }
        best
    }

    /// Root-mean-square over one period in x and z, integrated over `y`:
    /// `sqrt( int a_0^2 + 1/2 sum_j (a_j^2 + b_j^2) dy )`.
    pub fn l2(&self) -> f64 {
        let n = self.grid.n();
        let mut density = vec![0.0; n];
        for (j, h) in self.harmonics.iter().enumerate() {
            let w = if j == 0 { 1.0 } else { 0.5 };
            for ((d, a), b) in density.iter_mut().zip(h.cos.values()).zip(h.sin.values()) {
                *d += w * (a * a + b * b);
            }
        }
        self.grid.integrate(&density).max(0.0).sqrt()
    }

    /// Largest coefficient magnitude over all profiles and grid points.
    pub fn max_coeff(&self) -> f64 {
        self.harmonics
            .iter()
            .map(|h| h.cos.max_abs().max(h.sin.max_abs()))
            .fold(0.0, f64::max)
    }

    pub fn resample(&self, grid: &Arc<ChebGrid>) -> ScalarField {
        if self.grid.same_as(grid) {
            return self.clone();
        }
        let (from, to) = (self.grid.clone(), grid.clone());
        ScalarField {
            params: self.params,
            grid: grid.clone(),
            harmonics: self
                .harmonics
                .iter()
                .map(|h| h.map(|p| p.resample(&from, &to)))
                .collect(),
        }
    }
}

/// Exact product of two single-phase fields via product-to-sum identities.
///
/// Inputs with highest harmonics `J1` and `J2` give a field with highest
/// harmonic `J1 + J2`.
pub fn harmonic_product(f: &ScalarField, g: &ScalarField) -> Result<ScalarField> {
    f.check_compatible(g)?;
    let n = f.grid.n();
    let len = f.harmonics.len() + g.harmonics.len() - 1;
    let mut cos: Vec<Option<YProfile>> = vec![None; len];
    let mut sin: Vec<Option<YProfile>> = vec![None; len];
    let acc = |slot: &mut Option<YProfile>, term: YProfile, s: f64| {
        *slot = Some(match slot.take() {
            Some(prev) => prev.add_scaled(s, &term),
            None => term.scale(s),
        });
    };

    for (m, hf) in f.harmonics.iter().enumerate() {
        for (k, hg) in g.harmonics.iter().enumerate() {
            let sum = m + k;
            let diff = m.abs_diff(k);
            // sign of sin((m - k) theta) relative to sin(|m - k| theta)
            let dsign = if m >= k { 1.0 } else { -1.0 };
            let (fc, fs) = (&hf.cos, &hf.sin);
            let (gc, gs) = (&hg.cos, &hg.sin);
            let (fc0, fs0, gc0, gs0) = (fc.is_zero(), fs.is_zero(), gc.is_zero(), gs.is_zero());

            // cos m cos k = 1/2 [cos(m-k) + cos(m+k)]
            if !fc0 && !gc0 {
                let p = fc.mul(gc);
                acc(&mut cos[diff], p.clone(), 0.5);
                acc(&mut cos[sum], p, 0.5);
            }
            // sin m sin k = 1/2 [cos(m-k) - cos(m+k)]
            if !fs0 && !gs0 {
                let p = fs.mul(gs);
                acc(&mut cos[diff], p.clone(), 0.5);
                acc(&mut cos[sum], p, -0.5);
            }
            // sin m cos k = 1/2 [sin(m+k) + sin(m-k)]
            if !fs0 && !gc0 {
                let p = fs.mul(gc);
                acc(&mut sin[sum], p.clone(), 0.5);
                acc(&mut sin[diff], p, 0.5 * dsign);
            }
            // cos m sin k = 1/2 [sin(m+k) - sin(m-k)]
            if !fc0 && !gs0 {
                let p = fc.mul(gs);
                acc(&mut sin[sum], p.clone(), 0.5);
                acc(&mut sin[diff], p, -0.5 * dsign);
            }
        }
    }

    let harmonics = cos
        .into_iter()
        .zip(sin)
        .enumerate()
        .map(|(j, (c, s))| Harmonic {
            cos: c.unwrap_or_else(|| YProfile::zeros(n)),
            // sin(0) vanishes identically
            sin: if j == 0 {
                YProfile::zeros(n)
            } else {
                s.unwrap_or_else(|| YProfile::zeros(n))
            },
        })
        .collect();
    Ok(ScalarField {
        params: f.params,
        grid: f.grid.clone(),
        harmonics,
    })
}

/// Three-component vector field in the single-phase harmonic family.
#[derive(Debug, Clone)]
pub struct WaveField {
    components: [ScalarField; 3],
}

impl WaveField {
    pub fn new(u1: ScalarField, u2: ScalarField, u3: ScalarField) -> Result<Self> {
        u1.check_compatible(&u2)?;
        u1.check_compatible(&u3)?;
        Ok(WaveField {
            components: [u1, u2, u3],
        })
    }

    pub fn zero(params: FlowParams, grid: Arc<ChebGrid>) -> Self {
        let z = ScalarField::zero(params, grid);
        WaveField {
            components: [z.clone(), z.clone(), z],
        }
    }

    pub fn params(&self) -> &FlowParams {
        self.components[0].params()
    }

    pub fn grid(&self) -> &Arc<ChebGrid> {
        self.components[0].grid()
    }

    pub fn components(&self) -> &[ScalarField; 3] {
        &self.components
    }

    /// Component `k` (0-based: 0 = streamwise, 1 = wall-normal, 2 = spanwise).
    pub fn component(&self, k: usize) -> &ScalarField {
        &self.components[k]
    }

    pub fn max_harmonic(&self) -> usize {
        self.components.iter().map(ScalarField::max_harmonic).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(ScalarField::is_zero)
    }

    pub fn eval(&self, x: f64, y: f64, z: f64) -> Result<[f64; 3]> {
        ScalarField::check_y(y)?;
        let theta = self.params().phase(x, z);
        Ok([0, 1, 2].map(|k| self.components[k].eval_phase(theta, y)))
    }

    pub fn map(&self, f: impl Fn(&ScalarField) -> ScalarField) -> WaveField {
        WaveField {
            components: [0, 1, 2].map(|k| f(&self.components[k])),
        }
    }

    pub fn scale(&self, s: f64) -> WaveField {
        self.map(|c| c.scale(s))
    }

    pub fn laplacian(&self) -> WaveField {
        self.map(ScalarField::laplacian)
    }

    pub fn combine(&self, other: &WaveField, s: f64) -> Result<WaveField> {
        let [a, b, c] = &self.components;
        let [d, e, f] = &other.components;
        WaveField::new(a.combine(d, s)?, b.combine(e, s)?, c.combine(f, s)?)
    }

    pub fn add(&self, other: &WaveField) -> Result<WaveField> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &WaveField) -> Result<WaveField> {
        self.combine(other, -1.0)
    }

    pub fn resample(&self, grid: &Arc<ChebGrid>) -> WaveField {
        self.map(|c| c.resample(grid))
    }

    /// Largest max-abs over the three components.
    pub fn max_abs(&self) -> f64 {
        self.components.iter().map(ScalarField::max_abs).fold(0.0, f64::max)
    }

    /// Euclidean combination of the component L2 norms.
    pub fn l2(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.l2().powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{build_grid, Poly};

    fn single(grid: &Arc<ChebGrid>, j: usize, cos: Poly, sin: Poly) -> ScalarField {
        let mut f = ScalarField::zero(FlowParams::default(), grid.clone());
        f.set_harmonic(
            j,
            YProfile::from_poly(grid, cos),
            YProfile::from_poly(grid, sin),
        )
        .unwrap();
        f
    }

    #[test]
    fn cos_times_cos() {
        let g = build_grid(8).unwrap();
        let c = single(&g, 1, Poly::constant(1.0), Poly::zero());
        let p = harmonic_product(&c, &c).unwrap();
        assert_eq!(p.max_harmonic(), 2);
        assert_eq!(p.harmonic(0).unwrap().cos.poly().unwrap(), &Poly::constant(0.5));
        assert_eq!(p.harmonic(2).unwrap().cos.poly().unwrap(), &Poly::constant(0.5));
        assert!(p.harmonic(2).unwrap().sin.is_zero());
        assert!(p.harmonic(1).unwrap().is_zero());
    }

    #[test]
    fn cos_times_sin() {
        let g = build_grid(8).unwrap();
        let c = single(&g, 1, Poly::constant(1.0), Poly::zero());
        let s = single(&g, 1, Poly::zero(), Poly::constant(1.0));
        let p = harmonic_product(&c, &s).unwrap();
        assert!(p.harmonic(0).unwrap().is_zero());
        assert!(p.harmonic(2).unwrap().cos.is_zero());
        assert_eq!(p.harmonic(2).unwrap().sin.poly().unwrap(), &Poly::constant(0.5));
    }

    #[test]
    fn mismatched_params_rejected() {
        let g = build_grid(8).unwrap();
        let a = ScalarField::zero(FlowParams::default(), g.clone());
        let b = ScalarField::zero(FlowParams::new(2.0, 1.0, 80.0).unwrap(), g);
        assert!(matches!(harmonic_product(&a, &b), Err(Error::Config(_))));
    }

    #[test]
    fn eval_rejects_points_outside_channel() {
        let g = build_grid(8).unwrap();
        let f = WaveField::zero(FlowParams::default(), g);
        assert_eq!(f.eval(0.3, 0.2, 1.0).unwrap(), [0.0; 3]);
        assert!(matches!(f.eval(0.0, 1.5, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn sine_on_harmonic_zero_rejected() {
        let g = build_grid(8).unwrap();
        let mut f = ScalarField::zero(FlowParams::default(), g.clone());
        let one = YProfile::from_poly(&g, Poly::constant(1.0));
        assert!(f.set_harmonic(0, one.clone(), one).is_err());
    }

    #[test]
    fn params_must_be_positive() {
        assert!(FlowParams::new(1.0, 0.0, 80.0).is_err());
        assert!(FlowParams::new(-1.0, 1.0, 80.0).is_err());
        assert!(FlowParams::new(1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn l2_uses_parseval() {
        let g = build_grid(16).unwrap();
        // cos(theta): mean square 1/2 over the period, times 2 in y
        let f = single(&g, 1, Poly::constant(1.0), Poly::zero());
        assert!((f.l2() - 1.0).abs() < 1e-14);
        assert!((f.max_abs() - 1.0).abs() < 1e-14);
    }
}
