//! Orr–Sommerfeld eigenmodes of plane Poiseuille flow, turned into initial
//! fields of the single-phase family.
//!
//! The perturbation `v(y) exp(i theta + lambda t)` solves
//! `lambda (D^2 - k^2) v = [(D^2 - k^2)^2 / Re - i alpha U (D^2 - k^2) + i alpha U''] v`
//! with `U = 1 - y^2` and clamped walls. Normal vorticity is set to zero, so
//! the streamwise and spanwise velocities follow from continuity alone.

use std::sync::Arc;

use log::debug;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{build_grid, ChebGrid, FlowParams, Poly, ScalarField, WaveField, YProfile};

/// Smallest grid accepted by [`solve_orr_sommerfeld`].
pub const MIN_OS_POINTS: usize = 24;
/// Grid increment used to detect spurious eigenvalues.
pub const REFINEMENT_STEP: usize = 8;
/// Largest eigenfunction change under refinement for a mode to be kept.
pub const SPURIOUS_TOL: f64 = 1e-4;

type CMat = DMatrix<Complex64>;

/// One Orr–Sommerfeld eigenmode. `vhat` holds the wall-normal velocity on
/// the collocation grid, scaled to unit max-abs with its largest entry real
/// and positive.
#[derive(Debug, Clone)]
pub struct ModeResult {
    pub eigenvalue: Complex64,
    pub vhat: Vec<Complex64>,
    pub params: FlowParams,
    pub grid: Arc<ChebGrid>,
}

impl ModeResult {
    pub fn growth_rate(&self) -> f64 {
        self.eigenvalue.re
    }

    /// Phase speed `-Im(lambda) / alpha`.
    pub fn phase_speed(&self) -> f64 {
        -self.eigenvalue.im / self.params.alpha
    }

    pub fn vhat_re(&self) -> YProfile {
        YProfile::from_values(self.vhat.iter().map(|z| z.re).collect())
    }

    pub fn vhat_im(&self) -> YProfile {
        YProfile::from_values(self.vhat.iter().map(|z| z.im).collect())
    }

    /// `dv/dy` on the grid.
    pub fn dvhat(&self) -> Vec<Complex64> {
        let re = self.grid.differentiate(&self.vhat.iter().map(|z| z.re).collect::<Vec<_>>());
        let im = self.grid.differentiate(&self.vhat.iter().map(|z| z.im).collect::<Vec<_>>());
        re.into_iter().zip(im).map(|(r, i)| Complex64::new(r, i)).collect()
    }
}

/// Row of the mode table printed by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSummary {
    pub index: usize,
    pub growth_rate: f64,
    pub frequency: f64,
    pub phase_speed: f64,
}

impl From<(usize, &ModeResult)> for ModeSummary {
    fn from((index, m): (usize, &ModeResult)) -> Self {
        ModeSummary {
            index,
            growth_rate: m.eigenvalue.re,
            frequency: m.eigenvalue.im,
            phase_speed: m.phase_speed(),
        }
    }
}

/// Plane Poiseuille flow `u1 = 1 - y^2` as a harmonic-0 field.
pub fn poiseuille_base(params: FlowParams, grid: &Arc<ChebGrid>) -> WaveField {
    let mut u1 = ScalarField::zero(params, grid.clone());
    u1.set_harmonic(0, YProfile::from_poly(grid, Poly::new(vec![1.0, 0.0, -1.0])), YProfile::zeros(grid.n()))
        .expect("harmonic 0 with zero sine");
    let zero = ScalarField::zero(params, grid.clone());
    WaveField::new(u1, zero.clone(), zero).expect("consistent components")
}

/// Eigenmodes at `n` points, spurious ones removed, sorted by decreasing
/// growth rate.
pub fn solve_orr_sommerfeld(params: &FlowParams, n: usize) -> Result<Vec<ModeResult>> {
    params.validate()?;
    if n < MIN_OS_POINTS {
        return Err(Error::Config(format!(
            "Orr-Sommerfeld solve needs at least {MIN_OS_POINTS} points, got {n}"
        )));
    }
    let coarse = raw_spectrum(params, n)?;
    let fine = raw_spectrum(params, n + REFINEMENT_STEP)?;
    let mut kept = Vec::new();
    for mode in coarse {
        let Some(best) = fine
            .iter()
            .min_by(|a, b| (a.eigenvalue - mode.eigenvalue).norm().total_cmp(&(b.eigenvalue - mode.eigenvalue).norm()))
        else {
            continue;
        };
        let change = eigenfunction_change(&mode, best);
        if change <= SPURIOUS_TOL {
            kept.push(mode);
        } else {
            debug!("dropping eigenvalue {} (eigenfunction change {change:.2e})", mode.eigenvalue);
        }
    }
    kept.sort_by(|a, b| b.eigenvalue.re.total_cmp(&a.eigenvalue.re));
    Ok(kept)
}

/// `max |v - c w|` with the complex factor `c` fitted by least squares, `w`
/// resampled onto the grid of `v`. Node-wise max-abs normalization differs
/// between grids, so both scale and phase are fitted.
fn eigenfunction_change(v: &ModeResult, w: &ModeResult) -> f64 {
    let g = &v.grid;
    let re = w.grid.resample(&w.vhat.iter().map(|z| z.re).collect::<Vec<_>>(), g);
    let im = w.grid.resample(&w.vhat.iter().map(|z| z.im).collect::<Vec<_>>(), g);
    let w: Vec<Complex64> = re.into_iter().zip(im).map(|(r, i)| Complex64::new(r, i)).collect();
    let inner: Complex64 = v.vhat.iter().zip(&w).map(|(a, b)| a * b.conj()).sum();
    let norm: f64 = w.iter().map(|b| b.norm_sqr()).sum();
    let phase = if norm > 0.0 { inner / norm } else { Complex64::new(1.0, 0.0) };
    v.vhat
        .iter()
        .zip(&w)
        .map(|(a, b)| (a - phase * b).norm())
        .fold(0.0, f64::max)
}

/// Full generalized spectrum on one grid, boundary unknowns eliminated.
fn raw_spectrum(params: &FlowParams, n: usize) -> Result<Vec<ModeResult>> {
    let grid = build_grid(n)?;
    let (a, b) = os_operators(params, &grid);
    let reduction = BoundaryReduction::new(&grid)?;
    let a_eff = reduction.reduce(&a);
    let b_eff = reduction.reduce(&b);
    let b_lu = b_eff.clone().lu();
    let c = b_lu
        .solve(&a_eff)
        .ok_or_else(|| Error::Numerical(format!("singular mass operator at n={n}")))?;
    let eigenvalues = c.clone().schur().eigenvalues().ok_or_else(|| {
        Error::Numerical(format!("Schur decomposition did not converge at n={n} (norm {:.3e})", c.norm()))
    })?;
    let mut modes = Vec::with_capacity(eigenvalues.len());
    for &lambda in eigenvalues.iter() {
        if !lambda.re.is_finite() || !lambda.im.is_finite() {
            continue;
        }
        let interior = inverse_iteration(&a_eff, &b_eff, lambda)?;
        let full = reduction.expand(&interior);
        modes.push(ModeResult {
            eigenvalue: lambda,
            vhat: normalize(full),
            params: *params,
            grid: grid.clone(),
        });
    }
    Ok(modes)
}

fn os_operators(params: &FlowParams, grid: &ChebGrid) -> (CMat, CMat) {
    let n = grid.n();
    let k2 = params.wavenumber_sq();
    let re = params.reynolds;
    let ia = Complex64::new(0.0, params.alpha);
    let d2 = grid.d2();
    let l = DMatrix::<f64>::from_fn(n, n, |i, j| d2[(i, j)] - if i == j { k2 } else { 0.0 });
    let l2 = &l * &l;
    let a = CMat::from_fn(n, n, |i, j| {
        let y = grid.points()[i];
        let u = 1.0 - y * y;
        let diag = if i == j { Complex64::new(-2.0, 0.0) * ia } else { Complex64::new(0.0, 0.0) };
        Complex64::new(l2[(i, j)] / re, 0.0) - ia * u * l[(i, j)] + diag
    });
    let b = CMat::from_fn(n, n, |i, j| Complex64::new(l[(i, j)], 0.0));
    (a, b)
}

/// Clamped walls: `v(+-1) = 0` and `v'(+-1) = 0` fix the unknowns at
/// indices `0, 1, n-2, n-1` in terms of the interior ones.
struct BoundaryReduction {
    n: usize,
    boundary: [usize; 4],
    /// boundary values = `map * interior values`
    map: CMat,
}

impl BoundaryReduction {
    fn new(grid: &ChebGrid) -> Result<Self> {
        let n = grid.n();
        let boundary = [0, 1, n - 2, n - 1];
        let d1 = grid.d1();
        let mut rows = DMatrix::<f64>::zeros(4, n);
        rows[(0, 0)] = 1.0;
        rows[(1, n - 1)] = 1.0;
        for j in 0..n {
            rows[(2, j)] = d1[(0, j)];
            rows[(3, j)] = d1[(n - 1, j)];
        }
        let mbb = DMatrix::<f64>::from_fn(4, 4, |r, c| rows[(r, boundary[c])]);
        let mbi = DMatrix::<f64>::from_fn(4, n - 4, |r, c| rows[(r, c + 2)]);
        let map = mbb
            .lu()
            .solve(&(-mbi))
            .ok_or_else(|| Error::Numerical("singular clamped boundary block".into()))?;
        Ok(BoundaryReduction {
            n,
            boundary,
            map: map.map(|x| Complex64::new(x, 0.0)),
        })
    }

    /// Interior rows of `op` acting on interior unknowns.
    fn reduce(&self, op: &CMat) -> CMat {
        let m = self.n - 4;
        let interior = op.view((2, 2), (m, m)).into_owned();
        let to_boundary = CMat::from_fn(m, 4, |r, c| op[(r + 2, self.boundary[c])]);
        interior + to_boundary * &self.map
    }

    fn expand(&self, interior: &[Complex64]) -> Vec<Complex64> {
        let x = nalgebra::DVector::from_column_slice(interior);
        let b = &self.map * &x;
        let mut full = vec![Complex64::new(0.0, 0.0); self.n];
        full[2..self.n - 2].copy_from_slice(interior);
        for (c, &idx) in self.boundary.iter().enumerate() {
            full[idx] = b[c];
        }
        full
    }
}

fn inverse_iteration(a: &CMat, b: &CMat, lambda: Complex64) -> Result<Vec<Complex64>> {
    let m = a.nrows();
    let shift = lambda + Complex64::new(1e-10, 1e-10) * (1.0 + lambda.norm());
    let lu = (a - b * shift).lu();
    let mut x = nalgebra::DVector::from_element(m, Complex64::new(1.0, 0.0));
    for _ in 0..3 {
        let rhs = b * &x;
        x = lu
            .solve(&rhs)
            .ok_or_else(|| Error::Numerical(format!("inverse iteration failed near {lambda}")))?;
        let scale = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::Numerical(format!("inverse iteration diverged near {lambda}")));
        }
        x /= Complex64::new(scale, 0.0);
    }
    Ok(x.iter().copied().collect())
}

fn normalize(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let (idx, _) = v
        .iter()
        .enumerate()
        .fold((0, 0.0), |(bi, bm), (i, z)| if z.norm() > bm { (i, z.norm()) } else { (bi, bm) });
    let pivot = v[idx];
    if pivot.norm() > 0.0 {
        for z in &mut v {
            *z /= pivot;
        }
    }
    v
}

/// Real initial field `amplitude * Re(u_hat exp(i theta))` with
/// `u1_hat = i alpha v'/k^2`, `u3_hat = i beta v'/k^2`; Poiseuille flow is
/// added at harmonic 0 when `include_base` is set.
pub fn mode_to_field(mode: &ModeResult, amplitude: f64, include_base: bool) -> Result<WaveField> {
    let p = mode.params;
    let g = &mode.grid;
    let k2 = p.wavenumber_sq();
    let dv = mode.dvhat();
    let prof = |f: &dyn Fn(usize) -> f64| YProfile::from_values((0..g.n()).map(f).collect());
    let mut u1 = ScalarField::zero(p, g.clone());
    let mut u2 = ScalarField::zero(p, g.clone());
    let mut u3 = ScalarField::zero(p, g.clone());
    u2.set_harmonic(
        1,
        prof(&|i| amplitude * mode.vhat[i].re),
        prof(&|i| -amplitude * mode.vhat[i].im),
    )?;
    for (field, wavenumber) in [(&mut u1, p.alpha), (&mut u3, p.beta)] {
        let s = amplitude * wavenumber / k2;
        field.set_harmonic(1, prof(&|i| -s * dv[i].im), prof(&|i| -s * dv[i].re))?;
    }
    let wave = WaveField::new(u1, u2, u3)?;
    if include_base {
        wave.add(&poiseuille_base(p, g))
    } else {
        Ok(wave)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_coarse_grid() {
        assert!(solve_orr_sommerfeld(&FlowParams::default(), 16).is_err());
    }

    #[test]
    fn clamped_walls() {
        let modes = solve_orr_sommerfeld(&FlowParams::default(), 40).unwrap();
        assert!(!modes.is_empty());
        for m in modes.iter().take(5) {
            let n = m.grid.n();
            let dv = m.dvhat();
            for i in [0, n - 1] {
                assert!(m.vhat[i].norm() < 1e-10);
                assert!(dv[i].norm() < 1e-10);
            }
        }
    }

    #[test]
    fn zero_amplitude_is_poiseuille() {
        let modes = solve_orr_sommerfeld(&FlowParams::default(), 32).unwrap();
        let f = mode_to_field(&modes[0], 0.0, true).unwrap();
        let base = poiseuille_base(FlowParams::default(), &modes[0].grid);
        assert_eq!(f.sub(&base).unwrap().max_abs(), 0.0);
    }
}
