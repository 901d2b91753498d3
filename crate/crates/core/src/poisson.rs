//! Per-harmonic Helmholtz boundary-value problems for the initial velocity
//! tendency (Dirichlet) and the initial pressure (Neumann).

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fieldops::{forcing, gradient};
use crate::spectral::{harmonic_product, ChebGrid, ScalarField, WaveField, YProfile};

/// Relative mismatch tolerated in the integral constraint of a
/// pure-Neumann problem before it is rejected.
pub const NEUMANN_SOLVABILITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Dirichlet,
    Neumann,
}

/// `-k2 * a + a'' = rhs` on `[-1, 1]` with boundary data at both walls.
#[derive(Debug, Clone)]
pub struct BvpSpec {
    pub helmholtz_k2: f64,
    pub rhs: YProfile,
    pub kind: BoundaryKind,
    /// Boundary datum at `y = -1`.
    pub bottom: f64,
    /// Boundary datum at `y = +1`.
    pub top: f64,
    /// Lower bound on the scale used for the relative solvability mismatch.
    /// Set it when the data come from a larger problem, so that an
    /// all-roundoff right-hand side is not judged against itself.
    pub reference_scale: f64,
}

impl BvpSpec {
    pub fn dirichlet(k2: f64, rhs: YProfile) -> Self {
        BvpSpec {
            helmholtz_k2: k2,
            rhs,
            kind: BoundaryKind::Dirichlet,
            bottom: 0.0,
            top: 0.0,
            reference_scale: 0.0,
        }
    }

    pub fn neumann(k2: f64, rhs: YProfile, bottom: f64, top: f64) -> Self {
        BvpSpec {
            helmholtz_k2: k2,
            rhs,
            kind: BoundaryKind::Neumann,
            bottom,
            top,
            reference_scale: 0.0,
        }
    }

    pub fn with_reference_scale(mut self, scale: f64) -> Self {
        self.reference_scale = scale;
        self
    }

    /// Signed and relative mismatch of `int rhs dy = a'(1) - a'(-1)`.
    pub fn neumann_mismatch(&self, grid: &ChebGrid) -> (f64, f64) {
        let integral = grid.integrate(self.rhs.values());
        let abs_integral = self
            .rhs
            .values()
            .iter()
            .zip(grid.quadrature_weights())
            .map(|(v, w)| (v * w).abs())
            .sum::<f64>();
        let residual = integral - (self.top - self.bottom);
        let scale = (abs_integral + self.top.abs() + self.bottom.abs()).max(self.reference_scale);
        let relative = if residual == 0.0 {
            0.0
        } else {
            residual.abs() / scale.max(f64::MIN_POSITIVE)
        };
        (residual, relative)
    }
}

/// Solves a [`BvpSpec`] by collocation with boundary-row replacement.
///
/// The pure-Neumann case (`k2 = 0`) is gauge-fixed to zero mean.
pub fn solve_bvp(spec: &BvpSpec, grid: &ChebGrid) -> Result<YProfile> {
    let n = grid.n();
    let k2 = spec.helmholtz_k2;
    if !(k2.is_finite() && k2 >= 0.0) {
        return Err(Error::Config(format!("Helmholtz constant must be >= 0, got {k2}")));
    }
    if spec.rhs.len() != n {
        return Err(Error::Config("right-hand side does not match the grid".into()));
    }
    let bottom = grid.bottom();
    let singular = spec.kind == BoundaryKind::Neumann && k2 == 0.0;
    let size = if singular { n + 1 } else { n };

    let mut m = DMatrix::<f64>::zeros(size, size);
    m.view_mut((0, 0), (n, n)).copy_from(grid.d2());
    for i in 0..n {
        m[(i, i)] -= k2;
    }
    let mut b = DVector::<f64>::zeros(size);
    b.rows_mut(0, n).copy_from_slice(spec.rhs.values());

    for (row, value) in [(ChebGrid::TOP, spec.top), (bottom, spec.bottom)] {
        match spec.kind {
            BoundaryKind::Dirichlet => {
                m.row_mut(row).fill(0.0);
                m[(row, row)] = 1.0;
            }
            BoundaryKind::Neumann => {
                m.row_mut(row).fill(0.0);
                for j in 0..n {
                    m[(row, j)] = grid.d1()[(row, j)];
                }
            }
        }
        b[row] = value;
    }

    if singular {
        let (residual, relative) = spec.neumann_mismatch(grid);
        if relative > NEUMANN_SOLVABILITY_TOL {
            return Err(Error::Solvability { residual, relative });
        }
        // multiplier column absorbs the discrete inconsistency, last row pins the mean
        for i in 1..n - 1 {
            m[(i, n)] = 1.0;
        }
        for (j, w) in grid.quadrature_weights().iter().enumerate() {
            m[(n, j)] = *w;
        }
        b[n] = 0.0;
    }

    let x = m
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Numerical("singular collocation matrix".into()))?;
    Ok(YProfile::from_values(x.as_slice()[..n].to_vec()))
}

fn helmholtz_k2(field: &ScalarField, j: usize) -> f64 {
    (j * j) as f64 * field.params().wavenumber_sq()
}

/// Initial velocity tendency from `lap(du/dt) = f` with homogeneous
/// Dirichlet data on both walls, solved harmonic by harmonic.
pub fn solve_dudt(u0: &WaveField, reynolds: f64, grid: &Arc<ChebGrid>) -> Result<WaveField> {
    let u = u0.resample(grid);
    let f = forcing(&u, reynolds)?;
    let mut out = Vec::with_capacity(3);
    for fk in f.components() {
        let mut comp = ScalarField::zero(*fk.params(), grid.clone());
        for (j, h) in fk.harmonics().iter().enumerate() {
            let k2 = helmholtz_k2(fk, j);
            let solve = |rhs: &YProfile| -> Result<YProfile> {
                if rhs.is_zero() {
                    Ok(YProfile::zeros(grid.n()))
                } else {
                    solve_bvp(&BvpSpec::dirichlet(k2, rhs.clone()), grid)
                }
            };
            let cos = solve(&h.cos)?;
            let sin = if j == 0 {
                YProfile::zeros(grid.n())
            } else {
                solve(&h.sin)?
            };
            comp.set_harmonic(j, cos, sin)?;
        }
        out.push(comp);
    }
    let [a, b, c]: [ScalarField; 3] = out.try_into().expect("three components");
    WaveField::new(a, b, c)
}

/// `-(d u_j / d x_i)(d u_i / d x_j)`, the source of the pressure Poisson equation.
pub fn pressure_source(u: &WaveField) -> Result<ScalarField> {
    let grads: Vec<WaveField> = u.components().iter().map(gradient).collect();
    // grads[i].component(j) = d u_i / d x_j
    let g = |i: usize, j: usize| grads[i].component(j);
    let mut acc = ScalarField::zero(*u.params(), u.grid().clone());
    for i in 0..3 {
        acc = acc.add(&harmonic_product(g(i, i), g(i, i))?)?;
        for j in i + 1..3 {
            acc = acc.combine(&harmonic_product(g(i, j), g(j, i))?, 2.0)?;
        }
    }
    Ok(acc.scale(-1.0))
}

/// Pressure together with the integral mismatch of its mean harmonic.
#[derive(Debug, Clone)]
pub struct PressureSolution {
    pub pressure: ScalarField,
    /// Relative mismatch of the harmonic-0 Neumann integral constraint.
    pub solvability_residual: f64,
}

/// Initial pressure from `lap(p) = -(du_j/dx_i)(du_i/dx_j)` with the
/// wall-normal momentum balance `dp/dy = (1/Re) lap(u_2)` on both walls.
pub fn solve_pressure(u0: &WaveField, reynolds: f64, grid: &Arc<ChebGrid>) -> Result<ScalarField> {
    solve_pressure_detailed(u0, reynolds, grid).map(|s| s.pressure)
}

pub fn solve_pressure_detailed(
    u0: &WaveField,
    reynolds: f64,
    grid: &Arc<ChebGrid>,
) -> Result<PressureSolution> {
    let u = u0.resample(grid);
    let source = pressure_source(&u)?;
    let lap_v = u.component(1).laplacian();
    let n = grid.n();
    let zero = YProfile::zeros(n);

    let mut p = ScalarField::zero(*u.params(), grid.clone());
    let mut solvability_residual = 0.0;
    // the source is a sum of squared velocity gradients and may cancel to
    // roundoff, so its size is judged against the gradients themselves
    let grad = u
        .components()
        .iter()
        .flat_map(|c| (0..3).map(move |axis| c.partial(axis).max_abs()))
        .fold(0.0, f64::max);
    let reference = 2.0 * (source.max_abs() + grad * grad) + 2.0 * lap_v.max_abs() / reynolds;
    let top_j = source.max_harmonic().max(lap_v.max_harmonic());
    for j in 0..=top_j {
        let k2 = helmholtz_k2(&source, j);
        let (src_c, src_s) = source
            .harmonic(j)
            .map(|h| (&h.cos, &h.sin))
            .unwrap_or((&zero, &zero));
        let (bc_c, bc_s) = lap_v
            .harmonic(j)
            .map(|h| (&h.cos, &h.sin))
            .unwrap_or((&zero, &zero));
        let solve = |rhs: &YProfile, bc: &YProfile| -> Result<YProfile> {
            let spec = BvpSpec::neumann(k2, rhs.clone(), bc.bottom() / reynolds, bc.top() / reynolds)
                .with_reference_scale(reference);
            if rhs.is_zero() && spec.top == 0.0 && spec.bottom == 0.0 {
                return Ok(YProfile::zeros(n));
            }
            solve_bvp(&spec, grid)
        };
        let cos = solve(src_c, bc_c)?;
        if j == 0 {
            let spec = BvpSpec::neumann(0.0, src_c.clone(), bc_c.bottom() / reynolds, bc_c.top() / reynolds)
                .with_reference_scale(reference);
            solvability_residual = spec.neumann_mismatch(grid).1;
            p.set_harmonic(0, cos, YProfile::zeros(n))?;
        } else {
            let sin = solve(src_s, bc_s)?;
            p.set_harmonic(j, cos, sin)?;
        }
    }
    Ok(PressureSolution {
        pressure: p,
        solvability_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{build_grid, FlowParams, Poly};

    #[test]
    fn poisson_with_constant_rhs() {
        let g = build_grid(16).unwrap();
        let rhs = YProfile::from_poly(&g, Poly::constant(2.0));
        let a = solve_bvp(&BvpSpec::dirichlet(0.0, rhs), &g).unwrap();
        for (y, v) in g.points().iter().zip(a.values()) {
            assert!((v - (y * y - 1.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let g = build_grid(16).unwrap();
        let a = solve_bvp(&BvpSpec::dirichlet(2.0, YProfile::zeros(16)), &g).unwrap();
        assert!(a.max_abs() == 0.0);
    }

    #[test]
    fn neumann_helmholtz_matches_closed_form() {
        // a = cosh(2y): a'' - 4a = 0, a'(+-1) = +-2 sinh 2
        let g = build_grid(32).unwrap();
        let s = 2.0 * 2f64.sinh();
        let a = solve_bvp(&BvpSpec::neumann(4.0, YProfile::zeros(32), -s, s), &g).unwrap();
        for (y, v) in g.points().iter().zip(a.values()) {
            let e = (v - (2.0 * y).cosh()).abs();
            assert!(e < 1e-10, "err {e}");
        }
    }

    #[test]
    fn pure_neumann_is_gauge_fixed() {
        // a = y^2 - 1/3: a'' = 2, a'(+-1) = +-2, zero mean
        let g = build_grid(24).unwrap();
        let rhs = YProfile::from_poly(&g, Poly::constant(2.0));
        let a = solve_bvp(&BvpSpec::neumann(0.0, rhs, -2.0, 2.0), &g).unwrap();
        for (y, v) in g.points().iter().zip(a.values()) {
            assert!((v - (y * y - 1.0 / 3.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn pure_neumann_rejects_inconsistent_data() {
        let g = build_grid(24).unwrap();
        let rhs = YProfile::from_poly(&g, Poly::constant(2.0));
        match solve_bvp(&BvpSpec::neumann(0.0, rhs, 0.0, 1.0), &g) {
            Err(Error::Solvability { residual, .. }) => assert!((residual - 3.0).abs() < 1e-12),
            other => panic!("expected solvability error, got {other:?}"),
        }
    }

    #[test]
    fn negative_helmholtz_constant_rejected() {
        let g = build_grid(16).unwrap();
        let r = solve_bvp(&BvpSpec::dirichlet(-1.0, YProfile::zeros(16)), &g);
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn zero_field_pressure_and_tendency() {
        let g = build_grid(16).unwrap();
        let u = WaveField::zero(FlowParams::default(), g.clone());
        assert!(solve_dudt(&u, 80.0, &g).unwrap().is_zero());
        assert!(solve_pressure(&u, 80.0, &g).unwrap().is_zero());
    }
}
