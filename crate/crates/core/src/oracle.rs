//! Closed forms for the analytic example field
//! `u = (0, cos(theta) (y^2-1)^2, -4 y (y^2-1) sin(theta) / beta)`
//! and every quantity derived from it: vorticity, forcing, velocity tendency,
//! divergence defect and wall residual coefficients.
//!
//! The velocity tendency of the spanwise component is not the typeset one:
//! its forcing is a pure sine series, so the tendency is too. Those two
//! profiles are built from [`HelmholtzClosedForm`], an exact
//! polynomial-plus-hyperbolic solution independent of collocation. The
//! typeset expressions are kept in [`printed_a31`] and [`printed_a32`].

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{ChebGrid, FlowParams, Harmonic, Poly, ScalarField, WaveField, YProfile};

#[derive(Debug, Clone, Copy)]
struct Consts {
    a: f64,
    b: f64,
    re: f64,
    k2: f64,
    k: f64,
}

impl Consts {
    fn new(params: &FlowParams) -> Result<Self> {
        if !(params.beta.is_finite() && params.beta != 0.0) {
            return Err(Error::Domain("the example field needs beta != 0".into()));
        }
        params.validate()?;
        let k2 = params.wavenumber_sq();
        Ok(Consts {
            a: params.alpha,
            b: params.beta,
            re: params.reynolds,
            k2,
            k: k2.sqrt(),
        })
    }
}

fn poly_field(grid: &Arc<ChebGrid>, params: FlowParams, entries: &[(usize, Poly, Poly)]) -> ScalarField {
    let mut f = ScalarField::zero(params, grid.clone());
    for (j, c, s) in entries {
        f.set_harmonic(
            *j,
            YProfile::from_poly(grid, c.clone()),
            YProfile::from_poly(grid, s.clone()),
        )
        .expect("well-formed closed form");
    }
    f
}

type Profile<'a> = &'a dyn Fn(f64) -> f64;

fn fn_field(grid: &Arc<ChebGrid>, params: FlowParams, entries: &[(usize, Profile, Profile)]) -> ScalarField {
    let mut f = ScalarField::zero(params, grid.clone());
    for (j, c, s) in entries {
        f.set_harmonic(*j, YProfile::from_fn(grid, c), YProfile::from_fn(grid, s))
            .expect("well-formed closed form");
    }
    f
}

fn zero(_: f64) -> f64 {
    0.0
}

/// The analytic incompatible example, as exact polynomials.
pub fn example_field(params: &FlowParams, grid: &Arc<ChebGrid>) -> Result<WaveField> {
    let c = Consts::new(params)?;
    let p = *params;
    let u1 = ScalarField::zero(p, grid.clone());
    let u2 = poly_field(grid, p, &[(1, Poly::wall_factor(2), Poly::zero())]);
    // -4 y (y^2 - 1) / beta
    let w = Poly::new(vec![0.0, 4.0 / c.b, 0.0, -4.0 / c.b]);
    let u3 = poly_field(grid, p, &[(1, Poly::zero(), w)]);
    WaveField::new(u1, u2, u3)
}

/// Curl of [`example_field`].
pub fn example_vorticity(params: &FlowParams, grid: &Arc<ChebGrid>) -> Result<WaveField> {
    let c = Consts::new(params)?;
    let p = *params;
    let (a, b) = (c.a, c.b);
    let b2 = b * b;
    // (b^2 y^4 - 2 b^2 y^2 + b^2 - 12 y^2 + 4) / b
    let w1 = Poly::new(vec![(b2 + 4.0) / b, 0.0, (-2.0 * b2 - 12.0) / b, 0.0, b2 / b]);
    // 4 a y (y^2 - 1) / b
    let w2 = Poly::new(vec![0.0, -4.0 * a / b, 0.0, 4.0 * a / b]);
    let w3 = Poly::wall_factor(2).scale(-a);
    WaveField::new(
        poly_field(grid, p, &[(1, Poly::zero(), w1)]),
        poly_field(grid, p, &[(1, w2, Poly::zero())]),
        poly_field(grid, p, &[(1, Poly::zero(), w3)]),
    )
}

/// Polynomial coefficients of the forcing `f_k` of the example.
pub struct ExampleForcing {
    pub b12: Poly,
    pub a21: Poly,
    pub a22: Poly,
    pub b31: Poly,
    pub b32: Poly,
}

fn forcing_polys(c: &Consts) -> ExampleForcing {
    let (a, b, re) = (c.a, c.b, c.re);
    let (a2, b2) = (a * a, b * b);
    let (a4, b4) = (a2 * a2, b2 * b2);
    // -8 a (y^2-1)^2 (y^2+1)
    let b12 = (&Poly::wall_factor(2) * &Poly::new(vec![1.0, 0.0, 1.0])).scale(-8.0 * a);
    let a21 = Poly::new(vec![
        -a4 - 2.0 * a2 * b2 - 8.0 * a2 - b4 - 8.0 * b2 - 24.0,
        0.0,
        2.0 * a4 + 4.0 * a2 * b2 + 24.0 * a2 + 2.0 * b4 + 24.0 * b2,
        0.0,
        -a4 - 2.0 * a2 * b2 - b4,
    ])
    .scale(-1.0 / re);
    // 8 y (3y^2+1)(y-1)(y+1)
    let a22 = (&Poly::new(vec![0.0, 8.0, 0.0, 24.0]) * &Poly::wall_factor(1)).clone();
    // 4 y (a^2+b^2)(-a^2 y^2 + a^2 - b^2 y^2 + b^2 + 12) / (Re b)
    let b31 = Poly::new(vec![0.0, a2 + b2 + 12.0, 0.0, -a2 - b2]).scale(4.0 * (a2 + b2) / (re * b));
    let b32 = Poly::new(vec![
        2.0 * a2 + 1.0,
        0.0,
        -2.0 * a2 + 6.0,
        0.0,
        -2.0 * a2 - 15.0,
        0.0,
        2.0 * a2,
    ])
    .scale(4.0 / b);
    ExampleForcing {
        b12,
        a21,
        a22,
        b31,
        b32,
    }
}

/// All fifteen forcing profiles of the example (ten vanish).
pub fn example_forcing(params: &FlowParams, grid: &Arc<ChebGrid>) -> Result<WaveField> {
    let c = Consts::new(params)?;
    let p = *params;
    let f = forcing_polys(&c);
    let z = Poly::zero;
    WaveField::new(
        poly_field(grid, p, &[(1, z(), z()), (2, z(), f.b12)]),
        poly_field(grid, p, &[(1, f.a21, z()), (2, f.a22, z())]),
        poly_field(grid, p, &[(1, z(), f.b31), (2, z(), f.b32)]),
    )
}

pub fn example_forcing_polys(params: &FlowParams) -> Result<ExampleForcing> {
    Ok(forcing_polys(&Consts::new(params)?))
}

/// Exact solution of `a'' - k2 a = rhs` with `a(+-1) = 0` for polynomial
/// `rhs`: `poly(y) + c cosh(r y) + s sinh(r y)`, `r = sqrt(k2)`.
#[derive(Debug, Clone)]
pub struct HelmholtzClosedForm {
    pub poly: Poly,
    pub cosh_coef: f64,
    pub sinh_coef: f64,
    pub rate: f64,
}

impl HelmholtzClosedForm {
    pub fn dirichlet(rhs: &Poly, k2: f64) -> Self {
        assert!(k2 > 0.0, "closed form needs k2 > 0");
        // (D^2 - k2)^-1 rhs = -sum_m D^(2m) rhs / k2^(m+1), finite for polynomials
        let mut part = Poly::zero();
        let mut term = rhs.clone();
        let mut denom = k2;
        while !term.is_zero() {
            part = &part - &term.scale(1.0 / denom);
            term = term.nth_derivative(2);
            denom *= k2;
        }
        let rate = k2.sqrt();
        let (top, bottom) = (part.eval(1.0), part.eval(-1.0));
        HelmholtzClosedForm {
            cosh_coef: -(top + bottom) / (2.0 * rate.cosh()),
            sinh_coef: -(top - bottom) / (2.0 * rate.sinh()),
            poly: part,
            rate,
        }
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.poly.eval(y) + self.cosh_coef * (self.rate * y).cosh() + self.sinh_coef * (self.rate * y).sinh()
    }

    pub fn derivative(&self, y: f64) -> f64 {
        self.poly.derivative().eval(y)
            + self.rate * (self.cosh_coef * (self.rate * y).sinh() + self.sinh_coef * (self.rate * y).cosh())
    }
}

fn b12(c: &Consts, y: f64) -> f64 {
    let (a, b, k2, k) = (c.a, c.b, c.k2, c.k);
    let (a2, b2) = (a * a, b * b);
    let (a4, b4) = (a2 * a2, b2 * b2);
    let (a6, b6) = (a4 * a2, b4 * b2);
    let e_sum = (-2.0 * k).exp() + (2.0 * k).exp();
    let big = 16.0 * a4 + 32.0 * a2 * b2 + 84.0 * a2 + 16.0 * b4 + 84.0 * b2 + 45.0;
    2.0 * a * y.powi(6) / k2
        - a * (-4.0 * a6 - 12.0 * a4 * b2 + 2.0 * a4 - 12.0 * a2 * b4 + 4.0 * a2 * b2 + 6.0 * a2 - 4.0 * b6
            + 2.0 * b4
            + 6.0 * b2
            - 45.0)
            / (2.0 * k2.powi(4))
        - a * y.powi(4) * (2.0 * a2 + 2.0 * b2 - 15.0) / k2.powi(2)
        - a * y * y * (2.0 * a4 + 4.0 * a2 * b2 + 6.0 * a2 + 2.0 * b4 + 6.0 * b2 - 45.0) / k2.powi(3)
        - a * (-2.0 * y * k).exp() * big / (2.0 * e_sum * k2.powi(4))
        - a * (2.0 * y * k).exp() * big / (2.0 * e_sum * k2.powi(4))
}

fn a21(c: &Consts, y: f64) -> f64 {
    let (k2, k, re) = (c.k2, c.k, c.re);
    2.0 * y * y * (k2 + 6.0) / re
        - 8.0 * ((y + 1.0) * k).exp() / (re * ((2.0 * k).exp() + 1.0))
        - y.powi(4) * k2 / re
        - (k2 + 4.0) / re
        - 8.0 * (-y * k).exp() / (re * ((-k).exp() + k.exp()))
}

fn a22(c: &Consts, y: f64) -> f64 {
    let (a, b, k2, k) = (c.a, c.b, c.k2, c.k);
    let (a2, b2) = (a * a, b * b);
    let (a4, b4) = (a2 * a2, b2 * b2);
    let e_diff = (-2.0 * k).exp() - (2.0 * k).exp();
    2.0 * y.powi(3) * (2.0 * a2 + 2.0 * b2 - 15.0) / k2.powi(2) - 6.0 * y.powi(5) / k2
        + y * (2.0 * a4 + 4.0 * a2 * b2 + 6.0 * a2 + 2.0 * b4 + 6.0 * b2 - 45.0) / k2.powi(3)
        + 3.0 * (-2.0 * y * k).exp() * (8.0 * a2 + 8.0 * b2 + 15.0) / (e_diff * k2.powi(3))
        - 3.0 * (2.0 * y * k).exp() * (8.0 * a2 + 8.0 * b2 + 15.0) / (e_diff * k2.powi(3))
}

/// The spanwise harmonic-1 cosine tendency as typeset (a copy of `a_{2,1}`).
pub fn printed_a31(params: &FlowParams, y: f64) -> Result<f64> {
    Ok(a21(&Consts::new(params)?, y))
}

/// The spanwise harmonic-2 cosine tendency as typeset (a copy of `a_{2,2}`).
pub fn printed_a32(params: &FlowParams, y: f64) -> Result<f64> {
    Ok(a22(&Consts::new(params)?, y))
}

/// Closed-form spanwise tendencies `b_{3,1}`, `b_{3,2}`.
pub fn example_spanwise_tendency(params: &FlowParams) -> Result<[HelmholtzClosedForm; 2]> {
    let c = Consts::new(params)?;
    let f = forcing_polys(&c);
    Ok([
        HelmholtzClosedForm::dirichlet(&f.b31, c.k2),
        HelmholtzClosedForm::dirichlet(&f.b32, 4.0 * c.k2),
    ])
}

/// Initial velocity tendency of the example: `b_{1,2}`, `a_{2,1}`, `a_{2,2}`
/// from the closed forms, `b_{3,1}`, `b_{3,2}` from [`HelmholtzClosedForm`].
pub fn example_dudt(params: &FlowParams, grid: &Arc<ChebGrid>) -> Result<WaveField> {
    let c = Consts::new(params)?;
    let p = *params;
    let [w1, w2] = example_spanwise_tendency(params)?;
    let u1 = fn_field(grid, p, &[(2, &zero, &|y| b12(&c, y))]);
    let u2 = fn_field(grid, p, &[(1, &|y| a21(&c, y), &zero), (2, &|y| a22(&c, y), &zero)]);
    let u3 = fn_field(grid, p, &[(1, &zero, &|y| w1.eval(y)), (2, &zero, &|y| w2.eval(y))]);
    WaveField::new(u1, u2, u3)
}

fn da1(c: &Consts, y: f64) -> f64 {
    let (k, re) = (c.k, c.re);
    let e2 = (2.0 * k).exp();
    let c1 = 3.0 * e2 + k - e2 * k + 3.0;
    8.0 * (-y * k).exp() * (((2.0 * y + 1.0) * k).exp() - k.exp()) * c1 / (re * ((4.0 * k).exp() - 1.0))
}

fn da2(c: &Consts, y: f64) -> f64 {
    let (a, b, k2, k) = (c.a, c.b, c.k2, c.k);
    let (a2, b2) = (a * a, b * b);
    let (a4, b4) = (a2 * a2, b2 * b2);
    let e4 = (4.0 * k).exp();
    let k3h = k2.powf(1.5);
    let c2 = (16.0 * e4 - 16.0) * k2.powi(3) - (90.0 * e4 + 90.0) * k3h
        + a2 * (45.0 * e4 - 45.0)
        + a4 * (84.0 * e4 - 84.0)
        + b2 * (45.0 * e4 - 45.0)
        + b4 * (84.0 * e4 - 84.0)
        - a2 * (48.0 * e4 + 48.0) * k3h
        - b2 * (48.0 * e4 + 48.0) * k3h
        + a2 * b2 * (168.0 * e4 - 168.0);
    -(-2.0 * (y - 1.0) * k).exp() * ((4.0 * y * k).exp() + 1.0) / (((8.0 * k).exp() - 1.0) * k2.powi(4)) * c2
}

/// Fourier coefficients of the divergence of the example tendency:
/// cosine profiles `da_1`, `da_2`; `da_0` and the sine profiles vanish.
pub fn example_div_coeffs(params: &FlowParams, grid: &Arc<ChebGrid>) -> Result<ScalarField> {
    let c = Consts::new(params)?;
    let f = fn_field(grid, *params, &[(1, &|y| da1(&c, y), &zero), (2, &|y| da2(&c, y), &zero)]);
    Ok(f)
}

/// Top-wall residual coefficients of the example, per direction: index `j`
/// holds `(cos, sin)` of harmonic `j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CcCoefficients {
    pub x: [(f64, f64); 3],
    pub z: [(f64, f64); 3],
}

pub fn example_cc_coeffs(params: &FlowParams) -> Result<CcCoefficients> {
    let c = Consts::new(params)?;
    let (a, b, k2, k, re) = (c.a, c.b, c.k2, c.k, c.re);
    let (a2, b2) = (a * a, b * b);
    let (a4, b4) = (a2 * a2, b2 * b2);
    let (a6, b6) = (a4 * a2, b4 * b2);
    let e2 = (2.0 * k).exp();
    let e4 = (4.0 * k).exp();
    let k7h = k2.powf(3.5);
    let c3 = (2.0 * a2 + 2.0 * b2 - 15.0) / (2.0 * k2.powi(2)) - 1.0 / k2
        + (2.0 * a4 + 4.0 * a2 * b2 + 6.0 * a2 + 2.0 * b4 + 6.0 * b2 - 45.0) / (2.0 * k2.powi(3))
        + (-4.0 * a6 - 12.0 * a4 * b2 + 2.0 * a4 - 12.0 * a2 * b4 + 4.0 * a2 * b2 + 6.0 * a2 - 4.0 * b6
            + 2.0 * b4
            + 6.0 * b2
            - 45.0)
            / (4.0 * k2.powi(4))
        + (24.0 * a2 + 24.0 * b2 + 45.0) / (2.0 * (e4 - 1.0) * k7h)
        + 3.0 * e4 * (8.0 * a2 + 8.0 * b2 + 15.0) / (2.0 * (e4 - 1.0) * k7h);
    let ccxb1 = 8.0 * a * (e2 - 1.0) / (re * (e2 + 1.0) * k);
    let cczb1 = 8.0 * b * (e2 - 1.0) / (re * (e2 + 1.0) * k) - 24.0 / (re * b);
    Ok(CcCoefficients {
        x: [(0.0, 0.0), (0.0, ccxb1), (0.0, -2.0 * a * c3)],
        z: [(0.0, 0.0), (0.0, cczb1), (0.0, -2.0 * b * c3)],
    })
}

/// Zero harmonic placeholder used by callers building comparison tables.
pub fn zero_harmonic(n: usize) -> Harmonic {
    Harmonic::zeros(n)
}
