#![allow(dead_code)]

use std::sync::Arc;

use channel_compat::io::continuity_u3;
use channel_compat::spectral::{ChebGrid, FlowParams, Poly, ScalarField, WaveField, YProfile};
use proptest::prelude::*;

pub const DEGREE: usize = 3;
/// Polynomials needed by [`admissible`] with two harmonics.
pub const FIELD_POLYS: usize = 10;

pub fn params() -> impl Strategy<Value = FlowParams> {
    (0.3f64..3.0, 0.3f64..3.0, 50.0f64..2000.0).prop_map(|(a, b, re)| FlowParams::new(a, b, re).unwrap())
}

pub fn coeffs(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, len)
}

pub fn field_polys() -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(coeffs(DEGREE + 1), FIELD_POLYS)
}

fn walled(grid: &ChebGrid, c: &[f64], power: u32) -> YProfile {
    YProfile::from_poly(grid, &Poly::new(c.to_vec()) * &Poly::wall_factor(power))
}

/// No-slip, divergence-free field with harmonics 0..=2 built from ten
/// polynomials: mean u1 and u3, then u1 and u2 (cos, sin) per harmonic.
/// Without `wall_normal` the u2 polynomials are ignored.
pub fn admissible(params: FlowParams, grid: &Arc<ChebGrid>, polys: &[Vec<f64>], wall_normal: bool) -> WaveField {
    let n = grid.n();
    let mut comps = [0, 1, 2].map(|_| ScalarField::zero(params, grid.clone()));
    comps[0].set_harmonic(0, walled(grid, &polys[0], 1), YProfile::zeros(n)).unwrap();
    comps[2].set_harmonic(0, walled(grid, &polys[1], 1), YProfile::zeros(n)).unwrap();
    for j in 1..=2 {
        let c = &polys[2 + 4 * (j - 1)..];
        let u1 = (walled(grid, &c[0], 1), walled(grid, &c[1], 1));
        let u2 = if wall_normal {
            (walled(grid, &c[2], 2), walled(grid, &c[3], 2))
        } else {
            (YProfile::zeros(n), YProfile::zeros(n))
        };
        let u3 = continuity_u3(&params, j, &u1, &u2, grid);
        for (k, (cos, sin)) in [u1, u2, u3].into_iter().enumerate() {
            comps[k].set_harmonic(j, cos, sin).unwrap();
        }
    }
    let [u1, u2, u3] = comps;
    WaveField::new(u1, u2, u3).unwrap()
}

/// Scalar field with unconstrained profiles on harmonics 0..=2.
pub fn scalar(params: FlowParams, grid: &Arc<ChebGrid>, polys: &[Vec<f64>]) -> ScalarField {
    let mut f = ScalarField::zero(params, grid.clone());
    let prof = |i: usize| YProfile::from_poly(grid, Poly::new(polys[i].clone()));
    f.set_harmonic(0, prof(0), YProfile::zeros(grid.n())).unwrap();
    f.set_harmonic(1, prof(1), prof(2)).unwrap();
    f.set_harmonic(2, prof(3), prof(4)).unwrap();
    f
}

/// Largest coefficient of `a - b` relative to the largest of `b`.
pub fn rel_diff(a: &WaveField, b: &WaveField) -> f64 {
    let scale = b.components().iter().map(ScalarField::max_coeff).fold(0.0, f64::max);
    a.sub(b).unwrap().components().iter().map(ScalarField::max_coeff).fold(0.0, f64::max) / scale.max(1e-300)
}
