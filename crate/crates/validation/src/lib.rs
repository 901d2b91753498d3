//! Support for the acceptance suite: criterion reporting and seeded random
//! admissible fields.

use std::sync::Arc;
use std::time::Duration;

use channel_compat::io::continuity_u3;
use channel_compat::spectral::{ChebGrid, FlowParams, Poly, ScalarField, WaveField, YProfile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {}: {}  {}  [{}]",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

pub fn within_time(elapsed: Duration, limit: Duration) -> bool {
    elapsed <= limit
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random polynomial of degree `degree` with coefficients in `[-1, 1)`.
pub fn random_poly(rng: &mut ChaCha8Rng, degree: usize) -> Poly {
    Poly::new((0..=degree).map(|_| rng.gen_range(-1.0..1.0)).collect())
}

fn wall_poly(rng: &mut ChaCha8Rng, degree: usize, power: u32) -> Poly {
    &random_poly(rng, degree) * &Poly::wall_factor(power)
}

/// Random no-slip, divergence-free field with harmonics `0..=max_harmonic`.
/// `u1` carries one wall factor, `u2` two, and `u3` solves continuity for
/// `j >= 1`; harmonic 0 has no wall-normal flow. With `wall_normal` unset
/// the field has `u2 = 0`.
pub fn random_admissible(
    rng: &mut ChaCha8Rng,
    params: FlowParams,
    grid: &Arc<ChebGrid>,
    max_harmonic: usize,
    degree: usize,
    wall_normal: bool,
) -> WaveField {
    let n = grid.n();
    let mut comps = [
        ScalarField::zero(params, grid.clone()),
        ScalarField::zero(params, grid.clone()),
        ScalarField::zero(params, grid.clone()),
    ];
    let prof = |p: Poly| YProfile::from_poly(grid, p);
    comps[0]
        .set_harmonic(0, prof(wall_poly(rng, degree, 1)), YProfile::zeros(n))
        .expect("harmonic 0");
    comps[2]
        .set_harmonic(0, prof(wall_poly(rng, degree, 1)), YProfile::zeros(n))
        .expect("harmonic 0");
    for j in 1..=max_harmonic {
        let u1 = (prof(wall_poly(rng, degree, 1)), prof(wall_poly(rng, degree, 1)));
        let u2 = if wall_normal {
            (prof(wall_poly(rng, degree, 2)), prof(wall_poly(rng, degree, 2)))
        } else {
            (YProfile::zeros(n), YProfile::zeros(n))
        };
        let u3 = continuity_u3(&params, j, &u1, &u2, grid);
        for (k, (c, s)) in [u1, u2, u3].into_iter().enumerate() {
            comps[k].set_harmonic(j, c, s).expect("consistent harmonic");
        }
    }
    let [u1, u2, u3] = comps;
    WaveField::new(u1, u2, u3).expect("consistent components")
}

/// Random scalar field with arbitrary (not wall-bounded) profiles.
pub fn random_scalar(
    rng: &mut ChaCha8Rng,
    params: FlowParams,
    grid: &Arc<ChebGrid>,
    max_harmonic: usize,
    degree: usize,
) -> ScalarField {
    let mut f = ScalarField::zero(params, grid.clone());
    for j in 0..=max_harmonic {
        let c = YProfile::from_poly(grid, random_poly(rng, degree));
        let s = if j == 0 {
            YProfile::zeros(grid.n())
        } else {
            YProfile::from_poly(grid, random_poly(rng, degree))
        };
        f.set_harmonic(j, c, s).expect("consistent harmonic");
    }
    f
}
