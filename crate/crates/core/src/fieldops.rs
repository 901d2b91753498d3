//! Differential operators on [`WaveField`]s and the forcing of the Poisson
//! system for the initial velocity tendency.

use crate::error::{Error, Result};
use crate::spectral::{harmonic_product, ScalarField, WaveField};

/// Relative divergence above which a warning is logged.
pub const DIVERGENCE_WARN: f64 = 1e-8;
/// Relative divergence above which the field is rejected.
pub const DIVERGENCE_REJECT: f64 = 1e-4;

pub fn divergence(f: &WaveField) -> ScalarField {
    let [u, v, w] = f.components();
    let d = u.dx().add(&v.dy()).expect("components share grid");
    d.add(&w.dz()).expect("components share grid")
}

/// Max-abs of the divergence relative to the largest of its three terms.
/// Zero for the zero field.
pub fn relative_divergence(f: &WaveField) -> f64 {
    let [u, v, w] = f.components();
    let terms = [u.dx(), v.dy(), w.dz()];
    let scale = terms.iter().map(ScalarField::max_abs).fold(0.0, f64::max);
    let div = divergence(f).max_abs();
    if div == 0.0 {
        0.0
    } else {
        div / scale.max(f64::MIN_POSITIVE)
    }
}

pub fn curl(f: &WaveField) -> WaveField {
    let [u, v, w] = f.components();
    let c1 = w.dy().sub(&v.dz()).expect("shared grid");
    let c2 = u.dz().sub(&w.dx()).expect("shared grid");
    let c3 = v.dx().sub(&u.dy()).expect("shared grid");
    WaveField::new(c1, c2, c3).expect("shared grid")
}

pub fn laplacian(f: &WaveField) -> WaveField {
    f.laplacian()
}

pub fn gradient(p: &ScalarField) -> WaveField {
    WaveField::new(p.dx(), p.dy(), p.dz()).expect("shared grid")
}

/// `a . grad(b)` for vector fields, each component `a_j d(b_i)/dx_j`.
pub fn advect(a: &WaveField, b: &WaveField) -> Result<WaveField> {
    let mut out = Vec::with_capacity(3);
    for bi in b.components() {
        let mut acc = harmonic_product(a.component(0), &bi.dx())?;
        acc = acc.add(&harmonic_product(a.component(1), &bi.dy())?)?;
        acc = acc.add(&harmonic_product(a.component(2), &bi.dz())?)?;
        out.push(acc);
    }
    let [c1, c2, c3]: [ScalarField; 3] = out.try_into().expect("three components");
    WaveField::new(c1, c2, c3)
}

fn check_solenoidal(u0: &WaveField) -> Result<()> {
    let rel = relative_divergence(u0);
    if rel > DIVERGENCE_REJECT {
        return Err(Error::Domain(format!(
            "initial field is not divergence-free (relative divergence {rel:e})"
        )));
    }
    if rel > DIVERGENCE_WARN {
        log::warn!("initial field divergence is {rel:e} relative; results carry that error");
    }
    Ok(())
}

/// Initial vorticity tendency
/// `-u_j d(w_i)/dx_j + w_j d(u_i)/dx_j + (1/Re) lap(w_i)`, with `w = curl(u0)`.
pub fn vorticity_rhs(u0: &WaveField, reynolds: f64) -> Result<WaveField> {
    check_solenoidal(u0)?;
    let omega = curl(u0);
    let transport = advect(u0, &omega)?;
    let stretching = advect(&omega, u0)?;
    stretching
        .sub(&transport)?
        .combine(&omega.laplacian(), 1.0 / reynolds)
}

/// Right-hand side `f = -curl(vorticity_rhs)` of `lap(du/dt) = f`.
pub fn forcing(u0: &WaveField, reynolds: f64) -> Result<WaveField> {
    Ok(curl(&vorticity_rhs(u0, reynolds)?).scale(-1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{build_grid, FlowParams, Poly, YProfile};

    #[test]
    fn uniform_field_has_no_divergence() {
        let g = build_grid(16).unwrap();
        let p = FlowParams::default();
        let mut u = ScalarField::zero(p, g.clone());
        u.set_harmonic(0, YProfile::from_poly(&g, Poly::constant(2.0)), YProfile::zeros(16))
            .unwrap();
        let f = WaveField::new(u.clone(), u.clone(), u).unwrap();
        assert!(divergence(&f).is_zero());
    }

    #[test]
    fn sine_profile_divergence() {
        let g = build_grid(16).unwrap();
        let p = FlowParams::new(1.7, 0.4, 10.0).unwrap();
        let mut u = ScalarField::zero(p, g.clone());
        let y2 = Poly::new(vec![0.0, 0.0, 1.0]);
        u.set_harmonic(1, YProfile::zeros(16), YProfile::from_poly(&g, y2.clone()))
            .unwrap();
        let z = ScalarField::zero(p, g.clone());
        let d = divergence(&WaveField::new(u, z.clone(), z).unwrap());
        let h = d.harmonic(1).unwrap();
        assert_eq!(h.cos.poly().unwrap(), &y2.scale(1.7));
        assert!(h.sin.is_zero());
    }

    #[test]
    fn zero_field_has_zero_forcing() {
        let g = build_grid(16).unwrap();
        let u = WaveField::zero(FlowParams::default(), g);
        assert!(forcing(&u, 80.0).unwrap().is_zero());
    }

    #[test]
    fn laplacian_of_wall_profile() {
        let g = build_grid(16).unwrap();
        let p = FlowParams::new(0.8, 1.3, 50.0).unwrap();
        let mut s = ScalarField::zero(p, g.clone());
        s.set_harmonic(0, YProfile::from_poly(&g, Poly::wall_factor(1)), YProfile::zeros(16))
            .unwrap();
        s.set_harmonic(1, YProfile::from_poly(&g, Poly::wall_factor(1)), YProfile::zeros(16))
            .unwrap();
        let l = s.laplacian();
        assert_eq!(l.harmonic(0).unwrap().cos.poly().unwrap(), &Poly::constant(2.0));
        let k2 = p.wavenumber_sq();
        let expect = &Poly::constant(2.0) - &Poly::wall_factor(1).scale(k2);
        let got = l.harmonic(1).unwrap().cos.poly().unwrap();
        for (a, b) in got.coeffs().iter().zip(expect.coeffs()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn strongly_divergent_field_rejected() {
        let g = build_grid(16).unwrap();
        let p = FlowParams::default();
        let mut v = ScalarField::zero(p, g.clone());
        v.set_harmonic(0, YProfile::from_poly(&g, Poly::new(vec![0.0, 1.0])), YProfile::zeros(16))
            .unwrap();
        let z = ScalarField::zero(p, g);
        let f = WaveField::new(z.clone(), v, z).unwrap();
        assert!(matches!(forcing(&f, 80.0), Err(Error::Domain(_))));
    }
}
