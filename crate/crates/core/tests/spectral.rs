mod common;

use channel_compat::spectral::{build_grid, harmonic_product, FlowParams, Poly, YProfile};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn differentiation_is_exact_for_polynomials(c in common::coeffs(12)) {
        let g = build_grid(24).unwrap();
        let p = Poly::new(c);
        let prof = YProfile::from_values(g.points().iter().map(|&y| p.eval(y)).collect());
        let d1 = prof.derivative(&g);
        let d2 = prof.second_derivative(&g);
        let (p1, p2) = (p.derivative(), p.nth_derivative(2));
        for (i, &y) in g.points().iter().enumerate() {
            prop_assert!((d1.values()[i] - p1.eval(y)).abs() < 1e-10);
            prop_assert!((d2.values()[i] - p2.eval(y)).abs() < 1e-8);
        }
    }

    #[test]
    fn evaluation_is_linear(
        p in common::params(),
        a in common::field_polys(),
        b in common::field_polys(),
        s in -3.0f64..3.0,
        x in 0.0f64..1.0, y in -1.0f64..1.0, z in 0.0f64..1.0,
    ) {
        let g = build_grid(20).unwrap();
        let (fa, fb) = (common::scalar(p, &g, &a), common::scalar(p, &g, &b));
        let (x, z) = (x * p.lx(), z * p.lz());
        let lhs = fa.combine(&fb, s).unwrap().eval(x, y, z).unwrap();
        let rhs = fa.eval(x, y, z).unwrap() + s * fb.eval(x, y, z).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + rhs.abs()));
    }

    #[test]
    fn product_matches_pointwise_and_commutes(
        p in common::params(),
        a in common::field_polys(),
        b in common::field_polys(),
        x in 0.0f64..1.0, y in -1.0f64..1.0, z in 0.0f64..1.0,
    ) {
        let g = build_grid(20).unwrap();
        let (fa, fb) = (common::scalar(p, &g, &a), common::scalar(p, &g, &b));
        let ab = harmonic_product(&fa, &fb).unwrap();
        let ba = harmonic_product(&fb, &fa).unwrap();
        prop_assert!(ab.sub(&ba).unwrap().max_coeff() < 1e-13);
        let (x, z) = (x * p.lx(), z * p.lz());
        let want = fa.eval(x, y, z).unwrap() * fb.eval(x, y, z).unwrap();
        prop_assert!((ab.eval(x, y, z).unwrap() - want).abs() < 1e-10);
    }

    #[test]
    fn product_is_bilinear(
        p in common::params(),
        a in common::field_polys(),
        b in common::field_polys(),
        c in common::field_polys(),
        s in -2.0f64..2.0,
    ) {
        let g = build_grid(20).unwrap();
        let (fa, fb, fc) = (common::scalar(p, &g, &a), common::scalar(p, &g, &b), common::scalar(p, &g, &c));
        let lhs = harmonic_product(&fa.combine(&fb, s).unwrap(), &fc).unwrap();
        let rhs = harmonic_product(&fa, &fc).unwrap().combine(&harmonic_product(&fb, &fc).unwrap(), s).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().max_coeff() < 1e-12);
    }
}

#[test]
fn grid_is_descending_with_walls_at_ends() {
    let g = build_grid(17).unwrap();
    assert_eq!(g.points()[0], 1.0);
    assert_eq!(g.points()[16], -1.0);
    assert!(g.points().windows(2).all(|w| w[0] > w[1]));
}

#[test]
fn rejects_tiny_grids_and_zero_wavenumbers() {
    assert!(build_grid(3).is_err());
    assert!(FlowParams::new(0.0, 0.0, 80.0).is_err());
    assert!(FlowParams::new(1.0, 1.0, -1.0).is_err());
}
