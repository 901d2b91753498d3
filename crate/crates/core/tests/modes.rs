use channel_compat::compat::{admissibility, check};
use channel_compat::modes::{mode_to_field, solve_orr_sommerfeld};
use channel_compat::spectral::FlowParams;

#[test]
fn leading_eigenvalues_are_resolved() {
    let p = FlowParams::default();
    let coarse = solve_orr_sommerfeld(&p, 48).unwrap();
    let fine = solve_orr_sommerfeld(&p, 64).unwrap();
    assert!(coarse.len() >= 5);
    for m in &coarse[..5] {
        let nearest = fine.iter().map(|f| (f.eigenvalue - m.eigenvalue).norm()).fold(f64::INFINITY, f64::min);
        assert!(nearest < 1e-6, "{} moved by {nearest:e}", m.eigenvalue);
    }
    assert!((coarse[0].eigenvalue.re + 0.15650).abs() < 1e-4);
    assert!((coarse[0].eigenvalue.im + 0.57643).abs() < 1e-4);
}

#[test]
fn flow_is_linearly_stable_at_default_parameters() {
    let modes = solve_orr_sommerfeld(&FlowParams::default(), 48).unwrap();
    assert!(modes.iter().all(|m| m.growth_rate() < 0.0));
    assert!(modes.windows(2).all(|w| w[0].growth_rate() >= w[1].growth_rate()));
}

#[test]
fn mode_fields_are_admissible_and_linearly_compatible() {
    let p = FlowParams::default();
    let modes = solve_orr_sommerfeld(&p, 48).unwrap();
    for m in &modes[..3] {
        let u = mode_to_field(m, 1e-3, true).unwrap();
        let adm = admissibility(&u);
        assert!(adm.passed(), "{:?}", adm.violations);
        assert!(adm.relative_divergence < 1e-10);
        // the eigenmode solves the problem linearised about the base flow,
        // so only the quadratic harmonics 0 and 2 carry a residual
        let rep = check(&u, &p, &m.grid, 1e-6).unwrap();
        let first = rep
            .tangential
            .entries
            .iter()
            .filter(|e| e.harmonic == 1)
            .map(|e| e.cos.abs().max(e.sin.abs()))
            .fold(0.0, f64::max);
        assert!(first <= 1e-6 * rep.tangential.scale, "{} j = 1 residual {first:e}", m.eigenvalue);
    }
}

#[test]
fn nonlinear_residual_grows_quadratically() {
    let p = FlowParams::default();
    let modes = solve_orr_sommerfeld(&p, 48).unwrap();
    let m = &modes[0];
    let harmonic_two = |amp: f64| {
        let u = mode_to_field(m, amp, true).unwrap();
        let rep = check(&u, &p, &m.grid, 1e-6).unwrap();
        rep.tangential.entries.iter().filter(|e| e.harmonic == 2).map(|e| e.cos.abs().max(e.sin.abs())).fold(0.0, f64::max)
    };
    let (a, b) = (harmonic_two(1e-3), harmonic_two(2e-3));
    assert!(a > 0.0);
    assert!((b / a - 4.0).abs() < 1e-3, "ratio {}", b / a);
}

#[test]
fn rejects_coarse_grids() {
    assert!(solve_orr_sommerfeld(&FlowParams::default(), 16).is_err());
}
