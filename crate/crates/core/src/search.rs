//! Root finding for compatible fields with a wall-normal component.
//!
//! Harmonic-1 fields with `u1 = c1(y) (y^2-1)`, `u2 = c2(y) (y^2-1)^2` for
//! polynomial `c1`, `c2`, and `u3` from continuity. The unknown polynomial
//! coefficients are driven to a root of the divergence defect and the wall
//! residual by Levenberg–Marquardt with a finite-difference Jacobian.

use std::sync::Arc;

use log::{debug, info};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::compat::{check, CompatReport, Direction, Verdict, Wall};
use crate::error::{Error, Result};
use crate::spectral::{ChebGrid, FlowParams, Poly, ScalarField, WaveField, YProfile};

/// Relative defect and residual accepted as a root.
pub const SEARCH_TOL: f64 = 1e-10;
/// Smallest wall-normal share of the field norm for a nontrivial root.
pub const NONTRIVIAL_RATIO: f64 = 1e-3;
/// Relative step of the finite-difference Jacobian.
pub const JACOBIAN_STEP: f64 = 1e-7;

/// One of the four free profiles of the ansatz.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnsatzProfile {
    U1Cos,
    U1Sin,
    U2Cos,
    U2Sin,
}

impl AnsatzProfile {
    pub const ALL: [AnsatzProfile; 4] = [
        AnsatzProfile::U1Cos,
        AnsatzProfile::U1Sin,
        AnsatzProfile::U2Cos,
        AnsatzProfile::U2Sin,
    ];

    fn wall_power(self) -> u32 {
        match self {
            AnsatzProfile::U1Cos | AnsatzProfile::U1Sin => 1,
            AnsatzProfile::U2Cos | AnsatzProfile::U2Sin => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    /// Degree of the free polynomial factor.
    pub degree: usize,
    pub params: FlowParams,
    /// Profiles varied by the search; the others keep their seed values.
    pub free: Vec<AnsatzProfile>,
}

impl AnsatzSpec {
    pub fn new(degree: usize, params: FlowParams) -> Self {
        AnsatzSpec {
            degree,
            params,
            free: AnsatzProfile::ALL.to_vec(),
        }
    }

    pub fn unknowns(&self) -> usize {
        (self.degree + 1) * self.free.len()
    }

    fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.free.is_empty() {
            return Err(Error::Config("ansatz has no free profiles".into()));
        }
        Ok(())
    }
}

/// Ascending-power coefficients of the four polynomial factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnsatzCoeffs {
    pub u1_cos: Vec<f64>,
    pub u1_sin: Vec<f64>,
    pub u2_cos: Vec<f64>,
    pub u2_sin: Vec<f64>,
}

impl AnsatzCoeffs {
    pub fn zeros(degree: usize) -> Self {
        let z = vec![0.0; degree + 1];
        AnsatzCoeffs {
            u1_cos: z.clone(),
            u1_sin: z.clone(),
            u2_cos: z.clone(),
            u2_sin: z,
        }
    }

    /// The four-digit coefficients of the published compatible example at
    /// `(alpha, beta, Re) = (1, 1, 80)`.
    pub fn published() -> Self {
        AnsatzCoeffs {
            u1_cos: vec![0.6324, 0.9134, 0.127, 0.9058, 0.8147],
            u1_sin: vec![0.9649, 0.9575, 0.5469, 0.2785, 0.09754],
            u2_cos: vec![1.599, 0.4689, 0.7068, -0.1986, -0.6011],
            u2_sin: vec![1.537, 0.3238, 0.8618, 0.2864, 0.1063],
        }
    }

    pub fn profile(&self, p: AnsatzProfile) -> &[f64] {
        match p {
            AnsatzProfile::U1Cos => &self.u1_cos,
            AnsatzProfile::U1Sin => &self.u1_sin,
            AnsatzProfile::U2Cos => &self.u2_cos,
            AnsatzProfile::U2Sin => &self.u2_sin,
        }
    }

    fn profile_mut(&mut self, p: AnsatzProfile) -> &mut Vec<f64> {
        match p {
            AnsatzProfile::U1Cos => &mut self.u1_cos,
            AnsatzProfile::U1Sin => &mut self.u1_sin,
            AnsatzProfile::U2Cos => &mut self.u2_cos,
            AnsatzProfile::U2Sin => &mut self.u2_sin,
        }
    }

    fn degree_ok(&self, degree: usize) -> bool {
        AnsatzProfile::ALL.iter().all(|&p| self.profile(p).len() == degree + 1)
    }

    /// Free coefficients packed in the order of `spec.free`.
    pub fn pack(&self, spec: &AnsatzSpec) -> Vec<f64> {
        spec.free.iter().flat_map(|&p| self.profile(p).iter().copied()).collect()
    }

    /// Copy with the free profiles replaced from `x`.
    pub fn unpack(&self, spec: &AnsatzSpec, x: &[f64]) -> Result<Self> {
        if x.len() != spec.unknowns() {
            return Err(Error::Config(format!(
                "expected {} coefficients, got {}",
                spec.unknowns(),
                x.len()
            )));
        }
        let mut out = self.clone();
        for (chunk, &p) in x.chunks(spec.degree + 1).zip(&spec.free) {
            *out.profile_mut(p) = chunk.to_vec();
        }
        Ok(out)
    }

    fn u2_norm(&self) -> f64 {
        self.u2_cos.iter().chain(&self.u2_sin).map(|c| c * c).sum::<f64>().sqrt()
    }
}

fn full_profile(coeffs: &[f64], p: AnsatzProfile) -> Poly {
    &Poly::new(coeffs.to_vec()) * &Poly::wall_factor(p.wall_power())
}

/// Field of the ansatz; `u3` solves continuity exactly at harmonic 1.
pub fn assemble(spec: &AnsatzSpec, coeffs: &AnsatzCoeffs, grid: &Arc<ChebGrid>) -> Result<WaveField> {
    spec.validate()?;
    if !coeffs.degree_ok(spec.degree) {
        return Err(Error::Config(format!(
            "every profile needs {} coefficients for degree {}",
            spec.degree + 1,
            spec.degree
        )));
    }
    let (alpha, beta) = (spec.params.alpha, spec.params.beta);
    let a1 = full_profile(&coeffs.u1_cos, AnsatzProfile::U1Cos);
    let b1 = full_profile(&coeffs.u1_sin, AnsatzProfile::U1Sin);
    let a2 = full_profile(&coeffs.u2_cos, AnsatzProfile::U2Cos);
    let b2 = full_profile(&coeffs.u2_sin, AnsatzProfile::U2Sin);
    let a3 = (&b2.derivative() - &a1.scale(alpha)).scale(1.0 / beta);
    let b3 = (&a2.derivative() + &b1.scale(alpha)).scale(-1.0 / beta);
    let field = |c: Poly, s: Poly| -> Result<ScalarField> {
        let mut f = ScalarField::zero(spec.params, grid.clone());
        f.set_harmonic(1, YProfile::from_poly(grid, c), YProfile::from_poly(grid, s))?;
        Ok(f)
    };
    WaveField::new(field(a1, b1)?, field(a2, b2)?, field(a3, b3)?)
}

/// Harmonics of the defect sampled by [`residual`].
const DEFECT_HARMONICS: [usize; 2] = [1, 2];

fn residual_from_report(report: &CompatReport) -> Vec<f64> {
    let defect = &report.divergence_defect;
    let n = defect.grid().n();
    let mut out = Vec::new();
    for j in DEFECT_HARMONICS {
        if let Some(h) = defect.harmonic(j) {
            out.extend_from_slice(&h.cos.values()[1..n - 1]);
            out.extend_from_slice(&h.sin.values()[1..n - 1]);
        } else {
            out.extend(std::iter::repeat_n(0.0, 2 * (n - 2)));
        }
    }
    for j in DEFECT_HARMONICS {
        for wall in Wall::BOTH {
            for d in Direction::BOTH {
                let (c, s) = report.tangential.get(wall, d, j).unwrap_or((0.0, 0.0));
                out.push(c);
                out.push(s);
            }
        }
    }
    out
}

fn evaluate(spec: &AnsatzSpec, coeffs: &AnsatzCoeffs, grid: &Arc<ChebGrid>) -> Result<CompatReport> {
    let u = assemble(spec, coeffs, grid)?;
    check(&u, &spec.params, grid, SEARCH_TOL)
}

/// Defect samples at interior nodes for harmonics 1 and 2 (cosine, then
/// sine), followed by the wall residual coefficients of the same harmonics.
pub fn residual(spec: &AnsatzSpec, coeffs: &AnsatzCoeffs, grid: &Arc<ChebGrid>) -> Result<Vec<f64>> {
    Ok(residual_from_report(&evaluate(spec, coeffs, grid)?))
}

/// Starting point of a search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchSeed {
    Coeffs(AnsatzCoeffs),
    Random(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub max_iterations: usize,
    /// Additional random starts after a failed or trivial attempt.
    pub max_restarts: usize,
    pub tolerance: f64,
    /// Hold the norm of the wall-normal coefficients at its seed value; the
    /// root set is invariant under scaling, so this keeps the iteration off
    /// the trivial root.
    pub anchor_norm: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            max_iterations: 50,
            max_restarts: 4,
            tolerance: SEARCH_TOL,
            anchor_norm: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub attempt: usize,
    pub iteration: usize,
    pub residual_norm: f64,
    pub defect_relative: f64,
    pub tangential_relative: f64,
    pub damping: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub coeffs: AnsatzCoeffs,
    pub success: bool,
    /// Converged to a field with negligible wall-normal component.
    pub trivial: bool,
    pub residual_norm: f64,
    pub defect_relative: f64,
    pub tangential_relative: f64,
    /// Wall-normal share `|u2| / |u|` of the final field.
    pub wall_normal_ratio: f64,
    pub attempts: usize,
    pub iterations: usize,
    pub trace: Vec<TraceEntry>,
}

fn wall_normal_ratio(u: &WaveField) -> f64 {
    let total = u.l2();
    if total == 0.0 {
        0.0
    } else {
        u.component(1).l2() / total
    }
}

fn random_coeffs(degree: usize, rng: &mut ChaCha8Rng) -> AnsatzCoeffs {
    let mut draw = || (0..=degree).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<f64>>();
    AnsatzCoeffs {
        u1_cos: draw(),
        u1_sin: draw(),
        u2_cos: draw(),
        u2_sin: draw(),
    }
}

struct Attempt {
    coeffs: AnsatzCoeffs,
    report: CompatReport,
    norm: f64,
    iterations: usize,
}

/// Searches for a compatible field, restarting from random coefficients
/// when an attempt fails or lands on the trivial root. Failure is reported
/// in the outcome, carrying the best iterate.
pub fn find_compatible(
    spec: &AnsatzSpec,
    seed: &SearchSeed,
    options: &SearchOptions,
    grid: &Arc<ChebGrid>,
) -> Result<SearchOutcome> {
    spec.validate()?;
    let (mut rng, mut start) = match seed {
        SearchSeed::Coeffs(c) => {
            if !c.degree_ok(spec.degree) {
                return Err(Error::Config(format!(
                    "seed coefficients do not match degree {}",
                    spec.degree
                )));
            }
            (ChaCha8Rng::seed_from_u64(0), c.clone())
        }
        SearchSeed::Random(s) => {
            let mut rng = ChaCha8Rng::seed_from_u64(*s);
            let c = random_coeffs(spec.degree, &mut rng);
            (rng, c)
        }
    };
    let mut trace = Vec::new();
    let mut best: Option<(Attempt, bool)> = None;
    let mut total_iterations = 0;
    for attempt in 0..=options.max_restarts {
        let result = levenberg_marquardt(spec, &start, options, grid, attempt, &mut trace)?;
        total_iterations += result.iterations;
        let u = assemble(spec, &result.coeffs, grid)?;
        let trivial = wall_normal_ratio(&u) < NONTRIVIAL_RATIO;
        let ok = converged(&result.report, options.tolerance);
        info!(
            "attempt {attempt}: defect {:.3e}, residual {:.3e}, trivial {trivial}",
            result.report.defect_relative, result.report.tangential_relative
        );
        let better = match &best {
            None => true,
            Some((b, b_trivial)) => {
                (ok && !trivial, -result.norm) > (converged(&b.report, options.tolerance) && !b_trivial, -b.norm)
            }
        };
        let done = ok && !trivial;
        if better {
            best = Some((result, trivial));
        }
        if done {
            break;
        }
        start = random_coeffs(spec.degree, &mut rng);
    }
    let (best, trivial) = best.expect("at least one attempt");
    let u = assemble(spec, &best.coeffs, grid)?;
    let success = converged(&best.report, options.tolerance) && !trivial;
    Ok(SearchOutcome {
        success,
        trivial,
        residual_norm: best.norm,
        defect_relative: best.report.defect_relative,
        tangential_relative: best.report.tangential_relative,
        wall_normal_ratio: wall_normal_ratio(&u),
        attempts: trace.last().map_or(1, |t: &TraceEntry| t.attempt + 1),
        iterations: total_iterations,
        coeffs: best.coeffs,
        trace,
    })
}

fn converged(report: &CompatReport, tol: f64) -> bool {
    report.verdict == Verdict::Compatible || (report.defect_relative <= tol && report.tangential_relative <= tol)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Residual vector used by the root finder: [`residual`] plus the optional
/// norm anchor.
fn objective(
    spec: &AnsatzSpec,
    base: &AnsatzCoeffs,
    x: &[f64],
    anchor: Option<f64>,
    grid: &Arc<ChebGrid>,
) -> Result<(Vec<f64>, CompatReport)> {
    let coeffs = base.unpack(spec, x)?;
    let report = evaluate(spec, &coeffs, grid)?;
    let mut r = residual_from_report(&report);
    if let Some(target) = anchor {
        r.push(coeffs.u2_norm() - target);
    }
    Ok((r, report))
}

fn levenberg_marquardt(
    spec: &AnsatzSpec,
    start: &AnsatzCoeffs,
    options: &SearchOptions,
    grid: &Arc<ChebGrid>,
    attempt: usize,
    trace: &mut Vec<TraceEntry>,
) -> Result<Attempt> {
    let anchor_free = spec
        .free
        .iter()
        .any(|p| matches!(p, AnsatzProfile::U2Cos | AnsatzProfile::U2Sin));
    let target = start.u2_norm();
    let anchor = (options.anchor_norm && anchor_free && target > 0.0).then_some(target);
    let mut x = start.pack(spec);
    let (mut r, mut report) = objective(spec, start, &x, anchor, grid)?;
    let mut mu = 1e-3;
    let mut iterations = 0;
    let record = |trace: &mut Vec<TraceEntry>, it: usize, r: &[f64], rep: &CompatReport, mu: f64| {
        trace.push(TraceEntry {
            attempt,
            iteration: it,
            residual_norm: norm(r),
            defect_relative: rep.defect_relative,
            tangential_relative: rep.tangential_relative,
            damping: mu,
        })
    };
    record(trace, 0, &r, &report, mu);
    while iterations < options.max_iterations && !converged(&report, options.tolerance) {
        iterations += 1;
        let jac = jacobian(spec, start, &x, &r, anchor, grid)?;
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let grad = &jt * DVector::from_column_slice(&r);
        let mut accepted = false;
        for _ in 0..12 {
            let mut lhs = jtj.clone();
            for i in 0..lhs.nrows() {
                lhs[(i, i)] += mu * (jtj[(i, i)] + 1e-12);
            }
            let Some(step) = lhs.lu().solve(&(-&grad)) else {
                mu *= 10.0;
                continue;
            };
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let (r_new, rep_new) = objective(spec, start, &trial, anchor, grid)?;
            if norm(&r_new) < norm(&r) {
                x = trial;
                r = r_new;
                report = rep_new;
                mu = (mu / 5.0).max(1e-15);
                accepted = true;
                break;
            }
            mu *= 4.0;
        }
        record(trace, iterations, &r, &report, mu);
        debug!("iteration {iterations}: |r| = {:.3e}, mu = {mu:.1e}", norm(&r));
        if !accepted {
            break;
        }
    }
    let norm = norm(&r);
    Ok(Attempt {
        coeffs: start.unpack(spec, &x)?,
        report,
        norm,
        iterations,
    })
}

fn jacobian(
    spec: &AnsatzSpec,
    base: &AnsatzCoeffs,
    x: &[f64],
    r0: &[f64],
    anchor: Option<f64>,
    grid: &Arc<ChebGrid>,
) -> Result<DMatrix<f64>> {
    let mut jac = DMatrix::zeros(r0.len(), x.len());
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        let h = JACOBIAN_STEP * x[i].abs().max(1.0);
        xp[i] = x[i] + h;
        let (r, _) = objective(spec, base, &xp, anchor, grid)?;
        xp[i] = x[i];
        for (k, (a, b)) in r.iter().zip(r0).enumerate() {
            jac[(k, i)] = (a - b) / h;
        }
    }
    Ok(jac)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldops::relative_divergence;
    use crate::spectral::build_grid;

    #[test]
    fn zero_coeffs_give_zero_field() {
        let g = build_grid(24).unwrap();
        let spec = AnsatzSpec::new(4, FlowParams::default());
        let u = assemble(&spec, &AnsatzCoeffs::zeros(4), &g).unwrap();
        assert!(u.is_zero());
    }

    #[test]
    fn published_field_is_admissible() {
        let g = build_grid(32).unwrap();
        let spec = AnsatzSpec::new(4, FlowParams::default());
        let u = assemble(&spec, &AnsatzCoeffs::published(), &g).unwrap();
        assert!(relative_divergence(&u) < 1e-12);
        assert!(crate::compat::admissibility(&u).passed());
    }

    #[test]
    fn pack_roundtrip() {
        let mut spec = AnsatzSpec::new(4, FlowParams::default());
        spec.free = vec![AnsatzProfile::U2Sin, AnsatzProfile::U1Cos];
        let c = AnsatzCoeffs::published();
        let x = c.pack(&spec);
        assert_eq!(x[0], 1.537);
        assert_eq!(c.unpack(&spec, &x).unwrap(), c);
    }
}
