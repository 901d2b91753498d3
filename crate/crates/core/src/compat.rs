//! The compatibility verdict for an initial field: divergence defect of the
//! Dirichlet-solved velocity tendency and tangential momentum residual of the
//! Neumann-solved pressure at both walls.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fieldops::{divergence, relative_divergence, DIVERGENCE_REJECT, DIVERGENCE_WARN};
use crate::poisson::{solve_dudt, solve_pressure_detailed};
use crate::spectral::{ChebGrid, FlowParams, ScalarField, WaveField};

/// Default relative tolerance of the verdict.
pub const DEFAULT_TOLERANCE: f64 = 1e-7;
/// Wall velocity tolerated by the admissibility check, relative to the
/// largest profile coefficient (absolute below 1).
pub const NO_SLIP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Wall {
    /// `y = +1`
    Top,
    /// `y = -1`
    Bottom,
}

impl Wall {
    pub const BOTH: [Wall; 2] = [Wall::Top, Wall::Bottom];

    pub fn y(self) -> f64 {
        match self {
            Wall::Top => 1.0,
            Wall::Bottom => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    X,
    Z,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::X, Direction::Z];

    fn component(self) -> usize {
        match self {
            Direction::X => 0,
            Direction::Z => 2,
        }
    }
}

/// Fourier coefficients of the tangential residual for one wall, direction
/// and harmonic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualEntry {
    pub wall: Wall,
    pub direction: Direction,
    pub harmonic: usize,
    pub cos: f64,
    pub sin: f64,
}

/// Tangential momentum residual at the walls,
/// `(1/Re) lap(u_i) t_i - dp/dx_i t_i`, per harmonic.
///
/// The harmonic-0 coefficients are reported after removing the uniform mean
/// pressure gradient that best balances both walls; a periodic channel can
/// carry such a gradient, and it is listed in `mean_pressure_gradient`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualTable {
    pub entries: Vec<ResidualEntry>,
    /// Mean pressure gradient `[dP/dx, dP/dz]` absorbed into harmonic 0.
    pub mean_pressure_gradient: [f64; 2],
    /// Largest wall magnitude of the pressure and viscous terms.
    pub scale: f64,
}

impl ResidualTable {
    pub fn get(&self, wall: Wall, direction: Direction, harmonic: usize) -> Option<(f64, f64)> {
        self.entries
            .iter()
            .find(|e| e.wall == wall && e.direction == direction && e.harmonic == harmonic)
            .map(|e| (e.cos, e.sin))
    }

    pub fn max_harmonic(&self) -> usize {
        self.entries.iter().map(|e| e.harmonic).max().unwrap_or(0)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.cos.abs().max(e.sin.abs()))
            .fold(0.0, f64::max)
    }

    /// Max residual relative to `scale`; zero when the residual vanishes.
    pub fn relative(&self) -> f64 {
        relative_to(self.max_abs(), self.scale)
    }

    /// Residual split into the component along the wavevector `(alpha, beta)`
    /// and the component across it, per wall and harmonic `j >= 1`:
    /// `(wall, j, [along_cos, along_sin], [across_cos, across_sin])`.
    pub fn wavevector_split(&self, params: &FlowParams) -> Vec<(Wall, usize, [f64; 2], [f64; 2])> {
        let k = params.wavenumber();
        let (ex, ez) = (params.alpha / k, params.beta / k);
        let mut out = Vec::new();
        for wall in Wall::BOTH {
            for j in 1..=self.max_harmonic() {
                let (Some(x), Some(z)) = (
                    self.get(wall, Direction::X, j),
                    self.get(wall, Direction::Z, j),
                ) else {
                    continue;
                };
                out.push((
                    wall,
                    j,
                    [ex * x.0 + ez * z.0, ex * x.1 + ez * z.1],
                    [ez * x.0 - ex * z.0, ez * x.1 - ex * z.1],
                ));
            }
        }
        out
    }

    /// Largest along-wavevector and across-wavevector residual relative to `scale`.
    pub fn split_relative(&self, params: &FlowParams) -> (f64, f64) {
        let (mut along, mut across) = (0.0f64, 0.0f64);
        for (_, _, a, c) in self.wavevector_split(params) {
            along = along.max(a[0].abs()).max(a[1].abs());
            across = across.max(c[0].abs()).max(c[1].abs());
        }
        (relative_to(along, self.scale), relative_to(across, self.scale))
    }
}

fn relative_to(value: f64, scale: f64) -> f64 {
    if value == 0.0 {
        0.0
    } else {
        value / scale.max(f64::MIN_POSITIVE)
    }
}

/// Tangential residual of the wall momentum balance for `u0` under the
/// pressure `p0` produced by [`crate::poisson::solve_pressure`].
pub fn tangential_residual(u0: &WaveField, p0: &ScalarField, reynolds: f64) -> ResidualTable {
    let u = u0.resample(p0.grid());
    let mut entries = Vec::new();
    let mut mean_pressure_gradient = [0.0; 2];
    let mut scale: f64 = 0.0;
    for (d, direction) in Direction::BOTH.into_iter().enumerate() {
        let pressure = match direction {
            Direction::X => p0.dx(),
            Direction::Z => p0.dz(),
        };
        let viscous = u.component(direction.component()).laplacian().scale(1.0 / reynolds);
        let top_j = pressure.max_harmonic().max(viscous.max_harmonic());
        let n = u.grid().n();
        let zero = crate::spectral::Harmonic::zeros(n);
        for j in 0..=top_j {
            let hp = pressure.harmonic(j).unwrap_or(&zero);
            let hv = viscous.harmonic(j).unwrap_or(&zero);
            let at = |wall: Wall, prof: &crate::spectral::YProfile| match wall {
                Wall::Top => prof.top(),
                Wall::Bottom => prof.bottom(),
            };
            let mut rows = Vec::with_capacity(2);
            for wall in Wall::BOTH {
                let (pc, ps) = (at(wall, &hp.cos), at(wall, &hp.sin));
                let (vc, vs) = (at(wall, &hv.cos), at(wall, &hv.sin));
                scale = scale.max(pc.abs()).max(ps.abs()).max(vc.abs()).max(vs.abs());
                rows.push(ResidualEntry {
                    wall,
                    direction,
                    harmonic: j,
                    cos: vc - pc,
                    sin: vs - ps,
                });
            }
            if j == 0 {
                // uniform gradient G enters as -G in every wall residual
                let g = (rows[0].cos + rows[1].cos) / 2.0;
                rows[0].cos -= g;
                rows[1].cos -= g;
                mean_pressure_gradient[d] = g;
            }
            entries.extend(rows);
        }
    }
    ResidualTable {
        entries,
        mean_pressure_gradient,
        scale,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DefectNorms {
    /// Max-abs over collocation points and sampled phase.
    pub max_abs: f64,
    /// RMS over an x-z period, integrated over the channel height.
    pub l2: f64,
}

/// Divergence of a velocity tendency and its norms.
pub fn divergence_defect(dudt: &WaveField, grid: &Arc<ChebGrid>) -> (ScalarField, DefectNorms) {
    let d = divergence(&dudt.resample(grid));
    let norms = DefectNorms {
        max_abs: d.max_abs(),
        l2: d.l2(),
    };
    (d, norms)
}

/// Divergence implied by a tangential residual: the harmonic extension of
/// the wall residual into the channel, differentiated along the phase.
///
/// For a field checked on a fine enough grid this equals the divergence
/// defect of the Dirichlet-solved tendency, which is why the defect only
/// detects the residual component along the wavevector.
pub fn defect_from_residual(table: &ResidualTable, params: &FlowParams, grid: &Arc<ChebGrid>) -> ScalarField {
    let n = grid.n();
    let k = params.wavenumber();
    let mut out = ScalarField::zero(*params, grid.clone());
    for j in 1..=table.max_harmonic() {
        let rate = j as f64 * k;
        let ext = |top: f64, bottom: f64| -> Vec<f64> {
            let s = (2.0 * rate).sinh();
            grid.points()
                .iter()
                .map(|&y| (top * (rate * (1.0 + y)).sinh() + bottom * (rate * (1.0 - y)).sinh()) / s)
                .collect()
        };
        let val = |wall, dir| table.get(wall, dir, j).unwrap_or((0.0, 0.0));
        let (xt, xb) = (val(Wall::Top, Direction::X), val(Wall::Bottom, Direction::X));
        let (zt, zb) = (val(Wall::Top, Direction::Z), val(Wall::Bottom, Direction::Z));
        // extension h has wall values equal to minus the residual
        let hx_c = ext(-xt.0, -xb.0);
        let hx_s = ext(-xt.1, -xb.1);
        let hz_c = ext(-zt.0, -zb.0);
        let hz_s = ext(-zt.1, -zb.1);
        let (ja, jb) = (j as f64 * params.alpha, j as f64 * params.beta);
        let cos: Vec<f64> = (0..n).map(|i| ja * hx_s[i] + jb * hz_s[i]).collect();
        let sin: Vec<f64> = (0..n).map(|i| -ja * hx_c[i] - jb * hz_c[i]).collect();
        out.set_harmonic(
            j,
            crate::spectral::YProfile::from_values(cos),
            crate::spectral::YProfile::from_values(sin),
        )
        .expect("grid-sized profiles");
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Compatible,
    Incompatible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    NoSlip,
    Divergence,
}

/// One failed admissibility constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// 1-based velocity component, for no-slip violations.
    pub component: Option<usize>,
    pub harmonic: Option<usize>,
    pub wall: Option<Wall>,
    pub profile: Option<String>,
    pub magnitude: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ViolationKind::NoSlip => write!(
                f,
                "no-slip: u{} harmonic {} {} profile is {:e} at y = {:+}",
                self.component.unwrap_or(0),
                self.harmonic.unwrap_or(0),
                self.profile.as_deref().unwrap_or("?"),
                self.magnitude,
                self.wall.map(Wall::y).unwrap_or(f64::NAN)
            ),
            ViolationKind::Divergence => {
                write!(f, "continuity: relative divergence {:e}", self.magnitude)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Admissibility {
    pub violations: Vec<Violation>,
    pub relative_divergence: f64,
    pub max_wall_velocity: f64,
}

impl Admissibility {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// No-slip on both walls and continuity, with every violation listed.
/// Periodicity holds by construction of the representation.
pub fn admissibility(u0: &WaveField) -> Admissibility {
    let wall_tol = NO_SLIP_TOL
        * u0.components()
            .iter()
            .map(ScalarField::max_coeff)
            .fold(1.0, f64::max);
    let mut violations = Vec::new();
    let mut max_wall_velocity: f64 = 0.0;
    for (k, comp) in u0.components().iter().enumerate() {
        for (j, h) in comp.harmonics().iter().enumerate() {
            for (name, prof) in [("cosine", &h.cos), ("sine", &h.sin)] {
                for (wall, v) in [(Wall::Top, prof.top()), (Wall::Bottom, prof.bottom())] {
                    max_wall_velocity = max_wall_velocity.max(v.abs());
                    if v.abs() > wall_tol {
                        violations.push(Violation {
                            kind: ViolationKind::NoSlip,
                            component: Some(k + 1),
                            harmonic: Some(j),
                            wall: Some(wall),
                            profile: Some(name.into()),
                            magnitude: v,
                        });
                    }
                }
            }
        }
    }
    let rel = relative_divergence(u0);
    if rel > DIVERGENCE_REJECT {
        violations.push(Violation {
            kind: ViolationKind::Divergence,
            component: None,
            harmonic: None,
            wall: None,
            profile: None,
            magnitude: rel,
        });
    }
    Admissibility {
        violations,
        relative_divergence: rel,
        max_wall_velocity,
    }
}

/// Everything computed by [`check`].
#[derive(Debug, Clone)]
pub struct CompatReport {
    pub params: FlowParams,
    pub grid_points: usize,
    pub tolerance: f64,
    pub dudt: WaveField,
    pub divergence_defect: ScalarField,
    pub defect_norms: DefectNorms,
    /// Defect max-abs relative to the largest of the three divergence terms.
    pub defect_relative: f64,
    pub tangential: ResidualTable,
    pub tangential_relative: f64,
    /// Relative mismatch of the harmonic-0 pressure Neumann constraint.
    pub pressure_solvability: f64,
    pub verdict: Verdict,
}

impl CompatReport {
    pub fn defect_flagged(&self) -> bool {
        self.defect_relative > self.tolerance
    }

    pub fn residual_flagged(&self) -> bool {
        self.tangential_relative > self.tolerance
    }

    /// Whether both diagnostics reach the same conclusion.
    pub fn diagnostics_agree(&self) -> bool {
        self.defect_flagged() == self.residual_flagged()
    }
}

/// Runs the full compatibility check of `u0` on `grid`.
///
/// `params` supplies the Reynolds number; its wavenumbers must match the field.
pub fn check(u0: &WaveField, params: &FlowParams, grid: &Arc<ChebGrid>, tol: f64) -> Result<CompatReport> {
    params.validate()?;
    let fp = u0.params();
    if fp.alpha != params.alpha || fp.beta != params.beta {
        return Err(Error::Config(format!(
            "field wavenumbers ({}, {}) differ from requested ({}, {})",
            fp.alpha, fp.beta, params.alpha, params.beta
        )));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
    }
    let u = u0.resample(grid);
    let adm = admissibility(&u);
    if !adm.passed() {
        return Err(Error::Inadmissible(adm.violations));
    }
    if adm.relative_divergence > DIVERGENCE_WARN {
        log::warn!(
            "initial field divergence {:e} exceeds {:e}",
            adm.relative_divergence,
            DIVERGENCE_WARN
        );
    }
    let re = params.reynolds;
    let dudt = solve_dudt(&u, re, grid)?;
    let (defect, defect_norms) = divergence_defect(&dudt, grid);
    let defect_relative = relative_divergence(&dudt);
    let pressure = solve_pressure_detailed(&u, re, grid)?;
    let tangential = tangential_residual(&u, &pressure.pressure, re);
    let tangential_relative = tangential.relative();
    let verdict = if defect_relative <= tol && tangential_relative <= tol {
        Verdict::Compatible
    } else {
        Verdict::Incompatible
    };
    Ok(CompatReport {
        params: *params,
        grid_points: grid.n(),
        tolerance: tol,
        dudt,
        divergence_defect: defect,
        defect_norms,
        defect_relative,
        tangential,
        tangential_relative,
        pressure_solvability: pressure.solvability_residual,
        verdict,
    })
}
