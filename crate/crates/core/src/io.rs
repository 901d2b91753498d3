//! Field files, report JSON and plot-ready CSV output.
//!
//! A field file lists the harmonics of each velocity component:
//!
//! ```json
//! {
//!   "schema": "channel-compat/field/v1",
//!   "params": {"alpha": 1.0, "beta": 1.0, "reynolds": 80.0},
//!   "harmonics": [
//!     {"j": 1,
//!      "u2": {"cos": [1.0, 0.0, -2.0, 0.0, 1.0]},
//!      "u3": "continuity"}
//!   ]
//! }
//! ```
//!
//! A profile is either an array of polynomial coefficients in ascending
//! powers of `y` or `{"samples": [...]}` with values on Chebyshev–Gauss–Lobatto
//! points ordered from `y = 1` down to `y = -1`. Omitted profiles and
//! components are zero. `"u3": "continuity"` derives the spanwise component
//! of harmonic `j >= 1` from the other two.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::compat::{CompatReport, ResidualEntry, Verdict};
use crate::error::{Error, Result};
use crate::spectral::{build_grid, ChebGrid, FlowParams, Poly, ScalarField, WaveField, YProfile};

pub const FIELD_SCHEMA: &str = "channel-compat/field/v1";
pub const REPORT_SCHEMA: &str = "channel-compat/report/v1";

/// Columns of the `x`-`y` evaluation grid.
pub const SLICE_NX: usize = 128;
/// Rows of the `x`-`y` evaluation grid, uniform in `y`.
pub const SLICE_NY: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProfileSpec {
    Poly(Vec<f64>),
    Samples { samples: Vec<f64> },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cos: Option<ProfileSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sin: Option<ProfileSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpanwiseSpec {
    Derived(Derived),
    Given(ComponentSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Derived {
    Continuity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarmonicSpec {
    pub j: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u1: Option<ComponentSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u2: Option<ComponentSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u3: Option<SpanwiseSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldFile {
    pub schema: String,
    pub params: FlowParams,
    #[serde(default)]
    pub harmonics: Vec<HarmonicSpec>,
}

impl FieldFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: FieldFile = serde_json::from_str(text)
            .map_err(|e| Error::FieldFile(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        if file.schema != FIELD_SCHEMA {
            return Err(Error::FieldFile(format!(
                "schema: expected \"{FIELD_SCHEMA}\", found \"{}\"",
                file.schema
            )));
        }
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    /// Builds the field on `grid`. Polynomial profiles stay exact.
    pub fn to_field(&self, grid: &Arc<ChebGrid>) -> Result<WaveField> {
        self.params
            .validate()
            .map_err(|e| Error::FieldFile(format!("params: {e}")))?;
        let p = self.params;
        let mut comps = [
            ScalarField::zero(p, grid.clone()),
            ScalarField::zero(p, grid.clone()),
            ScalarField::zero(p, grid.clone()),
        ];
        let mut seen = std::collections::BTreeSet::new();
        for (idx, h) in self.harmonics.iter().enumerate() {
            let at = |what: &str| format!("harmonics[{idx}] (j = {}).{what}", h.j);
            if !seen.insert(h.j) {
                return Err(Error::FieldFile(format!("{}: duplicate harmonic", at("j"))));
            }
            let u1 = component(h.u1.as_ref(), grid, &at("u1"))?;
            let u2 = component(h.u2.as_ref(), grid, &at("u2"))?;
            let u3 = match &h.u3 {
                Some(SpanwiseSpec::Derived(Derived::Continuity)) => {
                    if h.j == 0 {
                        return Err(Error::FieldFile(format!(
                            "{}: continuity does not determine the mean spanwise flow",
                            at("u3")
                        )));
                    }
                    continuity_u3(&p, h.j, &u1, &u2, grid)
                }
                Some(SpanwiseSpec::Given(c)) => component(Some(c), grid, &at("u3"))?,
                None => component(None, grid, &at("u3"))?,
            };
            for (field, (c, s), name) in [(0, u1, "u1"), (1, u2, "u2"), (2, u3, "u3")] {
                comps[field]
                    .set_harmonic(h.j, c, s)
                    .map_err(|e| Error::FieldFile(format!("{}: {e}", at(name))))?;
            }
        }
        let [u1, u2, u3] = comps;
        WaveField::new(u1, u2, u3)
    }

    /// Field file for `u`. Profiles with an exact polynomial are written as
    /// coefficients, others as samples.
    pub fn from_field(u: &WaveField) -> Self {
        let mut harmonics = Vec::new();
        for j in 0..=u.max_harmonic() {
            let comp = |k: usize| -> Option<ComponentSpec> {
                let h = u.component(k).harmonic(j)?;
                let spec = ComponentSpec {
                    cos: profile_spec(&h.cos),
                    sin: profile_spec(&h.sin),
                };
                (spec.cos.is_some() || spec.sin.is_some()).then_some(spec)
            };
            let (u1, u2, u3) = (comp(0), comp(1), comp(2));
            if u1.is_none() && u2.is_none() && u3.is_none() {
                continue;
            }
            harmonics.push(HarmonicSpec {
                j,
                u1,
                u2,
                u3: u3.map(SpanwiseSpec::Given),
            });
        }
        FieldFile {
            schema: FIELD_SCHEMA.to_string(),
            params: *u.params(),
            harmonics,
        }
    }
}

fn profile_spec(p: &YProfile) -> Option<ProfileSpec> {
    if p.is_zero() {
        return None;
    }
    Some(match p.poly() {
        Some(poly) => ProfileSpec::Poly(poly.coeffs().to_vec()),
        None => ProfileSpec::Samples {
            samples: p.values().to_vec(),
        },
    })
}

fn profile(spec: Option<&ProfileSpec>, grid: &Arc<ChebGrid>, at: &str) -> Result<YProfile> {
    match spec {
        None => Ok(YProfile::zeros(grid.n())),
        Some(ProfileSpec::Poly(c)) => {
            if let Some(bad) = c.iter().position(|v| !v.is_finite()) {
                return Err(Error::FieldFile(format!("{at}[{bad}]: coefficient is not finite")));
            }
            Ok(YProfile::from_poly(grid, Poly::new(c.clone())))
        }
        Some(ProfileSpec::Samples { samples }) => {
            if let Some(bad) = samples.iter().position(|v| !v.is_finite()) {
                return Err(Error::FieldFile(format!("{at}.samples[{bad}]: value is not finite")));
            }
            if samples.len() == grid.n() {
                return Ok(YProfile::from_values(samples.clone()));
            }
            let source = build_grid(samples.len())
                .map_err(|e| Error::FieldFile(format!("{at}.samples: {e}")))?;
            Ok(YProfile::from_values(source.resample(samples, grid)))
        }
    }
}

fn component(spec: Option<&ComponentSpec>, grid: &Arc<ChebGrid>, at: &str) -> Result<(YProfile, YProfile)> {
    let cos = profile(spec.and_then(|c| c.cos.as_ref()), grid, &format!("{at}.cos"))?;
    let sin = profile(spec.and_then(|c| c.sin.as_ref()), grid, &format!("{at}.sin"))?;
    Ok((cos, sin))
}

/// Spanwise profiles of harmonic `j` making the field divergence-free:
/// `a3 = (b2' - j alpha a1) / (j beta)`, `b3 = -(j alpha b1 + a2') / (j beta)`.
pub fn continuity_u3(
    params: &FlowParams,
    j: usize,
    u1: &(YProfile, YProfile),
    u2: &(YProfile, YProfile),
    grid: &ChebGrid,
) -> (YProfile, YProfile) {
    let ja = j as f64 * params.alpha;
    let jb = j as f64 * params.beta;
    let (a1, b1) = u1;
    let (a2, b2) = u2;
    let a3 = b2.derivative(grid).add_scaled(-ja, a1).scale(1.0 / jb);
    let b3 = a2.derivative(grid).add_scaled(ja, b1).scale(-1.0 / jb);
    (a3, b3)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSummary {
    pub along: f64,
    pub across: f64,
}

/// JSON summary of a [`CompatReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub schema: String,
    pub version: String,
    pub params: FlowParams,
    pub grid_points: usize,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub defect_relative: f64,
    pub defect_max_abs: f64,
    pub defect_l2: f64,
    pub tangential_relative: f64,
    pub tangential_split: SplitSummary,
    pub residual_scale: f64,
    pub mean_pressure_gradient: [f64; 2],
    pub pressure_solvability: f64,
    pub diagnostics_agree: bool,
    pub residual: Vec<ResidualEntry>,
}

impl ReportFile {
    pub fn new(report: &CompatReport) -> Self {
        let (along, across) = report.tangential.split_relative(&report.params);
        ReportFile {
            schema: REPORT_SCHEMA.to_string(),
            version: crate::VERSION.to_string(),
            params: report.params,
            grid_points: report.grid_points,
            tolerance: report.tolerance,
            verdict: report.verdict,
            defect_relative: report.defect_relative,
            defect_max_abs: report.defect_norms.max_abs,
            defect_l2: report.defect_norms.l2,
            tangential_relative: report.tangential_relative,
            tangential_split: SplitSummary { along, across },
            residual_scale: report.tangential.scale,
            mean_pressure_gradient: report.tangential.mean_pressure_gradient,
            pressure_solvability: report.pressure_solvability,
            diagnostics_agree: report.diagnostics_agree(),
            residual: report.tangential.entries.clone(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(csv_error)
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn finish<W: Write>(mut w: csv::Writer<W>) -> Result<()> {
    w.flush()?;
    Ok(())
}

/// Harmonic coefficients of `f` against `y` at the collocation points:
/// columns `y, a0, b0, a1, b1, ...`.
pub fn write_coefficients_csv(path: &Path, f: &ScalarField) -> Result<()> {
    let mut w = csv_writer(path)?;
    let top = f.max_harmonic();
    let mut header = vec!["y".to_string()];
    for j in 0..=top {
        header.push(format!("a{j}"));
        header.push(format!("b{j}"));
    }
    w.write_record(&header).map_err(csv_error)?;
    let zero = YProfile::zeros(f.grid().n());
    for (i, y) in f.grid().points().iter().enumerate() {
        let mut row = vec![y.to_string()];
        for j in 0..=top {
            let (c, s) = f.harmonic(j).map_or((&zero, &zero), |h| (&h.cos, &h.sin));
            row.push(c.values()[i].to_string());
            row.push(s.values()[i].to_string());
        }
        w.write_record(&row).map_err(csv_error)?;
    }
    finish(w)
}

/// Points of the `x`-`y` slice at `z = 0`: one period in `x` (endpoint
/// excluded) and uniform `y` from -1 to 1.
pub fn slice_points(params: &FlowParams) -> (Vec<f64>, Vec<f64>) {
    let lx = params.lx();
    let xs = (0..SLICE_NX).map(|i| lx * i as f64 / SLICE_NX as f64).collect();
    let ys = (0..SLICE_NY)
        .map(|i| -1.0 + 2.0 * i as f64 / (SLICE_NY - 1) as f64)
        .collect();
    (xs, ys)
}

/// Values of `fields` on the slice, one row per point, `x` varying fastest.
pub fn slice_values(fields: &[&ScalarField]) -> Result<Vec<(f64, f64, Vec<f64>)>> {
    let Some(first) = fields.first() else {
        return Ok(Vec::new());
    };
    let (xs, ys) = slice_points(first.params());
    let mut rows = Vec::with_capacity(xs.len() * ys.len());
    for &y in &ys {
        for &x in &xs {
            let vals = fields.iter().map(|f| f.eval(x, y, 0.0)).collect::<Result<Vec<_>>>()?;
            rows.push((x, y, vals));
        }
    }
    Ok(rows)
}

/// Slice CSV with columns `x, y, <names...>`.
pub fn write_slice_csv(path: &Path, names: &[&str], fields: &[&ScalarField]) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header = vec!["x", "y"];
    header.extend_from_slice(names);
    w.write_record(&header).map_err(csv_error)?;
    for (x, y, vals) in slice_values(fields)? {
        let mut row = vec![x.to_string(), y.to_string()];
        row.extend(vals.iter().map(f64::to_string));
        w.write_record(&row).map_err(csv_error)?;
    }
    finish(w)
}

/// Writes `report.json`, `defect_coefficients.csv` and `defect_grid.csv`.
pub fn write_check_outputs(dir: &Path, report: &CompatReport) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    ReportFile::new(report).write(&dir.join("report.json"))?;
    write_coefficients_csv(&dir.join("defect_coefficients.csv"), &report.divergence_defect)?;
    write_slice_csv(&dir.join("defect_grid.csv"), &["defect"], &[&report.divergence_defect])
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"{
      "schema": "channel-compat/field/v1",
      "params": {"alpha": 1.0, "beta": 1.0, "reynolds": 80.0},
      "harmonics": [
        {"j": 1, "u2": {"cos": [1.0, 0.0, -2.0, 0.0, 1.0]}, "u3": "continuity"}
      ]
    }"#;

    #[test]
    fn continuity_matches_example() {
        let g = build_grid(24).unwrap();
        let u = FieldFile::from_json(EXAMPLE).unwrap().to_field(&g).unwrap();
        let expected = crate::oracle::example_field(&FlowParams::default(), &g).unwrap();
        assert!(u.sub(&expected).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn roundtrip_keeps_polynomials() {
        let g = build_grid(24).unwrap();
        let u = FieldFile::from_json(EXAMPLE).unwrap().to_field(&g).unwrap();
        let again = FieldFile::from_json(&FieldFile::from_field(&u).to_json().unwrap())
            .unwrap()
            .to_field(&g)
            .unwrap();
        assert_eq!(u.sub(&again).unwrap().max_abs(), 0.0);
        assert!(again.component(1).harmonic(1).unwrap().cos.poly().is_some());
    }

    #[test]
    fn samples_are_resampled() {
        let g = build_grid(16).unwrap();
        let fine = build_grid(20).unwrap();
        let samples: Vec<f64> = fine.points().iter().map(|y| (y * y - 1.0) * y).collect();
        let text = format!(
            r#"{{"schema": "{FIELD_SCHEMA}", "params": {{"alpha": 1, "beta": 1, "reynolds": 10}},
               "harmonics": [{{"j": 1, "u1": {{"sin": {{"samples": {samples:?}}}}}}}]}}"#
        );
        let u = FieldFile::from_json(&text).unwrap().to_field(&g).unwrap();
        let v = &u.component(0).harmonic(1).unwrap().sin;
        for (y, x) in g.points().iter().zip(v.values()) {
            assert!((x - (y * y - 1.0) * y).abs() < 1e-12);
        }
    }

    #[test]
    fn malformed_input_names_location() {
        let err = FieldFile::from_json("{\n \"schema\": 3 }").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        let bad = EXAMPLE.replace("\"j\": 1,", "\"j\": 0,");
        let g = build_grid(16).unwrap();
        let err = FieldFile::from_json(&bad).unwrap().to_field(&g).unwrap_err().to_string();
        assert!(err.contains("harmonics[0]"), "{err}");
        assert!(FieldFile::from_json(&EXAMPLE.replace("field/v1", "field/v9")).is_err());
    }
}
