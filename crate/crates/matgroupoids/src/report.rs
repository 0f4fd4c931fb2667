//! Body description files, machine-readable analysis reports, and the plate
//! diagram renderer.
//!
//! A body file is a JSON document describing a grid of material points in
//! either symbolic mode (archetype group + transplant) or numeric mode
//! (stored-energy model). Reports are a single structured JSON document per
//! run; the human-readable text rendering is derived from that document,
//! never computed separately.

use crate::body::{BodyGrid, MaterialPoint, PointData};
use crate::classifier::CompositeReport;
use crate::body::HomogeneityVerdict;
use crate::groupoid::ObjectId;
use crate::groups::{GroupKind, MatrixGroup, SymmetryClass};
use crate::linalg::{svd_proper, Matrix};
use crate::solver::ConstitutiveModel;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid body description: {0}")]
    InvalidBody(String),
    #[error("unsupported descriptor: {0}")]
    Unsupported(String),
}

impl From<serde_json::Error> for ReportError {
    fn from(e: serde_json::Error) -> Self {
        ReportError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

// ---- body description files -----------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GroupSpec {
    Trivial,
    Finite { elements: Vec<Vec<f64>> },
    #[serde(rename = "SO")]
    SpecialOrthogonal,
    #[serde(rename = "O")]
    Orthogonal,
    AxisRot { axis: [f64; 3] },
    Conjugated {
        base: Box<GroupSpec>,
        conjugator: Vec<f64>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ModelSpec {
    NeoHookean { mu: f64, lambda: f64 },
    StVenantKirchhoff { mu: f64, lambda: f64 },
    MooneyRivlin { c1: f64, c2: f64, lambda: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum PointMode {
    Symbolic {
        group: GroupSpec,
        /// Row-major transplant matrix P(X).
        transplant: Vec<f64>,
    },
    Numeric { model: ModelSpec },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PointSpec {
    pub pos: [i64; 2],
    pub mode: PointMode,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BodyFile {
    pub dimension: usize,
    /// Grid shape [nx, ny]; points are listed row-major.
    pub grid: [i64; 2],
    pub points: Vec<PointSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Value>,
}

fn matrix_to_vec(m: &Matrix) -> Vec<f64> {
    m.row_major()
}

fn vec_to_matrix(dim: usize, v: &[f64]) -> Result<Matrix, ReportError> {
    if v.len() != dim * dim {
        return Err(ReportError::InvalidBody(format!(
            "matrix needs {} entries, got {}",
            dim * dim,
            v.len()
        )));
    }
    Ok(Matrix::from_rows(dim, v))
}

fn group_to_spec(g: &MatrixGroup) -> GroupSpec {
    match g.kind() {
        GroupKind::Trivial => GroupSpec::Trivial,
        GroupKind::Finite(els) => GroupSpec::Finite {
            elements: els.iter().map(matrix_to_vec).collect(),
        },
        GroupKind::SpecialOrthogonal => GroupSpec::SpecialOrthogonal,
        GroupKind::Orthogonal => GroupSpec::Orthogonal,
        GroupKind::AxisRotations(axis) => GroupSpec::AxisRot { axis: *axis },
        GroupKind::Conjugated(base, h) => GroupSpec::Conjugated {
            base: Box::new(group_to_spec(base)),
            conjugator: matrix_to_vec(h),
        },
    }
}

fn spec_to_group(dim: usize, s: &GroupSpec) -> Result<MatrixGroup, ReportError> {
    let bad = |e: crate::groups::GroupError| ReportError::InvalidBody(e.to_string());
    Ok(match s {
        GroupSpec::Trivial => MatrixGroup::trivial(dim),
        GroupSpec::SpecialOrthogonal => MatrixGroup::special_orthogonal(dim),
        GroupSpec::Orthogonal => MatrixGroup::orthogonal(dim),
        GroupSpec::AxisRot { axis } => MatrixGroup::axis_rotations(*axis).map_err(bad)?,
        GroupSpec::Finite { elements } => {
            let els: Result<Vec<Matrix>, ReportError> =
                elements.iter().map(|e| vec_to_matrix(dim, e)).collect();
            MatrixGroup::finite(dim, els?).map_err(bad)?
        }
        GroupSpec::Conjugated { base, conjugator } => {
            let inner = spec_to_group(dim, base)?;
            MatrixGroup::conjugated(inner, &vec_to_matrix(dim, conjugator)?).map_err(bad)?
        }
    })
}

fn model_to_spec(m: &ConstitutiveModel) -> Result<ModelSpec, ReportError> {
    Ok(match m {
        ConstitutiveModel::NeoHookean { mu, lambda, .. } => ModelSpec::NeoHookean {
            mu: *mu,
            lambda: *lambda,
        },
        ConstitutiveModel::StVenantKirchhoff { mu, lambda, .. } => {
            ModelSpec::StVenantKirchhoff {
                mu: *mu,
                lambda: *lambda,
            }
        }
        ConstitutiveModel::MooneyRivlin { c1, c2, lambda } => ModelSpec::MooneyRivlin {
            c1: *c1,
            c2: *c2,
            lambda: *lambda,
        },
        ConstitutiveModel::Precomposed { .. } => {
            return Err(ReportError::Unsupported(
                "precomposed models cannot be stored in body files".into(),
            ))
        }
    })
}

fn spec_to_model(dim: usize, s: &ModelSpec) -> Result<ConstitutiveModel, ReportError> {
    Ok(match s {
        ModelSpec::NeoHookean { mu, lambda } => ConstitutiveModel::NeoHookean {
            dim,
            mu: *mu,
            lambda: *lambda,
        },
        ModelSpec::StVenantKirchhoff { mu, lambda } => ConstitutiveModel::StVenantKirchhoff {
            dim,
            mu: *mu,
            lambda: *lambda,
        },
        ModelSpec::MooneyRivlin { c1, c2, lambda } => {
            if dim != 3 {
                return Err(ReportError::Unsupported(
                    "Mooney-Rivlin models are three-dimensional".into(),
                ));
            }
            ConstitutiveModel::MooneyRivlin {
                c1: *c1,
                c2: *c2,
                lambda: *lambda,
            }
        }
    })
}

/// Serialize a body grid into the JSON body description format.
pub fn emit_body(body: &BodyGrid) -> Result<String, ReportError> {
    let (nx, ny) = grid_shape(body);
    let mut points = Vec::new();
    for p in &body.points {
        let mode = match &p.data {
            PointData::Symbolic { group, transplant } => PointMode::Symbolic {
                group: group_to_spec(group),
                transplant: matrix_to_vec(transplant),
            },
            PointData::Numeric { model } => PointMode::Numeric {
                model: model_to_spec(model)?,
            },
        };
        points.push(PointSpec {
            pos: [p.grid_pos.0, p.grid_pos.1],
            mode,
        });
    }
    let file = BodyFile {
        dimension: body.dim,
        grid: [nx, ny],
        points,
        metadata: None,
    };
    Ok(serde_json::to_string_pretty(&file).expect("body serialization"))
}

fn grid_shape(body: &BodyGrid) -> (i64, i64) {
    let nx = body.points.iter().map(|p| p.grid_pos.0).max().unwrap_or(0) + 1;
    let ny = body.points.iter().map(|p| p.grid_pos.1).max().unwrap_or(0) + 1;
    (nx, ny)
}

/// Parse a body description document into a body grid.
pub fn parse_body(text: &str) -> Result<BodyGrid, ReportError> {
    let file: BodyFile = serde_json::from_str(text)?;
    if file.dimension != 2 && file.dimension != 3 {
        return Err(ReportError::InvalidBody(format!(
            "dimension must be 2 or 3, got {}",
            file.dimension
        )));
    }
    let expected = (file.grid[0] * file.grid[1]) as usize;
    if file.points.len() != expected {
        return Err(ReportError::InvalidBody(format!(
            "grid {}x{} needs {} points, got {}",
            file.grid[0],
            file.grid[1],
            expected,
            file.points.len()
        )));
    }
    let mut points = Vec::new();
    for (k, spec) in file.points.iter().enumerate() {
        let data = match &spec.mode {
            PointMode::Symbolic { group, transplant } => PointData::Symbolic {
                group: spec_to_group(file.dimension, group)?,
                transplant: vec_to_matrix(file.dimension, transplant)?,
            },
            PointMode::Numeric { model } => PointData::Numeric {
                model: spec_to_model(file.dimension, model)?,
            },
        };
        points.push(MaterialPoint {
            id: ObjectId(k),
            grid_pos: (spec.pos[0], spec.pos[1]),
            data,
        });
    }
    let body = BodyGrid {
        dim: file.dimension,
        points,
    };
    body.validate()
        .map_err(|e| ReportError::InvalidBody(e.to_string()))?;
    Ok(body)
}

// ---- analysis reports ------------------------------------------------------------

/// One machine-readable analysis document. The JSON rendering is the source
/// of truth; `to_text` derives the human-readable form from it.
#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub command: String,
    /// (label, sha256-of-content) per input document.
    pub inputs: Vec<InputDigest>,
    pub settings: Value,
    pub verdict: Value,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub name: String,
    pub sha256: String,
}

pub fn digest(name: &str, content: &str) -> InputDigest {
    let mut hasher = Sha256::new();
    hasher.update(content.as_bytes());
    InputDigest {
        name: name.to_string(),
        sha256: format!("{:x}", hasher.finalize()),
    }
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    /// Human-readable rendering derived from the JSON document.
    pub fn to_text(&self) -> String {
        let value = serde_json::to_value(self).expect("report serialization");
        let mut out = String::new();
        out.push_str(&format!("command: {}\n", self.command));
        for input in &self.inputs {
            out.push_str(&format!("input {}: sha256 {}\n", input.name, input.sha256));
        }
        out.push_str("settings:\n");
        render_value(&value["settings"], 1, &mut out);
        out.push_str("verdict:\n");
        render_value(&value["verdict"], 1, &mut out);
        if !self.warnings.is_empty() {
            out.push_str("warnings:\n");
            for w in &self.warnings {
                out.push_str(&format!("  - {w}\n"));
            }
        }
        out
    }
}

fn render_value(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                match val {
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_value(val, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}{k}: {val}\n")),
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match item {
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{pad}-\n"));
                        render_value(item, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}- {item}\n")),
                }
            }
        }
        _ => out.push_str(&format!("{pad}{v}\n")),
    }
}

pub fn symmetry_class_value(c: &SymmetryClass) -> Value {
    match c {
        SymmetryClass::Isotropic | SymmetryClass::DiscreteOther | SymmetryClass::Trivial => {
            json!({ "label": c.label() })
        }
        SymmetryClass::TransverselyIsotropic { axis } => {
            json!({ "label": c.label(), "axis": axis })
        }
        SymmetryClass::Orthotropic { frame } => {
            json!({ "label": c.label(), "frame": frame.row_major() })
        }
    }
}

pub fn homogeneity_value(h: &Option<HomogeneityVerdict>) -> Value {
    match h {
        None => Value::Null,
        Some(HomogeneityVerdict::Homogeneous { .. }) => json!("homogeneous"),
        Some(HomogeneityVerdict::Inhomogeneous) => json!("inhomogeneous"),
        Some(HomogeneityVerdict::Inconclusive) => json!("inconclusive"),
    }
}

/// Composite verdict block of a `compose` report.
pub fn composite_verdict_value(report: &CompositeReport) -> Value {
    let classes: Value = report
        .pointwise_class
        .iter()
        .map(|(x, c)| (x.0.to_string(), symmetry_class_value(c)))
        .collect::<serde_json::Map<String, Value>>()
        .into();
    json!({
        "uniform": report.uniform,
        "components": report
            .components
            .iter()
            .map(|c| c.iter().map(|x| x.0).collect::<Vec<usize>>())
            .collect::<Vec<_>>(),
        "homogeneous": homogeneity_value(&report.homogeneous),
        "core_transitive": report.core_transitive,
        "locally_trivial": report
            .locally_trivial
            .map(|(h, v)| json!({ "horizontal": h, "vertical": v }))
            .unwrap_or(Value::Null),
        "stress_free": report.stress_free.label(),
        "pointwise_class": classes,
    })
}

// ---- SVG plate diagrams ---------------------------------------------------------

const PANEL: f64 = 160.0;
const CELL: f64 = 24.0;
const MARGIN: f64 = 20.0;

/// Three-panel plate diagram: the two constituents and the composite, one
/// glyph per material point (circle = continuous rotational symmetry,
/// ellipse = conjugated/stretched symmetry, tack = discrete symmetry,
/// rotated with the transplant).
pub fn render_composite_svg(
    body_a: &BodyGrid,
    body_b: &BodyGrid,
    report: &CompositeReport,
) -> String {
    let (nx, ny) = grid_shape(body_a);
    let width = 3.0 * PANEL + 4.0 * MARGIN;
    let height = PANEL + 2.0 * MARGIN + 20.0;
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n"
    ));
    for (panel, title) in [(0, "constituent A"), (1, "constituent B"), (2, "composite")] {
        let x0 = MARGIN + panel as f64 * (PANEL + MARGIN);
        let y0 = MARGIN;
        svg.push_str(&format!(
            "<rect x=\"{x0}\" y=\"{y0}\" width=\"{PANEL}\" height=\"{PANEL}\" \
             fill=\"none\" stroke=\"black\"/>\n"
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
            x0 + PANEL / 2.0,
            y0 + PANEL + 14.0,
            title
        ));
        let body = if panel == 1 { body_b } else { body_a };
        for p in &body.points {
            let cx = x0 + (p.grid_pos.0 as f64 + 0.5) * PANEL / nx as f64;
            let cy = y0 + PANEL - (p.grid_pos.1 as f64 + 0.5) * PANEL / ny as f64;
            let glyph = if panel < 2 {
                point_glyph(&p.data, cx, cy)
            } else {
                composite_glyph(report, p.id, cx, cy)
            };
            svg.push_str(&glyph);
        }
    }
    svg.push_str("</svg>\n");
    svg
}

fn rotation_angle(m: &Matrix) -> f64 {
    // angle of the rotation factor of the polar decomposition
    match svd_proper(m) {
        Ok((u, _, v)) => {
            let r = u.mul(&v.transpose());
            r.at(1, 0).atan2(r.at(0, 0))
        }
        Err(_) => 0.0,
    }
}

fn tack(cx: f64, cy: f64, angle_rad: f64, color: &str) -> String {
    let deg = -angle_rad.to_degrees();
    let r = CELL * 0.28;
    format!(
        "<g transform=\"translate({cx},{cy}) rotate({deg})\" stroke=\"{color}\" fill=\"none\">\
         <line x1=\"-{r}\" y1=\"0\" x2=\"{r}\" y2=\"0\"/>\
         <line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"-{r}\"/></g>\n",
        r = r
    )
}

fn circle(cx: f64, cy: f64, color: &str) -> String {
    format!(
        "<circle cx=\"{cx}\" cy=\"{cy}\" r=\"{}\" fill=\"none\" stroke=\"{color}\"/>\n",
        CELL * 0.3
    )
}

fn ellipse(cx: f64, cy: f64, rx: f64, ry: f64, angle_rad: f64, color: &str) -> String {
    let deg = -angle_rad.to_degrees();
    format!(
        "<ellipse cx=\"0\" cy=\"0\" rx=\"{rx}\" ry=\"{ry}\" fill=\"none\" stroke=\"{color}\" \
         transform=\"translate({cx},{cy}) rotate({deg})\"/>\n"
    )
}

fn point_glyph(data: &PointData, cx: f64, cy: f64) -> String {
    match data {
        PointData::Numeric { .. } => tack(cx, cy, 0.0, "gray"),
        PointData::Symbolic { group, transplant } => match group.kind() {
            GroupKind::SpecialOrthogonal | GroupKind::Orthogonal => {
                // the vertex group is P·SO·P⁻¹: stretched transplants show
                // as ellipses, orthogonal ones as circles
                match svd_proper(transplant) {
                    Ok((u, s, _)) if (s[s.len() - 1] - s[0]).abs() > 1e-9 * s[s.len() - 1] => {
                        let base = CELL * 0.3;
                        let scale = (s[0] * s[s.len() - 1]).sqrt();
                        let angle = u.at(1, 0).atan2(u.at(0, 0));
                        ellipse(
                            cx,
                            cy,
                            base * s[s.len() - 1] / scale,
                            base * s[0] / scale,
                            angle,
                            "black",
                        )
                    }
                    _ => circle(cx, cy, "black"),
                }
            }
            GroupKind::AxisRotations(_) => circle(cx, cy, "darkblue"),
            _ => tack(cx, cy, rotation_angle(transplant), "black"),
        },
    }
}

fn composite_glyph(report: &CompositeReport, id: ObjectId, cx: f64, cy: f64) -> String {
    // color points by transitivity component so laminates read at a glance
    let palette = ["black", "#b22222", "#1f6fb2", "#2e8b57", "#8a2be2", "#b8860b"];
    let comp = report
        .components
        .iter()
        .position(|c| c.contains(&id))
        .unwrap_or(0);
    let color = palette[comp % palette.len()];
    match report.pointwise_class.get(&id) {
        Some(SymmetryClass::Isotropic) => circle(cx, cy, color),
        Some(SymmetryClass::TransverselyIsotropic { .. }) => {
            ellipse(cx, cy, CELL * 0.32, CELL * 0.2, 0.0, color)
        }
        _ => tack(cx, cy, 0.0, color),
    }
}
