//! JSON file formats for spaces, covers, functions, and reports.
//!
//! Space files: `{"points": [ids], "metric": {...}, "basepoint": id?}` where
//! the metric is one of `{"matrix": [[..]]}`, `{"graph": {"edges": [[u,v,w]]}}`,
//! `{"interval": {"start": a, "end": b}}`, or
//! `{"grid": {"x": [x0,x1], "y": [y0,y1]}}` (sup metric). The interval and
//! grid forms keep large implicit spaces out of quadratic matrices.
//!
//! Cover files: `{"space": <path or inline>, "members": [[ids]..],
//! "families": [[member idx]..]?, "r": number?}`.
//!
//! Function files: `{"space": ..., "values": {"<id>": number | [numbers]},
//! "target": "l1"|"l2"?}`. Values may cover a subset of the space (partial
//! data for extension commands).
//!
//! Reports round every float to 12 significant digits and serialize maps in
//! sorted key order, so reruns are byte-identical.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::cover::{ColoredCover, Cover, CoverError, LebValue};
use crate::function::{FunctionError, PointFunction, TargetMetric};
use crate::metric::{FiniteMetricSpace, MetricError, PointId};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("cannot parse {path}: {source}")]
    Parse { path: String, source: serde_json::Error },
    #[error("{what}: {detail}")]
    Format { what: String, detail: String },
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Function(#[from] FunctionError),
}

fn format_err(what: &str, detail: impl ToString) -> IoError {
    IoError::Format { what: what.to_string(), detail: detail.to_string() }
}

#[derive(Deserialize)]
struct SpaceFile {
    #[serde(default)]
    points: Option<Vec<PointId>>,
    metric: MetricSpec,
    #[serde(default)]
    basepoint: Option<PointId>,
}

#[derive(Deserialize)]
enum MetricSpec {
    #[serde(rename = "matrix")]
    Matrix(Vec<Vec<f64>>),
    #[serde(rename = "graph")]
    Graph { edges: Vec<(PointId, PointId, f64)> },
    #[serde(rename = "interval")]
    Interval { start: i64, end: i64 },
    #[serde(rename = "grid")]
    Grid { x: (i64, i64), y: (i64, i64) },
}

pub fn read_json(path: &Path) -> Result<Value, IoError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| IoError::Read { path: path.display().to_string(), source })?;
    serde_json::from_str(&text)
        .map_err(|source| IoError::Parse { path: path.display().to_string(), source })
}

/// Space from a parsed JSON value.
pub fn space_from_value(value: &Value) -> Result<Arc<FiniteMetricSpace>, IoError> {
    let file: SpaceFile = serde_json::from_value(value.clone())
        .map_err(|e| format_err("space file", e))?;
    let space = match file.metric {
        MetricSpec::Matrix(matrix) => {
            FiniteMetricSpace::from_distance_matrix(file.points, &matrix)?
        }
        MetricSpec::Graph { edges } => {
            let vertices = file
                .points
                .ok_or_else(|| format_err("space file", "graph metric needs a points list"))?;
            FiniteMetricSpace::from_graph(vertices, &edges)?
        }
        MetricSpec::Interval { start, end } => FiniteMetricSpace::interval(start, end)?,
        MetricSpec::Grid { x, y } => FiniteMetricSpace::grid(x.0, x.1, y.0, y.1)?,
    };
    let space = match file.basepoint {
        Some(id) => space.with_basepoint(&id)?,
        None => space,
    };
    Ok(space.into_arc())
}

pub fn load_space(path: &Path) -> Result<Arc<FiniteMetricSpace>, IoError> {
    space_from_value(&read_json(path)?)
}

/// Serializes a space, preferring the implicit forms when available.
pub fn space_to_value(space: &FiniteMetricSpace) -> Value {
    let mut out = Map::new();
    if let Some(coords) = space.line_coords() {
        let contiguous = coords.windows(2).all(|w| w[1] == w[0] + 1);
        if contiguous && !coords.is_empty() {
            out.insert(
                "metric".into(),
                json!({"interval": {"start": coords[0], "end": coords[coords.len() - 1]}}),
            );
        } else {
            out.insert("metric".into(), json!({ "matrix": matrix_of(space) }));
        }
    } else if let Some(coords) = space.grid_coords() {
        let xs: Vec<i64> = coords.iter().map(|c| c.0).collect();
        let ys: Vec<i64> = coords.iter().map(|c| c.1).collect();
        let (x0, x1) = (*xs.iter().min().unwrap(), *xs.iter().max().unwrap());
        let (y0, y1) = (*ys.iter().min().unwrap(), *ys.iter().max().unwrap());
        let full = (x1 - x0 + 1) * (y1 - y0 + 1) == coords.len() as i64;
        if full {
            out.insert("metric".into(), json!({"grid": {"x": [x0, x1], "y": [y0, y1]}}));
        } else {
            out.insert("metric".into(), json!({ "matrix": matrix_of(space) }));
        }
    } else {
        out.insert("metric".into(), json!({ "matrix": matrix_of(space) }));
    }
    out.insert("points".into(), serde_json::to_value(space.ids()).expect("ids serialize"));
    if let Some(b) = space.basepoint() {
        out.insert("basepoint".into(), serde_json::to_value(space.id(b)).expect("id"));
    }
    Value::Object(out)
}

fn matrix_of(space: &FiniteMetricSpace) -> Vec<Vec<f64>> {
    let n = space.len();
    (0..n)
        .map(|i| (0..n).map(|j| space.dist(i, j)).collect())
        .collect()
}

#[derive(Deserialize)]
struct CoverFile {
    #[serde(default)]
    space: Option<Value>,
    members: Vec<Vec<PointId>>,
    #[serde(default)]
    families: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    r: Option<f64>,
}

/// A cover file, with its space taken from the file (inline object or path
/// string) or from an already-loaded space.
pub struct LoadedCover {
    pub space: Arc<FiniteMetricSpace>,
    pub cover: Cover,
    pub families: Option<Vec<Vec<usize>>>,
    pub r: Option<f64>,
}

impl LoadedCover {
    pub fn colored(&self) -> Result<ColoredCover, IoError> {
        let families = self
            .families
            .clone()
            .ok_or_else(|| format_err("cover file", "missing families"))?;
        let r = self.r.ok_or_else(|| format_err("cover file", "missing r"))?;
        Ok(ColoredCover::new(self.cover.clone(), families, r)?)
    }
}

pub fn load_cover(
    path: &Path,
    fallback_space: Option<Arc<FiniteMetricSpace>>,
) -> Result<LoadedCover, IoError> {
    let value = read_json(path)?;
    let file: CoverFile =
        serde_json::from_value(value).map_err(|e| format_err("cover file", e))?;
    let space = match &file.space {
        Some(Value::String(rel)) => {
            let base = path.parent().unwrap_or_else(|| Path::new("."));
            load_space(&base.join(rel))?
        }
        Some(inline) => space_from_value(inline)?,
        None => fallback_space
            .ok_or_else(|| format_err("cover file", "no space inline and no --space given"))?,
    };
    let mut members = Vec::with_capacity(file.members.len());
    for (mi, ids) in file.members.iter().enumerate() {
        let mut set = BTreeSet::new();
        for id in ids {
            let idx = space.index_of(id).ok_or_else(|| {
                format_err("cover file", format!("member {mi}: unknown point {id}"))
            })?;
            set.insert(idx);
        }
        members.push(set);
    }
    let cover = Cover::new(space.clone(), members)?;
    Ok(LoadedCover { space, cover, families: file.families, r: file.r })
}

pub fn cover_to_value(cover: &Cover, families: Option<&[Vec<usize>]>, r: Option<f64>) -> Value {
    let space = cover.space();
    let members: Vec<Vec<&PointId>> = cover
        .members()
        .iter()
        .map(|m| m.iter().map(|&p| space.id(p)).collect())
        .collect();
    let mut out = Map::new();
    out.insert("space".into(), space_to_value(space));
    out.insert("members".into(), serde_json::to_value(members).expect("ids"));
    if let Some(f) = families {
        out.insert("families".into(), serde_json::to_value(f).expect("families"));
    }
    if let Some(r) = r {
        out.insert("r".into(), json!(r));
    }
    Value::Object(out)
}

#[derive(Deserialize)]
struct FunctionFile {
    #[serde(default)]
    space: Option<Value>,
    values: BTreeMap<String, Value>,
    #[serde(default)]
    target: Option<TargetMetric>,
}

/// Parsed function data: possibly partial (an extension input), possibly
/// total.
pub struct LoadedFunction {
    pub space: Arc<FiniteMetricSpace>,
    pub points: BTreeSet<usize>,
    pub values: BTreeMap<usize, Vec<f64>>,
    pub target: TargetMetric,
}

impl LoadedFunction {
    pub fn is_total(&self) -> bool {
        self.points.len() == self.space.len()
    }

    pub fn as_total(&self) -> Result<PointFunction, IoError> {
        if !self.is_total() {
            return Err(format_err(
                "function file",
                format!(
                    "function is partial ({} of {} points); a total function is required",
                    self.points.len(),
                    self.space.len()
                ),
            ));
        }
        let values: Vec<Vec<f64>> = (0..self.space.len())
            .map(|p| self.values[&p].clone())
            .collect();
        Ok(PointFunction::new(self.space.clone(), values, self.target)?)
    }

    pub fn scalar_values(&self) -> Result<BTreeMap<usize, f64>, IoError> {
        self.values
            .iter()
            .map(|(&p, v)| {
                if v.len() == 1 {
                    Ok((p, v[0]))
                } else {
                    Err(format_err(
                        "function file",
                        format!("point {p}: expected a scalar value"),
                    ))
                }
            })
            .collect()
    }

    pub fn simplex_values(
        &self,
    ) -> Result<BTreeMap<usize, crate::simplex::SimplexPoint>, IoError> {
        self.values
            .iter()
            .map(|(&p, v)| {
                crate::simplex::SimplexPoint::new(v.clone())
                    .map(|sp| (p, sp))
                    .map_err(|e| format_err("function file", format!("point {p}: {e}")))
            })
            .collect()
    }
}

fn parse_point_key(key: &str) -> PointId {
    match key.parse::<i64>() {
        Ok(k) => PointId::Int(k),
        Err(_) => PointId::Name(key.to_owned()),
    }
}

pub fn load_function(
    path: &Path,
    fallback_space: Option<Arc<FiniteMetricSpace>>,
) -> Result<LoadedFunction, IoError> {
    let value = read_json(path)?;
    let file: FunctionFile =
        serde_json::from_value(value).map_err(|e| format_err("function file", e))?;
    let space = match &file.space {
        Some(Value::String(rel)) => {
            let base = path.parent().unwrap_or_else(|| Path::new("."));
            load_space(&base.join(rel))?
        }
        Some(inline) => space_from_value(inline)?,
        None => fallback_space
            .ok_or_else(|| format_err("function file", "no space inline and no --space given"))?,
    };
    let mut points = BTreeSet::new();
    let mut values = BTreeMap::new();
    let mut dim: Option<usize> = None;
    for (key, raw) in &file.values {
        let id = parse_point_key(key);
        let idx = space
            .index_of(&id)
            .ok_or_else(|| format_err("function file", format!("unknown point {id}")))?;
        let vec: Vec<f64> = match raw {
            Value::Number(n) => vec![n
                .as_f64()
                .ok_or_else(|| format_err("function file", "bad number"))?],
            Value::Array(_) => serde_json::from_value(raw.clone())
                .map_err(|e| format_err("function file", e))?,
            other => {
                return Err(format_err(
                    "function file",
                    format!("value for {id} must be a number or array, got {other}"),
                ))
            }
        };
        match dim {
            None => dim = Some(vec.len()),
            Some(d) if d != vec.len() => {
                return Err(format_err(
                    "function file",
                    format!("ragged values: {d} vs {}", vec.len()),
                ))
            }
            _ => {}
        }
        points.insert(idx);
        values.insert(idx, vec);
    }
    if points.is_empty() {
        return Err(format_err("function file", "no values given"));
    }
    let target = file.target.unwrap_or(match dim {
        Some(1) => TargetMetric::L2,
        _ => TargetMetric::L1,
    });
    Ok(LoadedFunction { space, points, values, target })
}

pub fn function_to_value(f: &PointFunction) -> Value {
    let mut values = Map::new();
    for p in 0..f.space().len() {
        let v = f.value(p);
        let entry = if v.len() == 1 { json!(v[0]) } else { json!(v) };
        values.insert(f.space().id(p).to_string(), entry);
    }
    json!({
        "target": match f.target() { TargetMetric::L1 => "l1", TargetMetric::L2 => "l2" },
        "values": Value::Object(values),
    })
}

pub fn leb_value_json(v: &LebValue) -> Value {
    match v {
        LebValue::Finite(x) => json!(x),
        LebValue::Infinite => json!("inf"),
    }
}

/// Rounds every float in the tree to 12 significant digits, in place.
pub fn round_floats(value: &mut Value) {
    match value {
        Value::Number(n) => {
            if !n.is_f64() {
                return;
            }
            let x = n.as_f64().expect("checked f64");
            if let Some(rounded) = serde_json::Number::from_f64(sig12(x)) {
                *value = Value::Number(rounded);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Canonical rendering with floats rounded to 12 significant digits and keys
/// sorted. Byte-identical across reruns.
pub fn render_report(report: &Value) -> String {
    let mut copy = report.clone();
    round_floats(&mut copy);
    serde_json::to_string_pretty(&copy).expect("report serializes")
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    std::fs::write(path, text)
        .map_err(|source| IoError::Write { path: path.display().to_string(), source })
}
