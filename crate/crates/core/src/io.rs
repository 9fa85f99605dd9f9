//! JSON problem and solution files.
//!
//! Problem file:
//!
//! ```json
//! { "nodes": [ { "id": "n0", "y": [0.0, 0.0, 1.0], "w": 1.0 },
//!              { "id": "n1", "w": "inf", "y": [1.0, 0.0, 0.0] } ],
//!   "edges": [ { "u": "n0", "v": "n1", "lambda": 1.0 } ] }
//! ```
//!
//! `y` is optional and `w` defaults to 0. Floats are written with 17
//! significant digits so that values round-trip bit-exactly.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::ser::{Formatter, PrettyFormatter};
use thiserror::Error;

use crate::certify::TightnessReport;
use crate::graph::{build_problem, Edge, Node, NodeId, Problem, ProblemError, Weight};
use crate::sphere::{UnitVec3, Vec3};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: parse error: {message}")]
    Parse { path: String, message: String },
    #[error("{path}: {source}")]
    Invalid { path: String, source: ProblemError },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> IoError + '_ {
    move |source| IoError::Io { path: path.display().to_string(), source }
}

fn parse_err(path: &Path, message: impl Into<String>) -> IoError {
    IoError::Parse { path: path.display().to_string(), message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct WeightRepr(Weight);

impl Serialize for WeightRepr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            Weight::Finite(w) => s.serialize_f64(w),
            Weight::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for WeightRepr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(w) => Ok(WeightRepr(Weight::Finite(w))),
            Raw::Text(t) if matches!(t.as_str(), "inf" | "+inf" | "Infinity") => Ok(WeightRepr(Weight::Infinite)),
            Raw::Text(t) => Err(de::Error::custom(format!("weight must be a number or \"inf\", got \"{t}\""))),
        }
    }
}

impl Default for WeightRepr {
    fn default() -> Self {
        WeightRepr(Weight::Finite(0.0))
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeRecord {
    id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    y: Option<Vec<f64>>,
    #[serde(default)]
    w: WeightRepr,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRecord {
    u: String,
    v: String,
    lambda: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    nodes: Vec<NodeRecord>,
    edges: Vec<EdgeRecord>,
}

/// Writes floats as `{:.16e}`: 17 significant digits, enough to round-trip
/// any f64.
struct ExactFloats<'a>(PrettyFormatter<'a>);

impl Formatter for ExactFloats<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes `value` as pretty JSON with exact float digits.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, ExactFloats(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("serializing to memory cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON output is UTF-8")
}

fn write_file(path: &Path, contents: &str) -> Result<(), IoError> {
    fs::write(path, contents).map_err(io_err(path))
}

fn vec3_from(path: &Path, owner: &str, v: &[f64]) -> Result<Vec3, IoError> {
    match v {
        [a, b, c] => Ok(Vec3::new(*a, *b, *c)),
        _ => Err(parse_err(path, format!("{owner}: vector must have 3 components, got {}", v.len()))),
    }
}

/// Parses problem JSON without touching the filesystem; `origin` labels errors.
pub fn parse_problem(origin: &Path, text: &str) -> Result<Problem, IoError> {
    let file: ProblemFile = serde_json::from_str(text).map_err(|e| parse_err(origin, e.to_string()))?;
    let mut nodes = Vec::with_capacity(file.nodes.len());
    for n in file.nodes {
        let y = n.y.as_deref().map(|y| vec3_from(origin, &format!("node `{}` field `y`", n.id), y)).transpose()?;
        nodes.push(Node::new(n.id, y, n.w.0));
    }
    let edges = file.edges.into_iter().map(|e| Edge::new(e.u, e.v, e.lambda)).collect();
    build_problem(nodes, edges).map_err(|source| IoError::Invalid { path: origin.display().to_string(), source })
}

pub fn load_problem(path: &Path) -> Result<Problem, IoError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_problem(path, &text)
}

pub fn problem_to_json(problem: &Problem) -> String {
    let file = ProblemFile {
        nodes: problem
            .nodes()
            .iter()
            .map(|n| NodeRecord { id: n.id.0.clone(), y: n.y.map(|v| v.0.to_vec()), w: WeightRepr(n.w) })
            .collect(),
        edges: problem
            .edges()
            .iter()
            .map(|e| EdgeRecord { u: e.u.0.clone(), v: e.v.0.clone(), lambda: e.lambda })
            .collect(),
    };
    to_json_string(&file)
}

pub fn save_problem(path: &Path, problem: &Problem) -> Result<(), IoError> {
    write_file(path, &problem_to_json(problem))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecordOut {
    pub u: String,
    pub v: String,
    pub eigenvalues: [f64; 6],
    pub d_defect: f64,
}

/// Contents of a solution file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub x: indexmap::IndexMap<String, [f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective_original: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective_relaxed: Option<f64>,
    #[serde(default)]
    pub tight: bool,
    #[serde(default)]
    pub gap: Option<f64>,
    #[serde(default)]
    pub converged: bool,
    #[serde(default)]
    pub iterations: usize,
    #[serde(default)]
    pub per_edge: Vec<EdgeRecordOut>,
    #[serde(default)]
    pub diagnostics: Vec<String>,
}

impl SolutionFile {
    /// A solution carrying only a signal, e.g. a ground truth.
    pub fn from_signal(problem: &Problem, x: &[UnitVec3]) -> Self {
        SolutionFile {
            x: problem.nodes().iter().zip(x).map(|(n, v)| (n.id.0.clone(), v.coords())).collect(),
            objective_original: None,
            objective_relaxed: None,
            tight: false,
            gap: None,
            converged: true,
            iterations: 0,
            per_edge: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    /// Fills in the certificate fields from a tightness report.
    pub fn with_report(mut self, report: &TightnessReport) -> Self {
        self.objective_relaxed = Some(report.objective_relaxed);
        self.tight = report.tight;
        self.gap = Some(report.gap);
        self.per_edge = report
            .per_edge
            .iter()
            .map(|c| EdgeRecordOut {
                u: c.u.0.clone(),
                v: c.v.0.clone(),
                eigenvalues: c.eigenvalues,
                d_defect: c.d_defect,
            })
            .collect();
        self
    }

    /// The `x` block as a signal aligned with `problem`'s node order.
    pub fn signal_for(&self, problem: &Problem) -> Result<Vec<UnitVec3>, String> {
        if self.x.len() != problem.num_nodes() {
            return Err(format!("solution has {} nodes, problem has {}", self.x.len(), problem.num_nodes()));
        }
        problem
            .nodes()
            .iter()
            .map(|n| {
                let v = self.x.get(&n.id.0).ok_or_else(|| format!("solution has no value for node `{}`", n.id))?;
                UnitVec3::try_new(Vec3(*v)).map_err(|e| format!("node `{}`: {e}", n.id))
            })
            .collect()
    }
}

pub fn save_solution(path: &Path, solution: &SolutionFile) -> Result<(), IoError> {
    write_file(path, &to_json_string(solution))
}

pub fn load_solution(path: &Path) -> Result<SolutionFile, IoError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| parse_err(path, e.to_string()))
}

/// Convenience for ids in diagnostics.
pub fn id_list(ids: &[NodeId]) -> String {
    ids.iter().map(|i| i.0.as_str()).collect::<Vec<_>>().join(", ")
}
