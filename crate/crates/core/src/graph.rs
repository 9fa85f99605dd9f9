//! The regularization problem: an undirected graph with sphere-valued data
//! on (some of) its nodes, node fidelity weights and edge smoothness weights.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sphere::{UnitVec3, Vec3};

/// Input data may be off the unit sphere by at most this much; it is then
/// renormalized.
pub const INPUT_UNIT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub String);

impl NodeId {
    pub fn new(s: impl Into<String>) -> Self {
        NodeId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_owned())
    }
}

/// Node fidelity weight; `Infinite` pins the node to its datum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weight {
    Finite(f64),
    Infinite,
}

impl Weight {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Weight::Infinite)
    }

    pub fn is_positive(&self) -> bool {
        match *self {
            Weight::Finite(w) => w > 0.0,
            Weight::Infinite => true,
        }
    }

    /// The finite value, or `None` for `Infinite`.
    pub fn finite(&self) -> Option<f64> {
        match *self {
            Weight::Finite(w) => Some(w),
            Weight::Infinite => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub y: Option<Vec3>,
    pub w: Weight,
}

impl Node {
    pub fn new(id: impl Into<String>, y: Option<Vec3>, w: Weight) -> Self {
        Node { id: NodeId(id.into()), y, w }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub lambda: f64,
}

impl Edge {
    pub fn new(u: impl Into<String>, v: impl Into<String>, lambda: f64) -> Self {
        Edge { u: NodeId(u.into()), v: NodeId(v.into()), lambda }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("duplicate node id `{0}`")]
    DuplicateNode(NodeId),
    #[error("empty node id")]
    EmptyNodeId,
    #[error("edge {{{u},{v}}} references unknown node `{missing}`")]
    DanglingEdge { u: NodeId, v: NodeId, missing: NodeId },
    #[error("self-loop at node `{0}`")]
    SelfLoop(NodeId),
    #[error("duplicate edge {{{0},{1}}}")]
    DuplicateEdge(NodeId, NodeId),
    #[error("node `{0}` has positive weight but no datum")]
    MissingDatum(NodeId),
    #[error("datum at node `{id}` has norm {norm}, outside the unit tolerance band")]
    NonUnitDatum { id: NodeId, norm: f64 },
    #[error("invalid weight at `{0}`: weights must be finite and nonnegative (node weights may be inf)")]
    InvalidWeight(String),
    #[error("connected component containing `{0}` has no node with positive weight")]
    UnanchoredComponent(NodeId),
    #[error("unknown node `{0}`")]
    UnknownNode(NodeId),
}

/// A validated problem. Immutable once built.
#[derive(Debug, Clone)]
pub struct Problem {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    data: Vec<Option<UnitVec3>>,
    index: HashMap<NodeId, usize>,
    endpoints: Vec<(usize, usize)>,
    incidence: Vec<Vec<usize>>,
    diagnostics: Vec<String>,
}

impl PartialEq for Problem {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.edges == other.edges
    }
}

impl Problem {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Warnings produced while building (e.g. dropped zero-weight edges).
    pub fn diagnostics(&self) -> &[String] {
        &self.diagnostics
    }

    pub fn node_index(&self, id: &NodeId) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Unit datum at node `i`.
    pub fn datum(&self, i: usize) -> Option<UnitVec3> {
        self.data[i]
    }

    pub fn weight(&self, i: usize) -> Weight {
        self.nodes[i].w
    }

    pub fn is_fixed(&self, i: usize) -> bool {
        self.nodes[i].w.is_infinite()
    }

    /// Node indices of edge `e`.
    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        self.endpoints[e]
    }

    /// Indices of edges incident to node `i`, in input order.
    pub fn incident(&self, i: usize) -> &[usize] {
        &self.incidence[i]
    }

    pub fn lambda(&self, e: usize) -> f64 {
        self.edges[e].lambda
    }

    /// Σ finite wₙ + Σ λ, the additive constant of both objectives.
    pub fn weight_scale(&self) -> f64 {
        let w: f64 = self.nodes.iter().filter_map(|n| n.w.finite()).sum();
        w + self.edges.iter().map(|e| e.lambda).sum::<f64>()
    }

    /// The data as a signal, for nodes that all carry data.
    pub fn data_signal(&self) -> Option<Vec<UnitVec3>> {
        self.data.iter().copied().collect()
    }
}

fn check_weight(value: f64, what: impl FnOnce() -> String) -> Result<(), ProblemError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(ProblemError::InvalidWeight(what()))
    }
}

/// Validates raw input into a [`Problem`].
///
/// Data within [`INPUT_UNIT_TOLERANCE`] of the sphere are renormalized;
/// edges with λ = 0 are dropped and reported in [`Problem::diagnostics`].
pub fn build_problem(nodes: Vec<Node>, edges: Vec<Edge>) -> Result<Problem, ProblemError> {
    let mut diagnostics = Vec::new();
    let mut index = HashMap::with_capacity(nodes.len());
    let mut clean_nodes = Vec::with_capacity(nodes.len());
    let mut data = Vec::with_capacity(nodes.len());

    for mut node in nodes {
        if node.id.0.is_empty() {
            return Err(ProblemError::EmptyNodeId);
        }
        if let Weight::Finite(w) = node.w {
            check_weight(w, || format!("node `{}` has w = {w}", node.id))?;
        }
        if index.insert(node.id.clone(), clean_nodes.len()).is_some() {
            return Err(ProblemError::DuplicateNode(node.id));
        }
        let datum = match node.y {
            None if node.w.is_positive() => return Err(ProblemError::MissingDatum(node.id)),
            None => None,
            Some(y) => {
                let norm = y.norm();
                if !y.is_finite() || (norm - 1.0).abs() > INPUT_UNIT_TOLERANCE {
                    return Err(ProblemError::NonUnitDatum { id: node.id, norm });
                }
                let y = match UnitVec3::try_new(y) {
                    Ok(u) => u,
                    Err(_) => {
                        let u = UnitVec3::try_new((1.0 / norm) * y)
                            .expect("renormalized datum lies on the sphere");
                        node.y = Some(u.vec());
                        u
                    }
                };
                Some(y)
            }
        };
        data.push(datum);
        clean_nodes.push(node);
    }

    let mut seen = HashSet::with_capacity(edges.len());
    let mut clean_edges = Vec::with_capacity(edges.len());
    let mut endpoints = Vec::with_capacity(edges.len());
    let mut incidence = vec![Vec::new(); clean_nodes.len()];
    for edge in edges {
        let lookup = |id: &NodeId| {
            index.get(id).copied().ok_or_else(|| ProblemError::DanglingEdge {
                u: edge.u.clone(),
                v: edge.v.clone(),
                missing: id.clone(),
            })
        };
        let (iu, iv) = (lookup(&edge.u)?, lookup(&edge.v)?);
        if iu == iv {
            return Err(ProblemError::SelfLoop(edge.u));
        }
        let key = (iu.min(iv), iu.max(iv));
        if !seen.insert(key) {
            return Err(ProblemError::DuplicateEdge(edge.u, edge.v));
        }
        check_weight(edge.lambda, || format!("edge {{{},{}}} has lambda = {}", edge.u, edge.v, edge.lambda))?;
        if edge.lambda == 0.0 {
            diagnostics.push(format!("dropped edge {{{},{}}} with lambda = 0", edge.u, edge.v));
            continue;
        }
        incidence[iu].push(clean_edges.len());
        incidence[iv].push(clean_edges.len());
        endpoints.push((iu, iv));
        clean_edges.push(edge);
    }

    // Every component needs a node with w > 0, or its objective has no anchor.
    let mut component = vec![usize::MAX; clean_nodes.len()];
    for start in 0..clean_nodes.len() {
        if component[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        component[start] = start;
        let mut anchored = false;
        while let Some(i) = stack.pop() {
            anchored |= clean_nodes[i].w.is_positive();
            for &e in &incidence[i] {
                let (a, b) = endpoints[e];
                let j = if a == i { b } else { a };
                if component[j] == usize::MAX {
                    component[j] = start;
                    stack.push(j);
                }
            }
        }
        if !anchored {
            return Err(ProblemError::UnanchoredComponent(clean_nodes[start].id.clone()));
        }
    }

    Ok(Problem {
        nodes: clean_nodes,
        edges: clean_edges,
        data,
        index,
        endpoints,
        incidence,
        diagnostics,
    })
}

/// Splits the nodes into those pinned by an infinite weight and the rest.
pub fn partition_fixed_free(problem: &Problem) -> (BTreeSet<NodeId>, BTreeSet<NodeId>) {
    let (fixed, free): (Vec<_>, Vec<_>) = problem.nodes.iter().partition(|n| n.w.is_infinite());
    (
        fixed.into_iter().map(|n| n.id.clone()).collect(),
        free.into_iter().map(|n| n.id.clone()).collect(),
    )
}

pub fn incident_edges<'a>(problem: &'a Problem, id: &NodeId) -> Result<Vec<&'a Edge>, ProblemError> {
    let i = problem.node_index(id).ok_or_else(|| ProblemError::UnknownNode(id.clone()))?;
    Ok(problem.incidence[i].iter().map(|&e| &problem.edges[e]).collect())
}
