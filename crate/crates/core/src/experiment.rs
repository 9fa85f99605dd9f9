//! Synthetic instances: a smooth ground-truth field on a chain, a grid, or a
//! user-supplied graph, observed through von Mises–Fisher noise.

use std::collections::VecDeque;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{build_problem, Edge, Node, Problem, ProblemError, Weight};
use crate::sphere::{normalize, sample_vmf, slerp, UnitVec3, Vec3, VmfParams};

#[derive(Debug, Clone, PartialEq)]
pub enum Topology {
    Chain { length: usize },
    Grid { rows: usize, cols: usize },
    /// Reuse the nodes and edges (with their λ) of an existing problem.
    Custom(Problem),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub topology: Topology,
    pub kappa: f64,
    pub w: f64,
    pub lambda: f64,
    /// Fraction of nodes pinned to the ground truth; any positive value
    /// switches to interpolation mode.
    pub fixed_fraction: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error("invalid experiment: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let sizes_ok = match &self.topology {
            Topology::Chain { length } => *length >= 1,
            Topology::Grid { rows, cols } => *rows >= 1 && *cols >= 1,
            Topology::Custom(p) => p.num_nodes() >= 1,
        };
        let problems = [
            (!sizes_ok, "sizes must be at least 1"),
            (!(self.kappa >= 0.0 && self.kappa.is_finite()), "kappa must be finite and nonnegative"),
            (!(self.w >= 0.0 && self.w.is_finite()), "w must be finite and nonnegative"),
            (!(self.lambda > 0.0 && self.lambda.is_finite()), "lambda must be finite and positive"),
            (!(0.0..=1.0).contains(&self.fixed_fraction), "fixed_fraction must lie in [0, 1]"),
        ];
        match problems.iter().find(|(bad, _)| *bad) {
            Some((_, msg)) => Err(ExperimentError::InvalidSpec((*msg).to_owned())),
            None => Ok(()),
        }
    }
}

fn random_direction(rng: &mut impl Rng) -> UnitVec3 {
    loop {
        let v = Vec3(std::array::from_fn(|_| rng.gen_range(-1.0..1.0)));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return normalize(v).expect("norm checked");
        }
    }
}

fn fraction(i: usize, n: usize) -> f64 {
    if n <= 1 {
        0.0
    } else {
        i as f64 / (n - 1) as f64
    }
}

/// Node ids, edges and smooth ground truth for the topology.
fn layout(topology: &Topology, lambda: f64, rng: &mut impl Rng) -> (Vec<String>, Vec<Edge>, Vec<UnitVec3>) {
    match topology {
        Topology::Chain { length } => {
            let (a, b) = (random_direction(rng), random_direction(rng));
            let ids: Vec<String> = (0..*length).map(|i| format!("n{i}")).collect();
            let edges = ids.windows(2).map(|p| Edge::new(p[0].clone(), p[1].clone(), lambda)).collect();
            let truth = (0..*length).map(|i| slerp(&a, &b, fraction(i, *length))).collect();
            (ids, edges, truth)
        }
        Topology::Grid { rows, cols } => {
            let corners: [UnitVec3; 4] = std::array::from_fn(|_| random_direction(rng));
            let id = |r: usize, c: usize| format!("r{r}c{c}");
            let mut ids = Vec::with_capacity(rows * cols);
            let mut edges = Vec::new();
            let mut truth = Vec::with_capacity(rows * cols);
            for r in 0..*rows {
                for c in 0..*cols {
                    ids.push(id(r, c));
                    if c + 1 < *cols {
                        edges.push(Edge::new(id(r, c), id(r, c + 1), lambda));
                    }
                    if r + 1 < *rows {
                        edges.push(Edge::new(id(r, c), id(r + 1, c), lambda));
                    }
                    let (tr, tc) = (fraction(r, *rows), fraction(c, *cols));
                    let top = slerp(&corners[0], &corners[1], tc);
                    let bottom = slerp(&corners[2], &corners[3], tc);
                    truth.push(slerp(&top, &bottom, tr));
                }
            }
            (ids, edges, truth)
        }
        Topology::Custom(p) => {
            // Blend two random directions by BFS depth from a random root.
            let (a, b) = (random_direction(rng), random_direction(rng));
            let n = p.num_nodes();
            let root = rng.gen_range(0..n);
            let mut depth = vec![usize::MAX; n];
            let mut queue = VecDeque::from([root]);
            depth[root] = 0;
            while let Some(i) = queue.pop_front() {
                for &e in p.incident(i) {
                    let (u, v) = p.endpoints(e);
                    let j = if u == i { v } else { u };
                    if depth[j] == usize::MAX {
                        depth[j] = depth[i] + 1;
                        queue.push_back(j);
                    }
                }
            }
            let max_depth = depth.iter().filter(|&&d| d != usize::MAX).max().copied().unwrap_or(0);
            let truth = depth
                .iter()
                .map(|&d| match d {
                    usize::MAX => a,
                    d => slerp(&a, &b, fraction(d, max_depth + 1)),
                })
                .collect();
            let ids = p.nodes().iter().map(|n| n.id.0.clone()).collect();
            (ids, p.edges().to_vec(), truth)
        }
    }
}

/// Draws a problem instance and its ground truth.
///
/// Smoothing mode (`fixed_fraction = 0`): every node observes
/// `vMF(truth, kappa)` with weight `w`. Interpolation mode: a seeded subset of
/// `max(1, round(fixed_fraction·n))` nodes is pinned to the exact ground truth
/// (w = ∞) and the remaining nodes carry no data (w = 0).
pub fn generate_experiment(spec: &ExperimentSpec) -> Result<(Problem, Vec<UnitVec3>), ExperimentError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (ids, edges, truth) = layout(&spec.topology, spec.lambda, &mut rng);
    let n = ids.len();

    let nodes: Vec<Node> = if spec.fixed_fraction > 0.0 {
        let count = ((spec.fixed_fraction * n as f64).round() as usize).clamp(1, n);
        let mut pinned = vec![false; n];
        for i in sample(&mut rng, n, count) {
            pinned[i] = true;
        }
        ids.into_iter()
            .zip(&truth)
            .zip(pinned)
            .map(|((id, t), fixed)| match fixed {
                true => Node::new(id, Some(t.vec()), Weight::Infinite),
                false => Node::new(id, None, Weight::Finite(0.0)),
            })
            .collect()
    } else {
        ids.into_iter()
            .zip(&truth)
            .map(|(id, t)| {
                let params = VmfParams { mu: *t, kappa: spec.kappa };
                let y = sample_vmf(&params, &mut rng);
                Node::new(id, Some(y.vec()), Weight::Finite(spec.w))
            })
            .collect()
    };

    Ok((build_problem(nodes, edges)?, truth))
}
