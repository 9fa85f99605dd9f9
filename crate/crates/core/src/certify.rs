//! Exactness certificate for relaxed solutions, and evaluation metrics.
//!
//! A relaxed solution whose node values are unit vectors and whose `d`
//! auxiliaries equal the endpoint inner products is feasible for the
//! original problem with the same objective value; since the relaxation is a
//! lower bound, that signal is a global minimizer. Short of exactness, the
//! gap between the rounded signal's objective and the relaxed objective
//! bounds its suboptimality.

use thiserror::Error;

use crate::graph::{NodeId, Problem};
use crate::hermitian::{eigenvalues, LinalgError};
use crate::pauli::{build_edge_matrix, RANK_THRESHOLD};
use crate::solvers::{objective_original, round_node, RelaxedSolution, SolverError};
use crate::sphere::{angular_distance, UnitVec3};

pub const DEFAULT_TOL_X: f64 = 1e-5;
pub const DEFAULT_TOL_D: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertifyError {
    #[error("signals cover different node sets ({0} vs {1} values)")]
    KeyMismatch(usize, usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeCheck {
    pub edge: usize,
    pub u: NodeId,
    pub v: NodeId,
    /// Spectrum of the relaxed edge matrix, ascending.
    pub eigenvalues: [f64; 6],
    pub numeric_rank: usize,
    /// `|d − xᵤ·xᵥ|`.
    pub d_defect: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TightnessReport {
    pub per_edge: Vec<EdgeCheck>,
    /// `max |‖xₙ‖ − 1|`.
    pub max_norm_defect: f64,
    pub max_d_defect: f64,
    pub tight: bool,
    pub rounded_x: Vec<UnitVec3>,
    /// Nodes whose relaxed value was too short to normalize.
    pub degenerate_nodes: Vec<NodeId>,
    pub objective_rounded: f64,
    pub objective_relaxed: f64,
    /// `Ψ_orig(rounded_x) − Ψ_conv`.
    pub gap: f64,
}

/// Numerical rank: eigenvalues at or above `RANK_THRESHOLD·λ_max` count.
pub fn numeric_rank(eigenvalues: &[f64; 6]) -> usize {
    let top = eigenvalues[5];
    if top <= 0.0 {
        return 0;
    }
    eigenvalues.iter().filter(|&&l| l >= RANK_THRESHOLD * top).count()
}

/// Checks the exactness conditions on `sol` and rounds it onto the sphere.
///
/// The instance is tight when every node is within `tol_x` of unit norm,
/// every `d` within `tol_d` of its endpoint inner product, every edge matrix
/// has numerical rank at most 2, and no node needed the degenerate fallback.
pub fn certify_tightness(
    problem: &Problem,
    sol: &RelaxedSolution,
    tol_x: f64,
    tol_d: f64,
) -> Result<TightnessReport, CertifyError> {
    let mut per_edge = Vec::with_capacity(problem.num_edges());
    let mut max_d_defect = 0.0f64;
    for (e, aux) in sol.aux.iter().enumerate() {
        let (u, v) = problem.endpoints(e);
        let spectrum = eigenvalues(&build_edge_matrix(&sol.x[u], &sol.x[v], aux))?;
        let d_defect = (aux.d - sol.x[u].dot(&sol.x[v])).abs();
        max_d_defect = max_d_defect.max(d_defect);
        per_edge.push(EdgeCheck {
            edge: e,
            u: problem.nodes()[u].id.clone(),
            v: problem.nodes()[v].id.clone(),
            eigenvalues: spectrum,
            numeric_rank: numeric_rank(&spectrum),
            d_defect,
        });
    }

    let max_norm_defect = sol.x.iter().map(|x| (x.norm() - 1.0).abs()).fold(0.0, f64::max);

    let mut degenerate_nodes = Vec::new();
    let rounded_x: Vec<UnitVec3> = sol
        .x
        .iter()
        .enumerate()
        .map(|(i, x)| match problem.datum(i) {
            Some(y) if problem.is_fixed(i) => y,
            _ => round_node(problem, i, x).unwrap_or_else(|fallback| {
                degenerate_nodes.push(problem.nodes()[i].id.clone());
                fallback
            }),
        })
        .collect();

    let objective_rounded = objective_original(problem, &rounded_x)?;
    let tight = max_norm_defect <= tol_x
        && max_d_defect <= tol_d
        && per_edge.iter().all(|c| c.numeric_rank <= 2)
        && degenerate_nodes.is_empty();

    Ok(TightnessReport {
        per_edge,
        max_norm_defect,
        max_d_defect,
        tight,
        rounded_x,
        degenerate_nodes,
        objective_rounded,
        objective_relaxed: sol.objective_relaxed,
        gap: objective_rounded - sol.objective_relaxed,
    })
}

/// A posteriori bound on `Ψ_orig(rounded) − Ψ_orig(global optimum)`, valid
/// up to the solver's feasibility slack.
pub fn global_optimality_bound(report: &TightnessReport) -> f64 {
    report.gap
}

/// Mean great-circle distance in degrees.
pub fn mean_angular_error(x: &[UnitVec3], reference: &[UnitVec3]) -> Result<f64, CertifyError> {
    if x.len() != reference.len() {
        return Err(CertifyError::KeyMismatch(x.len(), reference.len()));
    }
    if x.is_empty() {
        return Ok(0.0);
    }
    let total: f64 = x.iter().zip(reference).map(|(a, b)| angular_distance(a, b)).sum();
    Ok((total / x.len() as f64).to_degrees())
}
