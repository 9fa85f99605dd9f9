//! Solution methods for the sphere-valued Tikhonov problem.
//!
//! - [`solve_relaxation`]: the semidefinite relaxation over per-edge 6×6
//!   Hermitian matrices, solved by primal–dual proximal splitting.
//! - [`solve_baseline`]: minimization over the unit ball, then radial rescaling.
//! - [`solve_local`]: block-coordinate ascent directly on the sphere.
//!
//! Signals are slices indexed like [`Problem::nodes`].

mod affine;
mod baseline;
mod local;
mod relaxation;

pub use affine::{assemble_affine_map, AffineMap, EndpointSlot};
pub use baseline::{solve_baseline, BaselineSolution};
pub use local::{solve_local, LocalSolution};
pub use relaxation::{solve_relaxation, RelaxedSolution};

use thiserror::Error;

use crate::graph::{NodeId, Problem, Weight};
use crate::pauli::EdgeAux;
use crate::sphere::{UnitVec3, Vec3};

/// Tolerance on `‖xₙ − yₙ‖∞` for nodes pinned by an infinite weight.
pub const FIXED_NODE_TOLERANCE: f64 = 1e-12;

/// Fallback direction for nodes without data whose value degenerates to 0.
pub const FALLBACK_DIRECTION: UnitVec3 = UnitVec3::E3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("node `{0}` is fixed but its value differs from its datum")]
    FixedNodeViolation(NodeId),
    #[error("expected {expected} values, got {got}")]
    MissingValue { expected: usize, got: usize },
    #[error("invalid solver parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Linalg(#[from] crate::hermitian::LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverParams {
    pub max_iters: usize,
    pub tol_feasibility: f64,
    pub tol_change: f64,
    /// Primal–dual step products are kept at `step_scale²` of the stability limit.
    pub step_scale: f64,
    pub seed: u64,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            max_iters: 20_000,
            tol_feasibility: 1e-7,
            tol_change: 1e-9,
            step_scale: 0.99,
            seed: 0,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<(), SolverError> {
        let ok = self.max_iters > 0
            && self.tol_feasibility > 0.0
            && self.tol_change > 0.0
            && self.step_scale > 0.0
            && self.step_scale < 1.0;
        if ok {
            Ok(())
        } else {
            Err(SolverError::InvalidParams(format!("{self:?}")))
        }
    }
}

fn check_len(problem: &Problem, got: usize) -> Result<(), SolverError> {
    let expected = problem.num_nodes();
    if got != expected {
        return Err(SolverError::MissingValue { expected, got });
    }
    Ok(())
}

fn check_fixed(problem: &Problem, x: &[UnitVec3]) -> Result<(), SolverError> {
    for (i, xi) in x.iter().enumerate() {
        if problem.is_fixed(i) {
            let y = problem.datum(i).expect("fixed nodes carry data");
            if (xi.vec() - y.vec()).max_abs() > FIXED_NODE_TOLERANCE {
                return Err(SolverError::FixedNodeViolation(problem.nodes()[i].id.clone()));
            }
        }
    }
    Ok(())
}

/// Fidelity part `Σ wₙ(1 − xₙ·yₙ)` over finite weights.
fn fidelity(problem: &Problem, x: impl Fn(usize) -> Vec3) -> f64 {
    (0..problem.num_nodes())
        .filter_map(|i| match (problem.weight(i), problem.datum(i)) {
            (Weight::Finite(w), Some(y)) if w != 0.0 => Some(w * (1.0 - x(i).dot(&y.vec()))),
            _ => None,
        })
        .sum()
}

/// `Σ wₙ(1 − xₙ·yₙ) + Σ λ(1 − xₙ·xₙ')` for a signal on the sphere.
pub fn objective_original(problem: &Problem, x: &[UnitVec3]) -> Result<f64, SolverError> {
    check_len(problem, x.len())?;
    check_fixed(problem, x)?;
    let smooth: f64 = (0..problem.num_edges())
        .map(|e| {
            let (u, v) = problem.endpoints(e);
            problem.lambda(e) * (1.0 - x[u].dot(&x[v]))
        })
        .sum();
    Ok(fidelity(problem, |i| x[i].vec()) + smooth)
}

/// `Σ wₙ(1 − xₙ·yₙ) + Σ λ(1 − d)`, the relaxed objective.
pub fn objective_relaxed(problem: &Problem, x: &[Vec3], aux: &[EdgeAux]) -> Result<f64, SolverError> {
    check_len(problem, x.len())?;
    if aux.len() != problem.num_edges() {
        return Err(SolverError::MissingValue { expected: problem.num_edges(), got: aux.len() });
    }
    let smooth: f64 = aux.iter().enumerate().map(|(e, a)| problem.lambda(e) * (1.0 - a.d)).sum();
    Ok(fidelity(problem, |i| x[i]) + smooth)
}

/// Rounds a relaxed or ball-constrained value onto the sphere, falling back
/// to the datum (or [`FALLBACK_DIRECTION`]) when the norm degenerates.
pub(crate) fn round_node(problem: &Problem, i: usize, v: &Vec3) -> Result<UnitVec3, UnitVec3> {
    crate::sphere::normalize(*v).map_err(|_| problem.datum(i).unwrap_or(FALLBACK_DIRECTION))
}
