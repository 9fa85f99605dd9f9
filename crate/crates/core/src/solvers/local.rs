use crate::graph::{Problem, Weight};
use crate::sphere::{angular_distance, normalize, UnitVec3, Vec3};

use super::{check_fixed, check_len, SolverError, SolverParams};

#[derive(Debug, Clone, PartialEq)]
pub struct LocalSolution {
    pub x: Vec<UnitVec3>,
    pub sweeps: usize,
    pub converged: bool,
    pub diagnostics: Vec<String>,
}

/// `wₙyₙ + Σ λ xₙ'`, the linear functional that node `i` maximizes when all
/// other nodes are held.
pub(crate) fn neighbor_pull(problem: &Problem, i: usize, x: impl Fn(usize) -> Vec3) -> (Vec3, f64) {
    let (mut s, mut total) = match (problem.weight(i), problem.datum(i)) {
        (Weight::Finite(w), Some(y)) => (w * y.vec(), w),
        _ => (Vec3::ZERO, 0.0),
    };
    for &e in problem.incident(i) {
        let (u, v) = problem.endpoints(e);
        let j = if u == i { v } else { u };
        let l = problem.lambda(e);
        s = s + l * x(j);
        total += l;
    }
    (s, total)
}

/// Block-coordinate ascent on the sphere: each free node in turn moves to the
/// exact minimizer of the objective with its neighbors held, which is the
/// normalized pull `normalize(wₙyₙ + Σ λ xₙ')`. The objective never increases.
///
/// A node whose pull vanishes keeps its previous value and is reported once
/// in the diagnostics.
pub fn solve_local(problem: &Problem, x0: &[UnitVec3], params: &SolverParams) -> Result<LocalSolution, SolverError> {
    params.validate()?;
    check_len(problem, x0.len())?;
    check_fixed(problem, x0)?;

    let mut x = x0.to_vec();
    let mut degenerate = vec![false; x.len()];
    let mut diagnostics = Vec::new();
    let free: Vec<usize> = (0..x.len()).filter(|&i| !problem.is_fixed(i)).collect();

    let mut sweeps = 0;
    let mut converged = free.is_empty();
    while !converged && sweeps < params.max_iters {
        sweeps += 1;
        let mut max_change = 0.0f64;
        for &i in &free {
            let (pull, _) = neighbor_pull(problem, i, |j| x[j].vec());
            match normalize(pull) {
                Ok(next) => {
                    max_change = max_change.max(angular_distance(&x[i], &next));
                    x[i] = next;
                }
                Err(_) if !degenerate[i] => {
                    degenerate[i] = true;
                    diagnostics.push(format!(
                        "local: degenerate update at node `{}`; previous value kept",
                        problem.nodes()[i].id
                    ));
                }
                Err(_) => {}
            }
        }
        converged = max_change < params.tol_change;
    }

    Ok(LocalSolution { x, sweeps, converged, diagnostics })
}
