use crate::graph::Problem;
use crate::sphere::{UnitVec3, Vec3};

use super::local::neighbor_pull;
use super::{round_node, SolverError, SolverParams};

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineSolution {
    /// Minimizer of the quadratic objective over the unit ball.
    pub ball: Vec<Vec3>,
    /// `ball` rescaled onto the sphere.
    pub rounded: Vec<UnitVec3>,
    pub sweeps: usize,
    pub converged: bool,
    pub diagnostics: Vec<String>,
}

fn project_ball(v: Vec3) -> Vec3 {
    let n = v.norm();
    if n > 1.0 {
        (1.0 / n) * v
    } else {
        v
    }
}

/// Ball relaxation followed by radial rescaling.
///
/// The convex problem `Σ wₙ/2‖xₙ−yₙ‖² + Σ λ/2‖xₙ−xₙ'‖²` with every `xₙ` in
/// the unit ball is solved by cyclic block-coordinate descent, where each
/// block update is exact: the projection onto the ball of the weighted mean
/// `(wₙyₙ + Σλxₙ')/(wₙ + Σλ)`.
pub fn solve_baseline(problem: &Problem, params: &SolverParams) -> Result<BaselineSolution, SolverError> {
    params.validate()?;
    let n = problem.num_nodes();
    let mut ball: Vec<Vec3> = (0..n).map(|i| problem.datum(i).map_or(Vec3::ZERO, |y| y.vec())).collect();
    let free: Vec<usize> = (0..n).filter(|&i| !problem.is_fixed(i)).collect();

    let mut sweeps = 0;
    let mut converged = free.is_empty();
    while !converged && sweeps < params.max_iters {
        sweeps += 1;
        let mut max_change = 0.0f64;
        for &i in &free {
            let (pull, total) = neighbor_pull(problem, i, |j| ball[j]);
            // total > 0: an isolated free node has w > 0 by validation.
            let next = project_ball((1.0 / total) * pull);
            max_change = max_change.max((next - ball[i]).max_abs());
            ball[i] = next;
        }
        converged = max_change < params.tol_change;
    }

    let mut diagnostics = Vec::new();
    let rounded = ball
        .iter()
        .enumerate()
        .map(|(i, v)| match problem.datum(i) {
            Some(y) if problem.is_fixed(i) => y,
            _ => round_node(problem, i, v).unwrap_or_else(|fallback| {
                diagnostics.push(format!(
                    "baseline: node `{}` has degenerate norm {:e}; rounded to fallback",
                    problem.nodes()[i].id,
                    v.norm()
                ));
                fallback
            }),
        })
        .collect();

    Ok(BaselineSolution { ball, rounded, sweeps, converged, diagnostics })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_problem, Edge, Node, Weight};
    use crate::sphere::normalize;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_node_is_its_datum() {
        let y = normalize(Vec3::new(0.2, -0.5, 0.7)).unwrap();
        let p = build_problem(vec![Node::new("a", Some(y.vec()), Weight::Finite(1.0))], vec![]).unwrap();
        let sol = solve_baseline(&p, &SolverParams::default()).unwrap();
        assert_eq!(sol.ball, vec![y.vec()]);
        assert!((sol.rounded[0].vec() - y.vec()).max_abs() <= 1e-15);
    }

    #[test]
    fn equal_data_stay_put() {
        let y = normalize(Vec3::new(1.0, 1.0, 1.0)).unwrap();
        let p = build_problem(
            vec![Node::new("a", Some(y.vec()), Weight::Finite(1.0)), Node::new("b", Some(y.vec()), Weight::Finite(1.0))],
            vec![Edge::new("a", "b", 1.0)],
        )
        .unwrap();
        let sol = solve_baseline(&p, &SolverParams::default()).unwrap();
        for r in &sol.rounded {
            assert!((r.vec() - y.vec()).max_abs() <= 1e-15);
        }
    }

    #[test]
    fn antipodal_midpoint_falls_back() {
        let p = build_problem(
            vec![
                Node::new("a", Some(Vec3::new(1.0, 0.0, 0.0)), Weight::Infinite),
                Node::new("m", None, Weight::Finite(0.0)),
                Node::new("b", Some(Vec3::new(-1.0, 0.0, 0.0)), Weight::Infinite),
            ],
            vec![Edge::new("a", "m", 1.0), Edge::new("m", "b", 1.0)],
        )
        .unwrap();
        let sol = solve_baseline(&p, &SolverParams::default()).unwrap();
        assert_eq!(sol.ball[1], Vec3::ZERO);
        assert_eq!(sol.rounded[1], UnitVec3::E3);
        assert_eq!(sol.diagnostics.len(), 1);
    }

    #[test]
    fn converged_point_is_a_fixed_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 10;
        let nodes = (0..n)
            .map(|i| {
                let y = normalize(Vec3(std::array::from_fn(|_| rng.gen_range(-1.0..1.0)))).unwrap();
                let w = if i % 3 == 0 { Weight::Infinite } else { Weight::Finite(rng.gen_range(0.0..2.0)) };
                Node::new(format!("n{i}"), Some(y.vec()), w)
            })
            .collect();
        let edges = (0..n - 1).map(|i| Edge::new(format!("n{i}"), format!("n{}", i + 1), 1.0)).collect();
        let p = build_problem(nodes, edges).unwrap();
        let params = SolverParams::default();
        let sol = solve_baseline(&p, &params).unwrap();
        assert!(sol.converged);
        for i in (0..n).filter(|&i| !p.is_fixed(i)) {
            let (pull, total) = neighbor_pull(&p, i, |j| sol.ball[j]);
            let target = project_ball((1.0 / total) * pull);
            assert!((target - sol.ball[i]).max_abs() <= 10.0 * params.tol_change);
        }
    }
}
