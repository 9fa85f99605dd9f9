use crate::graph::{Problem, Weight};
use crate::hermitian::{eig_hermitian, min_eigenvalue, project_from_eig};
use crate::pauli::{EdgeAux, HermitianMat6};
use crate::sphere::Vec3;

use super::affine::{assemble_affine_map, AffineMap, EndpointSlot};
use super::{objective_relaxed, SolverError, SolverParams};

/// Output of [`solve_relaxation`].
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxedSolution {
    /// Relaxed value per node; pinned nodes and free nodes without edges carry
    /// their datum.
    pub x: Vec<Vec3>,
    pub aux: Vec<EdgeAux>,
    /// Dual matrices (negative semidefinite) per edge.
    pub dual: Vec<HermitianMat6>,
    pub objective_relaxed: f64,
    pub iterations: usize,
    /// `max_e max(0, −λ_min(A_e(z)))`.
    pub residual_feasibility: f64,
    /// `‖z_k − z_{k−1}‖∞ / max(1, ‖z_k‖∞)` at exit.
    pub residual_change: f64,
    pub converged: bool,
    pub diagnostics: Vec<String>,
}

/// Linear cost `c` of the relaxed objective in the variable layout of `map`,
/// without its additive constant.
fn cost_vector(problem: &Problem, map: &AffineMap) -> Vec<f64> {
    let mut c = vec![0.0; map.num_vars()];
    for i in 0..problem.num_nodes() {
        if let (Some(EndpointSlot::Var(k)), Weight::Finite(w), Some(y)) =
            (map.slot(i), problem.weight(i), problem.datum(i))
        {
            for (ck, yk) in c[k..k + 3].iter_mut().zip(y.coords()) {
                *ck = -w * yk;
            }
        }
    }
    for e in 0..problem.num_edges() {
        c[map.aux_index(e)] = -problem.lambda(e);
    }
    c
}

/// Dual step size. Primal steps are scaled per variable against it.
const DUAL_STEP: f64 = 1.0;

/// Solves the semidefinite relaxation
///
/// ```text
/// minimize  Σ wₙ(1 − xₙ·yₙ) + Σ λ(1 − d)   subject to  A_e(z) ⪰ 0 for every edge
/// ```
///
/// with a diagonally preconditioned primal–dual hybrid gradient iteration:
///
/// ```text
/// Y_e ← Y_e + σA_e(z̄) − σ Π₊(Y_e/σ + A_e(z̄))
/// z   ← z − T (c + Σ_e A_e*(Y_e))
/// z̄   ← 2z_new − z_old
/// ```
///
/// Each iteration performs one PSD projection per edge. Because the
/// coefficient matrices of distinct variables are mutually orthogonal,
/// `A*A` is diagonal, and the per-variable steps `Tᵢ = s²/(σ‖A eᵢ‖²)` satisfy
/// the step condition `‖σ^{1/2} A T^{1/2}‖ = s < 1`.
///
/// The iteration stops when the relative iterate change drops below
/// `tol_change` and every edge matrix has minimum eigenvalue above
/// `−tol_feasibility`, or after `max_iters` iterations with `converged = false`.
pub fn solve_relaxation(problem: &Problem, params: &SolverParams) -> Result<RelaxedSolution, SolverError> {
    params.validate()?;
    let map = assemble_affine_map(problem);
    let c = cost_vector(problem, &map);
    let n = map.num_vars();
    let num_edges = map.num_edges();

    let sigma = DUAL_STEP;
    let s2 = params.step_scale * params.step_scale;
    let tau: Vec<f64> = map.column_norms_sq().iter().map(|&cn| s2 / (sigma * cn)).collect();

    let mut z = vec![0.0; n];
    let mut z_bar = z.clone();
    let mut dual = vec![HermitianMat6::zeros(); num_edges];
    let mut grad = vec![0.0; n];

    let mut iterations = 0;
    let mut residual_change = f64::INFINITY;
    let mut residual_feasibility = f64::INFINITY;
    let mut converged = num_edges == 0;
    if converged {
        residual_change = 0.0;
        residual_feasibility = 0.0;
    }

    while !converged && iterations < params.max_iters {
        iterations += 1;
        grad.copy_from_slice(&c);
        for (e, y) in dual.iter_mut().enumerate() {
            let a = map.apply(e, &z_bar);
            let shifted = y.scale(1.0 / sigma).add(&a);
            let eig = eig_hermitian(&shifted)?;
            let projected = project_from_eig(&shifted, &eig);
            *y = shifted.sub(&projected).scale(sigma);
            map.adjoint_add(e, y, &mut grad);
        }

        let mut change = 0.0f64;
        let mut zmax = 0.0f64;
        for k in 0..n {
            let old = z[k];
            let new = old - tau[k] * grad[k];
            z[k] = new;
            z_bar[k] = 2.0 * new - old;
            change = change.max((new - old).abs());
            zmax = zmax.max(new.abs());
        }
        residual_change = change / zmax.max(1.0);

        if residual_change <= params.tol_change {
            residual_feasibility = feasibility(&map, &z)?;
            converged = residual_feasibility <= params.tol_feasibility;
        }
    }
    if !converged && num_edges > 0 {
        residual_feasibility = feasibility(&map, &z)?;
    }

    let x: Vec<Vec3> = (0..problem.num_nodes())
        .map(|i| {
            map.node_value(i, &z)
                .or_else(|| problem.datum(i).map(|y| y.vec()))
                .expect("free nodes without edges carry data")
        })
        .collect();
    let aux: Vec<EdgeAux> = (0..num_edges).map(|e| map.aux_value(e, &z)).collect();
    let objective = objective_relaxed(problem, &x, &aux)?;

    let mut diagnostics = Vec::new();
    if !converged {
        diagnostics.push(format!(
            "relaxation: not converged after {iterations} iterations \
             (feasibility {residual_feasibility:e}, change {residual_change:e})"
        ));
    }

    Ok(RelaxedSolution {
        x,
        aux,
        dual,
        objective_relaxed: objective,
        iterations,
        residual_feasibility,
        residual_change,
        converged,
        diagnostics,
    })
}

fn feasibility(map: &AffineMap, z: &[f64]) -> Result<f64, SolverError> {
    let mut worst = 0.0f64;
    for e in 0..map.num_edges() {
        worst = worst.max(-min_eigenvalue(&map.apply(e, z))?);
    }
    Ok(worst)
}
