//! Tikhonov regularization of signals with values on the unit sphere of ℝ³,
//! defined on arbitrary undirected graphs.
//!
//! The nonconvex smoothing / interpolation problem is solved through a
//! semidefinite relaxation built from 6×6 Hermitian edge matrices. When the
//! relaxed solution lands back on the sphere, it is the certified global
//! optimum of the original problem; [`certify`] decides this.
//!
//! Module map:
//! - [`graph`]: problem model and validation.
//! - [`sphere`]: vectors, normalization, von Mises–Fisher sampling.
//! - [`pauli`]: scaled Pauli embedding and edge matrices.
//! - [`hermitian`]: 6×6 Hermitian eigensolver and PSD projection.
//! - [`solvers`]: relaxation, baseline ball relaxation, local ascent.
//! - [`certify`]: tightness certificate and error metrics.
//! - [`io`], [`experiment`], [`cli`]: file formats, synthetic data, command line.

pub mod certify;
pub mod cli;
pub mod experiment;
pub mod graph;
pub mod hermitian;
pub mod io;
pub mod pauli;
pub mod solvers;
pub mod sphere;

pub use certify::{certify_tightness, global_optimality_bound, mean_angular_error, TightnessReport};
pub use graph::{build_problem, Edge, Node, NodeId, Problem, ProblemError, Weight};
pub use solvers::{
    objective_original, objective_relaxed, solve_baseline, solve_local, solve_relaxation,
    RelaxedSolution, SolverParams,
};
pub use sphere::{UnitVec3, Vec3};
