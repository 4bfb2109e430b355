//! Dense Hermitian semidefinite programming.

mod problem;
mod solver;

pub use problem::{Constraint, Part, SdpProblem, Sense, SparseEntry};
pub use solver::{
    solve, IterateRecord, SdpSolution, SdpStatus, SolverOptions, StartPoint, DEFAULT_DAMPING,
    DEFAULT_MAX_ITERATIONS, DEFAULT_TOL,
};
