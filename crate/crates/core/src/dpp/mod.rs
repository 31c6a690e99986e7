//! Discretized dynamic programming operator T_ε and the bracket solver.

mod directions;
mod grid;
mod quadrature;
mod scheme;
mod solver;

pub use directions::{reference_frame, DirectionSet};
pub use grid::{GridField, Lattice};
pub use quadrature::DiskQuadrature;
pub use scheme::{disk_average, eval_w, Scheme, SchemeParams};
pub use solver::{solve_bracket, Bracket, Snapshot, SolveOptions, SolverReport};
