//! Quantitative checks on converged fields and on the one-step operator.

mod barrier;
mod convergence;
mod holder;
mod taylor;
mod viscosity;

pub use barrier::{
    barrier_check, barrier_drift, barrier_sigma, barrier_theta, boundary_estimate_check, BarrierSpec,
    BoundaryEstimate,
};
pub use convergence::{convergence_study, ConvergenceProblem, ConvergenceRow, ConvergenceTable, Probes};
pub use holder::{holder_modulus, HolderOptions, HolderReport};
pub use taylor::{taylor_residual, AffineFn, ExpFirst, RadialPowerFn, SquaredDistance, TestFunction};
pub use viscosity::{px_laplacian, Branch, PxLaplacian, ViscosityResidual};
