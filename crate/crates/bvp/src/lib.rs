//! Periodic boundary-value solver for the stationary system: Gauss
//! collocation, Newton with a phase condition, pseudo-arclength continuation
//! in `A`, and detection of the spatial Hamiltonian–Hopf point.

pub mod banded;
pub mod continuation;
pub mod error;
pub mod field;
pub mod hopf;
pub mod io;
pub mod mesh;
pub mod orbit;
pub mod seed;
pub mod solver;

pub use continuation::{continue_branch, switch_branch, BranchPoint, BranchRun, DiagramRow, EndReason, PointKind, StepControl};
pub use error::{BvpError, Result};
pub use hopf::detect_hamiltonian_hopf;
pub use orbit::PeriodicOrbit;
pub use seed::{orbit_from_seed, Resolution};
pub use solver::{newton_solve, residual_norm, Converged, NewtonOptions};
