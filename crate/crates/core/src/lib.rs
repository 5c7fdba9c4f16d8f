//! Stationary periodic patterns of a singularly perturbed three-component
//! reaction–diffusion system: equilibria and spectra, fast/slow reductions,
//! Melnikov analysis of interface positions, and singular-limit builders for
//! one- and two-transition periodic solutions.

pub mod asymptotic1;
pub mod asymptotic2;
pub mod asymptotic3;
pub mod cheb;
pub mod error;
pub mod exec;
pub mod fastslow;
pub mod melnikov;
pub mod model;
pub mod params;
pub mod poly;
pub mod quad;

pub use error::{Error, Result};
pub use exec::Exec;
pub use params::{Branch, PhasePoint, SystemParams};
