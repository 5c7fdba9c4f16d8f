//! Orbits sampled from analytic seeds on interface-adapted meshes.

use rd3_core::{PhasePoint, SystemParams};

use crate::mesh::equidistribute;
use crate::orbit::PeriodicOrbit;

/// Discretization size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Resolution {
    pub intervals: usize,
    pub stages: usize,
}

impl Resolution {
    /// Four stages and `max(200, 4/ε)` intervals.
    pub fn for_eps(eps: f64) -> Self {
        Resolution { intervals: ((4.0 / eps).ceil() as usize).max(200), stages: 4 }
    }

    pub fn refined(self) -> Self {
        Resolution { intervals: 2 * self.intervals, ..self }
    }
}

/// Share of intervals placed in the transition layers.
pub(crate) const LAYER_SHARE: f64 = 0.6;

/// Samples `seed` on a mesh equidistributing `1 + κ|u_x|`, with
/// `u_x = p/ε` taken from the seed itself.
pub fn orbit_from_seed<F: Fn(f64) -> PhasePoint>(params: SystemParams, res: Resolution, seed: F) -> PeriodicOrbit {
    let eps = params.eps;
    let mesh = equidistribute(|x| seed(x).p / eps, params.l, res.intervals, LAYER_SHARE);
    PeriodicOrbit::from_fn(params, mesh, res.stages, seed)
}
