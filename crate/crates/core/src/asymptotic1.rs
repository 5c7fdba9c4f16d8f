//! Periodic patterns with one fast (homoclinic) transition per period, for
//! `B = εB1`, `C = εC1` and `0 < A < 2/3`, including the first-order slow
//! corrections.
//!
//! With `ū0 = ±√(1−A)` the slow variables sit at `ū0 + ε(v1, w1)` where
//! `(v1, q1, w1, r1)` solve a linear constant-coefficient system on
//! `(0, L)` with jumps `J1` in `q1` and `J1/D` in `r1` across the fast layer
//! at `x = 0`; `J1 = ∫(ū0 − u_h) dξ` over the homoclinic `u_h`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fastslow::{fast_homoclinic, FastConnection};
use crate::params::{Branch, PhasePoint, SystemParams};

/// Constants and closed-form first-order slow profiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrectionProfiles {
    /// `M = √(2(1−A)/(2−3A))`.
    pub m: f64,
    /// `N = A/(2−3A)`.
    pub n: f64,
    pub j1: f64,
    /// `(B1 ū0 + C1)/(2−3A)`.
    pub k0: f64,
    /// Plateau shift `−(C1 + B1 ū0)/(2(1−A))`, shared by `v1` and `w1`.
    pub plateau: f64,
    c: f64,
    gamma: f64,
    delta: f64,
    d: f64,
    l: f64,
}

/// Reduce `x` into `[−L, L]`.
pub fn wrap_period(x: f64, l: f64) -> f64 {
    let p = 2.0 * l;
    let y = (x + l).rem_euclid(p) - l;
    if y == -l && x > 0.0 {
        l
    } else {
        y
    }
}

impl CorrectionProfiles {
    fn new(a: f64, u0: f64, b1: f64, c1: f64, d: f64, l: f64, j1: f64) -> Result<Self> {
        let m = (2.0 * (1.0 - a) / (2.0 - 3.0 * a)).sqrt();
        let n = a / (2.0 - 3.0 * a);
        let res = d * d * m * m - 1.0;
        if res.abs() < 1e-6 {
            return Err(Error::Resonance(format!("D²M² − 1 = {res:e} at A = {a}, D = {d}")));
        }
        let k0 = (b1 * u0 + c1) / (2.0 - 3.0 * a);
        let plateau = -(c1 + b1 * u0) / (2.0 * (1.0 - a));
        let c = -j1 / (2.0 * m * (m * l).sinh());
        let gamma = n * c / res;
        let delta = -j1 * (res - n * d * d) / (2.0 * d * (l / d).sinh() * res);
        Ok(CorrectionProfiles { m, n, j1, k0, plateau, c, gamma, delta, d, l })
    }

    /// `|x| − L` after periodic reduction, and the sign of `x`.
    fn arg(&self, x: f64) -> (f64, f64) {
        let y = wrap_period(x, self.l);
        (y.abs() - self.l, if y >= 0.0 { 1.0 } else { -1.0 })
    }

    pub fn v1(&self, x: f64) -> f64 {
        let (s, _) = self.arg(x);
        self.plateau + self.c * (self.m * s).cosh()
    }

    /// Odd in `x`; jumps by `J1` at `x = 0`.
    pub fn q1(&self, x: f64) -> f64 {
        let (s, sg) = self.arg(x);
        sg * self.c * self.m * (self.m * s).sinh()
    }

    pub fn w1(&self, x: f64) -> f64 {
        let (s, _) = self.arg(x);
        self.plateau + self.gamma * (self.m * s).cosh() + self.delta * (s / self.d).cosh()
    }

    /// `D w1'`; jumps by `J1/D` at `x = 0`.
    pub fn r1(&self, x: f64) -> f64 {
        let (s, sg) = self.arg(x);
        sg * self.d * (self.gamma * self.m * (self.m * s).sinh() + self.delta / self.d * (s / self.d).sinh())
    }

    /// First-order outer correction of `u`: `−N v1 − k0`.
    pub fn u1(&self, x: f64) -> f64 {
        -self.n * self.v1(x) - self.k0
    }
}

/// Leading-order slow-manifold correction `(û1, p̂1)` at `(v, q, w)`.
pub fn slow_manifold_correction(params: &SystemParams, u0: f64, q: f64, w: f64) -> Result<(f64, f64)> {
    let den = 1.0 - 3.0 * u0 * u0;
    if den.abs() < 10.0 * params.eps {
        return Err(Error::Domain(format!("û0 = {u0} is too close to the fold ±1/√3")));
    }
    Ok(((params.b1 * w + params.c1) / den, params.a() * q / den))
}

#[derive(Debug, Clone)]
pub struct OnePulseSolution {
    pub params: SystemParams,
    pub branch: Branch,
    pub a: f64,
    /// `ū0 = ±√(1−A)`.
    pub plateau: f64,
    pub fast: FastConnection,
    pub corrections: CorrectionProfiles,
    /// `A` within `√ε` of either end of `(0, 2/3)`.
    pub near_boundary: bool,
}

/// Which terms of the expansion to include.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Leading,
    FirstCorrected,
}

pub fn correction_profiles(params: &SystemParams, branch: Branch) -> Result<CorrectionProfiles> {
    Ok(build_one_pulse(params, branch)?.corrections)
}

/// One-transition pattern with the homoclinic centred at `x = 0`.
pub fn build_one_pulse(params: &SystemParams, branch: Branch) -> Result<OnePulseSolution> {
    params.validate()?;
    if !params.is_small_bc() {
        return Err(Error::InvalidParams("one-transition builder needs B = εB1 and C = εC1".into()));
    }
    let a = params.a();
    if !(a > 0.0 && a < 2.0 / 3.0) {
        return Err(Error::Existence(format!("one-transition patterns need 0 < A < 2/3, got A = {a}")));
    }
    let margin = params.eps.sqrt();
    let near_boundary = a < margin || 2.0 / 3.0 - a < margin;
    let u0 = branch.sign() * (1.0 - a).sqrt();
    let fast = fast_homoclinic(a * u0)?;
    let j1 = fast.excess_integral().expect("homoclinic");
    let corrections = CorrectionProfiles::new(a, u0, params.b1, params.c1, params.d, params.l, j1)?;
    Ok(OnePulseSolution { params: *params, branch, a, plateau: u0, fast, corrections, near_boundary })
}

impl OnePulseSolution {
    /// Composite (slow + fast − common limit) state at `x`.
    pub fn eval(&self, x: f64, order: Order) -> PhasePoint {
        let eps = self.params.eps;
        let y = wrap_period(x, self.params.l);
        let xi = y / eps;
        let (uh, ph) = self.fast.eval(xi);
        let u0 = self.plateau;
        match order {
            Order::Leading => PhasePoint::new(uh, ph, u0, 0.0, u0, 0.0),
            Order::FirstCorrected => {
                let c = &self.corrections;
                let sg = if y >= 0.0 { 1.0 } else { -1.0 };
                // inner part of q, r: the layer integral replaces the jump
                let inner = self.fast.excess_partial(xi).unwrap() - sg * 0.5 * c.j1;
                PhasePoint::new(
                    uh + eps * c.u1(y),
                    ph,
                    u0 + eps * c.v1(y),
                    eps * (c.q1(y) + inner),
                    u0 + eps * c.w1(y),
                    eps * (c.r1(y) + inner / self.params.d),
                )
            }
        }
    }

    /// Extremal `u` of the fast transition.
    pub fn extremal(&self) -> f64 {
        self.fast.extremal.unwrap()
    }
}
