use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Model constants of the stationary system
///
/// ```text
/// 0 = ε² u_xx + u − u³ − (A v + B w + C)
/// 0 = v_xx + u − v
/// 0 = D² w_xx + u − w
/// ```
///
/// on the periodic cell `[−L, L]`. Each coupling constant is stored through its
/// regular expansion `A = A0 + ε A1` (likewise for `B`, `C`), so the full value is
/// always derived from the decomposition. The relaxation constants of the
/// time-dependent model play no role for stationary patterns and are not stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub eps: f64,
    pub a0: f64,
    pub a1: f64,
    pub b0: f64,
    pub b1: f64,
    pub c0: f64,
    pub c1: f64,
    pub d: f64,
    /// Half period.
    pub l: f64,
}

impl SystemParams {
    /// Parameters given by their full values; the order-one parts carry everything.
    pub fn new(eps: f64, a: f64, b: f64, c: f64, d: f64, l: f64) -> Result<Self> {
        let p = SystemParams { eps, a0: a, a1: 0.0, b0: b, b1: 0.0, c0: c, c1: 0.0, d, l };
        p.validate()?;
        Ok(p)
    }

    /// Small-`B`, small-`C` scaling: `B = ε B1`, `C = ε C1`, `A = A0 + ε A1`.
    pub fn small_bc(eps: f64, a0: f64, a1: f64, b1: f64, c1: f64, d: f64, l: f64) -> Result<Self> {
        let p = SystemParams { eps, a0, a1, b0: 0.0, b1, c0: 0.0, c1, d, l };
        p.validate()?;
        Ok(p)
    }

    /// Small-`B`, small-`C` scaling built from full values of `A`, `B`, `C`.
    pub fn small_bc_from_full(eps: f64, a: f64, b: f64, c: f64, d: f64, l: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::InvalidParams(format!("eps must be positive, got {eps}")));
        }
        Self::small_bc(eps, a, 0.0, b / eps, c / eps, d, l)
    }

    /// All couplings of order ε: `A = ε A1`, `B = ε B1`, `C = ε C1`.
    pub fn all_small(eps: f64, a1: f64, b1: f64, c1: f64, d: f64, l: f64) -> Result<Self> {
        Self::small_bc(eps, 0.0, a1, b1, c1, d, l)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.eps, self.a0, self.a1, self.b0, self.b1, self.c0, self.c1, self.d, self.l];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        if !(self.eps > 0.0) {
            return Err(Error::InvalidParams(format!("eps must be positive, got {}", self.eps)));
        }
        if !(self.d > 1.0) {
            return Err(Error::InvalidParams(format!("D must exceed 1, got {}", self.d)));
        }
        if !(self.l > 0.0) {
            return Err(Error::InvalidParams(format!("L must be positive, got {}", self.l)));
        }
        Ok(())
    }

    #[inline]
    pub fn a(&self) -> f64 {
        self.a0 + self.eps * self.a1
    }

    #[inline]
    pub fn b(&self) -> f64 {
        self.b0 + self.eps * self.b1
    }

    #[inline]
    pub fn c(&self) -> f64 {
        self.c0 + self.eps * self.c1
    }

    /// `B0 = C0 = 0`.
    pub fn is_small_bc(&self) -> bool {
        self.b0 == 0.0 && self.c0 == 0.0
    }

    /// Copy with the full value of `A` replaced, keeping the split of `B` and `C`.
    pub fn with_a(&self, a: f64) -> Self {
        SystemParams { a0: a, a1: 0.0, ..*self }
    }

    pub fn with_eps(&self, eps: f64) -> Self {
        SystemParams { eps, ..*self }
    }

    pub fn with_l(&self, l: f64) -> Self {
        SystemParams { l, ..*self }
    }
}

/// State `(u, p, v, q, w, r)` of the first-order system with
/// `p = ε u_x`, `q = v_x`, `r = D w_x`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhasePoint {
    pub u: f64,
    pub p: f64,
    pub v: f64,
    pub q: f64,
    pub w: f64,
    pub r: f64,
}

impl PhasePoint {
    pub const fn new(u: f64, p: f64, v: f64, q: f64, w: f64, r: f64) -> Self {
        PhasePoint { u, p, v, q, w, r }
    }

    pub const fn splat_equilibrium(ue: f64) -> Self {
        PhasePoint { u: ue, p: 0.0, v: ue, q: 0.0, w: ue, r: 0.0 }
    }

    pub fn to_array(self) -> [f64; 6] {
        [self.u, self.p, self.v, self.q, self.w, self.r]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        PhasePoint { u: a[0], p: a[1], v: a[2], q: a[3], w: a[4], r: a[5] }
    }

    pub fn from_slice(s: &[f64]) -> Self {
        PhasePoint { u: s[0], p: s[1], v: s[2], q: s[3], w: s[4], r: s[5] }
    }

    /// Reversibility map `(u, p, v, q, w, r) → (u, −p, v, −q, w, −r)`.
    pub fn reversed(self) -> Self {
        PhasePoint { p: -self.p, q: -self.q, r: -self.r, ..self }
    }

    pub fn neg(self) -> Self {
        PhasePoint::from_array(self.to_array().map(|x| -x))
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }

    pub fn max_abs_diff(&self, other: &PhasePoint) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Choice between the two symmetric branches (`u ≈ +1` or `u ≈ −1` side).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }

    pub fn from_sign(s: f64) -> Self {
        if s >= 0.0 {
            Branch::Plus
        } else {
            Branch::Minus
        }
    }
}
