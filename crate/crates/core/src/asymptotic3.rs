//! Two-transition patterns with `A = A0` of order one and `B`, `C` of order ε.
//!
//! Interfaces sit at `±L/2`. On `I3 = (−L/2, L/2)` the slow orbit lies on
//! the lower branch of the slow manifold, `u < −1/√3`, and solves
//! `u' = −A0 q/(3u² − 1)`, `q' = ((1−A0)u − u³)/A0`, which conserves
//! `E = A0² q²/2 + V(u)`. The orbit leaves `(−1, q*)` and returns to
//! `(−1, −q*)`; its turning point sits at `x = 0`. The other segments follow
//! from `(u, q, w, r)(x) = −(u, q, w, r)(x ± L)`.

use serde::Serialize;

use crate::asymptotic1::wrap_period;
use crate::asymptotic2::Segment;
use crate::cheb::Chebyshev;
use crate::error::{Error, Result};
use crate::fastslow::INV_SQRT3;
use crate::params::PhasePoint;
use crate::quad::{adaptive, Rule};

/// Margin kept below `L_max` when `A0 ≥ 2/3`.
pub const L_MAX_MARGIN: f64 = 1e-4;

pub fn potential_v(u: f64, a0: f64) -> f64 {
    let u2 = u * u;
    0.25 * u2 * (a0 * (2.0 - 3.0 * u2) - 2.0 * (u2 - 1.0) * (u2 - 1.0))
}

pub fn dpotential_v(u: f64, a0: f64) -> f64 {
    u * (1.0 - 3.0 * u * u) * (u * u - 1.0 + a0)
}

pub fn energy_e(u: f64, q: f64, a0: f64) -> f64 {
    0.5 * a0 * a0 * q * q + potential_v(u, a0)
}

/// Level of both slow orbits: `E(−1, q*)`.
pub fn e_star(q_star: f64, a0: f64) -> f64 {
    0.25 * a0 * (2.0 * a0 * q_star * q_star - 1.0)
}

/// `P` with `V(u) − V(us) = (u − us)² P(u)`, ascending coefficients; `us`
/// must be a critical point of `V`.
fn saddle_quotient(a0: f64, us: f64) -> [f64; 5] {
    let mut c = [0.0, 0.0, 0.5 * (a0 - 1.0), 0.0, 0.25 * (4.0 - 3.0 * a0), 0.0, -0.5];
    c[0] = -potential_v(us, a0);
    // two synthetic divisions by (u − us), remainders dropped
    for deg in [6usize, 5] {
        let mut acc = 0.0;
        let mut q = [0.0; 7];
        for k in (1..=deg).rev() {
            acc = acc * us + c[k];
            q[k - 1] = acc;
        }
        c = q;
    }
    [c[0], c[1], c[2], c[3], c[4]]
}

fn poly_eval(p: &[f64], u: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * u + c)
}

/// `(p(a) − p(b))/(a − b)`.
fn poly_dd(p: &[f64], a: f64, b: f64) -> f64 {
    let mut sum = 0.0;
    for (n, c) in p.iter().enumerate().skip(1) {
        let n = n as i32;
        sum += c * (0..n).map(|k| a.powi(k) * b.powi(n - 1 - k)).sum::<f64>();
    }
    sum
}

/// Slow flow `(u', q')` on the lower slow-manifold branch.
pub fn slow_rhs(u: f64, q: f64, a0: f64) -> (f64, f64) {
    (-a0 * q / (3.0 * u * u - 1.0), ((1.0 - a0) * u - u * u * u) / a0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Case {
    /// `A0 < 0`
    Aneg,
    /// `0 < A0 < 2/3`
    Asmall,
    /// `A0 ≥ 2/3`
    Alarge,
}

impl Case {
    pub fn of(a0: f64) -> Result<Case> {
        if !a0.is_finite() || a0 == 0.0 {
            return Err(Error::InvalidParams(format!("A0 must be finite and nonzero, got {a0}")));
        }
        Ok(if a0 < 0.0 {
            Case::Aneg
        } else if a0 < 2.0 / 3.0 {
            Case::Asmall
        } else {
            Case::Alarge
        })
    }

    /// Open bracket `(lo, hi)` for the turning point.
    pub fn bracket(self, a0: f64) -> (f64, f64) {
        match self {
            Case::Aneg => (-(1.0 - a0).sqrt(), -1.0),
            Case::Asmall => (-1.0, -(1.0 - a0).sqrt()),
            Case::Alarge => (-1.0, -INV_SQRT3),
        }
    }

    /// Endpoint of the bracket away from `−1` (saddle or fold).
    fn far_end(self, a0: f64) -> f64 {
        match self {
            Case::Aneg => -(1.0 - a0).sqrt(),
            Case::Asmall => -(1.0 - a0).sqrt(),
            Case::Alarge => -INV_SQRT3,
        }
    }
}

/// Supremum of `|q*|` for orbits that return to `u = −1`.
pub fn qstar_bound(a0: f64) -> Result<f64> {
    Ok(match Case::of(a0)? {
        Case::Aneg | Case::Asmall => (0.5 * (2.0 - a0)).sqrt(),
        Case::Alarge => (2.0 * (9.0 * a0 - 2.0) / (27.0 * a0 * a0)).sqrt(),
    })
}

fn check_qstar(q_star: f64, a0: f64) -> Result<Case> {
    let case = Case::of(a0)?;
    let bound = qstar_bound(a0)?;
    if !(q_star <= 0.0 && -q_star < bound) {
        return Err(Error::Range(format!("q* = {q_star} outside (−{bound}, 0] at A0 = {a0}")));
    }
    Ok(case)
}

/// Root of `E(u, 0) = E*` in the case bracket.
pub fn turning_point(q_star: f64, a0: f64) -> Result<f64> {
    check_qstar(q_star, a0)?;
    turning_from_deficit(1.0 + q_star / qstar_bound(a0)?, a0)
}

/// Turning point for `q* = −bound·(1 − δ)`. Writing `E* − V` relative to
/// the separatrix level keeps full precision as `δ → 0`.
fn turning_from_deficit(delta: f64, a0: f64) -> Result<f64> {
    let case = Case::of(a0)?;
    if delta == 1.0 {
        return Ok(-1.0);
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Range(format!("separatrix deficit {delta} outside (0, 1]")));
    }
    let far = case.far_end(a0);
    let pq = saddle_quotient(a0, far);
    let qb = qstar_bound(a0)?;
    let lift = 0.5 * a0 * a0 * qb * qb * delta * (2.0 - delta);
    // f = V(u) − E*: negative at −1, `lift > 0` at the far end
    let f = |u: f64| (u - far) * (u - far) * poly_eval(&pq, u) + lift;
    let (mut near, mut far_b) = (-1.0, far);
    for _ in 0..200 {
        let mid = 0.5 * (near + far_b);
        if mid == near || mid == far_b {
            break;
        }
        if f(mid) > 0.0 {
            far_b = mid;
        } else {
            near = mid;
        }
    }
    let mut u = 0.5 * (near + far_b);
    let d = dpotential_v(u, a0);
    if d != 0.0 {
        let step = f(u) / d;
        if step.abs() <= (far_b - near).abs().max(1e-15) {
            u -= step;
        }
    }
    Ok(u)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlowPhaseOrbit {
    pub a0: f64,
    pub q_star: f64,
    pub e_star: f64,
    pub turning: f64,
    pub case: Case,
    /// Length `L` of `I3`, i.e. the half-period.
    pub half_length: f64,
    #[serde(skip)]
    quot: [f64; 5],
}

impl SlowPhaseOrbit {
    pub fn new(q_star: f64, a0: f64) -> Result<Self> {
        check_qstar(q_star, a0)?;
        Self::from_deficit(1.0 + q_star / qstar_bound(a0)?, a0)
    }

    /// Orbit with `q* = −bound·(1 − δ)`, `0 < δ ≤ 1`.
    pub fn from_deficit(delta: f64, a0: f64) -> Result<Self> {
        let case = Case::of(a0)?;
        let q_star = -qstar_bound(a0)? * (1.0 - delta);
        let turning = turning_from_deficit(delta, a0)?;
        let quot = saddle_quotient(a0, case.far_end(a0));
        let mut orbit =
            SlowPhaseOrbit { a0, q_star, e_star: e_star(q_star, a0), turning, case, half_length: 0.0, quot };
        let s_end = orbit.s_end();
        orbit.half_length = if s_end == 0.0 {
            0.0
        } else {
            let k = orbit.knots();
            let mut sum = 0.0;
            for w in k.windows(2) {
                sum += adaptive(|s| orbit.dx_ds(s), w[0], w[1], 1e-15, 1e-14)?;
            }
            2.0 * sum
        };
        Ok(orbit)
    }

    /// Panel breaks in `s`. Near the separatrix `dx/ds` peaks on the scale
    /// `√(2|turning − far end|)`, so panels grow geometrically from there.
    pub fn knots(&self) -> Vec<f64> {
        let s_end = self.s_end();
        let s0 = (2.0 * (self.turning - self.case.far_end(self.a0)).abs()).sqrt();
        let mut k = vec![0.0];
        if s0 < 0.25 * s_end {
            let mut t = s0;
            while t < 0.5 * s_end {
                k.push(t);
                t *= 2.0;
            }
        }
        k.push(s_end);
        k
    }

    /// `+1` if `u` increases from the turning point towards `−1`.
    fn sigma(&self) -> f64 {
        if self.turning < -1.0 {
            1.0
        } else {
            -1.0
        }
    }

    /// `u = turning + σ s²`; `s` runs from 0 to `s_end` at `u = −1`.
    pub fn s_end(&self) -> f64 {
        (-1.0 - self.turning).abs().sqrt()
    }

    pub fn u_of_s(&self, s: f64) -> f64 {
        self.turning + self.sigma() * s * s
    }

    /// `(E* − V(u))/s²`, positive on the orbit.
    fn gap_over_s2(&self, s: f64) -> f64 {
        // with a = turning − us, b = u − us: E* − V = P(t)a² − P(u)b²
        let us = self.case.far_end(self.a0);
        let u = self.u_of_s(s);
        let a = self.turning - us;
        let b = a + self.sigma() * s * s;
        -self.sigma() * (poly_dd(&self.quot, u, self.turning) * b * b + poly_eval(&self.quot, self.turning) * (a + b))
    }

    /// `dx/ds` for `x ≥ 0`.
    pub fn dx_ds(&self, s: f64) -> f64 {
        let u = self.u_of_s(s);
        2.0 * (3.0 * u * u - 1.0) / (2.0 * self.gap_over_s2(s)).sqrt()
    }

    /// `q ≥ 0` on the half `x ≥ 0`.
    pub fn q_of_s(&self, s: f64) -> f64 {
        s * (2.0 * self.gap_over_s2(s)).sqrt() / self.a0.abs()
    }
}

/// Half-period `L` of the slow orbit through `(−1, q*)`.
pub fn half_length(q_star: f64, a0: f64) -> Result<f64> {
    Ok(SlowPhaseOrbit::new(q_star, a0)?.half_length)
}

pub fn l_max(a0: f64) -> Result<f64> {
    if !(a0 >= 2.0 / 3.0) {
        return Err(Error::Domain(format!("L_max is defined for A0 ≥ 2/3, got {a0}")));
    }
    let num = 6f64.sqrt() + (9.0 * a0 - 2.0).sqrt();
    let den = 2f64.sqrt() + (9.0 * a0 - 6.0).sqrt();
    Ok(6.0 * (num / den).ln())
}

/// Largest `A0 ≥ 2/3` supporting half-period `l`, from `L_max(A0) = l`.
pub fn a0_at_l_max(l: f64) -> Result<f64> {
    let top = l_max(2.0 / 3.0)?;
    if !(l > 0.0 && l < top) {
        return Err(Error::Range(format!("L = {l} outside (0, L_max(2/3) = {top})")));
    }
    let (mut lo, mut hi) = (2.0 / 3.0, 1.0);
    while l_max(hi)? > l {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if l_max(mid)? > l {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `q* < 0` with `half_length(q*) = l`.
pub fn solve_for_qstar(l: f64, a0: f64) -> Result<f64> {
    Ok(solve_orbit(l, a0)?.q_star)
}

/// Slow orbit of half-period `l`, by regula falsi in `η = −ln δ`.
pub fn solve_orbit(l: f64, a0: f64) -> Result<SlowPhaseOrbit> {
    let case = Case::of(a0)?;
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::InvalidParams(format!("L must be positive, got {l}")));
    }
    if case == Case::Alarge {
        let lm = l_max(a0)?;
        if l >= lm - L_MAX_MARGIN {
            return Err(Error::Existence(format!(
                "L = {l} is not below L_max({a0}) − {L_MAX_MARGIN} = {}",
                lm - L_MAX_MARGIN
            )));
        }
    }
    let orbit = |eta: f64| SlowPhaseOrbit::from_deficit((-eta).exp(), a0);
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut f_lo = -l;
    let mut f_hi;
    loop {
        match orbit(hi) {
            Ok(o) if o.half_length > l => {
                f_hi = o.half_length - l;
                break;
            }
            Ok(o) if hi < 600.0 => {
                lo = hi;
                f_lo = o.half_length - l;
                hi *= 2.0;
            }
            _ => return Err(Error::Existence(format!("no slow orbit of half-period {l} at A0 = {a0}"))),
        }
    }
    // Illinois variant of regula falsi
    let mut side = 0;
    for _ in 0..200 {
        let mut mid = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        if !(mid > lo && mid < hi) {
            mid = 0.5 * (lo + hi);
        }
        let o = orbit(mid)?;
        let f = o.half_length - l;
        if f.abs() < 1e-11 || hi - lo < 1e-15 * hi {
            return Ok(o);
        }
        if f > 0.0 {
            hi = mid;
            f_hi = f;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        } else {
            lo = mid;
            f_lo = f;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        }
    }
    Err(Error::Convergence(format!("q* solve for L = {l}, A0 = {a0}")))
}

/// Report summary of a built solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LargeReport {
    pub q_star: f64,
    pub e_star: f64,
    pub turning: f64,
    pub case: Case,
    /// `L_max(A0) − L` when `A0 ≥ 2/3`.
    pub l_max_margin: Option<f64>,
    pub w_star: f64,
    pub r_star: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TwoPulseLargeSolution {
    pub a0: f64,
    pub d: f64,
    pub l: f64,
    pub eps: f64,
    pub orbit: SlowPhaseOrbit,
    /// `w` at `±L/2`.
    pub w_star: f64,
    /// `r` at `x* = −L/2`; `r** = −r*`.
    pub r_star: f64,
    /// Slow `u`, `q`, `w`, `r` on `[0, L/2]`.
    u: Chebyshev,
    q: Chebyshev,
    w: Chebyshev,
    r: Chebyshev,
}

const CHEB_TOL: f64 = 1e-13;
const CHEB_MAX: usize = 1025;

pub fn build_two_pulse_large(a0: f64, d: f64, l: f64, eps: f64) -> Result<TwoPulseLargeSolution> {
    if a0 == 0.0 {
        return Err(Error::InvalidParams("A0 = 0 is the all-small regime".into()));
    }
    if !(d > 0.0 && eps > 0.0) {
        return Err(Error::InvalidParams(format!("need D > 0 and eps > 0, got D = {d}, eps = {eps}")));
    }
    let orbit = solve_orbit(l, a0)?;
    let s_end = orbit.s_end();
    let half = 0.5 * l;

    // x(s) piecewise on the same panels as the length quadrature
    let knots = orbit.knots();
    let mut g = Vec::new();
    let mut xs = Vec::new();
    let mut offs = vec![0.0];
    for w in knots.windows(2) {
        let (gi, _) = Chebyshev::fit_adaptive(|s| orbit.dx_ds(s), w[0], w[1], CHEB_TOL, CHEB_MAX);
        let xi = gi.integral();
        offs.push(offs.last().unwrap() + xi.eval(w[1]));
        g.push(gi);
        xs.push(xi);
    }
    let panel = |s: f64| knots[1..].partition_point(|&k| k < s).min(g.len() - 1);
    // rescale so that x(s_end) = L/2 exactly
    let scale = half / offs[g.len()];
    let x_at = |s: f64| {
        let i = panel(s);
        scale * (offs[i] + xs[i].eval(s))
    };
    let g_at = |s: f64| scale * g[panel(s)].eval(s);
    let s_of_x = |x: f64| -> f64 {
        let (mut lo, mut hi) = (0.0, s_end);
        let mut s = s_end * x / half;
        for _ in 0..200 {
            let f = x_at(s) - x;
            if f > 0.0 {
                hi = s;
            } else {
                lo = s;
            }
            let step = f / g_at(s);
            if step.abs() <= 1e-16 * s_end {
                return (s - step).clamp(0.0, s_end);
            }
            let next = s - step;
            s = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
            if hi - lo < 1e-16 * s_end {
                break;
            }
        }
        s
    };
    let (u, _) = Chebyshev::fit_adaptive(|x| orbit.u_of_s(s_of_x(x)), 0.0, half, CHEB_TOL, CHEB_MAX);
    let (q, _) = Chebyshev::fit_adaptive(|x| orbit.q_of_s(s_of_x(x)), 0.0, half, CHEB_TOL, CHEB_MAX);

    let rule = Rule::gauss((u.coeffs.len() + 16).max(32));
    let ker = |x: f64, hyp: fn(f64) -> f64| rule.integrate(|xi| hyp((x - xi) / d) * u.eval(xi), 0.0, x) / d;
    let amp = ker(half, f64::sinh) / (half / d).cosh();
    let (w, _) = Chebyshev::fit_adaptive(|x| amp * (x / d).cosh() - ker(x, f64::sinh), 0.0, half, CHEB_TOL, CHEB_MAX);
    let (r, _) = Chebyshev::fit_adaptive(|x| amp * (x / d).sinh() - ker(x, f64::cosh), 0.0, half, CHEB_TOL, CHEB_MAX);

    Ok(TwoPulseLargeSolution {
        a0,
        d,
        l,
        eps,
        orbit,
        w_star: w.eval(half),
        r_star: -r.eval(half),
        u,
        q,
        w,
        r,
    })
}

impl TwoPulseLargeSolution {
    pub fn segment_of(&self, x: f64) -> Segment {
        let y = wrap_period(x, self.l);
        if y < -0.5 * self.l {
            Segment::I1
        } else if y <= 0.5 * self.l {
            Segment::I3
        } else {
            Segment::I5
        }
    }

    /// Leading-order slow `(u0, v, q, w, r)` at `x`.
    pub fn slow(&self, x: f64) -> [f64; 5] {
        let y = wrap_period(x, self.l);
        let (y, flip) = match self.segment_of(y) {
            Segment::I1 => (y + self.l, -1.0),
            Segment::I3 => (y, 1.0),
            Segment::I5 => (y - self.l, -1.0),
        };
        let (ay, sg) = (y.abs().min(0.5 * self.l), if y < 0.0 { -1.0 } else { 1.0 });
        let u = flip * self.u.eval(ay);
        let v = (u - u * u * u) / self.a0;
        [u, v, flip * sg * self.q.eval(ay), flip * self.w.eval(ay), flip * sg * self.r.eval(ay)]
    }

    /// Composite with `tanh` layers at `±L/2`.
    pub fn eval(&self, x: f64) -> PhasePoint {
        let y = wrap_period(x, self.l);
        let half = 0.5 * self.l;
        let k = std::f64::consts::SQRT_2 * self.eps;
        let [u0, v, q, w, r] = self.slow(y);
        let (zl, zr) = ((y + half) / k, (y - half) / k);
        let sgn = |z: f64| if z < 0.0 { -1.0 } else { 1.0 };
        let u = u0 - zl.tanh() + sgn(zl) + zr.tanh() - sgn(zr);
        let sech2 = |z: f64| {
            let c = 1.0 / z.cosh();
            c * c
        };
        let p = (sech2(zr) - sech2(zl)) / std::f64::consts::SQRT_2;
        PhasePoint::new(u, p, v, q, w, r)
    }

    pub fn report(&self) -> LargeReport {
        LargeReport {
            q_star: self.orbit.q_star,
            e_star: self.orbit.e_star,
            turning: self.orbit.turning,
            case: self.orbit.case,
            l_max_margin: l_max(self.a0).ok().map(|m| m - self.l),
            w_star: self.w_star,
            r_star: self.r_star,
        }
    }

    /// `D R' − (W − U)` on `I3`, which vanishes for an exact `w`.
    pub fn w_residual(&self, x: f64) -> f64 {
        let ax = x.abs().min(0.5 * self.l);
        self.d * self.r.derivative().eval(ax) - (self.w.eval(ax) - self.u.eval(ax))
    }
}
