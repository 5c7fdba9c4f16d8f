//! Reduced fast and slow subsystems.
//!
//! The fast subsystem `u_ξξ = u³ − u + K` has the conserved quantity
//! `H_f = p²/2 + V_f(u)` with `V_f(u) = u²/2 − u⁴/4 − K u`. Its saddles `û₀`
//! with `|û₀| > 1/√3` form the slow manifold branches on which the reduced
//! slow flow lives.

use crate::error::{Error, Result};
use crate::params::{Branch, SystemParams};
use crate::poly::depressed_cubic_roots;
use crate::quad::{adaptive, gl20};

pub const INV_SQRT3: f64 = 0.577_350_269_189_625_8;
/// `2/(3√3)`, the value of `|K|` at the folds of the slow manifold.
pub const K_FOLD: f64 = 0.384_900_179_459_750_5;

/// `K = A0 v + B0 w + C0`.
pub fn k_of(params: &SystemParams, v: f64, w: f64) -> f64 {
    params.a0 * v + params.b0 * w + params.c0
}

pub fn fast_potential(u: f64, k: f64) -> f64 {
    let u2 = u * u;
    0.5 * u2 - 0.25 * u2 * u2 - k * u
}

pub fn fast_hamiltonian(u: f64, p: f64, k: f64) -> f64 {
    0.5 * p * p + fast_potential(u, k)
}

/// Root of `û³ − û + K = 0` on the requested branch (`±û ≥ 1/√3`).
pub fn slow_manifold_u(k: f64, branch: Branch) -> Result<f64> {
    let s = branch.sign();
    if !k.is_finite() || s * k > K_FOLD * (1.0 + 1e-14) {
        return Err(Error::Domain(format!(
            "K = {k} is beyond the fold of the {} branch (|K| ≤ 2/(3√3))",
            if s > 0.0 { "upper" } else { "lower" }
        )));
    }
    let roots = depressed_cubic_roots(-1.0, k).roots;
    let u = if s > 0.0 { *roots.last().unwrap() } else { roots[0] };
    if s * u < INV_SQRT3 - 1e-7 {
        return Err(Error::Domain(format!("no root with ±u > 1/√3 at K = {k}")));
    }
    Ok(u)
}

/// Truncated slow manifold `{±û₀ ≥ 1/√3 + δ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlowManifoldBranch {
    pub branch: Branch,
    pub delta: f64,
}

impl SlowManifoldBranch {
    pub const DEFAULT_DELTA: f64 = 0.1;

    pub fn new(branch: Branch, delta: f64) -> Result<Self> {
        if !(delta >= 0.0) {
            return Err(Error::InvalidParams(format!("truncation margin must be ≥ 0, got {delta}")));
        }
        Ok(SlowManifoldBranch { branch, delta })
    }

    pub fn contains(&self, u: f64) -> bool {
        self.branch.sign() * u >= INV_SQRT3 + self.delta
    }

    /// Slow manifold point at forcing `K`, rejected if it lies in the truncated zone.
    pub fn u_at(&self, k: f64) -> Result<f64> {
        let u = slow_manifold_u(k, self.branch)?;
        if !self.contains(u) {
            return Err(Error::Domain(format!(
                "û₀ = {u} lies within δ = {} of the fold",
                self.delta
            )));
        }
        Ok(u)
    }
}

/// Right-hand side `(v, q, w, r)_x` of the slow flow on a manifold branch.
pub fn reduced_slow_rhs(params: &SystemParams, state: [f64; 4], branch: Branch) -> Result<[f64; 4]> {
    let [v, q, w, r] = state;
    let u0 = slow_manifold_u(k_of(params, v, w), branch)?;
    Ok([q, v - u0, r / params.d, (w - u0) / params.d])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConnectionKind {
    Heteroclinic,
    Homoclinic,
}

#[derive(Debug, Clone)]
struct HomoclinicData {
    s: f64,
    t0: f64,
    delta2: f64,
    lambda: f64,
    /// Panel boundaries on `[0, t0]` in the variable `T = √|u − u_ext|`.
    knots: Vec<f64>,
    /// Regular part of `ξ(T)` at the knots.
    cum: Vec<f64>,
    h_inf: f64,
}

/// Explicit fast connection of the reduced fast system.
#[derive(Debug, Clone)]
pub struct FastConnection {
    pub kind: ConnectionKind,
    pub k: f64,
    /// Limits of `u` as `ξ → −∞` and `ξ → +∞`.
    pub base: [f64; 2],
    /// Extremal `u` (at `ξ = 0`) of a homoclinic.
    pub extremal: Option<f64>,
    homoclinic: Option<HomoclinicData>,
}

/// Heteroclinic front `u = ±tanh(ξ/√2)` at `K = 0`.
pub fn fast_heteroclinic(branch: Branch) -> FastConnection {
    let s = branch.sign();
    FastConnection {
        kind: ConnectionKind::Heteroclinic,
        k: 0.0,
        base: [-s, s],
        extremal: None,
        homoclinic: None,
    }
}

/// Extremal point of the homoclinic to `û₀`: the turning point of the
/// level set `H_f = V_f(û₀)` nearest to `û₀`.
pub fn homoclinic_extremal(u0: f64) -> f64 {
    u0.signum() * (-u0.abs() + (2.0 - 2.0 * u0 * u0).sqrt())
}

/// Homoclinic of the fast system to `û₀` on the branch of `sign(K)`,
/// centred so that its extremum sits at `ξ = 0`.
pub fn fast_homoclinic(k: f64) -> Result<FastConnection> {
    if !(k != 0.0 && k.abs() < K_FOLD) {
        return Err(Error::Domain(format!("homoclinic needs 0 < |K| < 2/(3√3), got K = {k}")));
    }
    let branch = Branch::from_sign(k);
    let s = branch.sign();
    let u0 = slow_manifold_u(k, branch)?;
    let u_ext = homoclinic_extremal(u0);
    let root = (2.0 - 2.0 * u0 * u0).sqrt();
    // |u_ext − u_other| and |û₀ − u_ext|
    let delta2 = 2.0 * root;
    let t0 = (u0.abs() + u0.abs() - root).max(0.0).sqrt();
    let lambda = (3.0 * u0 * u0 - 1.0).sqrt();

    let mut knots = vec![0.0];
    let delta = delta2.sqrt();
    let mut g = 0.25 * delta;
    while g < t0 {
        knots.push(g);
        g *= 2.0;
    }
    knots.push(t0);
    let max_width = t0 / 16.0;
    let mut refined = vec![0.0];
    for w in knots.windows(2) {
        let n = ((w[1] - w[0]) / max_width).ceil().max(1.0) as usize;
        for j in 1..=n {
            refined.push(w[0] + (w[1] - w[0]) * j as f64 / n as f64);
        }
    }
    let knots = refined;
    let mut data = HomoclinicData { s, t0, delta2, lambda, knots, cum: Vec::new(), h_inf: 0.0 };
    let mut cum = vec![0.0];
    for w in data.knots.windows(2) {
        let prev = *cum.last().unwrap();
        cum.push(prev + gl20().integrate(|t| data.h(t), w[0], w[1]));
    }
    data.h_inf = *cum.last().unwrap();
    data.cum = cum;

    Ok(FastConnection {
        kind: ConnectionKind::Homoclinic,
        k,
        base: [u0, u0],
        extremal: Some(u_ext),
        homoclinic: Some(data),
    })
}

impl HomoclinicData {
    /// Regular part of `dξ/dT` after removing `(1/λ)/(t0 − T)`.
    fn h(&self, t: f64) -> f64 {
        let t0 = self.t0;
        let a = (self.delta2 + t0 * t0).sqrt();
        let b = (self.delta2 + t * t).sqrt();
        let num = a + (t0 + t) * (t0 + t) / (a + b);
        2.0 * std::f64::consts::SQRT_2 * num / ((t0 + t) * b * 2.0 * t0 * a)
    }

    fn regular_part(&self, t: f64) -> f64 {
        let j = match self.knots.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(j) => return self.cum[j],
            Err(j) => j - 1,
        };
        self.cum[j] + gl20().integrate(|x| self.h(x), self.knots[j], t)
    }

    /// `τ = −ln(1 − T/t0)` at distance `ξ ≥ 0` from the extremum.
    fn tau_of_xi(&self, xi: f64) -> f64 {
        let lam = self.lambda;
        let lo0 = (lam * (xi - self.h_inf)).max(0.0);
        if lo0 > 36.0 {
            return lo0;
        }
        let (mut lo, mut hi) = (lo0, lam * xi);
        let mut tau = 0.5 * (lo + hi);
        for _ in 0..100 {
            let e = (-tau).exp();
            let t = -self.t0 * (-tau).exp_m1();
            let f = tau / lam + self.regular_part(t) - xi;
            if f > 0.0 {
                hi = tau;
            } else {
                lo = tau;
            }
            let df = 1.0 / lam + self.h(t) * self.t0 * e;
            let mut next = tau - f / df;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - tau).abs() <= 1e-15 * tau.max(1.0) || hi - lo <= 1e-15 * hi.max(1.0) {
                return next;
            }
            tau = next;
        }
        tau
    }

    fn eval(&self, u0: f64, u_ext: f64, xi: f64) -> (f64, f64) {
        let tau = self.tau_of_xi(xi.abs());
        let e = (-tau).exp();
        let t = -self.t0 * (-tau).exp_m1();
        let d = self.t0 * self.t0 * e * (2.0 - e);
        let u = if t * t < 0.5 * self.t0 * self.t0 {
            u_ext + self.s * t * t
        } else {
            u0 - self.s * d
        };
        let pabs = d * t * ((self.delta2 + t * t) / 2.0).sqrt();
        let sgn = if xi >= 0.0 { 1.0 } else { -1.0 };
        (u, sgn * self.s * pabs)
    }
}

impl FastConnection {
    /// `(u, p)` at fast coordinate `ξ`.
    pub fn eval(&self, xi: f64) -> (f64, f64) {
        match self.kind {
            ConnectionKind::Heteroclinic => {
                let s = self.base[1];
                let z = xi / std::f64::consts::SQRT_2;
                let sech = 1.0 / z.cosh();
                (s * z.tanh(), s * sech * sech / std::f64::consts::SQRT_2)
            }
            ConnectionKind::Homoclinic => {
                let data = self.homoclinic.as_ref().unwrap();
                data.eval(self.base[0], self.extremal.unwrap(), xi)
            }
        }
    }

    pub fn u(&self, xi: f64) -> f64 {
        self.eval(xi).0
    }

    /// Value of `H_f` on the connection.
    pub fn energy(&self) -> f64 {
        fast_hamiltonian(self.base[0], 0.0, self.k)
    }

    /// Decay rate of the tails.
    pub fn tail_rate(&self) -> f64 {
        match &self.homoclinic {
            Some(d) => d.lambda,
            None => std::f64::consts::SQRT_2,
        }
    }

    /// `∫ (û₀ − u_h(ξ)) dξ` over the whole line for a homoclinic.
    ///
    /// With `u = u_ext + sign(K)·T²` the integrand becomes
    /// `2√2/√(|u_ext − u_other|+T²)`, which integrates in closed form.
    pub fn excess_integral(&self) -> Option<f64> {
        let d = self.homoclinic.as_ref()?;
        let delta = d.delta2.sqrt();
        Some(d.s * 4.0 * std::f64::consts::SQRT_2 * (d.t0 / delta).asinh())
    }

    /// `∫₀^ξ (û₀ − u_h) dξ'` for a homoclinic; odd in `ξ`, tends to half the
    /// [`excess_integral`](Self::excess_integral) as `ξ → ∞`.
    pub fn excess_partial(&self, xi: f64) -> Option<f64> {
        let d = self.homoclinic.as_ref()?;
        let tau = d.tau_of_xi(xi.abs());
        let t = -d.t0 * (-tau).exp_m1();
        let half = d.s * 2.0 * std::f64::consts::SQRT_2 * (t / d.delta2.sqrt()).asinh();
        Some(if xi >= 0.0 { half } else { -half })
    }
}

/// Same integral as [`FastConnection::excess_integral`] computed by
/// adaptive quadrature over the profile, truncated at `|ξ| = ξ_max` with the
/// exponential tail added analytically.
pub fn excess_integral_by_profile(conn: &FastConnection, xi_max: f64) -> Result<f64> {
    let u0 = conn.base[0];
    let body = adaptive(|xi| u0 - conn.u(xi), 0.0, xi_max, 1e-15, 1e-14)?;
    let tail = (u0 - conn.u(xi_max)) / conn.tail_rate();
    Ok(2.0 * (body + tail))
}
