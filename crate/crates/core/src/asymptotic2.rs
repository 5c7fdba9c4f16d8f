//! Two-transition patterns when `A`, `B`, `C` are all of order ε.
//!
//! Interfaces sit at `x* = −x**` and `x**`, with `x**` a root of the
//! Melnikov condition; `u ≈ +1` on `I1 = [−L, x*)` and `I5 = (x**, L]`,
//! `u ≈ −1` on `I3 = (x*, x**)`. The slow variables solve
//! `v'' = v − u0`, `D² w'' = w − u0` piecewise, with `q = v'`, `r = D w'`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::melnikov::{find_roots, MelnikovParams, Stability};
use crate::params::PhasePoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Segment {
    I1,
    I3,
    I5,
}

impl Segment {
    pub fn name(self) -> &'static str {
        match self {
            Segment::I1 => "I1",
            Segment::I3 => "I3",
            Segment::I5 => "I5",
        }
    }
}

/// Slow variables at the interfaces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JumpValues {
    pub v_star: f64,
    pub q_star: f64,
    pub w_star: f64,
    pub r_star: f64,
    pub v_2star: f64,
    pub q_2star: f64,
    pub w_2star: f64,
    pub r_2star: f64,
}

/// Interface values for an interface pair `±x**`.
pub fn jump_values(x2: f64, d: f64, l: f64) -> JumpValues {
    let v = (l - 2.0 * x2).sinh() / l.sinh();
    let q = -2.0 * x2.sinh() / l.sinh() * (l - x2).sinh();
    let w = ((l - 2.0 * x2) / d).sinh() / (l / d).sinh();
    let r = -2.0 * (x2 / d).sinh() / (l / d).sinh() * ((l - x2) / d).sinh();
    JumpValues { v_star: v, q_star: q, w_star: w, r_star: r, v_2star: v, q_2star: -q, w_2star: w, r_2star: -r }
}

/// Leading-order slow state `(u0, v, q, w, r)` on a named segment.
pub fn slow_segment(seg: Segment, x: f64, x2: f64, d: f64, l: f64) -> Result<[f64; 5]> {
    let tol = 1e-12 * l;
    let inside = match seg {
        Segment::I1 => x >= -l - tol && x <= -x2 + tol,
        Segment::I3 => x >= -x2 - tol && x <= x2 + tol,
        Segment::I5 => x >= x2 - tol && x <= l + tol,
    };
    if !inside {
        return Err(Error::Interval { segment: seg.name(), x });
    }
    let (sl, sld) = (l.sinh(), (l / d).sinh());
    Ok(match seg {
        Segment::I1 => {
            let k = 2.0 * x2.sinh() / sl;
            let kd = 2.0 * (x2 / d).sinh() / sld;
            [
                1.0,
                1.0 - k * (l + x).cosh(),
                -k * (l + x).sinh(),
                1.0 - kd * ((l + x) / d).cosh(),
                -kd * ((l + x) / d).sinh(),
            ]
        }
        Segment::I3 => {
            let k = 2.0 * (l - x2).sinh() / sl;
            let kd = 2.0 * ((l - x2) / d).sinh() / sld;
            [-1.0, -1.0 + k * x.cosh(), k * x.sinh(), -1.0 + kd * (x / d).cosh(), kd * (x / d).sinh()]
        }
        Segment::I5 => {
            let k = 2.0 * x2.sinh() / sl;
            let kd = 2.0 * (x2 / d).sinh() / sld;
            [
                1.0,
                1.0 - k * (l - x).cosh(),
                k * (l - x).sinh(),
                1.0 - kd * ((l - x) / d).cosh(),
                kd * ((l - x) / d).sinh(),
            ]
        }
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TwoPulseSmallSolution {
    pub mel: MelnikovParams,
    pub eps: f64,
    pub x_star: f64,
    pub x_2star: f64,
    pub jumps: JumpValues,
    pub stability: Stability,
}

pub fn build_two_pulse_small(mel: &MelnikovParams, eps: f64, root_index: usize) -> Result<TwoPulseSmallSolution> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParams(format!("eps must be positive, got {eps}")));
    }
    let analysis = find_roots(mel)?;
    let root = analysis
        .roots
        .get(root_index)
        .ok_or(Error::NoRoot { index: root_index, found: analysis.roots.len() })?;
    if root.near_boundary {
        return Err(Error::BoundaryRoot { x: root.x });
    }
    Ok(TwoPulseSmallSolution {
        mel: *mel,
        eps,
        x_star: -root.x,
        x_2star: root.x,
        jumps: jump_values(root.x, mel.d, mel.l),
        stability: root.stability,
    })
}

impl TwoPulseSmallSolution {
    pub fn segment_of(&self, x: f64) -> Segment {
        if x < self.x_star {
            Segment::I1
        } else if x <= self.x_2star {
            Segment::I3
        } else {
            Segment::I5
        }
    }

    /// Two-tanh composite for `(u, p)` and piecewise slow `(v, q, w, r)`.
    pub fn eval(&self, x: f64) -> PhasePoint {
        let l = self.mel.l;
        let x = crate::asymptotic1::wrap_period(x, l);
        let s = std::f64::consts::SQRT_2 * self.eps;
        let (zr, zl) = ((x - self.x_2star) / s, (x - self.x_star) / s);
        let u = 1.0 + zr.tanh() - zl.tanh();
        let sech2 = |z: f64| {
            let c = 1.0 / z.cosh();
            c * c
        };
        let p = (sech2(zr) - sech2(zl)) / std::f64::consts::SQRT_2;
        let [_, v, q, w, r] = slow_segment(self.segment_of(x), x, self.x_2star, self.mel.d, l).unwrap();
        PhasePoint::new(u, p, v, q, w, r)
    }

    /// Leading-order `∫u dx` over one period.
    pub fn mass(&self) -> f64 {
        2.0 * self.mel.l - 4.0 * self.x_2star
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitDiagnostics {
    /// `(L, roots x**)` for increasing `L`.
    pub x_vs_l: Vec<(f64, Vec<f64>)>,
    /// `(A1, x** nearest L/2, L/2 + C1 sinh(L)/(2A1))` for increasing `A1`.
    pub large_a1: Vec<(f64, f64, f64)>,
}

/// Trend of the roots in `L` and their approach to the large-`A1` asymptote.
pub fn limit_checks(mel: &MelnikovParams) -> Result<LimitDiagnostics> {
    let mut x_vs_l = Vec::new();
    for k in 0..8 {
        let l = mel.l * (1.0 + k as f64 * 0.5);
        let p = MelnikovParams::new(mel.a1, mel.b1, mel.c1, mel.d, l)?;
        let roots = find_roots(&p).map(|a| a.roots.iter().map(|r| r.x).collect()).unwrap_or_default();
        x_vs_l.push((l, roots));
    }
    let mut large_a1 = Vec::new();
    let base = mel.a1.abs().max(1.0);
    for k in 0..6 {
        let a1 = base * 10f64.powi(k + 1) * if mel.a1 < 0.0 { -1.0 } else { 1.0 };
        let p = MelnikovParams::new(a1, mel.b1, mel.c1, mel.d, mel.l)?;
        let half = 0.5 * mel.l;
        if let Ok(an) = find_roots(&p) {
            if let Some(r) = an.roots.iter().min_by(|a, b| (a.x - half).abs().partial_cmp(&(b.x - half).abs()).unwrap()) {
                large_a1.push((a1, r.x, half + mel.c1 * mel.l.sinh() / (2.0 * a1)));
            }
        }
    }
    Ok(LimitDiagnostics { x_vs_l, large_a1 })
}
