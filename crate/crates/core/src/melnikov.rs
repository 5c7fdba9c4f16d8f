//! Melnikov condition for the interface positions of two-transition
//! patterns when all couplings are of order ε.
//!
//! `M(z) = A1 sinh z / sinh L + B1 sinh(z/D) / sinh(L/D)`; interfaces at
//! `±x**` require `M(L − 2x**) + C1 = 0` with `x** ∈ (0, L)`.
//!
//! Throughout, `D̃ = D sinh(L/D)/sinh L`. One statement of the pitchfork
//! window in the literature writes `sinh(D/L)` here; the consistent choice,
//! which also produces the bifurcation curves, is `sinh(L/D)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MelnikovParams {
    pub a1: f64,
    pub b1: f64,
    pub c1: f64,
    pub d: f64,
    pub l: f64,
}

impl MelnikovParams {
    pub fn new(a1: f64, b1: f64, c1: f64, d: f64, l: f64) -> Result<Self> {
        let p = MelnikovParams { a1, b1, c1, d, l };
        if ![a1, b1, c1, d, l].iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidParams("non-finite Melnikov parameter".into()));
        }
        if !(l > 0.0 && d > 1.0) {
            return Err(Error::InvalidParams(format!("need L > 0 and D > 1, got L = {l}, D = {d}")));
        }
        Ok(p)
    }

    pub fn m(&self, z: f64) -> f64 {
        melnikov_m(z, self.a1, self.b1, self.d, self.l)
    }

    pub fn dm(&self, z: f64) -> f64 {
        melnikov_dm(z, self.a1, self.b1, self.d, self.l)
    }

    pub fn dtilde(&self) -> f64 {
        dtilde(self.d, self.l)
    }

    pub fn dhat(&self) -> f64 {
        dhat(self.d, self.l)
    }
}

pub fn melnikov_m(z: f64, a1: f64, b1: f64, d: f64, l: f64) -> f64 {
    a1 * z.sinh() / l.sinh() + b1 * (z / d).sinh() / (l / d).sinh()
}

pub fn melnikov_dm(z: f64, a1: f64, b1: f64, d: f64, l: f64) -> f64 {
    a1 * z.cosh() / l.sinh() + b1 * (z / d).cosh() / (d * (l / d).sinh())
}

fn melnikov_d2m(z: f64, a1: f64, b1: f64, d: f64, l: f64) -> f64 {
    a1 * z.sinh() / l.sinh() + b1 * (z / d).sinh() / (d * d * (l / d).sinh())
}

/// `D̃ = D sinh(L/D) / sinh L`.
pub fn dtilde(d: f64, l: f64) -> f64 {
    d * (l / d).sinh() / l.sinh()
}

/// `D̂ = D tanh(L/D) / tanh L`.
pub fn dhat(d: f64, l: f64) -> f64 {
    d * (l / d).tanh() / l.tanh()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stability {
    Stable,
    Unstable,
    /// Multiple root: a bifurcation point rather than a solution.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MelnikovRoot {
    /// Interface position `x** ∈ (0, L)`.
    pub x: f64,
    /// `z = L − 2x**`.
    pub z: f64,
    pub multiplicity: u8,
    pub stability: Stability,
    /// Within `1e−8·L` of `x** ∈ {0, L}`.
    pub near_boundary: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MelnikovAnalysis {
    pub params: MelnikovParams,
    /// Interior roots, ascending in `x**`.
    pub roots: Vec<MelnikovRoot>,
    pub dtilde: f64,
    pub dhat: f64,
    /// Number of distinct roots in `(0, L)` away from the boundary band.
    pub region: usize,
}

/// `ρ(z) = cosh(z/D)/cosh z`, even and strictly decreasing in `|z|`.
fn rho(z: f64, d: f64) -> f64 {
    // stable for large z
    ((z / d).cosh().ln() - z.cosh().ln()).exp()
}

/// Positive critical point `z_c ∈ [0, L]` of `M`, if any.
///
/// `M'(z) = 0` is equivalent to `ρ(z) = −A1 D̃ / B1`; since `ρ` decreases
/// from 1 at `z = 0` to `D̃/D̂` at `z = L`, there are at most two critical
/// points `±z_c`.
pub fn critical_point(p: &MelnikovParams) -> Option<f64> {
    if p.b1 == 0.0 {
        return None;
    }
    let target = -p.a1 * p.dtilde() / p.b1;
    let (r0, rl) = (1.0, rho(p.l, p.d));
    if !(target >= rl && target <= r0) {
        return None;
    }
    let (mut lo, mut hi) = (0.0, p.l);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if rho(mid, p.d) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * p.l {
            break;
        }
    }
    // Newton polish on M' directly
    let mut z = 0.5 * (lo + hi);
    for _ in 0..3 {
        let f = p.dm(z);
        let df = melnikov_d2m(z, p.a1, p.b1, p.d, p.l);
        if df == 0.0 {
            break;
        }
        let next = z - f / df;
        if !(next >= 0.0 && next <= p.l) || p.dm(next).abs() >= f.abs() {
            break;
        }
        z = next;
    }
    Some(z)
}

/// Root of the strictly monotone `f` on `[a, b]` with `f(a) f(b) < 0`.
fn monotone_root<F: Fn(f64) -> f64, G: Fn(f64) -> f64>(f: F, df: G, a: f64, b: f64) -> f64 {
    let (mut lo, mut hi) = (a, b);
    let flo = f(lo);
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = f(x);
        if fx == 0.0 {
            return x;
        }
        if (fx > 0.0) == (flo > 0.0) {
            lo = x;
        } else {
            hi = x;
        }
        let d = df(x);
        let mut next = if d != 0.0 { x - fx / d } else { 0.5 * (lo + hi) };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-300) || hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(lo.abs()) {
            return next;
        }
        x = next;
    }
    x
}

fn scale(p: &MelnikovParams) -> f64 {
    p.a1.abs() + p.b1.abs() + p.c1.abs()
}

/// All solutions `x** ∈ (0, L)` of `M(L − 2x**) + C1 = 0`.
pub fn find_roots(p: &MelnikovParams) -> Result<MelnikovAnalysis> {
    let sc = scale(p);
    if p.a1 == 0.0 && p.b1 == 0.0 && p.c1 == 0.0 {
        return Err(Error::Domain("M + C1 vanishes identically".into()));
    }
    let f = |z: f64| p.m(z) + p.c1;
    let ftol = 1e-13 * sc;
    let dscale = p.a1.abs() * p.l.cosh() / p.l.sinh() + p.b1.abs() * (p.l / p.d).cosh() / (p.d * (p.l / p.d).sinh());

    let mut roots: Vec<(f64, u8)> = Vec::new();
    let mut breaks = vec![-p.l];
    if let Some(zc) = critical_point(p) {
        if zc <= 1e-7 * p.l || p.dm(0.0).abs() <= 1e-14 * dscale {
            // both critical points merge at the origin
            if f(0.0).abs() <= ftol {
                roots.push((0.0, 3));
            }
            breaks.push(0.0);
        } else {
            for &c in &[-zc, zc] {
                if c.abs() < p.l {
                    if f(c).abs() <= ftol {
                        roots.push((c, 2));
                    }
                    breaks.push(c);
                }
            }
        }
    }
    breaks.push(p.l);

    let is_root = |z: f64, roots: &[(f64, u8)]| roots.iter().any(|r| r.0 == z);
    let mut simple = Vec::new();
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a || is_root(a, &roots) || is_root(b, &roots) {
            continue;
        }
        let (fa, fb) = (f(a), f(b));
        if fa == 0.0 {
            simple.push(a);
            continue;
        }
        if fb == 0.0 {
            simple.push(b);
            continue;
        }
        if (fa > 0.0) != (fb > 0.0) {
            simple.push(monotone_root(f, |z| p.dm(z), a, b));
        }
    }
    for z in simple {
        if !roots.iter().any(|r| r.0 == z) {
            roots.push((z, 1));
        }
    }

    let band = 1e-8 * p.l;
    let mut out: Vec<MelnikovRoot> = roots
        .into_iter()
        .filter_map(|(z, mult)| {
            let x = 0.5 * (p.l - z);
            if x < -band || x > p.l + band {
                return None;
            }
            let near_boundary = x <= band || x >= p.l - band;
            let stability = if mult > 1 {
                Stability::Degenerate
            } else if p.dm(z) < 0.0 {
                Stability::Stable
            } else {
                Stability::Unstable
            };
            Some(MelnikovRoot { x, z, multiplicity: mult, stability, near_boundary })
        })
        .collect();
    out.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap());
    out.dedup_by(|a, b| a.x == b.x);
    let region = out.iter().filter(|r| !r.near_boundary).count();
    Ok(MelnikovAnalysis { params: *p, roots: out, dtilde: p.dtilde(), dhat: p.dhat(), region })
}

/// `(min, max)` of `{−D̃ A1, −A1}`: for `C1 = 0`, two extra roots besides
/// `x** = L/2` exist exactly when `B1` lies strictly inside.
pub fn pitchfork_window(a1: f64, d: f64, l: f64) -> (f64, f64) {
    let x = -dtilde(d, l) * a1;
    let y = -a1;
    (x.min(y), x.max(y))
}

/// Point of the saddle-node curve at parameter `z`, where two roots collide.
pub fn saddle_node_curve(z: f64, c1: f64, d: f64, l: f64) -> Result<(f64, f64)> {
    if z == 0.0 || !(z.abs() <= l) {
        return Err(Error::Domain(format!("saddle-node curve needs z ∈ [−L,0)∪(0,L], got {z}")));
    }
    let den = d * (z / d).tanh() - z.tanh();
    if den == 0.0 {
        return Err(Error::Domain(format!("saddle-node curve diverges at z = {z}")));
    }
    let a = c1 * l.sinh() / (z.cosh() * den);
    let b = -c1 * d * (l / d).sinh() / ((z / d).cosh() * den);
    Ok((a, b))
}

/// Value `b̃ = D coth²(L/D)` where the saddle-node curve meets the line
/// `A1 + B1 = C1` a second time (for `C1 = −1`).
pub fn saddle_node_line_intersection(d: f64, l: f64) -> f64 {
    let c = 1.0 / (l / d).tanh();
    d * c * c
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Boundary {
    /// `A1 + B1 = −C1`: a root reaches `x** = 0`.
    LineRootAtZero,
    /// `A1 + B1 = C1`: a root reaches `x** = L`.
    LineRootAtL,
    SaddleNode,
    /// `B1 = −D̃ A1`, only meaningful for `C1 = 0`.
    Pitchfork,
}

impl Boundary {
    pub fn label(self) -> &'static str {
        match self {
            Boundary::LineRootAtZero => "line_x0",
            Boundary::LineRootAtL => "line_xL",
            Boundary::SaddleNode => "saddle_node",
            Boundary::Pitchfork => "pitchfork",
        }
    }
}

/// Sampled boundary curves of the region map.
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryCurves {
    pub c1: f64,
    pub d: f64,
    pub l: f64,
    /// Polylines of the saddle-node curve, one for `z < 0` and one for `z > 0`.
    pub saddle_node: Vec<Vec<(f64, f64)>>,
}

impl BoundaryCurves {
    /// Samples the saddle-node curve with `n` points per half, truncated to
    /// the box `|A1|, |B1| ≤ clip`.
    pub fn sample(c1: f64, d: f64, l: f64, n: usize, clip: f64) -> Self {
        let mut halves = Vec::new();
        if c1 != 0.0 {
            for &sgn in &[-1.0, 1.0] {
                // geometric in z near the divergence at 0, uniform further out
                let z_min = 1e-3 * l;
                let mut pts = Vec::with_capacity(n);
                for i in 0..n {
                    let t = i as f64 / (n - 1) as f64;
                    let zg = z_min * (l / z_min).powf(t);
                    let zu = z_min + (l - z_min) * t;
                    for &z in &[zg, zu] {
                        if let Ok((a, b)) = saddle_node_curve(sgn * z, c1, d, l) {
                            if a.abs() <= clip && b.abs() <= clip {
                                pts.push((sgn * z, a, b));
                            }
                        }
                    }
                }
                pts.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
                pts.dedup_by(|x, y| x.0 == y.0);
                halves.push(pts.into_iter().map(|(_, a, b)| (a, b)).collect());
            }
        }
        BoundaryCurves { c1, d, l, saddle_node: halves }
    }

    /// Nearest boundary curve to `(a1, b1)` and the Euclidean distance to it.
    pub fn nearest(&self, a1: f64, b1: f64) -> (Boundary, f64) {
        let s2 = std::f64::consts::SQRT_2;
        let mut best = (Boundary::LineRootAtZero, (a1 + b1 + self.c1).abs() / s2);
        let dl = (a1 + b1 - self.c1).abs() / s2;
        if dl < best.1 {
            best = (Boundary::LineRootAtL, dl);
        }
        if self.c1 == 0.0 {
            let dt = dtilde(self.d, self.l);
            let dp = (b1 + dt * a1).abs() / (1.0 + dt * dt).sqrt();
            if dp < best.1 {
                best = (Boundary::Pitchfork, dp);
            }
        }
        for poly in &self.saddle_node {
            for seg in poly.windows(2) {
                let dd = point_segment_distance((a1, b1), seg[0], seg[1]);
                if dd < best.1 {
                    best = (Boundary::SaddleNode, dd);
                }
            }
        }
        best
    }
}

fn point_segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 { (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let (cx, cy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - cx).powi(2) + (p.1 - cy).powi(2)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionCell {
    pub a1: f64,
    pub b1: f64,
    pub count: usize,
    pub nearest: Boundary,
    pub distance: f64,
}

/// Root count and nearest boundary at one parameter point.
pub fn classify_region(p: &MelnikovParams, curves: &BoundaryCurves) -> RegionCell {
    let count = find_roots(p).map(|a| a.region).unwrap_or(0);
    let (nearest, distance) = curves.nearest(p.a1, p.b1);
    RegionCell { a1: p.a1, b1: p.b1, count, nearest, distance }
}

/// Uniform grid over `[lo, hi]²` in `(A1, B1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionGrid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl RegionGrid {
    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.hi
        } else {
            self.lo + i as f64 * self.step()
        }
    }
}

/// Region classification on a grid; row-major with `A1` varying fastest.
pub fn region_map(c1: f64, d: f64, l: f64, grid: RegionGrid, exec: Exec) -> Result<(Vec<RegionCell>, BoundaryCurves)> {
    MelnikovParams::new(0.0, 0.0, c1, d, l)?;
    let curves = BoundaryCurves::sample(c1, d, l, 4000, 4.0 * grid.hi.abs().max(grid.lo.abs()));
    let n = grid.n;
    let cells = exec.map_range(n * n, |k| {
        let (i, j) = (k % n, k / n);
        let p = MelnikovParams { a1: grid.coord(i), b1: grid.coord(j), c1, d, l };
        classify_region(&p, &curves)
    });
    Ok((cells, curves))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mp(a1: f64, b1: f64, c1: f64) -> MelnikovParams {
        MelnikovParams::new(a1, b1, c1, 3.0, 5.0).unwrap()
    }

    #[test]
    fn basic_values() {
        let p = mp(1.3, -0.4, 0.0);
        assert_eq!(p.m(0.0), 0.0);
        assert!((p.m(5.0) - (1.3 - 0.4)).abs() < 1e-14);
        assert_eq!(p.m(-2.0), -p.m(2.0));
        let (dt, dh) = (p.dtilde(), p.dhat());
        assert!(0.0 < dt && dt < 1.0 && 1.0 < dh);
    }

    #[test]
    fn symmetric_root_always_present() {
        for &(a, b) in &[(1.0, 1.0), (-2.0, 0.5), (0.3, -4.0), (1.0, -0.5)] {
            let r = find_roots(&mp(a, b, 0.0)).unwrap();
            assert!(r.roots.iter().any(|x| (x.x - 2.5).abs() < 1e-14), "{a} {b}");
        }
    }

    #[test]
    fn three_roots_inside_window() {
        let (lo, hi) = pitchfork_window(1.0, 3.0, 5.0);
        assert!((lo + 1.0).abs() < 1e-15);
        let b = 0.5 * (lo + hi);
        let r = find_roots(&mp(1.0, b, 0.0)).unwrap();
        assert_eq!(r.region, 3);
        assert!((r.roots[0].x + r.roots[2].x - 5.0).abs() < 1e-12);
    }

    #[test]
    fn triple_root_at_pitchfork() {
        let dt = dtilde(3.0, 5.0);
        let r = find_roots(&mp(1.0, -dt, 0.0)).unwrap();
        assert_eq!(r.roots.len(), 1);
        assert_eq!(r.roots[0].multiplicity, 3);
        assert_eq!(r.roots[0].stability, Stability::Degenerate);
    }

    #[test]
    fn saddle_node_point_satisfies_both_conditions() {
        let (a, b) = saddle_node_curve(2.5, -1.0, 3.0, 5.0).unwrap();
        let p = mp(a, b, -1.0);
        assert!((p.m(2.5) - 1.0).abs() < 1e-10);
        assert!(p.dm(2.5).abs() < 1e-10);
        assert!(saddle_node_curve(0.0, -1.0, 3.0, 5.0).is_err());
    }

    #[test]
    fn saddle_node_endpoints_on_lines() {
        let dh = dhat(3.0, 5.0);
        let c1 = -1.0;
        let (a, b) = saddle_node_curve(5.0, c1, 3.0, 5.0).unwrap();
        assert!((a - c1 / (dh - 1.0)).abs() < 1e-12);
        assert!((b + c1 * dh / (dh - 1.0)).abs() < 1e-12);
        assert!((a + b + c1).abs() < 1e-12);
    }

    #[test]
    fn no_roots_when_couplings_vanish() {
        let r = find_roots(&mp(0.0, 0.0, -1.0)).unwrap();
        assert_eq!(r.region, 0);
    }
}
