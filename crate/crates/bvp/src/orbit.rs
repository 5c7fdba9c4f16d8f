//! Discrete periodic orbits: node and stage values of the collocation
//! polynomial on `[−L, L]`.

use rd3_core::asymptotic1::wrap_period;
use rd3_core::{PhasePoint, SystemParams};
use serde::Serialize;

use crate::field::{Field, State};
use crate::mesh::Tableau;

#[derive(Debug, Clone, Serialize)]
pub struct PeriodicOrbit {
    /// Snapshot with the full `A` of this orbit.
    pub params: SystemParams,
    pub stages: usize,
    /// `N + 1` nodes from `−L` to `L`.
    pub mesh: Vec<f64>,
    /// State at `mesh[0..N]`; the state at `L` is `nodes[0]`.
    pub nodes: Vec<State>,
    /// Stage values, `stages` per interval.
    pub inner: Vec<State>,
    /// Unfolding scalar of the conservative system.
    pub sigma: f64,
    pub mass: f64,
    pub residual_norm: f64,
}

impl PeriodicOrbit {
    /// Samples `f` at nodes and stages; `mass` is evaluated, the residual is
    /// left unset (`NaN`).
    pub fn from_fn<F: Fn(f64) -> PhasePoint>(params: SystemParams, mesh: Vec<f64>, stages: usize, f: F) -> Self {
        let tab = Tableau::gauss(stages);
        let n = mesh.len() - 1;
        let nodes = (0..n).map(|i| f(mesh[i]).to_array()).collect();
        let mut inner = Vec::with_capacity(n * stages);
        for i in 0..n {
            let h = mesh[i + 1] - mesh[i];
            for c in &tab.c {
                inner.push(f(mesh[i] + c * h).to_array());
            }
        }
        let mut o = PeriodicOrbit { params, stages, mesh, nodes, inner, sigma: 0.0, mass: 0.0, residual_norm: f64::NAN };
        o.mass = o.compute_mass();
        o
    }

    pub fn intervals(&self) -> usize {
        self.nodes.len()
    }

    pub fn a(&self) -> f64 {
        self.params.a()
    }

    pub fn l(&self) -> f64 {
        self.params.l
    }

    pub fn tableau(&self) -> Tableau {
        Tableau::gauss(self.stages)
    }

    pub fn values(&self) -> Vec<PhasePoint> {
        self.nodes.iter().map(|y| PhasePoint::from_array(*y)).collect()
    }

    pub fn stage(&self, i: usize, j: usize) -> &State {
        &self.inner[i * self.stages + j]
    }

    /// `∫ u dx` by the Gauss rule of the collocation stages.
    pub fn compute_mass(&self) -> f64 {
        let tab = self.tableau();
        (0..self.intervals())
            .map(|i| {
                let h = self.mesh[i + 1] - self.mesh[i];
                h * (0..self.stages).map(|j| tab.b[j] * self.stage(i, j)[0]).sum::<f64>()
            })
            .sum()
    }

    fn locate(&self, x: f64) -> (usize, f64) {
        let l = self.l();
        let x = wrap_period(x, l);
        let n = self.intervals();
        let i = match self.mesh.binary_search_by(|m| m.partial_cmp(&x).unwrap()) {
            Ok(k) => k.min(n - 1),
            Err(k) => k.saturating_sub(1).min(n - 1),
        };
        let t = (x - self.mesh[i]) / (self.mesh[i + 1] - self.mesh[i]);
        (i, t)
    }

    /// Collocation polynomial at any `x` (reduced to `[−L, L]`).
    pub fn eval(&self, x: f64) -> PhasePoint {
        let tab = self.tableau();
        let (i, t) = self.locate(x);
        PhasePoint::from_array(self.eval_in(&tab, i, t))
    }

    pub(crate) fn eval_in(&self, tab: &Tableau, i: usize, t: f64) -> State {
        let w = tab.interp_weights(t);
        let mut out = [0.0; 6];
        for k in 0..6 {
            out[k] = w[0] * self.nodes[i][k] + (0..self.stages).map(|j| w[j + 1] * self.stage(i, j)[k]).sum::<f64>();
        }
        out
    }

    /// Samples at `n` evenly spaced points of `[−L, L)` with a shared tableau.
    pub fn sample(&self, n: usize) -> Vec<(f64, PhasePoint)> {
        let tab = self.tableau();
        let l = self.l();
        (0..n)
            .map(|k| {
                let x = -l + 2.0 * l * k as f64 / n as f64;
                let (i, t) = self.locate(x);
                (x, PhasePoint::from_array(self.eval_in(&tab, i, t)))
            })
            .collect()
    }

    /// Gap between the last interval's polynomial at `L` and the state at `−L`.
    pub fn periodicity_gap(&self) -> f64 {
        let tab = self.tableau();
        let end = self.eval_in(&tab, self.intervals() - 1, 1.0);
        end.iter().zip(&self.nodes[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Values of `H` at the nodes.
    pub fn hamiltonian_values(&self) -> Vec<f64> {
        let f = Field::new(&self.params);
        self.nodes.iter().map(|y| f.hamiltonian(y, self.a())).collect()
    }

    /// `max |H − mean H| / max(1, |mean H|)` over the nodes.
    pub fn hamiltonian_drift(&self) -> f64 {
        let h = self.hamiltonian_values();
        let mean = h.iter().sum::<f64>() / h.len() as f64;
        h.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max) / mean.abs().max(1.0)
    }

    /// Image under `x → −x` combined with `(p, q, r) → −(p, q, r)`.
    pub fn reflected(&self) -> Self {
        let n = self.intervals();
        let m = self.stages;
        let rev = |y: &State| [y[0], -y[1], y[2], -y[3], y[4], -y[5]];
        let mesh: Vec<f64> = (0..=n).map(|k| -self.mesh[n - k]).collect();
        let nodes = (0..n).map(|k| rev(&self.nodes[(n - k) % n])).collect();
        let mut inner = Vec::with_capacity(n * m);
        for k in 0..n {
            for j in 0..m {
                inner.push(rev(self.stage(n - 1 - k, m - 1 - j)));
            }
        }
        PeriodicOrbit { mesh, nodes, inner, ..self.clone() }
    }

    /// Same orbit interpolated onto a new mesh.
    pub fn remeshed(&self, mesh: Vec<f64>) -> Self {
        let tab = self.tableau();
        let mut o = PeriodicOrbit::from_fn(self.params, mesh, self.stages, |x| {
            let (i, t) = self.locate(x);
            PhasePoint::from_array(self.eval_in(&tab, i, t))
        });
        o.sigma = self.sigma;
        o
    }

    /// Orbit translated by `s`: the result at `x` is this orbit at `x + s`.
    pub fn shifted(&self, s: f64) -> Self {
        let mesh = self.mesh.clone();
        let tab = self.tableau();
        let mut o = PeriodicOrbit::from_fn(self.params, mesh, self.stages, |x| {
            let (i, t) = self.locate(x + s);
            PhasePoint::from_array(self.eval_in(&tab, i, t))
        });
        o.sigma = self.sigma;
        o
    }

    /// Zero crossings of `u`, located on the collocation polynomial.
    pub fn u_zeros(&self) -> Vec<f64> {
        let tab = self.tableau();
        let mut out = Vec::new();
        let sub = 8;
        for i in 0..self.intervals() {
            let h = self.mesh[i + 1] - self.mesh[i];
            let mut t0 = 0.0;
            let mut u0 = self.nodes[i][0];
            for k in 1..=sub {
                let t1 = k as f64 / sub as f64;
                let u1 = self.eval_in(&tab, i, t1)[0];
                if (u0 < 0.0) != (u1 < 0.0) {
                    let (mut a, mut b, mut ua) = (t0, t1, u0);
                    for _ in 0..60 {
                        let c = 0.5 * (a + b);
                        let uc = self.eval_in(&tab, i, c)[0];
                        if (uc < 0.0) == (ua < 0.0) {
                            a = c;
                            ua = uc;
                        } else {
                            b = c;
                        }
                    }
                    out.push(self.mesh[i] + 0.5 * (a + b) * h);
                }
                t0 = t1;
                u0 = u1;
            }
        }
        out
    }

    /// Position of the extremum of `u` farthest from its mean, refined on the
    /// zero of `p`.
    pub fn u_extremum(&self) -> f64 {
        let mean = self.mass / (2.0 * self.l());
        let (mut best, mut bi) = (0.0, 0);
        for (i, y) in self.nodes.iter().enumerate() {
            if (y[0] - mean).abs() > best {
                best = (y[0] - mean).abs();
                bi = i;
            }
        }
        let n = self.intervals();
        let tab = self.tableau();
        // p changes sign within one interval of the extremal node
        for i in [(bi + n - 1) % n, bi] {
            let (pa, pb) = (self.eval_in(&tab, i, 0.0)[1], self.eval_in(&tab, i, 1.0)[1]);
            if (pa < 0.0) != (pb < 0.0) || pa == 0.0 {
                let (mut a, mut b) = (0.0, 1.0);
                for _ in 0..60 {
                    let c = 0.5 * (a + b);
                    let pc = self.eval_in(&tab, i, c)[1];
                    if (pc < 0.0) == (pa < 0.0) {
                        a = c;
                    } else {
                        b = c;
                    }
                }
                return self.mesh[i] + 0.5 * (a + b) * (self.mesh[i + 1] - self.mesh[i]);
            }
        }
        self.mesh[bi]
    }

    /// `min_s max_x |self(x) − other(x + s)|` over a sample grid.
    pub fn distance_modulo_shift(&self, other: &PeriodicOrbit, samples: usize) -> (f64, f64) {
        let l = self.l();
        let a = self.sample(samples);
        let dist = |s: f64| {
            a.iter().map(|(x, p)| p.max_abs_diff(&other.eval(x + s))).fold(0.0, f64::max)
        };
        let h = 2.0 * l / samples as f64;
        let mut best = (f64::INFINITY, 0.0);
        for k in 0..samples {
            let s = -l + k as f64 * h;
            let d = dist(s);
            if d < best.0 {
                best = (d, s);
            }
        }
        // golden-section refinement around the best grid shift
        let (mut lo, mut hi) = (best.1 - h, best.1 + h);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let (mut c, mut d) = (hi - g * (hi - lo), lo + g * (hi - lo));
        let (mut fc, mut fd) = (dist(c), dist(d));
        for _ in 0..80 {
            if fc < fd {
                hi = d;
                d = c;
                fd = fc;
                c = hi - g * (hi - lo);
                fc = dist(c);
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + g * (hi - lo);
                fd = dist(d);
            }
        }
        let s = 0.5 * (lo + hi);
        (dist(s).min(best.0), s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::uniform;

    fn params() -> SystemParams {
        SystemParams::new(0.1, 0.3, 0.01, 0.0, 3.0, 2.0).unwrap()
    }

    fn trig(x: f64) -> PhasePoint {
        let k = std::f64::consts::PI / 2.0;
        PhasePoint::new((k * x).cos(), (k * x).sin(), 0.5 * (k * x).cos(), 0.2 * (k * x).sin(), 0.0, -(2.0 * k * x).sin())
    }

    #[test]
    fn eval_interpolates_smooth_functions() {
        let o = PeriodicOrbit::from_fn(params(), uniform(2.0, 160), 4, trig);
        for k in 0..37 {
            let x = -2.0 + 4.0 * k as f64 / 37.0 + 0.013;
            assert!(o.eval(x).max_abs_diff(&trig(x)) < 1e-6);
        }
        assert!(o.mass.abs() < 1e-12);
    }

    #[test]
    fn reflection_is_an_involution() {
        let o = PeriodicOrbit::from_fn(params(), uniform(2.0, 16), 3, trig);
        let r = o.reflected();
        for &x in &r.mesh[1..16] {
            let a = o.eval(-x).reversed();
            assert!(r.eval(x).max_abs_diff(&a) < 1e-12);
        }
        let rr = r.reflected();
        assert_eq!(rr.mesh, o.mesh);
        for (p, q) in rr.inner.iter().zip(&o.inner) {
            assert_eq!(p, q);
        }
    }

    #[test]
    fn shift_recovered() {
        let o = PeriodicOrbit::from_fn(params(), uniform(2.0, 64), 4, trig);
        let s = o.shifted(0.3);
        let (d, sh) = o.distance_modulo_shift(&s, 200);
        assert!(d < 1e-6, "{d}");
        assert!((sh + 0.3).abs() < 1e-4, "{sh}");
    }
}
