//! Pseudo-arclength continuation in `A` with a secant predictor.

use serde::Serialize;

use crate::error::{BvpError, Result};
use crate::field::{Field, State};
use crate::orbit::PeriodicOrbit;
use crate::mesh::equidistribute;
use crate::seed::LAYER_SHARE;
use crate::solver::{finish, newton, newton_solve, Arclength, Closure, Iterate, NewtonOptions, Phase, System, NB};

#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub ds: f64,
    pub ds_min: f64,
    pub ds_max: f64,
    /// Step growth after a corrector needing at most `fast_iters` iterations.
    pub grow: f64,
    pub fast_iters: usize,
    pub max_steps: usize,
    pub a_min: f64,
    pub a_max: f64,
    pub newton: NewtonOptions,
    /// Hamiltonian drift above which an accepted point is moved to a mesh
    /// adapted to it and re-converged.
    pub remesh_drift: f64,
    /// Number of interval doublings allowed while remeshing.
    pub max_refine: u32,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            ds: 0.01,
            ds_min: 1e-8,
            ds_max: 0.05,
            grow: 1.5,
            fast_iters: 3,
            max_steps: 400,
            a_min: -10.0,
            a_max: 10.0,
            newton: NewtonOptions { max_iter: 10, ..NewtonOptions::default() },
            remesh_drift: 5e-9,
            max_refine: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PointKind {
    Fold,
    Pitchfork,
    Start,
    End,
}

#[derive(Debug, Clone, Serialize)]
pub struct BranchPoint {
    pub kind: PointKind,
    /// For folds, the vertex of a parabola through the three points around
    /// the turn; otherwise `A` of `orbit`.
    pub a: f64,
    pub step: usize,
    pub orbit: PeriodicOrbit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagramRow {
    pub step: usize,
    pub a: f64,
    pub mass: f64,
    /// Sign of the determinant of the arclength-extended Jacobian; it flips
    /// at simple branch points.
    pub stability_hint: i32,
    pub branch_id: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EndReason {
    MaxSteps,
    ParameterBound,
    StepUnderflow,
}

#[derive(Debug, Clone, Serialize)]
pub struct BranchRun {
    pub branch_id: usize,
    pub rows: Vec<DiagramRow>,
    pub points: Vec<BranchPoint>,
    #[serde(skip)]
    pub orbits: Vec<PeriodicOrbit>,
    pub end: EndReason,
    pub max_abs_sigma: f64,
}

impl BranchRun {
    pub fn folds(&self) -> impl Iterator<Item = &BranchPoint> {
        self.points.iter().filter(|p| p.kind == PointKind::Fold)
    }
}

/// Unit tangent in the norm `θ ∫|τ_y|² + τ_A²`.
#[derive(Debug, Clone)]
struct Tangent {
    nodes: Vec<State>,
    inner: Vec<State>,
    a: f64,
}

fn theta(o: &PeriodicOrbit) -> f64 {
    1.0 / (2.0 * o.l())
}

fn stage_dot(o: &PeriodicOrbit, x: &[State], y: &[State]) -> f64 {
    let tab = o.tableau();
    let m = o.stages;
    (0..o.intervals())
        .map(|i| {
            let h = o.mesh[i + 1] - o.mesh[i];
            h * (0..m)
                .map(|j| tab.b[j] * x[i * m + j].iter().zip(&y[i * m + j]).map(|(a, b)| a * b).sum::<f64>())
                .sum::<f64>()
        })
        .sum()
}

impl Tangent {
    fn normalized(o: &PeriodicOrbit, mut nodes: Vec<State>, mut inner: Vec<State>, mut a: f64) -> Self {
        let n2 = theta(o) * stage_dot(o, &inner, &inner) + a * a;
        let s = 1.0 / n2.sqrt();
        for v in nodes.iter_mut().chain(inner.iter_mut()) {
            v.iter_mut().for_each(|c| *c *= s);
        }
        a *= s;
        Tangent { nodes, inner, a }
    }

    fn secant(prev: &PeriodicOrbit, next: &PeriodicOrbit) -> Self {
        let diff = |x: &[State], y: &[State]| -> Vec<State> {
            x.iter().zip(y).map(|(a, b)| std::array::from_fn(|k| a[k] - b[k])).collect()
        };
        Tangent::normalized(next, diff(&next.nodes, &prev.nodes), diff(&next.inner, &prev.inner), next.a() - prev.a())
    }

    fn flip(mut self) -> Self {
        for v in self.nodes.iter_mut().chain(self.inner.iter_mut()) {
            v.iter_mut().for_each(|c| *c = -*c);
        }
        self.a = -self.a;
        self
    }
}

fn fixed_system<'a>(o: &'a PeriodicOrbit, phase: &'a Phase) -> System<'a> {
    System { field: Field::new(&o.params), tab: o.tableau(), mesh: &o.mesh, phase, closure: Closure::FixedA(o.a()) }
}

/// Kernel direction of the `A`-extended Jacobian normalized by `δA = 1`.
fn initial_tangent(o: &PeriodicOrbit, exec: rd3_core::Exec) -> Result<Tangent> {
    let phase = Phase::from_orbit(o);
    let sys = fixed_system(o, &phase);
    let it = Iterate::from_orbit(o);
    let locals = sys.locals(&it, true, exec);
    let (band, _) = sys.assemble(&locals);
    let lu = sys.factor(band)?;
    let n = o.intervals();
    let mut rhs = vec![0.0; NB * n];
    rhs[crate::solver::pos(n - 1, n) * NB + 7] = 1.0;
    lu.solve(&mut rhs);
    let (dz, dst) = sys.expand(&locals, &rhs, false);
    let nodes = dz.iter().map(|z| std::array::from_fn(|k| z[k])).collect();
    Ok(Tangent::normalized(o, nodes, dst, dz[0][7]))
}

fn arclength(o: &PeriodicOrbit, t: &Tangent, ds: f64) -> Arclength {
    Arclength {
        prev_inner: o.inner.clone(),
        prev_a: o.a(),
        tan_inner: t.inner.clone(),
        tan_a: t.a,
        theta: theta(o),
        ds,
    }
}

/// Sign of the determinant of the arclength-extended Jacobian at `o`.
fn extended_det_sign(o: &PeriodicOrbit, t: &Tangent, exec: rd3_core::Exec) -> Result<i32> {
    let phase = Phase::from_orbit(o);
    let arc = arclength(o, t, 0.0);
    let sys = System { field: Field::new(&o.params), tab: o.tableau(), mesh: &o.mesh, phase: &phase, closure: Closure::Arc(&arc) };
    let locals = sys.locals(&Iterate::from_orbit(o), true, exec);
    let (band, _) = sys.assemble(&locals);
    let lu = sys.factor(band)?;
    let mut s = lu.det_sign_log().0;
    for l in &locals {
        if l.w_det_negative {
            s = -s;
        }
    }
    Ok(if s > 0.0 { 1 } else { -1 })
}

fn corrector(cur: &PeriodicOrbit, t: &Tangent, ds: f64, opts: &NewtonOptions) -> Result<(PeriodicOrbit, usize)> {
    let mut pred = cur.clone();
    for (y, d) in pred.nodes.iter_mut().zip(&t.nodes) {
        y.iter_mut().zip(d).for_each(|(a, b)| *a += ds * b);
    }
    for (y, d) in pred.inner.iter_mut().zip(&t.inner) {
        y.iter_mut().zip(d).for_each(|(a, b)| *a += ds * b);
    }
    pred.params = cur.params.with_a(cur.a() + ds * t.a);
    let phase = Phase::from_orbit(cur);
    let arc = arclength(cur, t, ds);
    let sys = System { field: Field::new(&cur.params), tab: cur.tableau(), mesh: &cur.mesh, phase: &phase, closure: Closure::Arc(&arc) };
    let (it, iters, res) = newton(&sys, &pred, opts)?;
    Ok((finish(&pred, it, res), iters))
}

/// Re-converges `o` at fixed `A` on a mesh equidistributing its own
/// gradient, doubling the interval count while the drift stays above
/// `ctl.remesh_drift`.
fn adapt(o: &PeriodicOrbit, ctl: &StepControl) -> Option<PeriodicOrbit> {
    let eps = o.params.eps;
    let opts = NewtonOptions { max_iter: 2 * ctl.newton.max_iter, ..ctl.newton };
    let mut n = o.intervals();
    let mut best: Option<PeriodicOrbit> = None;
    for _ in 0..=ctl.max_refine {
        let mesh = equidistribute(|x| o.eval(x).p / eps, o.l(), n, LAYER_SHARE);
        if let Ok(c) = newton_solve(&o.remeshed(mesh), &opts) {
            let done = c.orbit.hamiltonian_drift() <= ctl.remesh_drift;
            if best.as_ref().map_or(true, |b| c.orbit.hamiltonian_drift() < b.hamiltonian_drift()) {
                best = Some(c.orbit);
            }
            if done {
                break;
            }
        }
        n *= 2;
    }
    best.filter(|b| b.hamiltonian_drift() < o.hamiltonian_drift())
}

fn parabola_vertex(s: [f64; 3], a: [f64; 3]) -> f64 {
    let d1 = (a[1] - a[0]) / (s[1] - s[0]);
    let d2 = (a[2] - a[1]) / (s[2] - s[1]);
    let c2 = (d2 - d1) / (s[2] - s[0]);
    if c2.abs() < 1e-300 || !c2.is_finite() {
        return a[1];
    }
    // A(s) = a0 + d1 (s − s0) + c2 (s − s0)(s − s1)
    let sv = 0.5 * (s[0] + s[1]) - d1 / (2.0 * c2);
    a[0] + d1 * (sv - s[0]) + c2 * (sv - s[0]) * (sv - s[1])
}

/// Follows the branch through `start` (a converged orbit) with `A`
/// initially increasing for `direction > 0`. Newton failures halve the
/// step; below `ds_min` the branch ends with an `End` marker.
pub fn continue_branch(start: &PeriodicOrbit, direction: f64, ctl: &StepControl, branch_id: usize) -> Result<BranchRun> {
    if !(direction != 0.0) || !(ctl.ds > 0.0) {
        return Err(BvpError::Invalid("direction and ds must be nonzero".into()));
    }
    let exec = ctl.newton.exec;
    let mut tan = initial_tangent(start, exec)?;
    if tan.a * direction < 0.0 {
        tan = tan.flip();
    }
    let mut det = extended_det_sign(start, &tan, exec)?;
    let mut run = BranchRun {
        branch_id,
        rows: vec![DiagramRow { step: 0, a: start.a(), mass: start.mass, stability_hint: det, branch_id }],
        points: vec![BranchPoint { kind: PointKind::Start, a: start.a(), step: 0, orbit: start.clone() }],
        orbits: vec![start.clone()],
        end: EndReason::MaxSteps,
        max_abs_sigma: start.sigma.abs(),
    };
    let mut ds = ctl.ds;
    let mut arc_s = vec![0.0];
    let mut step = 0;
    while step < ctl.max_steps {
        let cur = run.orbits.last().unwrap().clone();
        let (next, iters) = match corrector(&cur, &tan, ds, &ctl.newton) {
            Ok(r) => r,
            Err(BvpError::NoConvergence { .. }) | Err(BvpError::SingularJacobian(_)) => {
                ds *= 0.5;
                if ds < ctl.ds_min {
                    run.end = EndReason::StepUnderflow;
                    break;
                }
                continue;
            }
            Err(e) => return Err(e),
        };
        step += 1;
        let new_tan = Tangent::secant(&cur, &next);
        let new_det = extended_det_sign(&next, &new_tan, exec)?;
        let s_next = arc_s.last().unwrap() + ds;
        if new_tan.a * tan.a < 0.0 && run.orbits.len() >= 2 {
            let k = run.orbits.len();
            let a3 = [run.orbits[k - 2].a(), cur.a(), next.a()];
            let s3 = [arc_s[k - 2], arc_s[k - 1], s_next];
            run.points.push(BranchPoint { kind: PointKind::Fold, a: parabola_vertex(s3, a3), step: step - 1, orbit: cur.clone() });
        }
        if new_det != det {
            run.points.push(BranchPoint { kind: PointKind::Pitchfork, a: next.a(), step, orbit: next.clone() });
        }
        // the determinant sign depends on the discretization, so after a
        // remesh the reference sign is recomputed on the new mesh
        let (next, new_tan, base_det) = match (next.hamiltonian_drift() > ctl.remesh_drift)
            .then(|| adapt(&next, ctl))
            .flatten()
        {
            Some(r) => {
                let t = Tangent::secant(&cur.remeshed(r.mesh.clone()), &r);
                let d = extended_det_sign(&r, &t, exec)?;
                (r, t, d)
            }
            None => (next, new_tan, new_det),
        };
        run.max_abs_sigma = run.max_abs_sigma.max(next.sigma.abs());
        run.rows.push(DiagramRow { step, a: next.a(), mass: next.mass, stability_hint: new_det, branch_id });
        arc_s.push(s_next);
        let out_of_range = next.a() < ctl.a_min || next.a() > ctl.a_max;
        run.orbits.push(next);
        tan = new_tan;
        det = base_det;
        if out_of_range {
            run.end = EndReason::ParameterBound;
            break;
        }
        if iters <= ctl.fast_iters {
            ds = (ds * ctl.grow).min(ctl.ds_max);
        }
    }
    let last = run.orbits.last().unwrap().clone();
    run.points.push(BranchPoint { kind: PointKind::End, a: last.a(), step, orbit: last });
    Ok(run)
}

/// Re-converges `point.orbit` after a push of relative size `1e−3` along
/// the approximate kernel of the fixed-`A` Jacobian, found by inverse
/// iteration. `sign` selects the side.
pub fn switch_branch(point: &BranchPoint, sign: f64, opts: &NewtonOptions) -> Result<PeriodicOrbit> {
    let o = &point.orbit;
    let phase = Phase::from_orbit(o);
    let sys = fixed_system(o, &phase);
    let locals = sys.locals(&Iterate::from_orbit(o), true, opts.exec);
    let (band, _) = sys.assemble(&locals);
    let lu = sys.factor(band)?;
    let n = o.intervals();
    // deterministic start vector
    let mut v: Vec<f64> = (0..NB * n).map(|k| ((k as f64 + 1.0) * 0.618_033_988_75).fract() - 0.5).collect();
    let (mut dz, mut dst) = (Vec::new(), Vec::new());
    for _ in 0..3 {
        lu.solve(&mut v);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        let e = sys.expand(&locals, &v, false);
        dz = e.0;
        dst = e.1;
    }
    let size = o.nodes.iter().flat_map(|y| y.iter()).fold(0.0f64, |m, x| m.max(x.abs()));
    let dir_max = dz.iter().flat_map(|z| z[..6].iter()).fold(0.0f64, |m, x| m.max(x.abs()));
    let scale = sign * 1e-3 * size / dir_max;
    let mut seed = o.clone();
    for (y, d) in seed.nodes.iter_mut().zip(&dz) {
        (0..6).for_each(|k| y[k] += scale * d[k]);
    }
    for (y, d) in seed.inner.iter_mut().zip(&dst) {
        (0..6).for_each(|k| y[k] += scale * d[k]);
    }
    Ok(newton_solve(&seed, opts)?.orbit)
}
