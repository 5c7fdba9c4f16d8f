//! Collocation residual, condensed banded Jacobian and Newton iteration.
//!
//! Unknowns per mesh node `k` are `z_k = (y_k, σ_k, A_k, ψ_k, χ_k)`: the
//! state, the unfolding scalar, the parameter, and running sums of the phase
//! and arclength integrals. `σ` and `A` are copied along the chain by
//! `z_{k+1} = z_k` rows, which keeps the integral constraints and the
//! parameters inside the band. Stage values are eliminated interval by
//! interval. Nodes are stored in the interleaved order `0, N−1, 1, N−2, …`
//! so that the periodic wrap stays within a bandwidth of three blocks.

use nalgebra::{DMatrix, DVector};
use rd3_core::Exec;

use crate::banded::{BandLu, BandMatrix};
use crate::error::{BvpError, Result};
use crate::field::{Field, State};
use crate::mesh::Tableau;
use crate::orbit::PeriodicOrbit;

pub(crate) const NB: usize = 10;

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    /// Max-norm of all discrete equations.
    pub tol: f64,
    pub max_iter: usize,
    pub exec: Exec,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { tol: 1e-10, max_iter: 25, exec: Exec::default() }
    }
}

/// Pseudo-arclength closure: `θ ∫ τ·(y − y_prev) + τ_A (A − A_prev) = ds`.
#[derive(Debug, Clone)]
pub struct Arclength {
    pub prev_inner: Vec<State>,
    pub prev_a: f64,
    pub tan_inner: Vec<State>,
    pub tan_a: f64,
    pub theta: f64,
    pub ds: f64,
}

#[derive(Debug, Clone)]
pub(crate) enum Closure<'a> {
    FixedA(f64),
    Arc(&'a Arclength),
}

/// Reference orbit for the phase integral `∫ f(ref)·(y − ref) dx`.
#[derive(Debug, Clone)]
pub(crate) struct Phase {
    inner: Vec<State>,
    dinner: Vec<State>,
    /// The reference is (numerically) constant: pin `σ = 0` instead.
    pinned: bool,
}

impl Phase {
    pub(crate) fn from_orbit(o: &PeriodicOrbit) -> Self {
        let f = Field::new(&o.params);
        let dinner: Vec<State> = o.inner.iter().map(|y| f.f(y, o.a())).collect();
        let size = dinner.iter().flat_map(|d| d.iter()).fold(0.0f64, |m, v| m.max(v.abs()));
        let scale = o.inner.iter().flat_map(|d| d.iter()).fold(1.0f64, |m, v| m.max(v.abs()));
        Phase { inner: o.inner.clone(), dinner, pinned: size <= 1e-9 * scale }
    }
}

/// Current Newton iterate.
#[derive(Debug, Clone)]
pub(crate) struct Iterate {
    pub y: Vec<State>,
    pub st: Vec<State>,
    pub sig: Vec<f64>,
    pub a: Vec<f64>,
    pub psi: Vec<f64>,
    pub chi: Vec<f64>,
}

impl Iterate {
    pub(crate) fn from_orbit(o: &PeriodicOrbit) -> Self {
        let n = o.intervals();
        Iterate {
            y: o.nodes.clone(),
            st: o.inner.clone(),
            sig: vec![o.sigma; n],
            a: vec![o.a(); n],
            psi: vec![0.0; n],
            chi: vec![0.0; n],
        }
    }
}

/// Condensed equations of one interval.
pub(crate) struct Local {
    /// 10 rows × (node i, node i+1) columns.
    pub rows: [[f64; 2 * NB]; NB],
    /// `−F_eff`.
    pub rhs: [f64; NB],
    /// `δY = d0 + S δy_i + s_σ δσ_i + s_A δA_i`, column-major `6m × 9`.
    pub rec: DMatrix<f64>,
    pub w_det_negative: bool,
    pub res: f64,
}

pub(crate) struct System<'a> {
    pub field: Field,
    pub tab: Tableau,
    pub mesh: &'a [f64],
    pub phase: &'a Phase,
    pub closure: Closure<'a>,
}

#[inline]
pub(crate) fn pos(k: usize, n: usize) -> usize {
    if k <= (n - 1) / 2 {
        2 * k
    } else {
        2 * (n - 1 - k) + 1
    }
}

impl<'a> System<'a> {
    fn n(&self) -> usize {
        self.mesh.len() - 1
    }

    /// Raw residuals of interval `i` and, if `jac`, the condensed rows.
    pub(crate) fn local(&self, it: &Iterate, i: usize, jac: bool) -> Local {
        let n = self.n();
        let m = self.tab.m;
        let ip = (i + 1) % n;
        let last = i == n - 1;
        let h = self.mesh[i + 1] - self.mesh[i];
        let (sig, a) = (it.sig[i], it.a[i]);
        let f = &self.field;
        let ys = &it.st[i * m..(i + 1) * m];
        let fy: Vec<State> = ys
            .iter()
            .map(|y| {
                let mut v = f.f(y, a);
                let g = f.grad_h(y, a);
                for k in 0..6 {
                    v[k] += sig * g[k];
                }
                v
            })
            .collect();
        let mut res = 0.0f64;
        let mut g_stage = vec![0.0; 6 * m];
        for j in 0..m {
            for k in 0..6 {
                let s: f64 = (0..m).map(|l| self.tab.a[j][l] * fy[l][k]).sum();
                let v = ys[j][k] - it.y[i][k] - h * s;
                g_stage[6 * j + k] = v;
                res = res.max(v.abs());
            }
        }
        let mut r_cont = [0.0; 6];
        for k in 0..6 {
            let s: f64 = (0..m).map(|j| self.tab.b[j] * fy[j][k]).sum();
            r_cont[k] = it.y[ip][k] - it.y[i][k] - h * s;
            res = res.max(r_cont[k].abs());
        }
        // functionals on the stage values
        let mut gph = vec![0.0; 6 * m];
        let mut c_i = 0.0;
        for j in 0..m {
            let idx = i * m + j;
            for k in 0..6 {
                let w = h * self.tab.b[j] * self.phase.dinner[idx][k];
                gph[6 * j + k] = w;
                c_i += w * (ys[j][k] - self.phase.inner[idx][k]);
            }
        }
        let mut garc = vec![0.0; 6 * m];
        let mut a_i = 0.0;
        if let Closure::Arc(arc) = &self.closure {
            for j in 0..m {
                let idx = i * m + j;
                for k in 0..6 {
                    let w = arc.theta * h * self.tab.b[j] * arc.tan_inner[idx][k];
                    garc[6 * j + k] = w;
                    a_i += w * (ys[j][k] - arc.prev_inner[idx][k]);
                }
            }
        }
        // raw residuals of rows 6..9
        let raw6 = if !last {
            it.sig[ip] - it.sig[i]
        } else if self.phase.pinned {
            it.sig[i]
        } else {
            it.psi[i] + c_i
        };
        let raw7 = if !last {
            it.a[ip] - it.a[i]
        } else {
            match &self.closure {
                Closure::FixedA(a0) => it.a[i] - a0,
                Closure::Arc(arc) => it.chi[i] + a_i + arc.tan_a * (it.a[i] - arc.prev_a) - arc.ds,
            }
        };
        let raw8 = if !last { it.psi[ip] - it.psi[i] - c_i } else { it.psi[ip] };
        let raw9 = if !last { it.chi[ip] - it.chi[i] - a_i } else { it.chi[ip] };
        for v in [raw6, raw7, raw8, raw9] {
            res = res.max(v.abs());
        }
        let mut out = Local {
            rows: [[0.0; 2 * NB]; NB],
            rhs: [0.0; NB],
            rec: DMatrix::zeros(0, 0),
            w_det_negative: false,
            res,
        };
        if !jac {
            return out;
        }

        let dfs: Vec<_> = ys
            .iter()
            .map(|y| {
                let mut d = f.df(y, a);
                if sig != 0.0 {
                    let hs = f.hess_h(y, a);
                    for r in 0..6 {
                        for c in 0..6 {
                            d[r][c] += sig * hs[r][c];
                        }
                    }
                }
                d
            })
            .collect();
        let fsig: Vec<State> = ys.iter().map(|y| f.grad_h(y, a)).collect();
        let fa: Vec<State> = ys
            .iter()
            .map(|y| {
                let mut v = f.df_da(y);
                let g = f.grad_h_da(y);
                for k in 0..6 {
                    v[k] += sig * g[k];
                }
                v
            })
            .collect();
        let dim = 6 * m;
        let mut w = DMatrix::<f64>::identity(dim, dim);
        let mut rhs = DMatrix::<f64>::zeros(dim, 9);
        for j in 0..m {
            for l in 0..m {
                let c = h * self.tab.a[j][l];
                for r in 0..6 {
                    for k in 0..6 {
                        w[(6 * j + r, 6 * l + k)] -= c * dfs[l][r][k];
                    }
                    rhs[(6 * j + r, 7)] += c * fsig[l][r];
                    rhs[(6 * j + r, 8)] += c * fa[l][r];
                }
            }
            for r in 0..6 {
                rhs[(6 * j + r, 0)] = -g_stage[6 * j + r];
                rhs[(6 * j + r, 1 + r)] = 1.0;
            }
        }
        let lu = w.lu();
        out.w_det_negative = lu.determinant() < 0.0;
        let rec = lu.solve(&rhs).unwrap_or_else(|| DMatrix::from_element(dim, 9, f64::NAN));

        // y-continuity rows: δy_{i+1} − δy_i − h Σ b_j (F_j δY_j + fσ_j δσ + fA_j δA) = −R
        let mut bf = DMatrix::<f64>::zeros(6, dim);
        for j in 0..m {
            for r in 0..6 {
                for k in 0..6 {
                    bf[(r, 6 * j + k)] = h * self.tab.b[j] * dfs[j][r][k];
                }
            }
        }
        let bfr = &bf * &rec;
        for r in 0..6 {
            out.rows[r][NB + r] += 1.0;
            for c in 0..6 {
                out.rows[r][c] -= bfr[(r, 1 + c)] + if r == c { 1.0 } else { 0.0 };
            }
            let sb_sig: f64 = (0..m).map(|j| h * self.tab.b[j] * fsig[j][r]).sum();
            let sb_a: f64 = (0..m).map(|j| h * self.tab.b[j] * fa[j][r]).sum();
            out.rows[r][6] -= bfr[(r, 7)] + sb_sig;
            out.rows[r][7] -= bfr[(r, 8)] + sb_a;
            out.rhs[r] = -(r_cont[r] - bfr[(r, 0)]);
        }
        let gph_v = DVector::from_vec(gph);
        let garc_v = DVector::from_vec(garc);
        let phi = rec.tr_mul(&gph_v);
        let alpha = rec.tr_mul(&garc_v);
        // functional rows: coefficients of (δy_i, δσ_i, δA_i) and the constant part
        let put = |row: &mut [f64; 2 * NB], v: &DVector<f64>, s: f64| {
            for c in 0..6 {
                row[c] += s * v[1 + c];
            }
            row[6] += s * v[7];
            row[7] += s * v[8];
        };
        if !last {
            out.rows[6][NB + 6] = 1.0;
            out.rows[6][6] = -1.0;
            out.rhs[6] = -raw6;
            out.rows[7][NB + 7] = 1.0;
            out.rows[7][7] = -1.0;
            out.rhs[7] = -raw7;
            out.rows[8][NB + 8] = 1.0;
            out.rows[8][8] = -1.0;
            put(&mut out.rows[8], &phi, -1.0);
            out.rhs[8] = -(raw8 - phi[0]);
            out.rows[9][NB + 9] = 1.0;
            out.rows[9][9] = -1.0;
            put(&mut out.rows[9], &alpha, -1.0);
            out.rhs[9] = -(raw9 - alpha[0]);
        } else {
            if self.phase.pinned {
                out.rows[6][6] = 1.0;
                out.rhs[6] = -raw6;
            } else {
                out.rows[6][8] = 1.0;
                put(&mut out.rows[6], &phi, 1.0);
                out.rhs[6] = -(raw6 + phi[0]);
            }
            match &self.closure {
                Closure::FixedA(_) => {
                    out.rows[7][7] = 1.0;
                    out.rhs[7] = -raw7;
                }
                Closure::Arc(arc) => {
                    out.rows[7][9] = 1.0;
                    put(&mut out.rows[7], &alpha, 1.0);
                    out.rows[7][7] += arc.tan_a;
                    out.rhs[7] = -(raw7 + alpha[0]);
                }
            }
            out.rows[8][NB + 8] = 1.0;
            out.rhs[8] = -raw8;
            out.rows[9][NB + 9] = 1.0;
            out.rhs[9] = -raw9;
        }
        out.rec = rec;
        out
    }

    pub(crate) fn locals(&self, it: &Iterate, jac: bool, exec: Exec) -> Vec<Local> {
        exec.map_range(self.n(), |i| self.local(it, i, jac))
    }

    pub(crate) fn assemble(&self, locals: &[Local]) -> (BandMatrix, Vec<f64>) {
        let n = self.n();
        let dim = NB * n;
        let bw = 3 * NB - 1;
        let mut band = BandMatrix::zeros(dim, bw, bw);
        let mut rhs = vec![0.0; dim];
        for (i, loc) in locals.iter().enumerate() {
            let row0 = pos(i, n) * NB;
            let cols = [pos(i, n) * NB, pos((i + 1) % n, n) * NB];
            for r in 0..NB {
                for c in 0..2 * NB {
                    let v = loc.rows[r][c];
                    if v != 0.0 {
                        band.add(row0 + r, cols[c / NB] + c % NB, v);
                    }
                }
                rhs[row0 + r] = loc.rhs[r];
            }
        }
        (band, rhs)
    }

    /// Node and stage corrections from a solved band system.
    pub(crate) fn expand(&self, locals: &[Local], sol: &[f64], with_d0: bool) -> (Vec<[f64; NB]>, Vec<State>) {
        let n = self.n();
        let m = self.tab.m;
        let dz: Vec<[f64; NB]> = (0..n)
            .map(|k| {
                let b = pos(k, n) * NB;
                let mut z = [0.0; NB];
                z.copy_from_slice(&sol[b..b + NB]);
                z
            })
            .collect();
        let mut dst = Vec::with_capacity(n * m);
        for (i, loc) in locals.iter().enumerate() {
            let z = &dz[i];
            for j in 0..m {
                let mut d = [0.0; 6];
                for (k, dk) in d.iter_mut().enumerate() {
                    let r = 6 * j + k;
                    let mut v = if with_d0 { loc.rec[(r, 0)] } else { 0.0 };
                    for c in 0..6 {
                        v += loc.rec[(r, 1 + c)] * z[c];
                    }
                    v += loc.rec[(r, 7)] * z[6] + loc.rec[(r, 8)] * z[7];
                    *dk = v;
                }
                dst.push(d);
            }
        }
        (dz, dst)
    }

    pub(crate) fn factor(&self, band: BandMatrix) -> Result<BandLu> {
        band.factor().map_err(BvpError::SingularJacobian)
    }
}

pub(crate) fn apply(it: &Iterate, dz: &[[f64; NB]], dst: &[State], lam: f64) -> Iterate {
    let mut out = it.clone();
    for (k, z) in dz.iter().enumerate() {
        for c in 0..6 {
            out.y[k][c] += lam * z[c];
        }
        out.sig[k] += lam * z[6];
        out.a[k] += lam * z[7];
        out.psi[k] += lam * z[8];
        out.chi[k] += lam * z[9];
    }
    for (s, d) in out.st.iter_mut().zip(dst) {
        for c in 0..6 {
            s[c] += lam * d[c];
        }
    }
    out
}

fn max_res(locals: &[Local]) -> f64 {
    locals.iter().fold(0.0f64, |m, l| if l.res.is_nan() { f64::NAN } else { m.max(l.res) })
}

/// Outcome of a Newton run.
#[derive(Debug, Clone)]
pub struct Converged {
    pub orbit: PeriodicOrbit,
    pub iterations: usize,
}

pub(crate) fn newton(
    sys: &System,
    seed: &PeriodicOrbit,
    opts: &NewtonOptions,
) -> Result<(Iterate, usize, f64)> {
    let mut it = Iterate::from_orbit(seed);
    let mut locals = sys.locals(&it, true, opts.exec);
    let mut res = max_res(&locals);
    for iter in 0..=opts.max_iter {
        if res <= opts.tol {
            return Ok((it, iter, res));
        }
        if iter == opts.max_iter || !res.is_finite() {
            break;
        }
        let (band, mut rhs) = sys.assemble(&locals);
        let lu = sys.factor(band)?;
        lu.solve(&mut rhs);
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(BvpError::SingularJacobian(0));
        }
        let (dz, dst) = sys.expand(&locals, &rhs, true);
        // damped step: accept the first λ that does not increase the residual
        let mut lam = 1.0;
        loop {
            let trial = apply(&it, &dz, &dst, lam);
            let tl = sys.locals(&trial, false, opts.exec);
            let tr = max_res(&tl);
            if (tr.is_finite() && tr < res) || lam < 1.0 / 64.0 {
                it = trial;
                break;
            }
            lam *= 0.5;
        }
        locals = sys.locals(&it, true, opts.exec);
        res = max_res(&locals);
    }
    Err(BvpError::NoConvergence { iterations: opts.max_iter, residual: res })
}

pub(crate) fn finish(seed: &PeriodicOrbit, it: Iterate, res: f64) -> PeriodicOrbit {
    let a = it.a[0];
    let mut o = PeriodicOrbit {
        params: seed.params.with_a(a),
        stages: seed.stages,
        mesh: seed.mesh.clone(),
        nodes: it.y,
        inner: it.st,
        sigma: it.sig[0],
        mass: 0.0,
        residual_norm: res,
    };
    o.mass = o.compute_mass();
    o
}

/// Newton's method at fixed `A = seed.a()`, with the seed as phase reference.
pub fn newton_solve(seed: &PeriodicOrbit, opts: &NewtonOptions) -> Result<Converged> {
    let phase = Phase::from_orbit(seed);
    let sys = System {
        field: Field::new(&seed.params),
        tab: seed.tableau(),
        mesh: &seed.mesh,
        phase: &phase,
        closure: Closure::FixedA(seed.a()),
    };
    let (it, iterations, res) = newton(&sys, seed, opts)?;
    Ok(Converged { orbit: finish(seed, it, res), iterations })
}

/// Max-norm of the discrete equations at `orbit`, with the orbit itself as
/// phase reference.
pub fn residual_norm(orbit: &PeriodicOrbit) -> f64 {
    let phase = Phase::from_orbit(orbit);
    let sys = System {
        field: Field::new(&orbit.params),
        tab: orbit.tableau(),
        mesh: &orbit.mesh,
        phase: &phase,
        closure: Closure::FixedA(orbit.a()),
    };
    max_res(&sys.locals(&Iterate::from_orbit(orbit), false, Exec::Sequential))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::uniform;
    use rd3_core::{PhasePoint, SystemParams};

    #[test]
    fn interleaved_order_is_a_permutation_with_short_links() {
        for n in 2..40 {
            let mut seen = vec![false; n];
            for k in 0..n {
                let p = pos(k, n);
                assert!(!seen[p]);
                seen[p] = true;
                let q = pos((k + 1) % n, n);
                assert!(p.abs_diff(q) <= 2, "n={n} k={k}");
            }
        }
    }

    /// Rows of the condensed system against central differences of the raw
    /// equations with the stage equations solved exactly.
    #[test]
    fn condensed_jacobian_matches_differences() {
        let params = SystemParams::new(0.2, 0.4, 0.05, 0.02, 3.0, 1.0).unwrap();
        let mesh = uniform(1.0, 6);
        let k = std::f64::consts::PI;
        let seed = PeriodicOrbit::from_fn(params, mesh.clone(), 2, |x| {
            PhasePoint::new(0.5 + 0.3 * (k * x).cos(), 0.1 * (k * x).sin(), 0.2, 0.05 * (k * x).sin(), 0.1, 0.0)
        });
        let phase = Phase::from_orbit(&seed.shifted(0.05));
        let arc = Arclength {
            prev_inner: seed.shifted(-0.03).inner,
            prev_a: 0.38,
            tan_inner: seed.shifted(0.2).inner,
            tan_a: 0.7,
            theta: 0.5,
            ds: 0.01,
        };
        let sys = System {
            field: Field::new(&params),
            tab: seed.tableau(),
            mesh: &mesh,
            phase: &phase,
            closure: Closure::Arc(&arc),
        };
        let mut it = Iterate::from_orbit(&seed);
        it.sig = vec![0.01; 6];
        // stage equations solved, so the condensed rows are exact derivatives
        let solve_stages = |it: &mut Iterate| {
            for _ in 0..50 {
                let locals = sys.locals(it, true, Exec::Sequential);
                let zero = vec![0.0; NB * 6];
                let (_, dst) = sys.expand(&locals, &zero, true);
                for (s, d) in it.st.iter_mut().zip(&dst) {
                    for c in 0..6 {
                        s[c] += d[c];
                    }
                }
            }
        };
        solve_stages(&mut it);
        let locals = sys.locals(&it, true, Exec::Sequential);
        let (band, rhs) = sys.assemble(&locals);
        let n = 6;
        let raw = |it: &Iterate| -> Vec<f64> {
            let locs = sys.locals(it, true, Exec::Sequential);
            let (_, r) = sys.assemble(&locs);
            r.iter().map(|v| -v).collect()
        };
        let base = raw(&it);
        for (a, b) in base.iter().zip(&rhs) {
            assert!((a + b).abs() < 1e-12);
        }
        let h = 1e-6;
        for node in 0..n {
            for c in 0..NB {
                let mut ip = it.clone();
                let mut im = it.clone();
                let bump = |x: &mut Iterate, s: f64| match c {
                    0..=5 => x.y[node][c] += s,
                    6 => x.sig[node] += s,
                    7 => x.a[node] += s,
                    8 => x.psi[node] += s,
                    _ => x.chi[node] += s,
                };
                bump(&mut ip, h);
                bump(&mut im, -h);
                solve_stages(&mut ip);
                solve_stages(&mut im);
                let (fp, fm) = (raw(&ip), raw(&im));
                let col = pos(node, n) * NB + c;
                for row in 0..NB * n {
                    let fd = (fp[row] - fm[row]) / (2.0 * h);
                    let an = band.get(row, col);
                    assert!((fd - an).abs() < 1e-6 * (1.0 + an.abs()), "row {row} col {col}: {fd} vs {an}");
                }
            }
        }
    }
}
