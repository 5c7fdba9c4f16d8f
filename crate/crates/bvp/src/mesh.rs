//! Gauss collocation tableau and mesh construction.

use rd3_core::quad::gauss_legendre;

/// Gauss–Legendre Runge–Kutta tableau on `[0, 1]` with `m` stages.
#[derive(Debug, Clone)]
pub struct Tableau {
    pub m: usize,
    pub c: Vec<f64>,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

fn lagrange(pts: &[f64], k: usize, t: f64) -> f64 {
    pts.iter()
        .enumerate()
        .filter(|&(j, _)| j != k)
        .map(|(_, &p)| (t - p) / (pts[k] - p))
        .product()
}

impl Tableau {
    pub fn gauss(m: usize) -> Self {
        assert!(m >= 1);
        let (x, w) = gauss_legendre(m);
        let c: Vec<f64> = x.iter().map(|x| 0.5 * (1.0 + x)).collect();
        let b: Vec<f64> = w.iter().map(|w| 0.5 * w).collect();
        // ∫_0^{c_j} ℓ_k, exact with the m-point rule on [0, c_j]
        let a = c
            .iter()
            .map(|&cj| {
                (0..m)
                    .map(|k| x.iter().zip(&w).map(|(xi, wi)| 0.5 * cj * wi * lagrange(&c, k, 0.5 * cj * (1.0 + xi))).sum())
                    .collect()
            })
            .collect();
        Tableau { m, c, a, b }
    }

    /// Weights of the collocation polynomial through the interval start
    /// (`t = 0`) and the stages, evaluated at `t ∈ [0, 1]`.
    pub fn interp_weights(&self, t: f64) -> Vec<f64> {
        let mut pts = Vec::with_capacity(self.m + 1);
        pts.push(0.0);
        pts.extend_from_slice(&self.c);
        (0..=self.m).map(|k| lagrange(&pts, k, t)).collect()
    }
}

/// Uniform nodes on `[−L, L]`.
pub fn uniform(l: f64, n: usize) -> Vec<f64> {
    let mut x: Vec<f64> = (0..=n).map(|i| -l + 2.0 * l * i as f64 / n as f64).collect();
    x[n] = l;
    x
}

/// `n` intervals equidistributing `1 + κ|g|` on `[−L, L]`, where `g` is
/// sampled on a uniform grid and `κ` puts about `share` of the intervals
/// where `|g|` is large. Falls back to a uniform mesh when `g ≡ 0`.
pub fn equidistribute<G: Fn(f64) -> f64>(g: G, l: f64, n: usize, share: f64) -> Vec<f64> {
    let samples = 40 * n;
    let xs = uniform(l, samples);
    let gs: Vec<f64> = xs.iter().map(|&x| g(x).abs()).collect();
    let h = 2.0 * l / samples as f64;
    let total: f64 = gs.windows(2).map(|w| 0.5 * h * (w[0] + w[1])).sum();
    if !(total > 0.0) || !total.is_finite() {
        return uniform(l, n);
    }
    let kappa = share / (1.0 - share) * 2.0 * l / total;
    let mut cum = vec![0.0; samples + 1];
    for i in 0..samples {
        cum[i + 1] = cum[i] + h * (1.0 + 0.5 * kappa * (gs[i] + gs[i + 1]));
    }
    let last = cum[samples];
    let mut out = Vec::with_capacity(n + 1);
    out.push(-l);
    let mut j = 0;
    for k in 1..n {
        let target = last * k as f64 / n as f64;
        while cum[j + 1] < target {
            j += 1;
        }
        let t = (target - cum[j]) / (cum[j + 1] - cum[j]);
        out.push(xs[j] + t * h);
    }
    out.push(l);
    out
}
