//! First-order vector field, its Jacobian and the conservative unfolding
//! direction `∇H`.

use rd3_core::SystemParams;

pub type State = [f64; 6];
pub type Mat6 = [[f64; 6]; 6];

/// Everything except `A`, which is a continuation unknown.
#[derive(Debug, Clone, Copy)]
pub struct Field {
    pub eps: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Field {
    pub fn new(p: &SystemParams) -> Self {
        Field { eps: p.eps, b: p.b(), c: p.c(), d: p.d }
    }

    pub fn f(&self, y: &State, a: f64) -> State {
        let [u, p, v, q, w, r] = *y;
        let k = a * v + self.b * w + self.c;
        [
            p / self.eps,
            (-u + u * u * u + k) / self.eps,
            q,
            v - u,
            r / self.d,
            (w - u) / self.d,
        ]
    }

    pub fn df(&self, y: &State, a: f64) -> Mat6 {
        let u = y[0];
        let (e, d) = (self.eps, self.d);
        let mut m = [[0.0; 6]; 6];
        m[0][1] = 1.0 / e;
        m[1][0] = (3.0 * u * u - 1.0) / e;
        m[1][2] = a / e;
        m[1][4] = self.b / e;
        m[2][3] = 1.0;
        m[3][0] = -1.0;
        m[3][2] = 1.0;
        m[4][5] = 1.0 / d;
        m[5][0] = -1.0 / d;
        m[5][4] = 1.0 / d;
        m
    }

    pub fn df_da(&self, y: &State) -> State {
        [0.0, y[2] / self.eps, 0.0, 0.0, 0.0, 0.0]
    }

    /// `H` of the first-order system.
    pub fn hamiltonian(&self, y: &State, a: f64) -> f64 {
        let [u, p, v, q, w, r] = *y;
        let b = self.b;
        p * p / 2.0 - u.powi(4) / 4.0 + u * u / 2.0
            - (a * q * q / 2.0 + b * r * r / 2.0 - a * v * v / 2.0 - b * w * w / 2.0 + (a * v + b * w + self.c) * u)
    }

    /// Euclidean gradient of `H`. Adding `σ ∇H` to the field makes
    /// `dH/dx = σ |∇H|²`, so a periodic solution forces `σ = 0`.
    pub fn grad_h(&self, y: &State, a: f64) -> State {
        let [u, p, v, q, w, r] = *y;
        let b = self.b;
        [u - u * u * u - (a * v + b * w + self.c), p, a * (v - u), -a * q, b * (w - u), -b * r]
    }

    pub fn hess_h(&self, y: &State, a: f64) -> Mat6 {
        let u = y[0];
        let b = self.b;
        let mut m = [[0.0; 6]; 6];
        m[0][0] = 1.0 - 3.0 * u * u;
        m[0][2] = -a;
        m[0][4] = -b;
        m[1][1] = 1.0;
        m[2][0] = -a;
        m[2][2] = a;
        m[3][3] = -a;
        m[4][0] = -b;
        m[4][4] = b;
        m[5][5] = -b;
        m
    }

    pub fn grad_h_da(&self, y: &State) -> State {
        let [u, _, v, q, _, _] = *y;
        [-v, 0.0, v - u, -q, 0.0, 0.0]
    }
}
