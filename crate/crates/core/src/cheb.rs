//! Chebyshev interpolants on an interval.

use std::f64::consts::PI;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Chebyshev {
    pub a: f64,
    pub b: f64,
    pub coeffs: Vec<f64>,
}

impl Chebyshev {
    /// Interpolant through `n` Chebyshev–Gauss points.
    pub fn fit<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> Self {
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        let vals: Vec<f64> = (0..n)
            .map(|k| f(c + h * (PI * (k as f64 + 0.5) / n as f64).cos()))
            .collect();
        let coeffs = (0..n)
            .map(|j| {
                let s: f64 = vals
                    .iter()
                    .enumerate()
                    .map(|(k, v)| v * (PI * j as f64 * (k as f64 + 0.5) / n as f64).cos())
                    .sum();
                let w = if j == 0 { 1.0 } else { 2.0 };
                w * s / n as f64
            })
            .collect();
        Chebyshev { a, b, coeffs }
    }

    /// Doubles the number of points from 33 until the trailing coefficients
    /// fall below `tol` relative to the largest one, or `max_n` is reached.
    pub fn fit_adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64, max_n: usize) -> (Self, bool) {
        let mut n = 33;
        loop {
            let ch = Self::fit(&mut f, a, b, n);
            let scale = ch.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs())).max(1e-300);
            let tail = ch.coeffs[n - 4..].iter().fold(0.0f64, |m, c| m.max(c.abs()));
            if tail <= tol * scale {
                return (ch.truncated(tol * scale * 1e-3), true);
            }
            if 2 * n > max_n {
                return (ch, false);
            }
            n = 2 * n - 1;
        }
    }

    fn truncated(mut self, floor: f64) -> Self {
        while self.coeffs.len() > 1 && self.coeffs.last().unwrap().abs() < floor {
            self.coeffs.pop();
        }
        self
    }

    pub fn eval(&self, x: f64) -> f64 {
        let t = (2.0 * x - self.a - self.b) / (self.b - self.a);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * t * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        t * b1 - b2 + self.coeffs[0]
    }

    /// Antiderivative vanishing at `a`.
    pub fn integral(&self) -> Self {
        let n = self.coeffs.len();
        let h = 0.5 * (self.b - self.a);
        let c = |j: usize| if j < n { self.coeffs[j] } else { 0.0 };
        let mut out = vec![0.0; n + 1];
        for (j, o) in out.iter_mut().enumerate().skip(1) {
            let prev = if j == 1 { 2.0 * c(0) } else { c(j - 1) };
            *o = h * (prev - c(j + 1)) / (2.0 * j as f64);
        }
        let mut ch = Chebyshev { a: self.a, b: self.b, coeffs: out };
        ch.coeffs[0] = 0.0;
        let at_a = ch.eval(self.a);
        ch.coeffs[0] = -at_a;
        ch
    }

    pub fn derivative(&self) -> Self {
        let n = self.coeffs.len();
        if n <= 1 {
            return Chebyshev { a: self.a, b: self.b, coeffs: vec![0.0] };
        }
        let mut d = vec![0.0; n + 1];
        for j in (0..n - 1).rev() {
            d[j] = d[j + 2] + 2.0 * (j as f64 + 1.0) * self.coeffs[j + 1];
        }
        d[0] *= 0.5;
        d.truncate(n - 1);
        let s = 2.0 / (self.b - self.a);
        Chebyshev { a: self.a, b: self.b, coeffs: d.into_iter().map(|c| c * s).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_exp() {
        let (ch, ok) = Chebyshev::fit_adaptive(|x| x.exp(), -1.0, 2.0, 1e-15, 1025);
        assert!(ok);
        for i in 0..=30 {
            let x = -1.0 + 3.0 * i as f64 / 30.0;
            assert!((ch.eval(x) - x.exp()).abs() < 5e-14 * x.exp().max(1.0), "{} {}", x, ch.eval(x) - x.exp());
        }
    }

    #[test]
    fn integral_and_derivative() {
        let ch = Chebyshev::fit(|x| x.cos(), 0.5, 3.0, 40);
        let i = ch.integral();
        let d = ch.derivative();
        for k in 0..=10 {
            let x = 0.5 + 2.5 * k as f64 / 10.0;
            assert!((i.eval(x) - (x.sin() - 0.5f64.sin())).abs() < 1e-14);
            assert!((d.eval(x) + x.sin()).abs() < 1e-10, "{}", d.eval(x) + x.sin());
        }
    }
}
