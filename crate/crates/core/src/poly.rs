//! Polynomial root finding: real roots of depressed cubics and all complex
//! roots of a general polynomial through its companion matrix.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Real roots of `x³ + p x + q = 0`, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicRoots {
    pub roots: Vec<f64>,
    /// Set when two of the three roots coincide (fold of the cubic); the
    /// double root is then listed once.
    pub double_root: bool,
}

/// Discriminant sign test scaled so that it is dimensionless in `p`, `q`.
fn fold_measure(p: f64, q: f64) -> f64 {
    4.0 * p * p * p + 27.0 * q * q
}

fn newton_polish(p: f64, q: f64, x: f64) -> f64 {
    let f = x * x * x + p * x + q;
    let df = 3.0 * x * x + p;
    if df.abs() > 1e-300 {
        let step = f / df;
        let y = x - step;
        let fy = y * y * y + p * y + q;
        if fy.abs() <= f.abs() {
            return y;
        }
    }
    x
}

/// Trigonometric / hyperbolic Cardano solution with one Newton polish step per root.
pub fn depressed_cubic_roots(p: f64, q: f64) -> CubicRoots {
    let disc = fold_measure(p, q);
    let scale = 4.0 * p.abs().powi(3) + 27.0 * q * q;
    let degenerate_tol = 1e-14 * scale.max(1e-300);

    if p == 0.0 {
        let x = -q.cbrt();
        return CubicRoots { roots: vec![newton_polish(p, q, x)], double_root: q == 0.0 };
    }

    if disc.abs() <= degenerate_tol && p < 0.0 {
        let simple = 3.0 * q / p;
        let double = -1.5 * q / p;
        let mut roots = vec![newton_polish(p, q, simple), double];
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        return CubicRoots { roots, double_root: true };
    }

    if disc < 0.0 {
        // three distinct real roots
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = ((3.0 * q / (2.0 * p)) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        let mut roots: Vec<f64> = (0..3)
            .map(|k| {
                let x = m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos();
                newton_polish(p, q, x)
            })
            .collect();
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        return CubicRoots { roots, double_root: false };
    }

    let x = if p < 0.0 {
        let arg = (-3.0 * q.abs() / (2.0 * p)) * (-3.0 / p).sqrt();
        -2.0 * q.signum() * (-p / 3.0).sqrt() * (arg.max(1.0).acosh() / 3.0).cosh()
    } else {
        let arg = (3.0 * q / (2.0 * p)) * (3.0 / p).sqrt();
        -2.0 * (p / 3.0).sqrt() * (arg.asinh() / 3.0).sinh()
    };
    CubicRoots { roots: vec![newton_polish(p, q, x)], double_root: false }
}

/// Horner evaluation of `Σ c[k] z^k` (ascending coefficients) and its derivative.
pub fn eval_with_derivative(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut val = Complex64::new(0.0, 0.0);
    let mut der = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        der = der * z + val;
        val = val * z + c;
    }
    (val, der)
}

/// All complex roots of `Σ c[k] z^k` (ascending coefficients, nonzero leading term).
///
/// Roots are the eigenvalues of the companion matrix, refined by a few
/// Newton steps on the polynomial itself.
pub fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let mut c = coeffs.to_vec();
    while c.len() > 1 && *c.last().unwrap() == 0.0 {
        c.pop();
    }
    let n = c.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let mut comp = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        comp[(i, n - 1)] = -c[i] / lead;
    }
    let eig = comp.complex_eigenvalues();
    eig.iter()
        .map(|&z0| {
            let mut z = z0;
            let (mut fz, _) = eval_with_derivative(&c, z);
            for _ in 0..3 {
                let (f, df) = eval_with_derivative(&c, z);
                if df.norm() == 0.0 {
                    break;
                }
                let cand = z - f / df;
                let (fc, _) = eval_with_derivative(&c, cand);
                if fc.norm() < fz.norm() {
                    z = cand;
                    fz = fc;
                } else {
                    break;
                }
            }
            z
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_roots_of_x3_minus_x() {
        let r = depressed_cubic_roots(-1.0, 0.0);
        assert_eq!(r.roots.len(), 3);
        assert!((r.roots[0] + 1.0).abs() < 1e-15);
        assert!(r.roots[1].abs() < 1e-15);
        assert!((r.roots[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_root_branches() {
        for &(p, q) in &[(1.0, 1.0), (-1.0, 2.0), (-1.0, -2.0), (0.0, 8.0), (3.0, -0.5)] {
            let r = depressed_cubic_roots(p, q);
            assert_eq!(r.roots.len(), 1, "p={p} q={q}");
            let x = r.roots[0];
            assert!((x * x * x + p * x + q).abs() < 1e-13, "p={p} q={q} x={x}");
        }
    }

    #[test]
    fn fold_double_root() {
        // (x - 1)^2 (x + 2) = x^3 - 3x + 2
        let r = depressed_cubic_roots(-3.0, 2.0);
        assert!(r.double_root);
        assert_eq!(r.roots.len(), 2);
        assert!((r.roots[0] + 2.0).abs() < 1e-12);
        assert!((r.roots[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn companion_roots_of_quartic() {
        // (z^2 + 1)(z^2 - 4) = z^4 - 3 z^2 - 4
        let mut roots = polynomial_roots(&[-4.0, 0.0, -3.0, 0.0, 1.0]);
        roots.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        assert!((roots[0] - Complex64::new(-2.0, 0.0)).norm() < 1e-13);
        assert!((roots[3] - Complex64::new(2.0, 0.0)).norm() < 1e-13);
        assert!(roots[1].re.abs() < 1e-13 && (roots[1].im.abs() - 1.0).abs() < 1e-13);
    }
}
