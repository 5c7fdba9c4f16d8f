//! Homogeneous equilibria, their spatial spectrum, the conserved
//! Hamiltonian and the Turing (Hamiltonian–Hopf) curve.

use num_complex::Complex64;
use serde::Serialize;

use crate::params::{Branch, PhasePoint, SystemParams};
use crate::poly::{depressed_cubic_roots, eval_with_derivative};

/// Behaviour of the fast eigenvalue pair, decided by the sign of `3ū² − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FastType {
    /// `3ū² − 1 > 0`: real fast pair.
    FastHyperbolic,
    /// `3ū² − 1 < 0`: imaginary fast pair.
    FastElliptic,
    /// `|3ū² − 1| < √ε` or the fast pair has joined a complex quadruple.
    TuringDegenerate,
}

/// Configuration of a `±λ` pair (or of a quadruple).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PairKind {
    Real,
    Imaginary,
    /// `±λ, ±λ̄` with nonzero real and imaginary parts.
    Quadruple,
    /// `λ = 0` or the boundary between real and imaginary.
    Zero,
}

/// Spectrum of the linearization around `ū(1,0,1,0,1,0)`.
#[derive(Debug, Clone, Serialize)]
pub struct Spectrum {
    /// Roots `μ = λ²` of the cubic characteristic polynomial, ordered by
    /// increasing modulus.
    pub mu: [Complex64; 3],
    /// `λ` values: `+√μ_k` in slots `2k`, `−√μ_k` in slots `2k+1`.
    pub eigenvalues: [Complex64; 6],
    /// Discriminant of the `μ` cubic: positive for three real `μ`, negative
    /// when a complex quadruple is present.
    pub discriminant: f64,
    pub fast: FastType,
    /// One label per `μ`; the two members of a complex pair both read `Quadruple`.
    pub pairs: [PairKind; 3],
    /// Warning flag: `|3ū² − 1| < 10√ε`, fast/slow splitting unreliable.
    pub degenerate: bool,
}

impl Spectrum {
    pub fn has_quadruple(&self) -> bool {
        self.pairs.contains(&PairKind::Quadruple)
    }

    pub fn imaginary_pairs(&self) -> usize {
        self.pairs.iter().filter(|&&k| k == PairKind::Imaginary).count()
    }

    pub fn real_pairs(&self) -> usize {
        self.pairs.iter().filter(|&&k| k == PairKind::Real).count()
    }

    /// `λ_f²`: the `μ` root of largest modulus.
    pub fn fast_mu(&self) -> Complex64 {
        self.mu[2]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Equilibrium {
    pub ue: f64,
    /// Set when `ue` is a double root of the equilibrium cubic.
    pub double_root: bool,
    pub spectrum: Spectrum,
}

impl Equilibrium {
    pub fn point(&self) -> PhasePoint {
        PhasePoint::splat_equilibrium(self.ue)
    }
}

/// Residual of the equilibrium cubic `u³ − u(1 − A − B) + C`.
pub fn equilibrium_residual(params: &SystemParams, u: f64) -> f64 {
    u * u * u - u * (1.0 - params.a() - params.b()) + params.c()
}

/// All real roots of `ū³ − ū(1 − A − B) + C = 0`, ascending, with spectra.
pub fn equilibria(params: &SystemParams) -> Vec<Equilibrium> {
    let roots = depressed_cubic_roots(-(1.0 - params.a() - params.b()), params.c());
    let double = if roots.double_root {
        // the double root is the one where the derivative vanishes
        let p = -(1.0 - params.a() - params.b());
        roots
            .roots
            .iter()
            .copied()
            .min_by(|x, y| {
                (3.0 * x * x + p).abs().partial_cmp(&(3.0 * y * y + p).abs()).unwrap()
            })
    } else {
        None
    };
    roots
        .roots
        .iter()
        .map(|&ue| Equilibrium {
            ue,
            double_root: double == Some(ue),
            spectrum: linearize(params, ue),
        })
        .collect()
}

/// Equilibrium on the requested side: largest root for `Plus`, smallest for `Minus`.
pub fn outer_equilibrium(params: &SystemParams, branch: Branch) -> Equilibrium {
    let mut eqs = equilibria(params);
    match branch {
        Branch::Plus => eqs.pop().unwrap(),
        Branch::Minus => eqs.swap_remove(0),
    }
}

/// Coefficients `[c0, c1, c2, c3]` of the characteristic polynomial in `μ = λ²`,
///
/// ```text
/// (μ − (3ū² − 1))(μ − ε²)(D²μ − ε²) + A ε² (D²μ − ε²) + B ε² (μ − ε²),
/// ```
///
/// with `λ` the eigenvalue in the fast variable `ξ = x/ε`.
pub fn char_poly_mu(params: &SystemParams, ue: f64) -> [f64; 4] {
    let e2 = params.eps * params.eps;
    let d2 = params.d * params.d;
    let a = 3.0 * ue * ue - 1.0;
    let (aa, bb) = (params.a(), params.b());
    let c3 = d2;
    let c2 = -e2 - d2 * (a + e2);
    let c1 = (a + e2) * e2 + a * e2 * d2 + aa * d2 * e2 + bb * e2;
    let c0 = -(a + aa + bb) * e2 * e2;
    [c0, c1, c2, c3]
}

/// Coefficients of the degree-6 polynomial in `λ`, ascending.
pub fn char_poly_lambda(params: &SystemParams, ue: f64) -> [f64; 7] {
    let c = char_poly_mu(params, ue);
    [c[0], 0.0, c[1], 0.0, c[2], 0.0, c[3]]
}

fn cubic_discriminant(c: &[f64; 4]) -> f64 {
    // scale-free: divide by the leading coefficient first
    let (a, b, cc, d) = (1.0, c[2] / c[3], c[1] / c[3], c[0] / c[3]);
    18.0 * a * b * cc * d - 4.0 * b * b * b * d + b * b * cc * cc - 4.0 * a * cc * cc * cc
        - 27.0 * a * a * d * d
}

fn polish_mu(c: &[f64; 4], z0: Complex64) -> Complex64 {
    let mut z = z0;
    let (mut fz, _) = eval_with_derivative(c, z);
    for _ in 0..4 {
        let (f, df) = eval_with_derivative(c, z);
        if df.norm() == 0.0 {
            break;
        }
        let cand = z - f / df;
        let (fc, _) = eval_with_derivative(c, cand);
        if fc.norm() < fz.norm() {
            z = cand;
            fz = fc;
        } else {
            break;
        }
    }
    z
}

/// Roots `μ` of the cubic with coefficients `c` (ascending), with the discriminant.
///
/// The two small roots are `O(ε²)` next to an `O(1)` one, so they come from
/// deflating the dominant real root rather than from the depressed form.
fn mu_roots(c: &[f64; 4]) -> ([Complex64; 3], f64) {
    let disc = cubic_discriminant(c);
    let (b, cc, d) = (c[2] / c[3], c[1] / c[3], c[0] / c[3]);
    // depress: μ = t − b/3
    let shift = -b / 3.0;
    let p = cc - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * cc / 3.0 + d;
    let r = depressed_cubic_roots(p, q)
        .roots
        .iter()
        .map(|t| t + shift)
        .max_by(|x, y| x.abs().partial_cmp(&y.abs()).unwrap())
        .unwrap();
    let r = polish_mu(c, Complex64::new(r, 0.0)).re;
    // (μ − r)(μ² + βμ + γ), with γ and β from the product and pair sums
    let (beta, gamma) = if r != 0.0 {
        let gamma = -d / r;
        ((gamma - cc) / r, gamma)
    } else {
        (b, cc)
    };
    let half = -beta / 2.0;
    let rad = half * half - gamma;
    let (z1, z2) = if rad < 0.0 {
        (Complex64::new(half, (-rad).sqrt()), Complex64::new(half, -(-rad).sqrt()))
    } else {
        let big = half + half.signum() * rad.sqrt();
        let small = if big != 0.0 { gamma / big } else { 0.0 };
        (Complex64::new(big, 0.0), Complex64::new(small, 0.0))
    };
    let mut out = [Complex64::new(r, 0.0), polish_mu(c, z1), polish_mu(c, z2)];
    out.sort_by(|x, y| x.norm().partial_cmp(&y.norm()).unwrap());
    (out, disc)
}

/// Spectrum of the linearization about the homogeneous state `ue`.
pub fn linearize(params: &SystemParams, ue: f64) -> Spectrum {
    let c = char_poly_mu(params, ue);
    let (mu, disc) = mu_roots(&c);
    let a = 3.0 * ue * ue - 1.0;
    let degenerate = a.abs() < 10.0 * params.eps.sqrt();
    let complex_pair = mu.iter().any(|m| m.im != 0.0);
    let mut pairs = [PairKind::Zero; 3];
    for (k, m) in mu.iter().enumerate() {
        pairs[k] = if complex_pair && m.im != 0.0 {
            PairKind::Quadruple
        } else if m.re > 0.0 {
            PairKind::Real
        } else if m.re < 0.0 {
            PairKind::Imaginary
        } else {
            PairKind::Zero
        };
    }
    let fast = if pairs[2] == PairKind::Quadruple || a.abs() < params.eps.sqrt() {
        FastType::TuringDegenerate
    } else if a > 0.0 {
        FastType::FastHyperbolic
    } else {
        FastType::FastElliptic
    };
    let mut eigenvalues = [Complex64::new(0.0, 0.0); 6];
    for (k, m) in mu.iter().enumerate() {
        let mut m = *m;
        if pairs[k] != PairKind::Quadruple {
            m.im = 0.0;
        }
        let s = m.sqrt();
        eigenvalues[2 * k] = s;
        eigenvalues[2 * k + 1] = -s;
    }
    Spectrum { mu, eigenvalues, discriminant: disc, fast, pairs, degenerate }
}

/// Conserved quantity of the first-order stationary system.
pub fn hamiltonian(params: &SystemParams, pt: &PhasePoint) -> f64 {
    let (a, b, c) = (params.a(), params.b(), params.c());
    let PhasePoint { u, p, v, q, w, r } = *pt;
    let u2 = u * u;
    0.5 * p * p - 0.25 * u2 * u2 + 0.5 * u2
        - (0.5 * a * q * q + 0.5 * b * r * r - 0.5 * a * v * v - 0.5 * b * w * w + (a * v + b * w + c) * u)
}

/// Leading-order Turing curve in the `B = εB1`, `C = εC1` scaling.
///
/// `branch` selects the equilibrium near `±1/√3`, which carries the `±√3 C1` term.
pub fn turing_curve(eps: f64, b1: f64, c1: f64, branch: Branch) -> f64 {
    let k = 2.0 * std::f64::consts::SQRT_2 / (3.0 * 3f64.sqrt());
    2.0 / 3.0 + eps * (k - (b1 + branch.sign() * 3f64.sqrt() * c1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(eps: f64, a: f64, b: f64, c: f64) -> SystemParams {
        SystemParams::new(eps, a, b, c, 3.0, 5.0).unwrap()
    }

    #[test]
    fn trivial_equilibria() {
        let e = equilibria(&p(0.01, 0.0, 0.0, 0.0));
        let u: Vec<f64> = e.iter().map(|x| x.ue).collect();
        assert_eq!(u.len(), 3);
        assert!((u[0] + 1.0).abs() < 1e-15 && u[1].abs() < 1e-15 && (u[2] - 1.0).abs() < 1e-15);

        let e = equilibria(&p(0.01, 2.0 / 3.0, 0.0, 0.0));
        let s = 1.0 / 3f64.sqrt();
        assert!((e[0].ue + s).abs() < 1e-15 && (e[2].ue - s).abs() < 1e-15);
    }

    #[test]
    fn lemma_limit_fast_pair() {
        // ε → 0 on the persisting branch: λ_f² → 2 − 3A
        let a0: f64 = 0.5;
        let ue = (1.0 - a0).sqrt();
        for &eps in &[1e-3, 1e-5] {
            let s = linearize(&p(eps, a0, 0.0, 0.0), ue);
            assert!((s.fast_mu().re - 0.5).abs() < 10.0 * eps);
            assert!(s.mu[0].norm() < 10.0 * eps * eps && s.mu[1].norm() < 10.0 * eps * eps);
            assert_eq!(s.fast, FastType::FastHyperbolic);
        }
    }

    #[test]
    fn elliptic_fast_pair_above_two_thirds() {
        let pr = p(0.01, 0.9, 0.0, 0.0);
        let s = linearize(&pr, (1.0f64 - 0.9).sqrt());
        assert_eq!(s.fast, FastType::FastElliptic);
        assert_eq!(s.pairs[2], PairKind::Imaginary);
        assert!(s.eigenvalues[4].re.abs() < 1e-12 && s.eigenvalues[4].im.abs() > 0.1);
    }

    #[test]
    fn eigenvalues_are_roots_of_lambda_polynomial() {
        let pr = p(0.01, 0.5, 0.01, 0.0);
        let e = outer_equilibrium(&pr, Branch::Plus);
        let coeffs = char_poly_lambda(&pr, e.ue);
        for lam in e.spectrum.eigenvalues {
            let (f, df) = eval_with_derivative(&coeffs, lam);
            // root error estimate |f/f'|
            assert!((f / df).norm() < 1e-12 * (1.0 + lam.norm()), "{lam}");
        }
    }

    #[test]
    fn hamiltonian_values() {
        let z = PhasePoint::default();
        assert_eq!(hamiltonian(&p(0.01, 0.3, 0.1, 0.05), &z), 0.0);
        let one = PhasePoint::splat_equilibrium(1.0);
        assert!((hamiltonian(&p(0.01, 0.0, 0.0, 0.0), &one) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn turing_curve_leading_order() {
        assert_eq!(turing_curve(0.0, 3.0, -2.0, Branch::Plus), 2.0 / 3.0);
        let expected = 2.0 / 3.0 + 0.01 * (2.0 * 2f64.sqrt() / (3.0 * 3f64.sqrt()) - 1.0);
        assert!((turing_curve(0.01, 1.0, 0.0, Branch::Minus) - expected).abs() < 1e-15);
    }
}
