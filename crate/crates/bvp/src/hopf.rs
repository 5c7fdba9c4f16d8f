//! Onset of the spatial Hamiltonian–Hopf (Turing) configuration of the
//! homogeneous state as `A` varies.

use rd3_core::model::{linearize, outer_equilibrium};
use rd3_core::{Branch, SystemParams};

use crate::error::{BvpError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Config {
    Quadruple,
    Imaginary,
    Other,
}

fn classify(params: &SystemParams, branch: Branch, a: f64) -> Config {
    let p = params.with_a(a);
    let eq = outer_equilibrium(&p, branch);
    let s = linearize(&p, eq.ue);
    if s.has_quadruple() {
        Config::Quadruple
    } else if s.imaginary_pairs() >= 2 {
        Config::Imaginary
    } else {
        Config::Other
    }
}

/// First `A` in `[a_lo, a_hi]` where the outer equilibrium passes between a
/// complex quadruple and two colliding imaginary pairs, located to `tol` by
/// bisection. `A` of `params` is ignored.
pub fn detect_hamiltonian_hopf(
    params: &SystemParams,
    branch: Branch,
    a_lo: f64,
    a_hi: f64,
    tol: f64,
) -> Result<f64> {
    if !(a_lo < a_hi) || !(tol > 0.0) {
        return Err(BvpError::Invalid(format!("bad search range [{a_lo}, {a_hi}] or tolerance {tol}")));
    }
    // the scan step must stay below the width of the quadruple window
    let eps = params.eps;
    let step = (0.05 * eps * eps).max(tol);
    let n = (((a_hi - a_lo) / step).ceil() as usize).clamp(2, 2_000_000);
    let mut prev = (a_lo, classify(params, branch, a_lo));
    for k in 1..=n {
        let a = a_lo + (a_hi - a_lo) * k as f64 / n as f64;
        let c = classify(params, branch, a);
        let pair = (prev.1, c);
        if matches!(pair, (Config::Quadruple, Config::Imaginary) | (Config::Imaginary, Config::Quadruple)) {
            let (mut lo, mut hi) = (prev.0, a);
            let lo_c = prev.1;
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                if classify(params, branch, mid) == lo_c {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(0.5 * (lo + hi));
        }
        prev = (a, c);
    }
    Err(BvpError::NotFound(format!("no Hamiltonian-Hopf point for A in [{a_lo}, {a_hi}]")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rd3_core::model::turing_curve;

    #[test]
    fn onset_near_turing_curve() {
        let p = SystemParams::small_bc(0.01, 0.5, 0.0, 1.0, 0.0, 3.0, 5.0).unwrap();
        let a = detect_hamiltonian_hopf(&p, Branch::Plus, 0.6, 0.7, 1e-7).unwrap();
        let t = turing_curve(0.01, 1.0, 0.0, Branch::Plus);
        assert!((a - t).abs() < 0.05, "{a} {t}");
    }

    #[test]
    fn missing_onset_reported() {
        let p = SystemParams::small_bc(0.01, 0.5, 0.0, 1.0, 0.0, 3.0, 5.0).unwrap();
        assert!(matches!(detect_hamiltonian_hopf(&p, Branch::Plus, 0.1, 0.3, 1e-7), Err(BvpError::NotFound(_))));
    }
}
