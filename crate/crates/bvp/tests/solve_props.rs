use proptest::prelude::*;
use rd3_bvp::mesh::uniform;
use rd3_bvp::{newton_solve, orbit_from_seed, residual_norm, NewtonOptions, PeriodicOrbit, Resolution};
use rd3_core::asymptotic1::{build_one_pulse, Order};
use rd3_core::asymptotic2::build_two_pulse_small;
use rd3_core::asymptotic3::build_two_pulse_large;
use rd3_core::melnikov::MelnikovParams;
use rd3_core::model::outer_equilibrium;
use rd3_core::{Branch, Exec, PhasePoint, SystemParams};

fn check_converged(o: &PeriodicOrbit) {
    assert!(o.residual_norm <= 1e-10, "residual {}", o.residual_norm);
    assert!(o.sigma.abs() <= 1e-10, "sigma {}", o.sigma);
    assert!(o.hamiltonian_drift() <= 1e-8, "H drift {}", o.hamiltonian_drift());
    assert!(o.periodicity_gap() <= 1e-9, "gap {}", o.periodicity_gap());
}

fn one_pulse_seed(eps: f64, res: Resolution) -> (PeriodicOrbit, impl Fn(f64) -> PhasePoint) {
    let p = SystemParams::small_bc(eps, 0.3, 0.0, 1.0, 0.0, 3.0, 5.0).unwrap();
    let s = build_one_pulse(&p, Branch::Plus).unwrap();
    let f = move |x| s.eval(x, Order::FirstCorrected);
    (orbit_from_seed(p, res, &f), f)
}

fn two_pulse_small(eps: f64) -> PeriodicOrbit {
    let mel = MelnikovParams::new(1.0, 1.0, 0.0, 3.0, 5.0).unwrap();
    let s = build_two_pulse_small(&mel, eps, 0).unwrap();
    let p = SystemParams::all_small(eps, 1.0, 1.0, 0.0, 3.0, 5.0).unwrap();
    orbit_from_seed(p, Resolution::for_eps(eps), |x| s.eval(x))
}

#[test]
fn equilibrium_seed_is_already_a_solution() {
    let p = SystemParams::small_bc(0.01, 0.3, 0.0, 1.0, 0.0, 3.0, 5.0).unwrap();
    let ue = outer_equilibrium(&p, Branch::Plus).ue;
    let seed = PeriodicOrbit::from_fn(p, uniform(5.0, 100), 4, |_| PhasePoint::splat_equilibrium(ue));
    assert!(residual_norm(&seed) < 1e-14);
    let c = newton_solve(&seed, &NewtonOptions::default()).unwrap();
    assert!(c.iterations <= 1);
    check_converged(&c.orbit);
}

#[test]
fn one_pulse_converges_near_seed() {
    let eps = 0.01;
    let (seed, f) = one_pulse_seed(eps, Resolution::for_eps(eps));
    let c = newton_solve(&seed, &NewtonOptions::default()).unwrap();
    check_converged(&c.orbit);
    let d = c.orbit.sample(4000).iter().map(|(x, y)| y.max_abs_diff(&f(*x))).fold(0.0, f64::max);
    assert!(d <= 10.0 * eps, "{d}");
}

#[test]
fn two_pulse_interfaces_near_melnikov_root() {
    let eps = 0.01;
    let seed = two_pulse_small(eps);
    let c = newton_solve(&seed, &NewtonOptions::default()).unwrap();
    check_converged(&c.orbit);
    let z = c.orbit.u_zeros();
    assert_eq!(z.len(), 2);
    assert!((z[0] + 2.5).abs() <= 10.0 * eps && (z[1] - 2.5).abs() <= 10.0 * eps, "{z:?}");
}

#[test]
fn large_a_solution_converges() {
    let eps = 0.01;
    let t = build_two_pulse_large(0.3, 3.0, 5.0, eps).unwrap();
    let p = SystemParams::small_bc(eps, 0.3, 0.0, 1.0, 0.0, 3.0, 5.0).unwrap();
    let seed = orbit_from_seed(p, Resolution::for_eps(eps), |x| t.eval(x));
    let c = newton_solve(&seed, &NewtonOptions::default()).unwrap();
    check_converged(&c.orbit);
}

#[test]
fn composite_seed_residual_is_first_order() {
    let r1 = residual_norm(&two_pulse_small(0.01));
    let r2 = residual_norm(&two_pulse_small(0.005));
    let ratio = r2 / r1;
    assert!((ratio - 0.5).abs() < 0.1, "{ratio}");
}

#[test]
fn mesh_refinement_changes_mass_little() {
    let eps = 0.01;
    let res = Resolution::for_eps(eps);
    let a = newton_solve(&one_pulse_seed(eps, res).0, &NewtonOptions::default()).unwrap().orbit;
    let b = newton_solve(&one_pulse_seed(eps, res.refined()).0, &NewtonOptions::default()).unwrap().orbit;
    check_converged(&b);
    assert!((a.mass - b.mass).abs() <= 1e-6, "{}", a.mass - b.mass);
}

#[test]
fn reflected_orbit_reconverges_to_itself() {
    let eps = 0.01;
    let o = newton_solve(&one_pulse_seed(eps, Resolution::for_eps(eps)).0, &NewtonOptions::default()).unwrap().orbit;
    let r = newton_solve(&o.reflected(), &NewtonOptions::default()).unwrap().orbit;
    check_converged(&r);
    let (d, _) = o.distance_modulo_shift(&r, 2000);
    assert!(d <= 1e-8, "{d}");
}

#[test]
fn sequential_and_parallel_agree_bitwise() {
    let seed = two_pulse_small(0.01);
    let a = newton_solve(&seed, &NewtonOptions { exec: Exec::Sequential, ..Default::default() }).unwrap().orbit;
    let b = newton_solve(&seed, &NewtonOptions { exec: Exec::Parallel, ..Default::default() }).unwrap().orbit;
    assert_eq!(a.nodes, b.nodes);
    assert_eq!(a.inner, b.inner);
    assert_eq!(a.mass.to_bits(), b.mass.to_bits());
}

#[test]
fn newton_reports_failure() {
    let p = SystemParams::small_bc(0.01, 0.3, 0.0, 1.0, 0.0, 3.0, 5.0).unwrap();
    // a sawtooth far from any solution
    let seed = PeriodicOrbit::from_fn(p, uniform(5.0, 100), 4, |x| PhasePoint::new(3.0 * (7.0 * x).sin(), 5.0, 0.0, 2.0, 0.0, 1.0));
    let opts = NewtonOptions { max_iter: 3, ..Default::default() };
    assert!(newton_solve(&seed, &opts).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Small perturbations of a homogeneous state relax back to it.
    #[test]
    fn perturbed_equilibria_reconverge(a in 0.05f64..0.6, amp in -1e-3f64..1e-3, k in 1usize..4) {
        let p = SystemParams::small_bc(0.05, a, 0.0, 1.0, 0.0, 3.0, 5.0).unwrap();
        let ue = outer_equilibrium(&p, Branch::Plus).ue;
        let w = k as f64 * std::f64::consts::PI / 5.0;
        let seed = PeriodicOrbit::from_fn(p, uniform(5.0, 80), 4, |x| {
            PhasePoint::new(ue + amp * (w * x).cos(), 0.0, ue, 0.0, ue, 0.0)
        });
        let o = newton_solve(&seed, &NewtonOptions::default()).unwrap().orbit;
        prop_assert!(o.residual_norm <= 1e-10);
        prop_assert!(o.hamiltonian_drift() <= 1e-8);
        let dev = o.nodes.iter().map(|y| (y[0] - ue).abs()).fold(0.0, f64::max);
        prop_assert!(dev < 1e-9, "{}", dev);
    }
}
