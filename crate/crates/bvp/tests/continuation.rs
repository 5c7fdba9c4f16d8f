use rd3_bvp::io::{read_diagram, write_diagram};
use rd3_bvp::{
    continue_branch, detect_hamiltonian_hopf, newton_solve, orbit_from_seed, switch_branch, NewtonOptions, PeriodicOrbit,
    PointKind, Resolution, StepControl,
};
use rd3_core::asymptotic3::build_two_pulse_large;
use rd3_core::model::turing_curve;
use rd3_core::{Branch, Exec, SystemParams};

fn large_a_orbit(a0: f64, exec: Exec) -> PeriodicOrbit {
    let eps = 0.01;
    let t = build_two_pulse_large(a0, 3.0, 5.0, eps).unwrap();
    let p = SystemParams::small_bc(eps, a0, 0.0, 1.0, 0.0, 3.0, 5.0).unwrap();
    let seed = orbit_from_seed(p, Resolution::for_eps(eps), |x| t.eval(x));
    newton_solve(&seed, &NewtonOptions { exec, ..Default::default() }).unwrap().orbit
}

fn near_fold_control(exec: Exec) -> StepControl {
    StepControl {
        ds: 0.001,
        ds_max: 0.002,
        max_steps: 12,
        newton: NewtonOptions { max_iter: 10, exec, ..Default::default() },
        ..Default::default()
    }
}

#[test]
fn fold_and_symmetry_breaking_near_l_max() {
    let start = large_a_orbit(0.695, Exec::default());
    let run = continue_branch(&start, 1.0, &near_fold_control(Exec::default()), 0).unwrap();
    let folds: Vec<_> = run.folds().collect();
    assert_eq!(folds.len(), 1);
    assert!((folds[0].a - 0.701).abs() < 2e-3, "{}", folds[0].a);
    // tangent A-component changes sign across the fold
    let k = folds[0].step;
    assert!(run.rows[k].a >= run.rows[k - 1].a && run.rows[k].a >= run.rows[k + 1].a);
    assert!(run.max_abs_sigma <= 1e-10);
    for o in &run.orbits {
        assert!(o.hamiltonian_drift() <= 1e-8);
    }
    assert_eq!(run.points.first().unwrap().kind, PointKind::Start);
    assert_eq!(run.points.last().unwrap().kind, PointKind::End);

    // C = 0: the branch point breaks the u → −u(x + L) symmetry, so the
    // two sides carry opposite mass
    let bp = run.points.iter().find(|p| p.kind == PointKind::Pitchfork).expect("branch point");
    let opts = NewtonOptions::default();
    let up = switch_branch(bp, 1.0, &opts).unwrap();
    let down = switch_branch(bp, -1.0, &opts).unwrap();
    assert!(up.residual_norm <= 1e-10 && down.residual_norm <= 1e-10);
    assert!(bp.orbit.mass.abs() < 1e-10);
    assert!(up.mass * down.mass < 0.0, "{} {}", up.mass, down.mass);
    assert!((up.mass + down.mass).abs() < 0.1 * up.mass.abs());
}

#[test]
fn diagram_is_reproducible() {
    let start = large_a_orbit(0.6, Exec::Sequential);
    let ctl = StepControl { max_steps: 4, ..near_fold_control(Exec::Sequential) };
    let a = continue_branch(&start, 1.0, &ctl, 3).unwrap();
    let b = continue_branch(&start, 1.0, &ctl, 3).unwrap();
    let par = StepControl { newton: NewtonOptions { exec: Exec::Parallel, ..ctl.newton }, ..ctl };
    let c = continue_branch(&start, 1.0, &par, 3).unwrap();
    let bits = |r: &rd3_bvp::BranchRun| r.rows.iter().map(|x| (x.a.to_bits(), x.mass.to_bits())).collect::<Vec<_>>();
    assert_eq!(bits(&a), bits(&b));
    assert_eq!(bits(&a), bits(&c));
    assert!(a.rows.iter().all(|r| r.branch_id == 3));

    let mut buf = Vec::new();
    write_diagram(&mut buf, &a.rows).unwrap();
    assert_eq!(read_diagram(buf.as_slice()).unwrap(), a.rows);
}

#[test]
fn decreasing_direction_is_respected() {
    let start = large_a_orbit(0.5, Exec::default());
    let ctl = StepControl { max_steps: 3, ..near_fold_control(Exec::default()) };
    let run = continue_branch(&start, -1.0, &ctl, 0).unwrap();
    assert!(run.rows.windows(2).all(|w| w[1].a < w[0].a));
}

#[test]
fn hamiltonian_hopf_onset() {
    let mut prev = f64::INFINITY;
    for eps in [0.04, 0.02, 0.01] {
        let p = SystemParams::small_bc(eps, 0.5, 0.0, 1.0, 0.0, 3.0, 5.0).unwrap();
        let a = detect_hamiltonian_hopf(&p, Branch::Plus, 0.55, 0.75, 1e-7).unwrap();
        let t = turing_curve(eps, 1.0, 0.0, Branch::Plus);
        assert!((a - t).abs() <= 5.0 * eps, "eps={eps}: {a} vs {t}");
        let gap = (a - 2.0 / 3.0).abs();
        assert!(gap < prev);
        prev = gap;
    }
}

#[test]
fn remeshing_keeps_hamiltonian_past_the_fold() {
    // past the fold a narrow excursion forms at x = ±L, away from the seed's layers
    let start = large_a_orbit(0.3, Exec::default());
    let ctl = StepControl { max_steps: 25, a_max: 0.9, ..Default::default() };
    let run = continue_branch(&start, 1.0, &ctl, 0).unwrap();
    assert_eq!(run.folds().count(), 1);
    assert!(run.orbits.iter().any(|o| o.intervals() != start.intervals() || o.mesh != start.mesh));
    for o in &run.orbits {
        assert!(o.hamiltonian_drift() <= 1e-8, "A = {}: {:e}", o.a(), o.hamiltonian_drift());
        assert!(o.residual_norm <= 1e-10);
    }
}
