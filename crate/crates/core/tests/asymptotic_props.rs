mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rd3_core::asymptotic1::correction_profiles;
use rd3_core::asymptotic2::{build_two_pulse_small, jump_values, slow_segment, Segment};
use rd3_core::asymptotic3::{
    energy_e, half_length, l_max, qstar_bound, slow_rhs, turning_point, e_star, potential_v, SlowPhaseOrbit,
};
use rd3_core::melnikov::MelnikovParams;
use rd3_core::{Branch, SystemParams};

/// `x`-length of the slow orbit from `(−1, q*)` back to `u = −1`, by RK4.
fn time_of_flight(q_star: f64, a0: f64) -> f64 {
    let f = |y: &[f64; 2]| {
        let (du, dq) = slow_rhs(y[0], y[1], a0);
        [du, dq]
    };
    let h = 1e-3;
    let mut y = [-1.0, q_star];
    let mut x = 0.0;
    loop {
        let next = common::rk4_step(&f, &y, h);
        let crossed = (next[0] + 1.0) * (y[0] + 1.0) < 0.0 || (next[0] + 1.0 == 0.0 && x > 0.0);
        if crossed && next[1] > 0.0 {
            // bisect on the length of the final partial step
            let (mut lo, mut hi) = (0.0, h);
            for _ in 0..60 {
                let m = 0.5 * (lo + hi);
                let ym = common::rk4_step(&f, &y, m);
                if (ym[0] + 1.0) * (y[0] + 1.0) > 0.0 {
                    lo = m;
                } else {
                    hi = m;
                }
            }
            return x + 0.5 * (lo + hi);
        }
        y = next;
        x += h;
        assert!(x < 100.0, "orbit does not return");
    }
}

#[test]
fn length_quadrature_matches_time_of_flight() {
    for (a0, q) in [(0.3, -0.5), (-0.5, -0.8), (0.9, -0.4), (0.3, -0.9)] {
        let l = half_length(q, a0).unwrap();
        let t = time_of_flight(q, a0);
        assert!((l - t).abs() <= 1e-7, "A0 = {a0}, q* = {q}: {l} vs {t}");
    }
}

#[test]
fn turning_point_matches_dense_scan() {
    let (a0, q) = (-0.5, -0.8);
    let es = e_star(q, a0);
    let (lo, hi) = (-(1.5f64).sqrt(), -1.0);
    let n = 100_000;
    let mut crossings = Vec::new();
    for i in 0..n {
        let (a, b) = (lo + (hi - lo) * i as f64 / n as f64, lo + (hi - lo) * (i + 1) as f64 / n as f64);
        if (potential_v(a, a0) - es) * (potential_v(b, a0) - es) < 0.0 {
            crossings.push(0.5 * (a + b));
        }
    }
    assert_eq!(crossings.len(), 1);
    let u = turning_point(q, a0).unwrap();
    assert!((u - crossings[0]).abs() < (hi - lo) / n as f64);
}

#[test]
fn energy_conserved_by_slow_flow() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..20 {
        let a0 = rng.gen_range(0.2..1.5);
        let u = rng.gen_range(-1.3..-0.8);
        let q = rng.gen_range(-0.5..0.5);
        let f = |y: &[f64; 2]| {
            let (du, dq) = slow_rhs(y[0], y[1], a0);
            [du, dq]
        };
        // stop short of the fold 3u² = 1, where the flow is singular
        let mut y = [u, q];
        for _ in 0..4000 {
            if 3.0 * y[0] * y[0] - 1.0 < 0.3 {
                break;
            }
            y = common::rk4_step(&f, &y, 1.0 / 4000.0);
        }
        assert!((energy_e(y[0], y[1], a0) - energy_e(u, q, a0)).abs() < 1e-9);
    }
}

#[test]
fn half_length_increasing_in_q() {
    for a0 in [-1.0, 0.3, 0.69] {
        let qb = qstar_bound(a0).unwrap();
        let mut prev = 0.0;
        for i in 1..60 {
            let q = -qb * i as f64 / 60.0;
            let l = half_length(q, a0).unwrap();
            assert!(l > prev, "A0 = {a0}, q* = {q}");
            prev = l;
        }
    }
    assert!(half_length(-1e-8, 0.3).unwrap() < 1e-6);
}

#[test]
fn l_max_is_reached_and_decreasing() {
    for a0 in [0.7, 0.9, 2.0] {
        let top = l_max(a0).unwrap();
        let near = SlowPhaseOrbit::from_deficit(1e-12, a0).unwrap().half_length;
        assert!(near < top && top - near < 1e-3, "A0 = {a0}: {near} vs {top}");
    }
    let n = 2000;
    let mut prev = l_max(2.0 / 3.0 + 1e-6).unwrap();
    for i in 1..=n {
        let a = 2.0 / 3.0 + 1e-6 + (20.0 - 2.0 / 3.0) * i as f64 / n as f64;
        let v = l_max(a).unwrap();
        assert!(v < prev);
        prev = v;
    }
}

fn richardson_d2(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    (4.0 * d(0.5 * h) - d(h)) / 3.0
}

#[test]
fn first_order_corrections_solve_linear_system() {
    let p = SystemParams::small_bc(0.01, 0.3, 0.0, 0.7, -0.4, 3.0, 5.0).unwrap();
    let c = correction_profiles(&p, Branch::Plus).unwrap();
    for i in 1..50 {
        let x = -5.0 + 10.0 * i as f64 / 50.0;
        if x.abs() < 0.05 {
            continue;
        }
        let v2 = richardson_d2(|y| c.v1(y), x, 2e-3);
        assert!((v2 - (c.v1(x) - c.u1(x))).abs() < 1e-6, "x = {x}");
        let dr = (c.r1(x + 1e-5) - c.r1(x - 1e-5)) / 2e-5;
        assert!((p.d * dr - (c.w1(x) - c.u1(x))).abs() < 1e-8, "x = {x}");
        let dv = (c.v1(x + 1e-5) - c.v1(x - 1e-5)) / 2e-5;
        assert!((dv - c.q1(x)).abs() < 1e-8);
    }
    // J1 grows as the homoclinic approaches the heteroclinic limit A → 0
    let j: Vec<f64> = [0.1, 0.01, 0.001]
        .iter()
        .map(|&a| correction_profiles(&p.with_a(a), Branch::Plus).unwrap().j1.abs())
        .collect();
    assert!(j[0] < j[1] && j[1] < j[2]);
}

#[test]
fn two_pulse_small_segments_and_jumps() {
    let (d, l) = (3.0, 5.0);
    for x2 in [0.7, 1.9, 2.5, 4.1] {
        for (seg, lo, hi, sign) in [(Segment::I1, -l, -x2, 1.0), (Segment::I3, -x2, x2, -1.0), (Segment::I5, x2, l, 1.0)] {
            for i in 1..20 {
                let x = lo + (hi - lo) * i as f64 / 20.0;
                let s = |y: f64| slow_segment(seg, y, x2, d, l).unwrap();
                let h = 1e-4 * (hi - lo);
                let [u0, v, q, w, r] = s(x);
                assert_eq!(u0, sign);
                let dq = (s(x + h)[2] - s(x - h)[2]) / (2.0 * h);
                let dr = (s(x + h)[4] - s(x - h)[4]) / (2.0 * h);
                assert!((dq - (v - u0)).abs() < 1e-7);
                assert!((d * dr - (w - u0)).abs() < 1e-7);
                let dv = (s(x + h)[1] - s(x - h)[1]) / (2.0 * h);
                let dw = (s(x + h)[3] - s(x - h)[3]) / (2.0 * h);
                assert!((dv - q).abs() < 1e-7 && (d * dw - r).abs() < 1e-7);
            }
        }
        let j = jump_values(x2, d, l);
        assert_eq!(j.v_star, j.v_2star);
        assert_eq!(j.q_star, -j.q_2star);
        assert_eq!(j.w_star, j.w_2star);
        assert_eq!(j.r_star, -j.r_2star);
    }
}

#[test]
fn two_pulse_small_reflection_and_mass() {
    let mel = MelnikovParams::new(1.0, 1.0, 0.0, 3.0, 5.0).unwrap();
    let eps = 0.01;
    let s = build_two_pulse_small(&mel, eps, 0).unwrap();
    for i in 0..100 {
        let x = 5.0 * i as f64 / 100.0;
        let a = s.eval(x);
        let b = s.eval(-x).reversed();
        assert!(a.max_abs_diff(&b) < 1e-12);
    }
    let n = 20_000;
    let mass: f64 = (0..n).map(|i| s.eval(-5.0 + 10.0 * (i as f64 + 0.5) / n as f64).u).sum::<f64>() * 10.0 / n as f64;
    assert!((mass - s.mass()).abs() < 10.0 * eps);
}
