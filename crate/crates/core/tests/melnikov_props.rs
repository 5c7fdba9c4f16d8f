use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rd3_core::melnikov::{critical_point, find_roots, saddle_node_line_intersection, MelnikovParams, Stability};

const DRAWS: usize = 1000;

fn draw(rng: &mut ChaCha8Rng) -> MelnikovParams {
    let d = rng.gen_range(1.2..6.0);
    let l = rng.gen_range(1.0..8.0);
    MelnikovParams::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0), rng.gen_range(-3.0..3.0), d, l).unwrap()
}

/// Roots of `M(z) + C1` in `(−L, L)` by sign changes on a dense grid, refined by bisection.
fn dense_roots(p: &MelnikovParams, n: usize) -> Vec<f64> {
    let f = |z: f64| p.m(z) + p.c1;
    let mut out = Vec::new();
    let h = 2.0 * p.l / n as f64;
    let mut prev = f(-p.l);
    for i in 1..=n {
        let z = -p.l + i as f64 * h;
        let cur = f(z);
        if (prev > 0.0) != (cur > 0.0) {
            let (mut a, mut b) = (z - h, z);
            for _ in 0..80 {
                let m = 0.5 * (a + b);
                if (f(m) > 0.0) == (f(a) > 0.0) {
                    a = m;
                } else {
                    b = m;
                }
            }
            out.push(0.5 * (a + b));
        }
        prev = cur;
    }
    out
}

#[test]
fn melnikov_is_odd() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..DRAWS {
        let p = draw(&mut rng);
        let z = rng.gen_range(-p.l..p.l);
        assert!((p.m(-z) + p.m(z)).abs() <= 1e-14 * (1.0 + p.m(z).abs()));
    }
}

#[test]
fn root_count_matches_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut compared = 0;
    for _ in 0..DRAWS {
        let p = draw(&mut rng);
        let sc = p.a1.abs() + p.b1.abs() + p.c1.abs();
        let f = |z: f64| p.m(z) + p.c1;
        // skip draws inside the tolerance band of a boundary curve
        if f(p.l).abs() < 1e-3 * sc || f(-p.l).abs() < 1e-3 * sc {
            continue;
        }
        if let Some(zc) = critical_point(&p) {
            if f(zc).abs() < 1e-3 * sc || f(-zc).abs() < 1e-3 * sc {
                continue;
            }
        }
        let got = find_roots(&p).unwrap();
        let oracle = dense_roots(&p, 20_000);
        assert_eq!(got.region, oracle.len(), "{p:?}");
        for (r, z) in got.roots.iter().rev().zip(oracle.iter()) {
            assert!((r.z - z).abs() < 1e-9, "{p:?}");
        }
        compared += 1;
    }
    assert!(compared > 900, "only {compared} draws compared");
}

#[test]
fn critical_point_classification_matches_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..DRAWS {
        let p = draw(&mut rng);
        let (dt, dh) = (p.dtilde(), p.dhat());
        let ratio = -p.a1 * dt / p.b1;
        let (lo, hi) = (dt / dh, 1.0);
        if (ratio - lo).abs() < 1e-6 || (ratio - hi).abs() < 1e-6 {
            continue;
        }
        let predicted = ratio >= lo && ratio <= hi;
        let n = 4000;
        let sampled = (0..n).any(|i| {
            let (a, b) = (p.l * i as f64 / n as f64, p.l * (i + 1) as f64 / n as f64);
            (p.dm(a) > 0.0) != (p.dm(b) > 0.0)
        });
        assert_eq!(predicted, sampled, "{p:?}");
        assert_eq!(predicted, critical_point(&p).is_some_and(|z| z <= p.l), "{p:?}");
    }
}

#[test]
fn stability_flag_matches_slope() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let h = 1e-6;
    for _ in 0..DRAWS {
        let p = draw(&mut rng);
        for r in find_roots(&p).unwrap().roots {
            let slope = p.m(r.z + h) - p.m(r.z - h);
            match r.stability {
                Stability::Stable => assert!(slope < 0.0),
                Stability::Unstable => assert!(slope > 0.0),
                Stability::Degenerate => assert!(r.multiplicity > 1),
            }
        }
    }
}

#[test]
fn symmetric_root_set_without_c1() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..200 {
        let q = draw(&mut rng);
        let p = MelnikovParams::new(q.a1, q.b1, 0.0, q.d, q.l).unwrap();
        let xs: Vec<f64> = find_roots(&p).unwrap().roots.iter().map(|r| r.x).collect();
        for (a, b) in xs.iter().zip(xs.iter().rev()) {
            assert!((a - (p.l - b)).abs() < 1e-12, "{xs:?}");
        }
    }
}

#[test]
fn saddle_node_meets_line_again() {
    let (d, l) = (3.0, 5.0);
    let bt = saddle_node_line_intersection(d, l);
    let e = (10.0f64 / 3.0).exp();
    assert!((bt - 3.0 * (e + 1.0).powi(2) / (e - 1.0).powi(2)).abs() < 1e-12);
    // the saddle-node curve is symmetric under (A1, B1) → (−A1, −B1)
    for s in [1.0, -1.0] {
        let p = MelnikovParams::new(-s * (1.0 + bt), s * bt, -1.0, d, l).unwrap();
        assert!((p.a1 + p.b1 + s).abs() < 1e-14);
        let zc = critical_point(&p).expect("critical point");
        let m = [zc, -zc].iter().map(|&z| (p.m(z) + p.c1).abs()).fold(f64::INFINITY, f64::min);
        assert!(m < 1e-8, "s = {s}: {m:e}");
    }
}
