mod common;

use common::{c64, rand_c64, rel_err};
use qsat::mnsum::{direct_sum, f_grad, f_value, FixedPointOptions};
use qsat::qaoa_analytic::*;
use qsat::{Error, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn angles(beta: &[f64], gamma: &[f64]) -> QaoaAngles {
    QaoaAngles::new(beta.to_vec(), gamma.to_vec()).unwrap()
}

fn random_angles<R: Rng>(rng: &mut R, p: usize, scale: f64) -> QaoaAngles {
    let beta = (0..p).map(|_| rng.random_range(-scale..scale)).collect();
    let gamma = (0..p).map(|_| rng.random_range(-scale..scale)).collect();
    QaoaAngles::new(beta, gamma).unwrap()
}

fn exponent(k: usize, r: f64, a: &QaoaAngles) -> QaoaExponent {
    qaoa_exponent(&QaoaKsatProblem::new(k, r, a.clone()).unwrap(), FixedPointOptions::default()).unwrap()
}

#[test]
fn angle_validation_and_json() {
    assert!(QaoaAngles::new(vec![0.1], vec![]).is_err());
    assert!(QaoaAngles::new(vec![], vec![]).is_err());
    assert!(QaoaAngles::new(vec![f64::NAN], vec![0.0]).is_err());
    let a = angles(&[0.1, -0.25], &[0.3, 0.7]);
    let text = a.to_json().unwrap();
    assert!(text.contains("\"p\":2") || text.contains("\"p\": 2"));
    assert_eq!(QaoaAngles::from_json(&text).unwrap(), a);
    assert!(QaoaAngles::from_json(r#"{"p": 3, "beta": [0.1], "gamma": [0.2]}"#).is_err());
    assert_eq!(a.negated(), angles(&[-0.1, 0.25], &[-0.3, -0.7]));
}

#[test]
fn problem_requires_power_of_two_width() {
    let a = angles(&[0.1], &[0.1]);
    assert!(matches!(QaoaKsatProblem::new(3, 1.0, a.clone()), Err(Error::Unsupported(_))));
    assert!(QaoaKsatProblem::new(4, 0.0, a.clone()).is_err());
    assert_eq!(QaoaKsatProblem::new(8, 1.0, a).unwrap().q(), 3);
}

#[test]
fn mixer_weights_at_depth_one() {
    let beta: f64 = 0.7;
    let b = b_coeffs(&angles(&[beta], &[0.0]));
    let (c2, s2) = ((beta / 2.0).cos().powi(2), (beta / 2.0).sin().powi(2));
    let i_half_sin = c64(0.0, beta.sin() / 2.0);
    // Strings are written s_2 s_1 s_0, i.e. as binary index literals.
    let expected = [
        (0b000, c64(c2, 0.0)),
        (0b111, c64(c2, 0.0)),
        (0b010, c64(s2, 0.0)),
        (0b101, c64(s2, 0.0)),
        (0b011, i_half_sin),
        (0b100, i_half_sin),
        (0b001, -i_half_sin),
        (0b110, -i_half_sin),
    ];
    for (s, v) in expected {
        assert!((b[s] - v / 2.0).norm() < 1e-15, "s={s:03b}: {} vs {}", b[s], v / 2.0);
    }
}

#[test]
fn mixer_weights_without_mixing() {
    for p in 1..=4 {
        let b = b_coeffs(&QaoaAngles::uniform(p, 0.0, 0.3).unwrap());
        let full = b.len() - 1;
        for (s, v) in b.iter().enumerate() {
            let expected = if s == 0 || s == full { 0.5 } else { 0.0 };
            assert_eq!(*v, c64(expected, 0.0));
        }
    }
}

#[test]
fn mixer_weights_are_normalized() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for trial in 0..100 {
        let a = random_angles(&mut rng, 1 + trial % 5, 3.0);
        let total: C64 = b_coeffs(&a).iter().sum();
        assert!((total - 1.0).norm() < 1e-10);
    }
}

#[test]
fn couplings_at_depth_one() {
    let (gamma, r): (f64, f64) = (0.45, 2.5);
    let c = c_coeffs(&angles(&[0.2], &[gamma]), r);
    let one = c64(1.0, 0.0);
    let sin2 = (gamma / 4.0).sin().powi(2);
    assert!((c[0b011] - (one - C64::from_polar(1.0, -gamma / 2.0)) * r).norm() < 1e-14);
    assert!((c[0b101] - c64(4.0 * r * sin2, 0.0)).norm() < 1e-14);
    assert!((c[0b110] - (one - C64::from_polar(1.0, gamma / 2.0)) * r).norm() < 1e-14);
    assert!((c[0b111] - c64(-4.0 * r * sin2, 0.0)).norm() < 1e-14);
}

#[test]
fn couplings_without_phase() {
    for p in 1..=3 {
        let c = c_coeffs(&QaoaAngles::uniform(p, 0.4, 0.0).unwrap(), 3.0);
        for (mask, v) in c.iter().enumerate().skip(1) {
            let expected = if mask == 1 << p { -3.0 } else { 0.0 };
            assert_eq!(v.re, expected, "mask {mask:b}");
            assert_eq!(v.im, 0.0);
        }
    }
}

#[test]
fn couplings_conjugate_under_reflection() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for p in 1..=3 {
        let a = random_angles(&mut rng, p, 2.0);
        let len = 2 * p + 1;
        let c = c_coeffs(&a, 1.7);
        let c_neg = c_coeffs(&a.negated(), 1.7);
        for mask in 1..1usize << len {
            let reflected = (0..len).filter(|j| mask >> j & 1 == 1).fold(0, |acc, j| acc | 1 << (2 * p - j));
            assert!((c_neg[mask] - c[mask].conj()).norm() < 1e-14);
            assert!((c[mask] - c[reflected].conj()).norm() < 1e-14);
        }
    }
}

#[test]
fn built_spec_shape() {
    let p1 = build_spec(&QaoaKsatProblem::new(4, 9.93, angles(&[0.3], &[-0.2])).unwrap()).unwrap();
    assert_eq!((p1.a_count(), p1.s_count()), (4, 8));
    let p2 = build_spec(&QaoaKsatProblem::new(2, 1.0, angles(&[0.3, 0.1], &[-0.2, 0.4])).unwrap()).unwrap();
    assert_eq!((p2.a_count(), p2.s_count()), (26, 32));
    let total: C64 = p2.b().iter().sum();
    assert!((total - 1.0).norm() < 1e-12);
    let deep = QaoaKsatProblem::new(2, 1.0, QaoaAngles::uniform(5, 0.1, 0.1).unwrap()).unwrap();
    assert!(matches!(build_spec(&deep), Err(Error::Size(_))));
}

#[test]
fn built_spec_reproduces_exact_probability() {
    for &(k, r, beta, gamma) in &[(4usize, 9.93, 0.3, -0.2), (2, 1.0, 0.5, 0.3), (8, 176.54, -0.7, 0.1)] {
        let problem = QaoaKsatProblem::new(k, r, angles(&[beta], &[gamma])).unwrap();
        let spec = build_spec(&problem).unwrap();
        let pre = prefactor_exponent(k, r, &problem.angles);
        for n in [2, 5, 9] {
            let via_spec = direct_sum(&spec, n).unwrap() * (pre * n as f64).exp();
            let exact = p1_exact(k, n, r, beta, gamma).unwrap();
            assert!(rel_err(via_spec, c64(exact, 0.0)) < 1e-9, "k={k} n={n}: {via_spec} vs {exact}");
        }
    }
}

#[test]
fn exponent_without_phase_is_random_guessing() {
    for k in [2usize, 4, 8] {
        for p in 1..=3 {
            let r = 1.3 * k as f64;
            let e = exponent(k, r, &QaoaAngles::uniform(p, 0.6, 0.0).unwrap());
            let baseline = -r / 2f64.powi(k as i32);
            assert!((e.ln.re - baseline).abs() <= 1e-10 * baseline.abs());
            assert!(e.ln.im.abs() < 1e-12);
            assert!((e.log2() - baseline / std::f64::consts::LN_2).abs() < 1e-10);
        }
    }
}

#[test]
fn exponent_is_real_for_small_angles() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..50 {
        let k = [2usize, 4, 8][trial % 3];
        let a = random_angles(&mut rng, 1 + trial % 3, 0.3);
        let e = exponent(k, 0.5 * k as f64, &a);
        assert!(e.ln.im.abs() <= 1e-6, "{}", e.ln);
    }
}

#[test]
fn exponent_is_symmetric_under_negation() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for trial in 0..10 {
        let a = random_angles(&mut rng, 1 + trial % 3, 0.4);
        let e = exponent(4, 9.93, &a);
        let f = exponent(4, 9.93, &a.negated());
        assert!((e.ln.re - f.ln.re).abs() < 1e-9);
        let b = b_coeffs(&a);
        let b_neg = b_coeffs(&a.negated());
        assert!(b.iter().zip(&b_neg).all(|(x, y)| (x.conj() - y).norm() < 1e-15));
    }
}

#[test]
fn exponent_matches_finite_size_trend() {
    let (k, r, beta, gamma) = (4usize, 9.93, 0.3, -0.05);
    let e = exponent(k, r, &angles(&[beta], &[gamma])).ln.re;
    let gap = |n| (local_scaling_exponent(k, n, r, beta, gamma).unwrap() - e).abs();
    assert!(gap(60) < gap(10), "{} vs {}", gap(60), gap(10));
}

#[test]
fn exact_probability_collapses() {
    for k in [1usize, 3, 4, 8] {
        let r = 2.0;
        for n in [1usize, 7, 25] {
            let expected = (-r * n as f64 / 2f64.powi(k as i32)).exp();
            for (beta, gamma) in [(0.4, 0.0), (0.0, 0.9)] {
                let p = p1_exact(k, n, r, beta, gamma).unwrap();
                assert!((p - expected).abs() <= 1e-10 * expected, "k={k} n={n}");
            }
        }
    }
}

#[test]
fn exact_probability_is_a_probability() {
    for (beta, gamma) in [(0.3, -0.2), (1.2, 2.0), (-0.8, 0.4)] {
        for n in [3usize, 12, 30] {
            let p = p1_exact(4, n, 9.93, beta, gamma).unwrap();
            assert!((0.0..=1.0).contains(&p));
            assert!((p1_exact_ln(4, n, 9.93, beta, gamma).unwrap() - p.ln()).abs() < 1e-10);
        }
    }
}

#[test]
fn local_exponent_baselines() {
    for (beta, gamma) in [(0.5, 0.0), (0.0, 0.5)] {
        let e = local_scaling_exponent(4, 20, 9.93, beta, gamma).unwrap();
        assert!((e + 9.93 / 16.0).abs() < 1e-10);
    }
}

#[test]
fn local_exponent_approaches_limit() {
    let (beta, gamma) = (0.2, 0.1);
    let limit = exponent(2, 1.0, &angles(&[beta], &[gamma])).ln.re;
    let gap = |n| (local_scaling_exponent(2, n, 1.0, beta, gamma).unwrap() - limit).abs();
    assert!(gap(60) < gap(10));
}

#[test]
fn small_gamma_baseline_and_single_layer() {
    assert_eq!(small_gamma_exponent(2, 9.93, &angles(&[0.3, 0.2], &[0.0, 0.0])), -9.93 / 16.0);
    let (q, r, beta, gamma): (u32, f64, f64, f64) = (3, 176.54, 0.4, -0.1);
    let k = 1i32 << q;
    let expected =
        -r / 2f64.powi(k) - r / 2f64.powi(k) * gamma * (2f64.powi(q as i32 - 1) * beta).sin() * (beta / 2.0).cos().powi(k);
    assert!((small_gamma_exponent(q, r, &angles(&[beta], &[gamma])) - expected).abs() < 1e-15);
}

#[test]
fn small_gamma_gap_is_quadratic() {
    for &(k, p) in &[(4usize, 1usize), (2, 2), (8, 2)] {
        let gap = |g: f64| {
            let beta: Vec<f64> = (0..p).map(|i| 0.4 + 0.1 * i as f64).collect();
            let gamma: Vec<f64> = (0..p).map(|i| -g * (1.0 + 0.3 * i as f64)).collect();
            let a = QaoaAngles::new(beta, gamma).unwrap();
            let q = k.trailing_zeros();
            (exponent(k, 3.0, &a).ln.re - small_gamma_exponent(q, 3.0, &a)).abs()
        };
        let ratio = gap(0.05) / gap(0.025);
        assert!((3.5..=4.5).contains(&ratio), "k={k} p={p}: {ratio}");
    }
}

#[test]
fn subset_kernels_by_hand() {
    let one = c64(1.0, 0.0);
    assert_eq!(sos_sum_alpha(&[one, one]), vec![c64(2.0, 0.0); 2]);
    assert_eq!(sos_sum_s(&[one, one]), vec![c64(2.0, 0.0); 2]);
    for l in 1..=4 {
        let mut empty = vec![C64::default(); 1 << l];
        empty[0] = one;
        assert!(sos_sum_alpha(&empty).iter().all(|&x| x == one));
        let mut full = vec![C64::default(); 1 << l];
        full[(1 << l) - 1] = one;
        assert!(sos_sum_s(&full).iter().all(|&x| x == one));
    }
}

#[test]
fn subset_kernels_match_naive() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for l in 1..=7 {
        // Integer-valued inputs keep every partial sum exact.
        let v: Vec<C64> =
            (0..1 << l).map(|_| c64(rng.random_range(-50..=50) as f64, rng.random_range(-50..=50) as f64)).collect();
        assert_eq!(sos_sum_alpha(&v), sos_sum_alpha_naive(&v), "L={l}");
        assert_eq!(sos_sum_s(&v), sos_sum_s_naive(&v), "L={l}");
    }
    for l in 1..=3 {
        let v: Vec<C64> = (0..1 << l).map(|_| rand_c64(&mut rng, 1.0)).collect();
        for (a, b) in sos_sum_alpha(&v).iter().zip(sos_sum_alpha_naive(&v)) {
            assert!((a - b).norm() < 1e-14);
        }
        for (a, b) in sos_sum_s(&v).iter().zip(sos_sum_s_naive(&v)) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}

#[test]
fn fast_parent_function_matches_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for p in 1..=3 {
        for k in [2usize, 4] {
            let problem = QaoaKsatProblem::new(k, 2.0 * k as f64, random_angles(&mut rng, p, 1.0)).unwrap();
            for structured in [build_structured(&problem).unwrap(), build_structured(&problem).unwrap().rephased()] {
                let dense = structured.to_dense().unwrap();
                let z: Vec<C64> = (0..dense.a_count()).map(|_| rand_c64(&mut rng, 0.5)).collect();
                let (f, g) = fast_f_and_grad(&structured, &z).unwrap();
                assert!(rel_err(f, f_value(&dense, &z).unwrap()) < 1e-10);
                for (a, b) in g.iter().zip(f_grad(&dense, &z).unwrap()) {
                    assert!(rel_err(*a, b) < 1e-10, "p={p}: {a} vs {b}");
                }
                let (f0, _) = fast_f_and_grad(&structured, &vec![C64::default(); z.len()]).unwrap();
                assert!(f0.norm() < 1e-12);
            }
        }
    }
}

#[test]
fn fast_parent_function_is_faster() {
    let problem = QaoaKsatProblem::new(4, 9.93, QaoaAngles::uniform(3, 0.3, -0.2).unwrap()).unwrap();
    let structured = build_structured(&problem).unwrap();
    let dense = structured.to_dense().unwrap();
    let z = vec![c64(0.01, -0.02); dense.a_count()];
    let reps = 20;
    let t = Instant::now();
    for _ in 0..reps {
        std::hint::black_box(fast_f_and_grad(&structured, &z).unwrap());
    }
    let fast = t.elapsed();
    let t = Instant::now();
    for _ in 0..reps {
        std::hint::black_box((f_value(&dense, &z).unwrap(), f_grad(&dense, &z).unwrap()));
    }
    let slow = t.elapsed();
    assert!(fast * 10 <= slow, "fast {fast:?} vs dense {slow:?}");
}

#[test]
fn exponent_record_fields() {
    let problem = QaoaKsatProblem::new(8, 176.54, angles(&[0.2], &[0.0])).unwrap();
    let e = qaoa_exponent(&problem, FixedPointOptions::default()).unwrap();
    let rec = ExponentRecord::new(&problem, &e);
    let json = serde_json::to_value(&rec).unwrap();
    assert!((json["exponent_ln"]["re"].as_f64().unwrap() + 0.68961).abs() < 1e-5);
    assert_eq!(json["p"], 1);
    for key in ["k", "r", "beta", "gamma", "exponent_log2", "iterations", "residual"] {
        assert!(json.get(key).is_some(), "{key}");
    }
}

#[test]
fn ramp_schedule() {
    let a = QaoaAngles::ramp(4, 1.0, -2.0).unwrap();
    assert_eq!(a.beta(), &[0.875, 0.625, 0.375, 0.125]);
    assert_eq!(a.gamma(), &[-0.25, -0.75, -1.25, -1.75]);
    assert!(QaoaAngles::ramp(0, 1.0, 1.0).is_err());
}
