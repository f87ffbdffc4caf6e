mod common;

use common::c64;
use qsat::qaoa_analytic::QaoaAngles;
use qsat::simulator::run_diagonal;
use qsat::toy::*;
use qsat::C64;
use std::f64::consts::{LN_2, PI};

fn wrap(x: f64) -> f64 {
    (x + PI).rem_euclid(2.0 * PI) - PI
}

#[test]
fn amplitude_without_phase_is_gaussian() {
    for n in [1, 7, 30] {
        for beta in [0.4, -1.3, 2.9] {
            let a = amplitude_exact(n, beta, 0.0);
            let expected = C64::from_polar(2f64.powf(-(n as f64) / 2.0), -beta * n as f64 / 2.0);
            assert!((a - expected).norm() < 1e-14 * expected.norm().max(1e-300) + 1e-300, "n={n}");
        }
    }
}

#[test]
fn amplitude_without_mixer_is_uniform_weight() {
    for n in [1, 5, 40] {
        let a = amplitude_exact(n, 0.0, 0.37);
        assert!((a - c64(2f64.powf(-(n as f64) / 2.0), 0.0)).norm() < 1e-15);
    }
}

#[test]
fn amplitude_matches_statevector() {
    let (n, beta, gamma) = (3, 1.0, 0.2);
    let cost: Vec<u32> = (0..1u32 << n).map(|y| y.count_ones().pow(2)).collect();
    let angles = QaoaAngles::new(vec![beta], vec![gamma]).unwrap();
    let psi = run_diagonal(n, &cost, &angles);
    let a = amplitude_exact(n, beta, gamma);
    assert!((psi.amplitudes[0] - a).norm() < 1e-14, "{} vs {a}", psi.amplitudes[0]);
}

#[test]
fn amplitude_conjugation_is_exact() {
    for n in [1, 4, 33, 200] {
        for (beta, gamma) in [(0.3, 0.01), (-2.0, 0.7), (1.1, -0.05)] {
            let a = amplitude_exact(n, beta, gamma);
            let b = amplitude_exact(n, -beta, -gamma);
            assert_eq!(a, b.conj(), "n={n}");
        }
    }
}

#[test]
fn amplitude_is_bounded() {
    for n in [1, 10, 100] {
        for (beta, gamma) in [(0.3, 0.01), (-2.0, 0.7), (1.1, -3.0), (PI, PI)] {
            assert!(amplitude_exact(n, beta, gamma).norm_sqr() <= 1.0 + 1e-15);
        }
    }
}

#[test]
fn amplitude_ln_survives_underflow() {
    let ln = amplitude_exact_ln(2000, 0.0, 0.0);
    assert!((ln.re + 1000.0 * LN_2).abs() < 1e-9);
}

#[test]
fn fixed_point_first_iterate_is_leading_order() {
    let beta: f64 = 0.9;
    let gap = |gt: f64| {
        let lead = C64::from_polar((beta / 2.0).sin() * (2.0 * gt).sqrt(), beta / 2.0 - 3.0 * PI / 4.0);
        (toy_fixed_point(beta, gt, 1e-15).unwrap() - lead).norm()
    };
    // Shrinking γ̃ by 4 shrinks a γ̃^{3/2} error by 8.
    let ratio = gap(0.01) / gap(0.0025);
    assert!((6.5..=9.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn fixed_point_at_polynomial_point() {
    let theta = toy_fixed_point(-PI / 2.0, PI, 1e-13).unwrap();
    let expected = C64::from_polar((PI / 2.0).sqrt(), -PI / 4.0);
    assert!((theta - expected).norm() < 1e-8, "{theta}");
}

#[test]
fn fixed_point_vanishes_with_phase() {
    let mut prev = f64::INFINITY;
    for gt in [1e-2, 1e-4, 1e-6] {
        let t = toy_fixed_point(0.7, gt, 1e-15).unwrap().norm();
        assert!(t < prev);
        prev = t;
    }
    assert!(prev < 1e-2);
    assert_eq!(toy_fixed_point(0.7, 0.0, 1e-15).unwrap(), C64::default());
}

#[test]
fn fixed_point_is_critical() {
    for (beta, gt) in [(-2.0 * PI / 3.0, 0.2), (0.5, 0.05), (-PI / 2.0, PI)] {
        let theta = toy_fixed_point(beta, gt, 1e-14).unwrap();
        let h = 1e-6;
        let d = (toy_phi(theta + h, beta, gt) - toy_phi(theta - h, beta, gt)) / (2.0 * h);
        assert!(d.norm() < 1e-8, "{d}");
    }
}

#[test]
fn phi_at_polynomial_point_is_imaginary() {
    let phi = toy_phi_at_fixed_point(-PI / 2.0, PI).unwrap();
    assert!((phi - c64(0.0, PI / 8.0)).norm() < 1e-8, "{phi}");
}

#[test]
fn exponent_without_phase_is_uniform() {
    let e = toy_exponent(1.2, 0.0).unwrap();
    assert!((e - c64(-LN_2 / 2.0, 0.0)).norm() < 1e-15);
    assert_eq!(toy_exponent_first_order(1.2, 0.0), c64(-LN_2 / 2.0, 0.0));
}

#[test]
fn optimal_growth_rate() {
    let beta = -2.0 * PI / 3.0;
    let slope = 3f64.powf(1.5) / 16.0;
    let gt = 1e-3;
    let first = toy_exponent_first_order(beta, gt);
    assert!((first.re - (-LN_2 / 2.0 + slope * gt)).abs() < 1e-15);
    let full = toy_exponent(beta, gt).unwrap();
    assert!((full.re - (-LN_2 / 2.0 + slope * gt)).abs() < 1e-5);
}

#[test]
fn first_order_gap_is_quadratic() {
    let beta: f64 = 0.8;
    let gap = |gt: f64| (toy_exponent(beta, gt).unwrap() - toy_exponent_first_order(beta, gt)).norm();
    for gt in [0.04, 0.02, 0.01] {
        let ratio = gap(gt) / gap(gt / 2.0);
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }
}

#[test]
fn finite_size_growth_rate_converges() {
    let (beta, gt) = (-2.0 * PI / 3.0, 0.05);
    let target = toy_exponent(beta, gt).unwrap();
    let gaps: Vec<f64> = [200usize, 400, 800]
        .iter()
        .map(|&n| {
            let nf = n as f64;
            let ln = amplitude_exact_ln(n, beta, gt / nf) + c64(0.0, beta * nf / 2.0);
            let diff = ln - target * nf;
            c64(diff.re, wrap(diff.im)).norm() / nf
        })
        .collect();
    assert!(gaps[1] < gaps[0] && gaps[2] < gaps[1], "{gaps:?}");
    assert!(gaps[2] <= 5e-3, "{gaps:?}");
}

#[test]
fn fixed_point_rejects_bad_tolerance() {
    assert!(toy_fixed_point(0.1, 0.1, 0.0).is_err());
}
