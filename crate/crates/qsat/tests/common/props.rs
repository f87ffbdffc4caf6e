//! Randomized invariants shared by the property suite and the acceptance run.

use super::{c64, random_spec, rel_err};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use qsat::bench::median_bound_holds;
use qsat::mnsum::*;
use qsat::qaoa_analytic::*;
use qsat::sat_core::sample_instance;
use qsat::simulator::run_qaoa;
use qsat::toy::amplitude_exact;
use qsat::C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<(), TestCaseError>;

pub fn angles_strategy(max_p: usize, range: f64) -> impl Strategy<Value = QaoaAngles> {
    (1..=max_p).prop_flat_map(move |p| {
        (prop::collection::vec(-range..range, p), prop::collection::vec(-range..range, p))
            .prop_map(|(b, g)| QaoaAngles::new(b, g).unwrap())
    })
}

/// Spec built from a seed, so shrinking stays meaningful.
fn spec_from_seed(seed: u64, q: u32, c_max: f64) -> MultinomialSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_spec(&mut rng, q, 3, 2, c_max)
}

pub fn mixer_weights_sum_to_one(angles: QaoaAngles) -> Check {
    let total: C64 = b_coeffs(&angles).iter().sum();
    prop_assert!((total - 1.0).norm() < 1e-12, "{}", total);
    Ok(())
}

pub fn statevector_keeps_unit_norm(seed: u64, n: usize, angles: QaoaAngles) -> Check {
    let inst = sample_instance(n, 3, 4.0, seed);
    let psi = run_qaoa(&inst, &angles).unwrap();
    prop_assert!((psi.norm_sqr() - 1.0).abs() < 1e-10);
    Ok(())
}

pub fn weak_coupling_fixed_point_is_certified(seed: u64, q: u32) -> Check {
    let spec = spec_from_seed(seed, q, 0.05);
    let fp = fixed_point_small_c(&spec, 1000, 1e-12).unwrap();
    prop_assert!(fp.converged);
    let grad = f_grad(&spec, &fp.z).unwrap();
    let k = 1i32 << q;
    for (z, g) in fp.z.iter().zip(&grad) {
        let image = (-g).powi(k - 1) * k as f64;
        prop_assert!((z - image).norm() <= 1e-10 * z.norm().max(1e-300));
    }
    let forms = scaling_exponent_forms(&spec, &fp).unwrap();
    prop_assert!(rel_err(forms.primary, forms.alternate) < 1e-8 || (forms.primary - forms.alternate).norm() < 1e-12);
    Ok(())
}

pub fn parent_vanishes_at_origin(seed: u64, q: u32) -> Check {
    let spec = spec_from_seed(seed, q, 2.0);
    let f0 = f_value(&spec, &[C64::default(); 2]).unwrap();
    prop_assert!(f0.norm() < 1e-14, "{}", f0);
    Ok(())
}

pub fn gradient_matches_finite_differences(seed: u64, q: u32, zr: f64, zi: f64) -> Check {
    let spec = spec_from_seed(seed, q, 1.0);
    let z = vec![c64(zr, zi), c64(zi, -zr)];
    let grad = f_grad(&spec, &z).unwrap();
    let h = 1e-6;
    for a in 0..2 {
        let mut up = z.clone();
        let mut down = z.clone();
        up[a] += h;
        down[a] -= h;
        let fd = (f_value(&spec, &up).unwrap() - f_value(&spec, &down).unwrap()) / (2.0 * h);
        prop_assert!((fd - grad[a]).norm() < 1e-6 * grad[a].norm().max(1.0), "{} vs {}", fd, grad[a]);
    }
    Ok(())
}

pub fn rephasing_preserves_the_sum(seed: u64, q: u32, n: usize) -> Check {
    let spec = spec_from_seed(seed, q, 1.5);
    let before = direct_sum(&spec, n).unwrap();
    let after = direct_sum(&rephase(&spec), n).unwrap();
    prop_assert!(rel_err(before, after) < 1e-10, "{} vs {}", before, after);
    Ok(())
}

pub fn mean_runtime_bound_holds(probs: Vec<f64>) -> Check {
    prop_assert!(median_bound_holds(&probs, 1e-9));
    Ok(())
}

pub fn negated_angles_conjugate_the_exponent(angles: QaoaAngles) -> Check {
    let problem = QaoaKsatProblem::new(4, 9.93, angles.clone()).unwrap();
    let mirrored = QaoaKsatProblem::new(4, 9.93, angles.negated()).unwrap();
    let opts = FixedPointOptions::default();
    match (qaoa_exponent(&problem, opts), qaoa_exponent(&mirrored, opts)) {
        (Ok(a), Ok(b)) => {
            prop_assert!((a.ln - b.ln.conj()).norm() < 1e-7, "{} vs {}", a.ln, b.ln);
            prop_assert!(a.ln.im.abs() < 1e-7);
        }
        (Err(_), Err(_)) => {}
        (a, b) => prop_assert!(false, "only one side converged: {:?} / {:?}", a.is_ok(), b.is_ok()),
    }
    Ok(())
}

pub fn couplings_conjugate_under_negation(angles: QaoaAngles, r: f64) -> Check {
    let forward = c_coeffs(&angles, r);
    let backward = c_coeffs(&angles.negated(), r);
    for (x, y) in forward.iter().zip(&backward) {
        prop_assert!((x - y.conj()).norm() < 1e-12 * r);
    }
    Ok(())
}

pub fn toy_amplitude_conjugates(n: usize, beta: f64, gamma: f64) -> Check {
    prop_assert_eq!(amplitude_exact(n, beta, gamma), amplitude_exact(n, -beta, -gamma).conj());
    Ok(())
}
