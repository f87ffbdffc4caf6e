//! Statevector QAOA on individual instances, and the instance average
//! compared with the exact single-layer formula.

use qsat::qaoa_analytic::{p1_exact, QaoaAngles};
use qsat::sat_core::sample_instance;
use qsat::simulator::{empirical_mean_success, run_qaoa, success_probability};

fn main() -> qsat::Result<()> {
    let angles = QaoaAngles::uniform(1, 0.3, -0.2)?;
    let inst = sample_instance(10, 4, 9.93, 1);
    let psi = run_qaoa(&inst, &angles)?;
    println!("norm {:.12}, success {:.5}", psi.norm_sqr(), success_probability(&inst, &angles)?);

    let instances: Vec<_> = (0..500).map(|s| sample_instance(10, 4, 9.93, s)).collect();
    let (mean, se) = empirical_mean_success(&instances, &angles)?;
    let exact = p1_exact(4, 10, 9.93, 0.3, -0.2)?;
    println!("mean over 500 instances {mean:.6} ± {se:.6}, exact {exact:.6}");

    let deeper = QaoaAngles::ramp(8, 0.8, -0.8)?;
    let (mean, se) = empirical_mean_success(&instances, &deeper)?;
    println!("depth-8 ramp: mean {mean:.5} ± {se:.5}");
    Ok(())
}
