//! Gradient-ascent training of a few QAOA layers on random 4-SAT, then the
//! infinite-size exponent of the trained angles.

use qsat::mnsum::FixedPointOptions;
use qsat::qaoa_analytic::{qaoa_exponent, QaoaAngles, QaoaKsatProblem};
use qsat::sat_core::sample_instance;
use qsat::simulator::{optimize_angles_from, GradientMethod, TrainConfig, TrainingSet};

fn main() -> qsat::Result<()> {
    let instances: Vec<_> = (0..40).map(|s| sample_instance(10, 4, 9.93, s)).collect();
    let set = TrainingSet::new(&instances)?;
    let config = TrainConfig { learning_rate: 1.0, iterations: 40, gradient: GradientMethod::Adjoint, ..TrainConfig::default() };
    for p in 1..=3 {
        let start = QaoaAngles::ramp(p, 0.5, -0.5)?;
        let before = set.objective(&start);
        let out = optimize_angles_from(&set, start, &config)?;
        let exponent = qaoa_exponent(&QaoaKsatProblem::new(4, 9.93, out.angles.clone())?, FixedPointOptions::default());
        println!(
            "p = {p}: mean success {before:.4} -> {:.4}; beta {:.3?} gamma {:.3?}",
            out.objective,
            out.angles.beta(),
            out.angles.gamma()
        );
        match exponent {
            Ok(e) => println!("        exponent {:.5} (log2 {:.5})", e.ln.re, e.log2()),
            Err(e) => println!("        exponent unavailable: {e}"),
        }
    }
    Ok(())
}
