//! WalkSAT, WalkSATlm and the WalkSAT+QAOA hybrid on the same 8-SAT instances.

use qsat::bench::{generate_suite, median};
use qsat::qaoa_analytic::QaoaAngles;
use qsat::solvers::{default_steps, qaoa_runtime, walksat, walksat_qaoa_hybrid, walksatlm, HybridParams, WalksatLmParams};

fn main() -> qsat::Result<()> {
    let suite = generate_suite(8, 176.54, &[12], 30, 3)?;
    let bucket = &suite.buckets[0];
    println!("kept {} satisfiable instances, rejected {}", bucket.instances.len(), bucket.rejected);
    let angles = QaoaAngles::ramp(10, 1.0, -1.0)?;
    let steps = default_steps(12);
    let (mut ws, mut lm, mut q, mut hy) = (vec![], vec![], vec![], vec![]);
    for si in &bucket.instances {
        ws.push(walksat(&si.instance, si.seed, steps, 100_000).evaluations as f64);
        lm.push(walksatlm(&si.instance, si.seed, &WalksatLmParams::default(), steps, 100_000).evaluations as f64);
        q.push(qaoa_runtime(&si.instance, &angles)?);
        let (rate, _) = walksat_qaoa_hybrid(&si.instance, &angles, si.seed, HybridParams { steps_per_try: steps, rounds: 200 })?;
        hy.push(1.0 / rate);
    }
    println!("median evaluations: walksat {}, walksatlm {}", median(&ws), median(&lm));
    println!("median repetitions: depth-10 QAOA {:.2}, QAOA+walksat {:.2}", median(&q), median(&hy));
    Ok(())
}
