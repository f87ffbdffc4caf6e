//! Infinite-size success exponents of QAOA on random 8-SAT at the threshold.
//!
//! Run with `cargo run --release --example exponent`.

use qsat::bench::excess_exponent;
use qsat::mnsum::FixedPointOptions;
use qsat::qaoa_analytic::{qaoa_exponent, QaoaAngles, QaoaKsatProblem};
use qsat::sat_core::threshold;

fn main() -> qsat::Result<()> {
    let k = 8;
    let r = threshold(k)?;
    println!("k = {k}, r = {r}: random guessing has ln-exponent {:.5}", -r / 256.0);
    println!("{:>3} {:>8} {:>8} {:>12} {:>12} {:>6}", "p", "beta", "gamma", "ln exponent", "excess", "iters");
    for p in 1..=3 {
        for (beta, gamma) in [(0.2, -0.05), (0.4, -0.1), (0.6, -0.15)] {
            let problem = QaoaKsatProblem::new(k, r, QaoaAngles::uniform(p, beta, gamma)?)?;
            let e = qaoa_exponent(&problem, FixedPointOptions::default())?;
            println!(
                "{p:>3} {beta:>8.3} {gamma:>8.3} {:>12.6} {:>12.6} {:>6}",
                e.ln.re,
                excess_exponent(e.ln.re, k, r),
                e.iterations
            );
        }
    }
    Ok(())
}
