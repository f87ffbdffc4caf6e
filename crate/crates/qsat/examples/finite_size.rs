//! Exact single-layer success probability at finite n, and how its local
//! growth rate approaches the infinite-size exponent.

use qsat::mnsum::FixedPointOptions;
use qsat::qaoa_analytic::{local_scaling_exponent, p1_exact, qaoa_exponent, QaoaAngles, QaoaKsatProblem};

fn main() -> qsat::Result<()> {
    let (k, r, beta, gamma) = (4, 9.93, 0.3, -0.1);
    let limit = qaoa_exponent(&QaoaKsatProblem::new(k, r, QaoaAngles::uniform(1, beta, gamma)?)?, FixedPointOptions::default())?;
    println!("limit exponent {:.6}", limit.ln.re);
    println!("{:>4} {:>14} {:>14} {:>10}", "n", "E[p_succ]", "local exp", "gap");
    for n in [5, 10, 20, 40, 80, 160] {
        let p = p1_exact(k, n, r, beta, gamma)?;
        let local = local_scaling_exponent(k, n, r, beta, gamma)?;
        println!("{n:>4} {p:>14.6e} {local:>14.6} {:>10.2e}", (local - limit.ln.re).abs());
    }
    Ok(())
}
