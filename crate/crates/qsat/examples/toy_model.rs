//! The one-variable toy sum: exact amplitudes against the saddle-point
//! prediction, and the critical point as the phase strength varies.

use qsat::toy::{amplitude_exact_ln, toy_exponent, toy_exponent_first_order, toy_fixed_point};
use std::f64::consts::PI;

fn main() -> qsat::Result<()> {
    let beta = -2.0 * PI / 3.0;
    println!("{:>6} {:>22} {:>12} {:>12}", "g", "critical point", "exponent", "first order");
    for g in [0.01, 0.05, 0.2, 0.5] {
        let theta = toy_fixed_point(beta, g, 1e-14)?;
        let e = toy_exponent(beta, g)?;
        println!("{g:>6} {:>22} {:>12.6} {:>12.6}", format!("{theta:.5}"), e.re, toy_exponent_first_order(beta, g).re);
    }

    let g = 0.2;
    let target = toy_exponent(beta, g)?.re;
    println!("\nfinite-n growth rate of |amplitude| at g = {g} (limit {target:.6})");
    for n in [50usize, 200, 800, 3200] {
        let ln = amplitude_exact_ln(n, beta, g / n as f64);
        println!("{n:>6} {:>12.6}", ln.re / n as f64);
    }
    Ok(())
}
