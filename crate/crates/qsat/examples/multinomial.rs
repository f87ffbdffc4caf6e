//! A hand-written multinomial sum: saddle-point exponent, the direct sum it
//! predicts, and the rephasing that keeps the fixed point well behaved.

use qsat::mnsum::*;
use qsat::C64;

fn main() -> qsat::Result<()> {
    let spec = MultinomialSpec::new(
        1,
        vec![vec![C64::new(1.0, 0.2), C64::new(-0.5, 0.1)]],
        vec![C64::new(0.4, 0.1), C64::new(0.6, -0.1)],
        vec![C64::from_polar(0.3, 2.9)],
    )?;
    let rephased = rephase(&spec);
    println!("rows before/after rephasing: {} / {}", spec.a_count(), rephased.a_count());

    let fp = fixed_point_small_c(&rephased, 1000, 1e-13)?;
    let forms = scaling_exponent_forms(&rephased, &fp)?;
    println!("fixed point after {} iterations, residual {:.1e}", fp.iterations, fp.residual);
    println!("exponent {:.6} (alternate form {:.6})", forms.primary, forms.alternate);
    println!("small-coupling estimate {:.6}", small_c_exponent(&spec));

    println!("\n{:>5} {:>26}", "n", "log S(n) / n");
    for n in [25, 50, 100, 200, 400] {
        let mut ln = direct_sum_ln(&spec, n)?;
        // The principal log wraps once n·Im(exponent) passes π; pick the branch
        // nearest the saddle-point phase.
        let turns = ((forms.primary.im * n as f64 - ln.im) / std::f64::consts::TAU).round();
        ln.im += turns * std::f64::consts::TAU;
        println!("{n:>5} {:>26.6}", ln / n as f64);
    }

    let json = spec.to_json()?;
    assert_eq!(MultinomialSpec::from_json(&json)?.a_count(), spec.a_count());
    println!("\nas JSON:\n{json}");
    Ok(())
}
