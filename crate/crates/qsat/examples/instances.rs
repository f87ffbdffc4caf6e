//! Random k-SAT instances: sampling, DIMACS round trip, exhaustive counting.

use qsat::sat_core::{count_solutions, read_dimacs, sample_instance, threshold, unsat_count_vector, write_dimacs};

fn main() -> qsat::Result<()> {
    let inst = sample_instance(6, 2, 1.0, 42);
    let text = write_dimacs(&inst);
    print!("{text}");
    assert_eq!(read_dimacs(&text, Some(2))?, inst);

    let costs = unsat_count_vector(&inst)?;
    println!("solutions: {} of 64, worst assignment violates {} clauses", count_solutions(&inst)?, costs.iter().max().unwrap());

    for k in [2, 4, 8] {
        let r = threshold(k)?;
        let sat = (0..200).filter(|&s| count_solutions(&sample_instance(12, k, r, s)).unwrap() > 0).count();
        println!("k = {k}, r = {r}: {sat}/200 satisfiable at n = 12");
    }
    Ok(())
}
