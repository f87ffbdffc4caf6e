//! A small end-to-end benchmark: generate suites, run solvers, fit the
//! exponential scaling of the median runtime, and write CSV files.

use qsat::bench::{run_bench, BenchConfig};
use qsat::cli::write_bench_outputs;

fn main() -> qsat::Result<()> {
    let config: BenchConfig = serde_json::from_str(
        r#"{"k": 4, "r": "threshold", "sizes": [10, 12, 14, 16], "count": 50,
            "methods": ["walksat", "walksatlm"], "seeds": [1, 2], "runs_per_instance": 5}"#,
    )?;
    let report = run_bench(&config, None)?;
    for row in &report.summary {
        println!(
            "{:<10} seed {}: log2 runtime = {:.3} + {:.4} n (± {:.4}), corr {:.4}",
            row.method, row.seed, row.intercept_log2, row.slope_log2, row.slope_err, row.corr
        );
    }
    let dir = std::env::temp_dir().join("qsat-bench-example");
    write_bench_outputs(&report, &dir)?;
    println!("CSV files in {}", dir.display());
    Ok(())
}
