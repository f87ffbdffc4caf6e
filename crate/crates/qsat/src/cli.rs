//! Command-line front end. Each subcommand parses flags, makes one library
//! call and serializes the result.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 numerical failure.

use crate::bench::{run_bench, BenchConfig};
use crate::mnsum::FixedPointOptions;
use crate::qaoa_analytic::{p1_exact, qaoa_exponent, ExponentRecord, QaoaAngles, QaoaKsatProblem};
use crate::sat_core::threshold;
use crate::simulator::{optimize_angles, write_train_log, GradientMethod, TrainConfig};
use crate::{Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "qsat", version, about = "QAOA success-probability exponents on random k-SAT")]
pub struct CliConfig {
    /// Base seed for every random choice.
    #[arg(long, global = true, env = "QSAT_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output file (exponent, p1, train) or directory (bench).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Infinite-size exponent of the averaged success probability.
    Exponent(ExponentArgs),
    /// Exact averaged success probability for one layer at finite n.
    P1(P1Args),
    /// Solver/QAOA scaling benchmark from a JSON config.
    Bench(BenchArgs),
    /// Gradient-ascent training of QAOA angles on random instances.
    Train(TrainArgs),
}

#[derive(Debug, Args)]
pub struct RatioArgs {
    /// Clauses-to-variables ratio.
    #[arg(long, conflicts_with = "threshold")]
    pub r: Option<f64>,
    /// Use the tabulated satisfiability threshold for k.
    #[arg(long)]
    pub threshold: bool,
}

impl RatioArgs {
    fn resolve(&self, k: usize) -> Result<f64> {
        match (self.r, self.threshold) {
            (Some(r), _) => Ok(r),
            (None, true) => threshold(k),
            (None, false) => Err(Error::Invalid("give --r or --threshold".into())),
        }
    }
}

#[derive(Debug, Args)]
pub struct AngleArgs {
    /// Number of layers; single inline values are repeated p times.
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub beta: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub gamma: Vec<f64>,
    /// Angles JSON as written by `train`; overrides inline values.
    #[arg(long, conflicts_with_all = ["beta", "gamma"])]
    pub angles: Option<PathBuf>,
}

impl AngleArgs {
    fn resolve(&self) -> Result<QaoaAngles> {
        if let Some(path) = &self.angles {
            let a = QaoaAngles::from_json(&std::fs::read_to_string(path)?)?;
            if self.p.is_some_and(|p| p != a.p()) {
                return Err(Error::Invalid(format!("--p disagrees with {} layers in {}", a.p(), path.display())));
            }
            return Ok(a);
        }
        let p = self.p.unwrap_or(self.beta.len().max(self.gamma.len()));
        let expand = |v: &[f64], name: &str| -> Result<Vec<f64>> {
            match v.len() {
                1 => Ok(vec![v[0]; p]),
                l if l == p => Ok(v.to_vec()),
                l => Err(Error::Invalid(format!("--{name} has {l} values, expected 1 or {p}"))),
            }
        };
        QaoaAngles::new(expand(&self.beta, "beta")?, expand(&self.gamma, "gamma")?)
    }
}

#[derive(Debug, Args)]
pub struct ExponentArgs {
    #[arg(long)]
    pub k: usize,
    #[command(flatten)]
    pub ratio: RatioArgs,
    #[command(flatten)]
    pub angles: AngleArgs,
    #[arg(long, default_value_t = 0.0)]
    pub rho: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub eps: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,
}

#[derive(Debug, Args)]
pub struct P1Args {
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub ratio: RatioArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: f64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum GradientArg {
    Fd,
    Adjoint,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long, default_value_t = 0.1)]
    pub lr: f64,
    #[arg(long, default_value_t = 200)]
    pub iters: usize,
    #[command(flatten)]
    pub ratio: RatioArgs,
    #[arg(long, value_enum, default_value_t = GradientArg::Fd)]
    pub gradient: GradientArg,
}

/// The `p1` subcommand's output record.
#[derive(Debug, Serialize)]
pub struct P1Record {
    pub k: usize,
    pub n: usize,
    pub r: f64,
    pub beta: f64,
    pub gamma: f64,
    pub probability: f64,
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    let text = serde_json::to_string(value)?;
    writeln!(stdout, "{text}")?;
    if let Some(path) = out {
        std::fs::write(path, format!("{text}\n"))?;
    }
    Ok(())
}

pub fn cmd_exponent(args: &ExponentArgs) -> Result<ExponentRecord> {
    let problem = QaoaKsatProblem::new(args.k, args.ratio.resolve(args.k)?, args.angles.resolve()?)?;
    let opts = FixedPointOptions { eps: args.eps, n_iter: args.max_iter, rho: args.rho };
    let exp = qaoa_exponent(&problem, opts)?;
    Ok(ExponentRecord::new(&problem, &exp))
}

pub fn cmd_p1(args: &P1Args) -> Result<P1Record> {
    let r = args.ratio.resolve(args.k)?;
    let probability = p1_exact(args.k, args.n, r, args.beta, args.gamma)?;
    Ok(P1Record { k: args.k, n: args.n, r, beta: args.beta, gamma: args.gamma, probability })
}

/// Satisfiable random instances for training, seeded from `seed`.
pub fn training_instances(k: usize, n: usize, r: f64, count: usize, seed: u64) -> Result<Vec<crate::sat_core::CnfInstance>> {
    let suite = crate::bench::generate_suite(k, r, &[n], count, seed)?;
    let bucket = &suite.buckets[0];
    if bucket.instances.len() < count {
        return Err(Error::Invalid(format!("only {} satisfiable instances found", bucket.instances.len())));
    }
    Ok(bucket.instances.iter().map(|s| s.instance.clone()).collect())
}

fn run_command(cli: &CliConfig, stdout: &mut dyn Write) -> Result<i32> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Exponent(args) => emit(&cmd_exponent(args)?, out, stdout)?,
        Command::P1(args) => emit(&cmd_p1(args)?, out, stdout)?,
        Command::Train(args) => {
            let r = args.ratio.resolve(args.k)?;
            let instances = training_instances(args.k, args.n, r, args.count, cli.seed)?;
            let config = TrainConfig {
                learning_rate: args.lr,
                iterations: args.iters,
                instance_count: args.count,
                instance_size: args.n,
                gradient: match args.gradient {
                    GradientArg::Fd => GradientMethod::FiniteDifference,
                    GradientArg::Adjoint => GradientMethod::Adjoint,
                },
                ..TrainConfig::default()
            };
            let outcome = optimize_angles(&instances, args.p, &config)?;
            emit(&outcome.angles, out, stdout)?;
            if let Some(path) = out {
                let log_path = path.with_extension("log.csv");
                write_train_log(&outcome.log, std::fs::File::create(log_path)?)?;
            }
            if outcome.stalled {
                eprintln!("training stalled after {} iterations", outcome.log.len());
            }
        }
        Command::Bench(args) => {
            let config: BenchConfig = serde_json::from_str(&std::fs::read_to_string(&args.config)?)?;
            config.validate()?;
            let angles = match &config.angles {
                Some(p) => Some(QaoaAngles::from_json(&std::fs::read_to_string(p)?)?),
                None => None,
            };
            let report = run_bench(&config, angles.as_ref())?;
            let dir = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("bench_out"));
            write_bench_outputs(&report, &dir)?;
            writeln!(stdout, "{:<14} {:>6} {:>10} {:>8} {:>7} {:>9}", "method", "seed", "intercept", "slope", "corr", "slope_err")?;
            for row in &report.summary {
                writeln!(
                    stdout,
                    "{:<14} {:>6} {:>10.3} {:>8.4} {:>7.4} {:>9.4}",
                    row.method, row.seed, row.intercept_log2, row.slope_log2, row.corr, row.slope_err
                )?;
            }
            for f in &report.failures {
                eprintln!("failure: {f}");
            }
            if !report.failures.is_empty() {
                return Ok(EXIT_NUMERICAL);
            }
        }
    }
    Ok(EXIT_OK)
}

/// Writes `solvers.csv`, `qaoa.csv`, `summary.csv` and `plot.csv` into `dir`.
pub fn write_bench_outputs(report: &crate::bench::BenchReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_path(dir.join("solvers.csv"))?;
    for row in &report.solver_rows {
        w.serialize(row)?;
    }
    w.flush()?;
    let mut w = csv::Writer::from_path(dir.join("qaoa.csv"))?;
    for row in &report.qaoa_rows {
        w.serialize(row)?;
    }
    w.flush()?;
    let mut w = csv::Writer::from_path(dir.join("summary.csv"))?;
    for row in &report.summary {
        w.serialize(row)?;
    }
    w.flush()?;
    let mut w = csv::Writer::from_path(dir.join("plot.csv"))?;
    w.write_record(["method", "seed", "x", "y", "err"])?;
    for (method, seed, pts) in &report.plot {
        for p in pts {
            w.write_record([method.clone(), seed.to_string(), p.x.to_string(), p.y.to_string(), p.err.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match CliConfig::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            let _ = writeln!(stderr, "cannot configure {t} threads: {e}");
        }
    }
    match run_command(&cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_USAGE
            }
        }
    }
}

