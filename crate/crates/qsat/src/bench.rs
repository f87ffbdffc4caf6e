//! Instance suites, runtime medians, exponential fits and their resampled
//! errors.

use crate::sat_core::{is_satisfiable, sample_instance, threshold, CnfInstance, MAX_ENUMERATION_VARS};
use crate::{Error, Result};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Per-instance seeds are derived from the suite seed with SplitMix64.
pub fn derive_seed(base: u64, n: usize, index: u64) -> u64 {
    let mut z = base ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteInstance {
    pub seed: u64,
    pub instance: CnfInstance,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SizeBucket {
    pub n: usize,
    /// Satisfiable instances, in generation order.
    pub instances: Vec<SuiteInstance>,
    pub sampled: usize,
    pub rejected: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Suite {
    pub k: usize,
    pub r: f64,
    pub seed: u64,
    pub buckets: Vec<SizeBucket>,
}

/// Upper bound on draws per retained instance before a bucket gives up.
pub const MAX_DRAWS_PER_INSTANCE: usize = 100;

/// Draws instances for each size until `count` satisfiable ones are kept
/// (or the draw budget runs out), recording how many were rejected.
pub fn generate_suite(k: usize, r: f64, sizes: &[usize], count: usize, seed: u64) -> Result<Suite> {
    if let Some(&n) = sizes.iter().find(|&&n| n > MAX_ENUMERATION_VARS || n == 0) {
        return Err(Error::Size(format!("size {n} outside 1..={MAX_ENUMERATION_VARS}")));
    }
    let buckets = sizes
        .iter()
        .map(|&n| {
            let budget = count * MAX_DRAWS_PER_INSTANCE;
            let mut instances = Vec::with_capacity(count);
            let mut sampled = 0;
            // Satisfiability checks run in parallel batches; results are
            // consumed in index order so the suite does not depend on scheduling.
            while instances.len() < count && sampled < budget {
                let batch = (count - instances.len()).max(8).min(budget - sampled);
                let drawn: Vec<(u64, CnfInstance, bool)> = (sampled..sampled + batch)
                    .into_par_iter()
                    .map(|i| {
                        let s = derive_seed(seed, n, i as u64);
                        let inst = sample_instance(n, k, r, s);
                        let sat = is_satisfiable(&inst).expect("size checked above");
                        (s, inst, sat)
                    })
                    .collect();
                for (s, inst, sat) in drawn {
                    if instances.len() == count {
                        break;
                    }
                    sampled += 1;
                    if sat {
                        instances.push(SuiteInstance { seed: s, instance: inst });
                    }
                }
            }
            let rejected = sampled - instances.len();
            SizeBucket { n, instances, sampled, rejected }
        })
        .collect();
    Ok(Suite { k, r, seed, buckets })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    E,
    Two,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::E => x.ln(),
            LogBase::Two => x.log2(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub corr: f64,
    pub slope_err: f64,
    pub log_base: LogBase,
}

/// Least squares of `log value` on `n`. `slope_err` is left at 0; see
/// [`resample_error`].
pub fn exp_fit(points: &[(f64, f64)], log_base: LogBase) -> Result<FitResult> {
    if let Some(&(_, v)) = points.iter().find(|(_, v)| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::Invalid(format!("fit values must be positive and finite, got {v}")));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| log_base.log(p.1)).collect();
    let (slope, intercept, corr) = linear_fit(&xs, &ys)?;
    Ok(FitResult { slope, intercept, corr, slope_err: 0.0, log_base })
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Invalid("need at least two distinct sizes".into()));
    }
    let slope = sxy / sxx;
    // A constant series is fitted exactly by a flat line; report that as perfect.
    let corr = if syy > 0.0 { (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0) } else { 1.0 };
    Ok((slope, my - slope * mx, corr))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregate {
    Mean,
    Median,
}

impl Aggregate {
    pub fn apply(self, values: &[f64]) -> f64 {
        match self {
            Aggregate::Mean => values.iter().sum::<f64>() / values.len() as f64,
            Aggregate::Median => median(values),
        }
    }
}

/// Standard median; even counts take the mean of the two central values.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len();
    assert!(m > 0, "median of empty set");
    if m % 2 == 1 {
        v[m / 2]
    } else {
        (v[m / 2 - 1] + v[m / 2]) / 2.0
    }
}

/// Fit of the per-size aggregate of grouped per-instance values.
pub fn aggregate_fit(groups: &[(usize, Vec<f64>)], agg: Aggregate, log_base: LogBase) -> Result<FitResult> {
    let points: Vec<(f64, f64)> = groups.iter().map(|(n, v)| (*n as f64, agg.apply(v))).collect();
    exp_fit(&points, log_base)
}

/// Per-size aggregates of random halves: `repeats` rows, one column per group.
fn half_aggregates(groups: &[(usize, Vec<f64>)], agg: Aggregate, repeats: usize, rng_seed: u64) -> Result<Vec<Vec<f64>>> {
    if groups.iter().any(|(_, v)| v.len() < 2) {
        return Err(Error::Invalid("need at least two instances per size".into()));
    }
    if repeats < 2 {
        return Err(Error::Invalid("need at least two repeats".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    Ok((0..repeats)
        .map(|_| {
            groups
                .iter()
                .map(|(_, v)| {
                    let half: Vec<f64> = sample(&mut rng, v.len(), v.len() / 2).into_iter().map(|i| v[i]).collect();
                    agg.apply(&half)
                })
                .collect()
        })
        .collect())
}

fn std_dev(xs: &[f64]) -> f64 {
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt()
}

/// Standard deviation of the fitted slope when each size keeps only a random
/// half of its instances, over `repeats` draws.
pub fn resample_error(
    groups: &[(usize, Vec<f64>)],
    agg: Aggregate,
    log_base: LogBase,
    repeats: usize,
    rng_seed: u64,
) -> Result<f64> {
    let rows = half_aggregates(groups, agg, repeats, rng_seed)?;
    let slopes = rows
        .iter()
        .map(|row| {
            let points: Vec<(f64, f64)> = groups.iter().zip(row).map(|((n, _), a)| (*n as f64, *a)).collect();
            exp_fit(&points, log_base).map(|f| f.slope)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(std_dev(&slopes))
}

/// Spread of `log(aggregate)` per size under the same half-resampling, for
/// error bars.
pub fn resample_point_errors(
    groups: &[(usize, Vec<f64>)],
    agg: Aggregate,
    log_base: LogBase,
    repeats: usize,
    rng_seed: u64,
) -> Result<Vec<f64>> {
    let rows = half_aggregates(groups, agg, repeats, rng_seed)?;
    Ok((0..groups.len())
        .map(|g| std_dev(&rows.iter().map(|row| log_base.log(row[g])).collect::<Vec<_>>()))
        .collect())
}

/// Natural-log exponent minus the random-assignment baseline `−2^{−k} r`.
pub fn excess_exponent(exponent: f64, k: usize, r: f64) -> f64 {
    exponent + r / 2f64.powi(k as i32)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MedianRow {
    pub n: usize,
    pub median: f64,
    pub count: usize,
    pub infinite: usize,
    /// The median position fell on an infinite runtime; `median` is then the
    /// largest finite runtime and only a lower bound.
    pub lower_bound: bool,
}

/// Per-size medians of runtimes, where `+∞` marks a run that never succeeded.
/// Empty buckets are skipped.
pub fn median_runtime_table(groups: &[(usize, Vec<f64>)]) -> Vec<MedianRow> {
    groups
        .iter()
        .filter(|(_, v)| !v.is_empty())
        .map(|(n, v)| {
            let infinite = v.iter().filter(|x| x.is_infinite()).count();
            let med = median(v);
            let (median, lower_bound) = if med.is_finite() {
                (med, false)
            } else {
                (v.iter().copied().filter(|x| x.is_finite()).fold(0.0, f64::max), true)
            };
            MedianRow { n: *n, median, count: v.len(), infinite, lower_bound }
        })
        .collect()
}

/// `1/mean`, which never exceeds twice the median of `1/p` over the same set.
pub fn runtime_bound_from_mean(mean_success: f64) -> Result<f64> {
    if !(mean_success > 0.0 && mean_success <= 1.0) {
        return Err(Error::Invalid(format!("mean success must lie in (0, 1], got {mean_success}")));
    }
    Ok(1.0 / mean_success)
}

/// Checks `1/mean(p) ≤ 2·median(1/p) + slack` on one set of probabilities.
pub fn median_bound_holds(probs: &[f64], slack: f64) -> bool {
    let mean = probs.iter().sum::<f64>() / probs.len() as f64;
    let runtimes: Vec<f64> = probs.iter().map(|&p| crate::solvers::runtime_from_probability(p)).collect();
    match runtime_bound_from_mean(mean) {
        Ok(bound) => bound <= 2.0 * median(&runtimes) + slack,
        Err(_) => true,
    }
}

/// `r` in a bench config: a number or the string `"threshold"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RatioSpec {
    Value(f64),
    Named(String),
}

impl RatioSpec {
    pub fn resolve(&self, k: usize) -> Result<f64> {
        match self {
            RatioSpec::Value(r) => Ok(*r),
            RatioSpec::Named(s) if s == "threshold" => threshold(k),
            RatioSpec::Named(s) => Err(Error::Invalid(format!("unknown ratio {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Seeds {
    One(u64),
    Many(Vec<u64>),
}

impl Seeds {
    pub fn list(&self) -> Vec<u64> {
        match self {
            Seeds::One(s) => vec![*s],
            Seeds::Many(v) => v.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Walksat,
    Walksatlm,
    Qaoa,
    WalksatQaoa,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Walksat => "walksat",
            Method::Walksatlm => "walksatlm",
            Method::Qaoa => "qaoa",
            Method::WalksatQaoa => "walksat_qaoa",
        }
    }
}

/// Experiment description read by the `bench` subcommand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub k: usize,
    pub r: RatioSpec,
    pub sizes: Vec<usize>,
    pub count: usize,
    pub methods: Vec<Method>,
    pub seeds: Seeds,
    /// Angles file (JSON `{p, beta, gamma}`) for the QAOA-based methods.
    #[serde(default)]
    pub angles: Option<std::path::PathBuf>,
    #[serde(default = "default_max_tries")]
    pub max_tries: usize,
    #[serde(default = "default_rounds")]
    pub hybrid_rounds: usize,
    #[serde(default = "default_repeats")]
    pub resample_repeats: usize,
    /// Independent local-search runs per instance; the instance's runtime is
    /// their mean evaluation count.
    #[serde(default = "default_runs")]
    pub runs_per_instance: usize,
}

fn default_runs() -> usize {
    1
}

fn default_max_tries() -> usize {
    100_000
}

fn default_rounds() -> usize {
    1000
}

fn default_repeats() -> usize {
    100
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(&n) = self.sizes.iter().find(|&&n| n > MAX_ENUMERATION_VARS || n == 0) {
            return Err(Error::Size(format!("size {n} outside 1..={MAX_ENUMERATION_VARS}")));
        }
        if self.runs_per_instance == 0 {
            return Err(Error::Invalid("runs_per_instance must be at least 1".into()));
        }
        if self.sizes.len() < 2 || self.count < 2 || self.methods.is_empty() {
            return Err(Error::Invalid("need ≥ 2 sizes, ≥ 2 instances per size and ≥ 1 method".into()));
        }
        let needs_angles = self.methods.iter().any(|m| matches!(m, Method::Qaoa | Method::WalksatQaoa));
        if needs_angles && self.angles.is_none() {
            return Err(Error::Invalid("QAOA-based methods need an angles file".into()));
        }
        Ok(())
    }
}

/// One `(x, y, err)` point for external plotting.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlotPoint {
    pub x: f64,
    pub y: f64,
    pub err: f64,
}

/// Per-instance outcome of a QAOA-based method.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QaoaRecord {
    pub method: String,
    pub n: usize,
    pub k: usize,
    pub r: f64,
    pub seed: u64,
    pub success_probability: f64,
    pub runtime: f64,
}

/// One line of the fit summary table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub method: String,
    pub seed: u64,
    pub intercept_log2: f64,
    pub slope_log2: f64,
    pub corr: f64,
    pub slope_err: f64,
    pub n_min: usize,
    pub n_max: usize,
    /// Sizes whose median was only a lower bound.
    pub censored_sizes: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchReport {
    pub solver_rows: Vec<crate::solvers::SolverRecord>,
    pub qaoa_rows: Vec<QaoaRecord>,
    pub summary: Vec<SummaryRow>,
    /// `(method, seed, points)` with `y = log2 median runtime`.
    pub plot: Vec<(String, u64, Vec<PlotPoint>)>,
    /// Human-readable descriptions of anything that went wrong.
    pub failures: Vec<String>,
}

/// Runs generate → measure → fit → resample for every seed and method.
pub fn run_bench(config: &BenchConfig, angles: Option<&crate::qaoa_analytic::QaoaAngles>) -> Result<BenchReport> {
    use crate::solvers::{self, default_steps, HybridParams, SolverRecord, WalksatLmParams};

    config.validate()?;
    let r = config.r.resolve(config.k)?;
    let mut report = BenchReport::default();
    for seed in config.seeds.list() {
        let suite = generate_suite(config.k, r, &config.sizes, config.count, seed)?;
        for b in &suite.buckets {
            if b.instances.len() < config.count {
                report.failures.push(format!(
                    "seed {seed}, n = {}: only {} of {} satisfiable instances after {} draws",
                    b.n,
                    b.instances.len(),
                    config.count,
                    b.sampled
                ));
            }
        }
        for (mi, &method) in config.methods.iter().enumerate() {
            let mut groups: Vec<(usize, Vec<f64>)> = Vec::new();
            for b in &suite.buckets {
                let runs: Vec<Result<(f64, Vec<SolverRecord>, Option<QaoaRecord>)>> = b
                    .instances
                    .par_iter()
                    .map(|si| {
                        let run_seed = derive_seed(si.seed, b.n, mi as u64 + 1);
                        let inst = &si.instance;
                        let steps = default_steps(inst.n);
                        match method {
                            Method::Walksat | Method::Walksatlm => {
                                let mut rows = Vec::with_capacity(config.runs_per_instance);
                                for run in 0..config.runs_per_instance as u64 {
                                    let seed = if run == 0 { run_seed } else { derive_seed(run_seed, b.n, run) };
                                    let res = if method == Method::Walksat {
                                        solvers::walksat(inst, seed, steps, config.max_tries)
                                    } else {
                                        solvers::walksatlm(inst, seed, &WalksatLmParams::default(), steps, config.max_tries)
                                    };
                                    rows.push(SolverRecord {
                                        solver: method.name().into(),
                                        n: inst.n,
                                        k: config.k,
                                        r,
                                        seed,
                                        success: res.success,
                                        flips: res.flips,
                                        evaluations: res.evaluations,
                                        tries: res.tries,
                                    });
                                }
                                let rt = if rows.iter().all(|row| row.success) {
                                    rows.iter().map(|row| row.evaluations as f64).sum::<f64>() / rows.len() as f64
                                } else {
                                    f64::INFINITY
                                };
                                Ok((rt, rows, None))
                            }
                            Method::Qaoa | Method::WalksatQaoa => {
                                let angles = angles.ok_or_else(|| Error::Invalid("missing angles".into()))?;
                                let prob = if method == Method::Qaoa {
                                    crate::simulator::success_probability(inst, angles)?
                                } else {
                                    let params = HybridParams { steps_per_try: steps, rounds: config.hybrid_rounds };
                                    solvers::walksat_qaoa_hybrid(inst, angles, run_seed, params)?.0
                                };
                                let rt = solvers::runtime_from_probability(prob);
                                let row = QaoaRecord {
                                    method: method.name().into(),
                                    n: inst.n,
                                    k: config.k,
                                    r,
                                    seed: run_seed,
                                    success_probability: prob,
                                    runtime: rt,
                                };
                                Ok((rt, Vec::new(), Some(row)))
                            }
                        }
                    })
                    .collect();
                let mut runtimes = Vec::with_capacity(runs.len());
                for run in runs {
                    match run {
                        Ok((rt, s, q)) => {
                            runtimes.push(rt);
                            report.solver_rows.extend(s);
                            report.qaoa_rows.extend(q);
                        }
                        Err(e) => report.failures.push(format!("{} n = {}: {e}", method.name(), b.n)),
                    }
                }
                if matches!(method, Method::Qaoa) {
                    let probs: Vec<f64> = runtimes.iter().map(|rt| 1.0 / rt).collect();
                    if !probs.is_empty() && !median_bound_holds(&probs, 0.0) {
                        report.failures.push(format!("n = {}: 1/mean exceeds twice the median runtime", b.n));
                    }
                }
                groups.push((b.n, runtimes));
            }
            let table = median_runtime_table(&groups);
            let censored = table.iter().filter(|row| row.lower_bound).count();
            let points: Vec<(f64, f64)> = table.iter().map(|row| (row.n as f64, row.median)).collect();
            let fitted = exp_fit(&points, LogBase::Two).and_then(|fit| {
                let err = resample_error(&groups, Aggregate::Median, LogBase::Two, config.resample_repeats, seed)
                    .unwrap_or(f64::NAN);
                Ok(FitResult { slope_err: err, ..fit })
            });
            match fitted {
                Ok(fit) => {
                    report.summary.push(SummaryRow {
                        method: method.name().into(),
                        seed,
                        intercept_log2: fit.intercept,
                        slope_log2: fit.slope,
                        corr: fit.corr,
                        slope_err: fit.slope_err,
                        n_min: config.sizes.iter().copied().min().unwrap_or(0),
                        n_max: config.sizes.iter().copied().max().unwrap_or(0),
                        censored_sizes: censored,
                    });
                    let errs = resample_point_errors(&groups, Aggregate::Median, LogBase::Two, config.resample_repeats, seed)
                        .unwrap_or_else(|_| vec![f64::NAN; groups.len()]);
                    let pts = table
                        .iter()
                        .zip(&groups)
                        .zip(errs)
                        .map(|((row, _), err)| PlotPoint { x: row.n as f64, y: row.median.log2(), err })
                        .collect();
                    report.plot.push((method.name().into(), seed, pts));
                }
                Err(e) => report.failures.push(format!("{}: fit failed: {e}", method.name())),
            }
        }
    }
    Ok(report)
}
