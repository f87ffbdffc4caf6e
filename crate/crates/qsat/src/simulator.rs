//! Dense statevector simulation of QAOA on k-SAT instances and gradient-ascent
//! angle training.

use crate::qaoa_analytic::QaoaAngles;
use crate::sat_core::{unsat_count_vector, CnfInstance};
use crate::{Error, Result, C64};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    pub n: usize,
    pub amplitudes: Vec<C64>,
}

impl Statevector {
    pub fn uniform(n: usize) -> Self {
        let len = 1usize << n;
        let a = 1.0 / (len as f64).sqrt();
        Statevector { n, amplitudes: vec![C64::new(a, 0.0); len] }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Multiplies amplitude `y` by `e^{−i γ/2 · cost[y]}` for integer costs.
fn apply_phase(amps: &mut [C64], cost: &[u32], gamma: f64) {
    let max = cost.iter().copied().max().unwrap_or(0) as usize;
    let unit = C64::from_polar(1.0, -gamma / 2.0);
    let mut table = Vec::with_capacity(max + 1);
    let mut acc = C64::new(1.0, 0.0);
    for u in 0..=max {
        // Re-anchor periodically so repeated products do not drift.
        if u % 64 == 0 {
            acc = C64::from_polar(1.0, -gamma / 2.0 * u as f64);
        }
        table.push(acc);
        acc *= unit;
    }
    for (a, &u) in amps.iter_mut().zip(cost) {
        *a *= table[u as usize];
    }
}

/// `e^{−iβ/2 X}` on every qubit.
fn apply_mixer(amps: &mut [C64], n: usize, beta: f64) {
    let (s, c) = (beta / 2.0).sin_cos();
    let ms = C64::new(0.0, -s);
    for q in 0..n {
        let bit = 1usize << q;
        for base in (0..amps.len()).filter(|i| i & bit == 0) {
            let (a0, a1) = (amps[base], amps[base | bit]);
            amps[base] = a0 * c + a1 * ms;
            amps[base | bit] = a0 * ms + a1 * c;
        }
    }
}

/// `H_B ψ = Σ_q X_q ψ`.
fn apply_mixer_generator(amps: &[C64], n: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); amps.len()];
    for q in 0..n {
        let bit = 1usize << q;
        for (i, o) in out.iter_mut().enumerate() {
            *o += amps[i ^ bit];
        }
    }
    out
}

/// QAOA state for an arbitrary diagonal integer cost.
pub fn run_diagonal(n: usize, cost: &[u32], angles: &QaoaAngles) -> Statevector {
    assert_eq!(cost.len(), 1usize << n, "cost vector must have 2^n entries");
    let mut psi = Statevector::uniform(n);
    for (&b, &g) in angles.beta().iter().zip(angles.gamma()) {
        apply_phase(&mut psi.amplitudes, cost, g);
        apply_mixer(&mut psi.amplitudes, n, b);
    }
    psi
}

/// QAOA state for a k-SAT instance, cost = number of unsatisfied clauses.
pub fn run_qaoa(instance: &CnfInstance, angles: &QaoaAngles) -> Result<Statevector> {
    let cost = unsat_count_vector(instance)?;
    Ok(run_diagonal(instance.n, &cost, angles))
}

/// Probability of measuring a satisfying assignment.
pub fn success_probability(instance: &CnfInstance, angles: &QaoaAngles) -> Result<f64> {
    Ok(PreparedInstance::new(instance)?.success_probability(angles))
}

/// Instance with its cost vector precomputed, for repeated evaluation.
#[derive(Clone, Debug)]
pub struct PreparedInstance {
    pub n: usize,
    cost: Vec<u32>,
}

impl PreparedInstance {
    pub fn new(instance: &CnfInstance) -> Result<Self> {
        Ok(PreparedInstance { n: instance.n, cost: unsat_count_vector(instance)? })
    }

    pub fn cost(&self) -> &[u32] {
        &self.cost
    }

    pub fn state(&self, angles: &QaoaAngles) -> Statevector {
        run_diagonal(self.n, &self.cost, angles)
    }

    pub fn success_probability(&self, angles: &QaoaAngles) -> f64 {
        let psi = self.state(angles);
        let p: f64 = psi.amplitudes.iter().zip(&self.cost).filter(|(_, &u)| u == 0).map(|(a, _)| a.norm_sqr()).sum();
        p.clamp(0.0, 1.0)
    }

    /// Success probability and its gradient with respect to `(β, γ)`, by one
    /// forward and one backward sweep.
    pub fn success_probability_with_grad(&self, angles: &QaoaAngles) -> (f64, Vec<f64>, Vec<f64>) {
        let n = self.n;
        let mut psi = self.state(angles).amplitudes;
        let value: f64 = psi.iter().zip(&self.cost).filter(|(_, &u)| u == 0).map(|(a, _)| a.norm_sqr()).sum();
        let mut lam: Vec<C64> =
            psi.iter().zip(&self.cost).map(|(a, &u)| if u == 0 { *a } else { C64::new(0.0, 0.0) }).collect();
        let cost_f: Vec<f64> = self.cost.iter().map(|&u| u as f64).collect();
        let p = angles.p();
        let mut d_beta = vec![0.0; p];
        let mut d_gamma = vec![0.0; p];
        for j in (0..p).rev() {
            let hb = apply_mixer_generator(&psi, n);
            d_beta[j] = lam.iter().zip(&hb).map(|(l, h)| (l.conj() * h).im).sum();
            apply_mixer(&mut psi, n, -angles.beta()[j]);
            apply_mixer(&mut lam, n, -angles.beta()[j]);
            d_gamma[j] = lam.iter().zip(&psi).zip(&cost_f).map(|((l, a), c)| (l.conj() * a).im * c).sum();
            apply_phase(&mut psi, &self.cost, -angles.gamma()[j]);
            apply_phase(&mut lam, &self.cost, -angles.gamma()[j]);
        }
        (value.clamp(0.0, 1.0), d_beta, d_gamma)
    }
}

/// Sample mean and standard error of the success probability over instances.
pub fn empirical_mean_success(instances: &[CnfInstance], angles: &QaoaAngles) -> Result<(f64, f64)> {
    if instances.is_empty() {
        return Err(Error::Invalid("empty instance set".into()));
    }
    let probs = instances
        .par_iter()
        .map(|inst| success_probability(inst, angles))
        .collect::<Result<Vec<_>>>()?;
    Ok(mean_and_stderr(&probs))
}

pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientMethod {
    /// Central differences with step [`TrainConfig::fd_step`].
    FiniteDifference,
    /// Exact gradient from a backward sweep through the circuit.
    Adjoint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub iterations: usize,
    pub init_beta: f64,
    pub init_gamma: f64,
    pub instance_count: usize,
    pub instance_size: usize,
    pub gradient: GradientMethod,
    pub fd_step: f64,
    /// Stop once the gradient ∞-norm drops below this.
    pub grad_tol: f64,
    pub max_halvings: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.1,
            iterations: 200,
            init_beta: 0.01,
            init_gamma: -0.01,
            instance_count: 100,
            instance_size: 12,
            gradient: GradientMethod::FiniteDifference,
            fd_step: 1e-4,
            grad_tol: 1e-6,
            max_halvings: 20,
        }
    }
}

/// One row of the training log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainLogRow {
    pub iteration: usize,
    pub objective: f64,
    pub grad_norm: f64,
    pub step: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainOutcome {
    pub angles: QaoaAngles,
    pub objective: f64,
    pub log: Vec<TrainLogRow>,
    /// Set when every backtracking halving failed to improve the objective.
    pub stalled: bool,
}

/// Mean success probability over a fixed instance set, with gradients.
pub struct TrainingSet {
    prepared: Vec<PreparedInstance>,
}

impl TrainingSet {
    pub fn new(instances: &[CnfInstance]) -> Result<Self> {
        if instances.is_empty() {
            return Err(Error::Invalid("empty instance set".into()));
        }
        let prepared = instances.par_iter().map(PreparedInstance::new).collect::<Result<Vec<_>>>()?;
        Ok(TrainingSet { prepared })
    }

    pub fn objective(&self, angles: &QaoaAngles) -> f64 {
        let total: f64 = self.prepared.par_iter().map(|p| p.success_probability(angles)).sum();
        total / self.prepared.len() as f64
    }

    pub fn probabilities(&self, angles: &QaoaAngles) -> Vec<f64> {
        self.prepared.par_iter().map(|p| p.success_probability(angles)).collect()
    }

    /// Gradient of [`TrainingSet::objective`] as `(d/dβ, d/dγ)`.
    pub fn gradient(&self, angles: &QaoaAngles, method: GradientMethod, step: f64) -> (Vec<f64>, Vec<f64>) {
        let p = angles.p();
        match method {
            GradientMethod::Adjoint => {
                let (db, dg) = self
                    .prepared
                    .par_iter()
                    .map(|inst| {
                        let (_, b, g) = inst.success_probability_with_grad(angles);
                        (b, g)
                    })
                    .reduce(
                        || (vec![0.0; p], vec![0.0; p]),
                        |(mut b1, mut g1), (b2, g2)| {
                            b1.iter_mut().zip(&b2).for_each(|(x, y)| *x += y);
                            g1.iter_mut().zip(&g2).for_each(|(x, y)| *x += y);
                            (b1, g1)
                        },
                    );
                let m = self.prepared.len() as f64;
                (db.iter().map(|x| x / m).collect(), dg.iter().map(|x| x / m).collect())
            }
            GradientMethod::FiniteDifference => {
                let shifted = |which: usize, j: usize, h: f64| {
                    let mut beta = angles.beta().to_vec();
                    let mut gamma = angles.gamma().to_vec();
                    if which == 0 {
                        beta[j] += h;
                    } else {
                        gamma[j] += h;
                    }
                    let a = QaoaAngles::new(beta, gamma).expect("finite shifted angles");
                    self.objective(&a)
                };
                let diff = |which, j| (shifted(which, j, step) - shifted(which, j, -step)) / (2.0 * step);
                ((0..p).map(|j| diff(0, j)).collect(), (0..p).map(|j| diff(1, j)).collect())
            }
        }
    }
}

fn step_angles(angles: &QaoaAngles, db: &[f64], dg: &[f64], h: f64) -> QaoaAngles {
    let beta = angles.beta().iter().zip(db).map(|(b, d)| b + h * d).collect();
    let gamma = angles.gamma().iter().zip(dg).map(|(g, d)| g + h * d).collect();
    QaoaAngles::new(beta, gamma).expect("finite angles")
}

/// Gradient ascent on the mean success probability from the constant
/// initialisation in `config`, with step halving whenever a step would lower
/// the objective.
pub fn optimize_angles(instances: &[CnfInstance], p: usize, config: &TrainConfig) -> Result<TrainOutcome> {
    let start = QaoaAngles::uniform(p, config.init_beta, config.init_gamma)?;
    optimize_angles_from(&TrainingSet::new(instances)?, start, config)
}

/// [`optimize_angles`] from explicit starting angles on a prepared set.
pub fn optimize_angles_from(set: &TrainingSet, start: QaoaAngles, config: &TrainConfig) -> Result<TrainOutcome> {
    if config.iterations == 0 || !(config.learning_rate > 0.0) {
        return Err(Error::Invalid("need iterations ≥ 1 and a positive learning rate".into()));
    }
    let mut angles = start;
    let mut objective = set.objective(&angles);
    let mut log = Vec::new();
    let mut stalled = false;
    for iteration in 0..config.iterations {
        let (db, dg) = set.gradient(&angles, config.gradient, config.fd_step);
        let grad_norm = db.iter().chain(&dg).fold(0.0f64, |m, x| m.max(x.abs()));
        if grad_norm < config.grad_tol {
            log.push(TrainLogRow { iteration, objective, grad_norm, step: 0.0 });
            break;
        }
        let mut h = config.learning_rate;
        let mut accepted = None;
        for _ in 0..=config.max_halvings {
            let candidate = step_angles(&angles, &db, &dg, h);
            let value = set.objective(&candidate);
            if value >= objective {
                accepted = Some((candidate, value));
                break;
            }
            h /= 2.0;
        }
        match accepted {
            Some((a, v)) => {
                angles = a;
                objective = v;
                log.push(TrainLogRow { iteration, objective, grad_norm, step: h });
            }
            None => {
                stalled = true;
                log.push(TrainLogRow { iteration, objective, grad_norm, step: 0.0 });
                break;
            }
        }
    }
    Ok(TrainOutcome { angles, objective, log, stalled })
}

/// Training log as CSV with columns `iteration,objective,grad_norm,step`.
pub fn write_train_log<W: std::io::Write>(rows: &[TrainLogRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
