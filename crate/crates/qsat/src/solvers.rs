//! Stochastic local search: WalkSAT, WalkSATlm and the QAOA-seeded hybrid.
//!
//! Cost is counted in formula evaluations: one per flip plus one per fresh
//! starting assignment.

use crate::qaoa_analytic::QaoaAngles;
use crate::sat_core::{CnfInstance, MAX_ENUMERATION_VARS};
use crate::simulator::PreparedInstance;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub found: Option<Vec<bool>>,
    pub flips: u64,
    pub evaluations: u64,
    pub tries: u64,
    pub success: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalksatLmParams {
    pub p_noise: f64,
    pub w1: f64,
    pub w2: f64,
    /// Take a break-free variable whenever the chosen clause has one, before
    /// any noise decision.
    pub freebie: bool,
}

impl Default for WalksatLmParams {
    fn default() -> Self {
        WalksatLmParams { p_noise: 0.15, w1: 6.0, w2: 5.0, freebie: true }
    }
}

/// Default walk length, `3n`.
pub fn default_steps(n: usize) -> usize {
    3 * n.max(1)
}

/// Assignment plus per-clause true-literal counts and the unsatisfied set.
struct SearchState<'a> {
    inst: &'a CnfInstance,
    /// `occ[v]` lists `(clause, negated)` for every occurrence of variable `v`.
    occ: Vec<Vec<(u32, bool)>>,
    bits: Vec<bool>,
    true_count: Vec<u32>,
    unsat: Vec<u32>,
    /// Position of each clause in `unsat`, or `u32::MAX`.
    pos: Vec<u32>,
}

impl<'a> SearchState<'a> {
    fn new(inst: &'a CnfInstance) -> Self {
        let mut occ = vec![Vec::new(); inst.n];
        for (j, cl) in inst.clauses.iter().enumerate() {
            for l in cl {
                occ[l.var as usize].push((j as u32, l.negated));
            }
        }
        SearchState {
            inst,
            occ,
            bits: vec![false; inst.n],
            true_count: vec![0; inst.m()],
            unsat: Vec::new(),
            pos: vec![u32::MAX; inst.m()],
        }
    }

    fn reset(&mut self, bits: Vec<bool>) {
        self.bits = bits;
        self.unsat.clear();
        for (j, cl) in self.inst.clauses.iter().enumerate() {
            let t = cl.iter().filter(|l| l.is_true(self.bits[l.var as usize])).count() as u32;
            self.true_count[j] = t;
            self.pos[j] = u32::MAX;
            if t == 0 {
                self.pos[j] = self.unsat.len() as u32;
                self.unsat.push(j as u32);
            }
        }
    }

    fn mark_unsat(&mut self, j: usize) {
        self.pos[j] = self.unsat.len() as u32;
        self.unsat.push(j as u32);
    }

    fn mark_sat(&mut self, j: usize) {
        let at = self.pos[j] as usize;
        let last = self.unsat.pop().expect("clause was unsatisfied");
        if last as usize != j {
            self.unsat[at] = last;
            self.pos[last as usize] = at as u32;
        }
        self.pos[j] = u32::MAX;
    }

    fn flip(&mut self, v: usize) {
        self.bits[v] = !self.bits[v];
        let value = self.bits[v];
        for idx in 0..self.occ[v].len() {
            let (j, negated) = self.occ[v][idx];
            let j = j as usize;
            if value != negated {
                self.true_count[j] += 1;
                if self.true_count[j] == 1 {
                    self.mark_sat(j);
                }
            } else {
                self.true_count[j] -= 1;
                if self.true_count[j] == 0 {
                    self.mark_unsat(j);
                }
            }
        }
    }

    /// `(break, make₁, make₂)` for flipping `v`: clauses going to 0 true
    /// literals, from 0 to 1, and from 1 to 2.
    fn scores(&self, v: usize) -> (u32, u32, u32) {
        // Net change per clause, accumulated over repeated occurrences.
        let mut deltas: Vec<(u32, i32)> = Vec::with_capacity(self.occ[v].len());
        let value = self.bits[v];
        for &(j, negated) in &self.occ[v] {
            let d = if value != negated { -1 } else { 1 };
            match deltas.last_mut() {
                Some((last, acc)) if *last == j => *acc += d,
                _ => deltas.push((j, d)),
            }
        }
        let (mut brk, mut make1, mut make2) = (0, 0, 0);
        for (j, d) in deltas {
            let before = self.true_count[j as usize] as i32;
            let after = before + d;
            if before > 0 && after == 0 {
                brk += 1;
            }
            if before == 0 && after == 1 {
                make1 += 1;
            }
            if before == 1 && after == 2 {
                make2 += 1;
            }
        }
        (brk, make1, make2)
    }
}

fn random_bits<R: Rng>(n: usize, rng: &mut R) -> Vec<bool> {
    (0..n).map(|_| rng.random()).collect()
}

/// Runs one walk of at most `steps` flips; returns whether it ended satisfied.
fn walk<R: Rng>(
    state: &mut SearchState,
    steps: usize,
    rng: &mut R,
    flips: &mut u64,
    evaluations: &mut u64,
    mut pick: impl FnMut(&SearchState, usize, &mut R) -> usize,
) -> bool {
    for _ in 0..steps {
        if state.unsat.is_empty() {
            return true;
        }
        let j = state.unsat[rng.random_range(0..state.unsat.len())] as usize;
        let v = pick(state, j, rng);
        state.flip(v);
        *flips += 1;
        *evaluations += 1;
    }
    state.unsat.is_empty()
}

fn random_literal_var<R: Rng>(state: &SearchState, j: usize, rng: &mut R) -> usize {
    let cl = &state.inst.clauses[j];
    cl[rng.random_range(0..cl.len())].var as usize
}

fn lm_pick<R: Rng>(params: &WalksatLmParams, state: &SearchState, j: usize, rng: &mut R) -> usize {
    let cl = &state.inst.clauses[j];
    let mut vars: Vec<usize> = cl.iter().map(|l| l.var as usize).collect();
    vars.sort_unstable();
    vars.dedup();
    let scored: Vec<(usize, u32, f64)> = vars
        .iter()
        .map(|&v| {
            let (b, m1, m2) = state.scores(v);
            (v, b, params.w1 * m1 as f64 + params.w2 * m2 as f64)
        })
        .collect();
    let best_by = |key: &dyn Fn(&(usize, u32, f64)) -> f64, pool: &[&(usize, u32, f64)]| {
        pool.iter().copied().max_by(|a, b| key(a).total_cmp(&key(b))).map(|t| t.0)
    };
    if params.freebie {
        let free: Vec<&(usize, u32, f64)> = scored.iter().filter(|t| t.1 == 0).collect();
        if let Some(v) = best_by(&|t| t.2, &free) {
            return v;
        }
    }
    if rng.random::<f64>() < params.p_noise {
        return random_literal_var(state, j, rng);
    }
    let all: Vec<&(usize, u32, f64)> = scored.iter().collect();
    let penalty = params.w1 + params.w2;
    best_by(&|t| t.2 - penalty * t.1 as f64, &all).expect("clauses are nonempty")
}

fn run_tries<R: Rng>(
    inst: &CnfInstance,
    rng: &mut R,
    steps_per_try: usize,
    max_tries: usize,
    mut pick: impl FnMut(&SearchState, usize, &mut R) -> usize,
) -> SolveResult {
    assert!(steps_per_try >= 1, "steps_per_try must be positive");
    let mut state = SearchState::new(inst);
    let (mut flips, mut evaluations) = (0, 0);
    for t in 1..=max_tries as u64 {
        state.reset(random_bits(inst.n, rng));
        evaluations += 1;
        if walk(&mut state, steps_per_try, rng, &mut flips, &mut evaluations, &mut pick) {
            return SolveResult { found: Some(state.bits.clone()), flips, evaluations, tries: t, success: true };
        }
    }
    SolveResult { found: None, flips, evaluations, tries: max_tries as u64, success: false }
}

/// Plain WalkSAT: flip a uniformly random literal's variable of a uniformly
/// random unsatisfied clause, restarting from a fresh random assignment every
/// `steps_per_try` flips.
pub fn walksat(instance: &CnfInstance, rng_seed: u64, steps_per_try: usize, max_tries: usize) -> SolveResult {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    run_tries(instance, &mut rng, steps_per_try, max_tries, random_literal_var)
}

/// WalkSATlm: break-free variables first (highest weighted make wins), then
/// noise with probability `p_noise`, otherwise the best `lmake − (w1 + w2)·break`.
pub fn walksatlm(
    instance: &CnfInstance,
    rng_seed: u64,
    params: &WalksatLmParams,
    steps_per_try: usize,
    max_tries: usize,
) -> SolveResult {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    run_tries(instance, &mut rng, steps_per_try, max_tries, |s, j, r| lm_pick(params, s, j, r))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HybridParams {
    pub steps_per_try: usize,
    /// Independent sample-then-walk rounds used for the estimate.
    pub rounds: usize,
}

/// Samples assignments from the QAOA output distribution and runs one walk
/// from each. Returns the fraction of successful rounds and the accounting up
/// to the first success (or over all rounds if none succeeded).
pub fn walksat_qaoa_hybrid(
    instance: &CnfInstance,
    angles: &QaoaAngles,
    rng_seed: u64,
    params: HybridParams,
) -> Result<(f64, SolveResult)> {
    if instance.n > MAX_ENUMERATION_VARS {
        return Err(Error::Size(format!("n = {} exceeds {MAX_ENUMERATION_VARS}", instance.n)));
    }
    let probs = PreparedInstance::new(instance)?.state(angles).probabilities();
    hybrid_from_distribution(instance, &probs, rng_seed, params)
}

/// [`walksat_qaoa_hybrid`] with the sampling distribution supplied directly.
pub fn hybrid_from_distribution(
    instance: &CnfInstance,
    probs: &[f64],
    rng_seed: u64,
    params: HybridParams,
) -> Result<(f64, SolveResult)> {
    if params.rounds == 0 {
        return Err(Error::Invalid("need at least one round".into()));
    }
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in probs {
        acc += p;
        cdf.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut state = SearchState::new(instance);
    let (mut flips, mut evaluations, mut hits) = (0u64, 0u64, 0usize);
    let mut first: Option<SolveResult> = None;
    for round in 1..=params.rounds as u64 {
        let u = rng.random::<f64>() * acc;
        let y = cdf.partition_point(|&c| c <= u).min(probs.len() - 1);
        state.reset((0..instance.n).map(|i| (y >> i) & 1 == 1).collect());
        evaluations += 1;
        let ok = walk(&mut state, params.steps_per_try, &mut rng, &mut flips, &mut evaluations, random_literal_var);
        if ok {
            hits += 1;
            if first.is_none() {
                first = Some(SolveResult { found: Some(state.bits.clone()), flips, evaluations, tries: round, success: true });
            }
        }
    }
    let summary = first.unwrap_or(SolveResult {
        found: None,
        flips,
        evaluations,
        tries: params.rounds as u64,
        success: false,
    });
    Ok((hits as f64 / params.rounds as f64, summary))
}

/// Expected repetitions `1/p` of a sampling algorithm; `+∞` when `p = 0`.
pub fn qaoa_runtime(instance: &CnfInstance, angles: &QaoaAngles) -> Result<f64> {
    let p = crate::simulator::success_probability(instance, angles)?;
    Ok(runtime_from_probability(p))
}

pub fn runtime_from_probability(p: f64) -> f64 {
    if p > 0.0 {
        1.0 / p
    } else {
        f64::INFINITY
    }
}

/// One row of the per-run solver CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverRecord {
    pub solver: String,
    pub n: usize,
    pub k: usize,
    pub r: f64,
    pub seed: u64,
    pub success: bool,
    pub flips: u64,
    pub evaluations: u64,
    pub tries: u64,
}
