//! Random k-SAT QAOA (`k = 2^q`) as a generalized multinomial sum.
//!
//! Bitstrings `s ∈ {0,1}^{2p+1}` and subsets `J ⊆ {0, …, 2p}` are both stored
//! as integer bitmasks with position `j` at bit `j`; position `p` is the
//! middle of the forward/backward path.

mod p1;
mod sos;

pub use p1::{local_scaling_exponent, p1_exact, p1_exact_ln};
pub use sos::{constant_on, sos_sum_alpha, sos_sum_alpha_naive, sos_sum_s, sos_sum_s_naive};

use crate::mnsum::{
    self, check_dim, log_partition, principal_root, split_phases, FixedPointOptions, MultinomialSpec,
    ParentFunction,
};
use crate::{Error, ReIm, Result, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

/// Largest depth for which [`build_spec`] materialises the dense matrix.
pub const MAX_DENSE_DEPTH: usize = 4;
/// Largest depth accepted by the structured evaluator.
pub const MAX_STRUCTURED_DEPTH: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AnglesDocument", into = "AnglesDocument")]
pub struct QaoaAngles {
    beta: Vec<f64>,
    gamma: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct AnglesDocument {
    p: usize,
    beta: Vec<f64>,
    gamma: Vec<f64>,
}

impl TryFrom<AnglesDocument> for QaoaAngles {
    type Error = Error;

    fn try_from(doc: AnglesDocument) -> Result<Self> {
        if doc.beta.len() != doc.p {
            return Err(Error::Invalid(format!("p = {} but {} beta values", doc.p, doc.beta.len())));
        }
        QaoaAngles::new(doc.beta, doc.gamma)
    }
}

impl From<QaoaAngles> for AnglesDocument {
    fn from(a: QaoaAngles) -> Self {
        AnglesDocument { p: a.p(), beta: a.beta, gamma: a.gamma }
    }
}

impl QaoaAngles {
    pub fn new(beta: Vec<f64>, gamma: Vec<f64>) -> Result<Self> {
        if beta.is_empty() || beta.len() != gamma.len() {
            return Err(Error::Invalid(format!(
                "need equal, nonzero numbers of angles (got {} beta, {} gamma)",
                beta.len(),
                gamma.len()
            )));
        }
        if beta.iter().chain(&gamma).any(|x| !x.is_finite()) {
            return Err(Error::Invalid("angles must be finite".into()));
        }
        Ok(QaoaAngles { beta, gamma })
    }

    /// `p` layers all sharing the same pair of angles.
    pub fn uniform(p: usize, beta: f64, gamma: f64) -> Result<Self> {
        QaoaAngles::new(vec![beta; p], vec![gamma; p])
    }

    /// Annealing-like schedule: layer `j` gets `β = beta_start·(1 − t_j)` and
    /// `γ = gamma_end·t_j` with `t_j = (j + ½)/p`.
    pub fn ramp(p: usize, beta_start: f64, gamma_end: f64) -> Result<Self> {
        let t = |j: usize| (j as f64 + 0.5) / p as f64;
        QaoaAngles::new((0..p).map(|j| beta_start * (1.0 - t(j))).collect(), (0..p).map(|j| gamma_end * t(j)).collect())
    }

    pub fn p(&self) -> usize {
        self.beta.len()
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    /// Both angle vectors negated.
    pub fn negated(&self) -> Self {
        QaoaAngles {
            beta: self.beta.iter().map(|x| -x).collect(),
            gamma: self.gamma.iter().map(|x| -x).collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QaoaKsatProblem {
    pub k: usize,
    pub r: f64,
    pub angles: QaoaAngles,
}

impl QaoaKsatProblem {
    pub fn new(k: usize, r: f64, angles: QaoaAngles) -> Result<Self> {
        log2_width(k)?;
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Invalid(format!("r must be positive and finite, got {r}")));
        }
        Ok(QaoaKsatProblem { k, r, angles })
    }

    pub fn q(&self) -> u32 {
        self.k.trailing_zeros()
    }
}

/// `q` with `k = 2^q`, rejecting widths the analytic path cannot handle.
pub fn log2_width(k: usize) -> Result<u32> {
    if k < 2 || !k.is_power_of_two() || k > 256 {
        return Err(Error::Unsupported(format!("analytic exponent needs k = 2^q with 1 ≤ q ≤ 8, got {k}")));
    }
    Ok(k.trailing_zeros())
}

fn bit(s: usize, j: usize) -> bool {
    (s >> j) & 1 == 1
}

/// Mixer weights `b_s` over `s ∈ {0,1}^{2p+1}`; they sum to 1.
pub fn b_coeffs(angles: &QaoaAngles) -> Vec<C64> {
    let p = angles.p();
    let len = 2 * p + 1;
    let halves: Vec<(f64, f64)> = angles.beta.iter().map(|b| ((b / 2.0).cos(), (b / 2.0).sin())).collect();
    (0..1usize << len)
        .map(|s| {
            let mut v = C64::new(if bit(s, 0) != bit(s, p) { -0.5 } else { 0.5 }, 0.0);
            for (j, &(c, sn)) in halves.iter().enumerate() {
                for (x, y) in [(j, j + 1), (2 * p - j, 2 * p - j - 1)] {
                    v *= if bit(s, x) == bit(s, y) { C64::new(c, 0.0) } else { C64::new(0.0, sn) };
                }
            }
            v
        })
        .collect()
}

/// Couplings `c_J` for every subset mask `J` (entry 0 is the empty set).
pub fn c_coeffs(angles: &QaoaAngles, r: f64) -> Vec<C64> {
    let p = angles.p();
    let len = 2 * p + 1;
    let one = C64::new(1.0, 0.0);
    let factor = |j: usize| -> C64 {
        if j < p {
            C64::from_polar(1.0, -angles.gamma[j] / 2.0) - one
        } else if j > p {
            C64::from_polar(1.0, angles.gamma[2 * p - j] / 2.0) - one
        } else {
            -one
        }
    };
    let factors: Vec<C64> = (0..len).map(factor).collect();
    (0..1usize << len)
        .map(|mask| {
            (0..len).filter(|&j| bit(mask, j)).fold(C64::new(r, 0.0), |acc, j| acc * factors[j])
        })
        .collect()
}

/// Exponent of the factor pulled out in front of the sum:
/// `−2^{−k} r (1 + 4 Σ_j sin²(γ_j/4))`.
pub fn prefactor_exponent(k: usize, r: f64, angles: &QaoaAngles) -> f64 {
    let s: f64 = angles.gamma.iter().map(|g| (g / 4.0).sin().powi(2)).sum();
    -r * (1.0 + 4.0 * s) / 2f64.powi(k as i32)
}

/// One coupling row of the structured spec: `A_{·s} = ½·scale·1[s constant on mask]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CouplingEntry {
    pub mask: usize,
    pub c: C64,
    pub scale: C64,
}

/// The QAOA multinomial spec kept in factored form, so that `F` and `∇F`
/// cost `O(L·2^L)` through the subset-sum kernels instead of `O(4^L)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructuredSpec {
    q: u32,
    len: usize,
    b: Vec<C64>,
    entries: Vec<CouplingEntry>,
    weights: Vec<C64>,
}

impl StructuredSpec {
    fn from_parts(q: u32, len: usize, b: Vec<C64>, entries: Vec<CouplingEntry>) -> Self {
        let weights = entries.iter().map(|e| e.scale * principal_root(-e.c, q)).collect();
        StructuredSpec { q, len, b, entries, weights }
    }

    pub fn entries(&self) -> &[CouplingEntry] {
        &self.entries
    }

    pub fn b(&self) -> &[C64] {
        &self.b
    }

    /// Number of path positions, `2p + 1`.
    pub fn positions(&self) -> usize {
        self.len
    }

    /// Splits every coupling into two rephased copies (see [`mnsum::rephase`]).
    pub fn rephased(&self) -> Self {
        let means = sos_sum_s(&self.b);
        let mut entries = Vec::with_capacity(2 * self.entries.len());
        for (e, w) in self.entries.iter().zip(&self.weights) {
            let x = w * means[e.mask] * 0.5;
            if x.norm() == 0.0 {
                entries.push(*e);
                continue;
            }
            for mult in split_phases(x, self.q) {
                entries.push(CouplingEntry { scale: e.scale * mult, ..*e });
            }
        }
        StructuredSpec::from_parts(self.q, self.len, self.b.clone(), entries)
    }

    /// The same sum as an explicit [`MultinomialSpec`].
    pub fn to_dense(&self) -> Result<MultinomialSpec> {
        if self.len > 2 * MAX_DENSE_DEPTH + 1 {
            return Err(Error::Size(format!("dense spec limited to p ≤ {MAX_DENSE_DEPTH}")));
        }
        let a = self
            .entries
            .iter()
            .map(|e| {
                (0..self.b.len())
                    .map(|s| if constant_on(s, e.mask) { e.scale * 0.5 } else { C64::new(0.0, 0.0) })
                    .collect()
            })
            .collect();
        let c = self.entries.iter().map(|e| e.c).collect();
        MultinomialSpec::new(self.q, a, self.b.clone(), c)
    }
}

/// Structured form of the QAOA spec: couplings on every `|J| ≥ 2`.
pub fn build_structured(problem: &QaoaKsatProblem) -> Result<StructuredSpec> {
    let q = log2_width(problem.k)?;
    let p = problem.angles.p();
    if p > MAX_STRUCTURED_DEPTH {
        return Err(Error::Size(format!("p = {p} exceeds {MAX_STRUCTURED_DEPTH}")));
    }
    let len = 2 * p + 1;
    let c = c_coeffs(&problem.angles, problem.r);
    let entries = (0..1usize << len)
        .filter(|m| m.count_ones() >= 2)
        .map(|mask| CouplingEntry { mask, c: c[mask], scale: C64::new(1.0, 0.0) })
        .collect();
    Ok(StructuredSpec::from_parts(q, len, b_coeffs(&problem.angles), entries))
}

/// Dense [`MultinomialSpec`] for the problem (`p ≤ 4`).
pub fn build_spec(problem: &QaoaKsatProblem) -> Result<MultinomialSpec> {
    build_structured(problem)?.to_dense()
}

/// `F(z)` and `∇F(z)` through the subset-sum kernels; `z` is indexed like
/// [`StructuredSpec::entries`].
pub fn fast_f_and_grad(spec: &StructuredSpec, z: &[C64]) -> Result<(C64, Vec<C64>)> {
    check_dim(z, spec.entries.len())?;
    let mut u = vec![C64::new(0.0, 0.0); spec.b.len()];
    for ((e, w), z) in spec.entries.iter().zip(&spec.weights).zip(z) {
        u[e.mask] += w * z;
    }
    let lin: Vec<C64> = sos_sum_alpha(&u).into_iter().map(|x| x * 0.5).collect();
    let (f, weights, denom) = log_partition(&spec.b, &lin)?;
    let sums = sos_sum_s(&weights);
    let grad = spec
        .entries
        .iter()
        .zip(&spec.weights)
        .map(|(e, w)| w * sums[e.mask] * 0.5 / denom)
        .collect();
    Ok((f, grad))
}

impl ParentFunction for StructuredSpec {
    fn q(&self) -> u32 {
        self.q
    }

    fn dim(&self) -> usize {
        self.entries.len()
    }

    fn value_and_grad(&self, z: &[C64]) -> Result<(C64, Vec<C64>)> {
        fast_f_and_grad(self, z)
    }
}

/// Exponent of the instance-averaged success probability, plus solver diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct QaoaExponent {
    /// Natural-log exponent; its imaginary part should vanish.
    pub ln: C64,
    pub iterations: usize,
    pub residual: f64,
    /// Damping that finally converged.
    pub rho: f64,
}

impl QaoaExponent {
    pub fn log2(&self) -> f64 {
        self.ln.re / LN_2
    }
}

/// Serialized exponent record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentRecord {
    pub k: usize,
    pub p: usize,
    pub r: f64,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub exponent_ln: ReIm,
    pub exponent_log2: f64,
    pub iterations: usize,
    pub residual: f64,
}

impl ExponentRecord {
    pub fn new(problem: &QaoaKsatProblem, exp: &QaoaExponent) -> Self {
        ExponentRecord {
            k: problem.k,
            p: problem.angles.p(),
            r: problem.r,
            beta: problem.angles.beta.clone(),
            gamma: problem.angles.gamma.clone(),
            exponent_ln: exp.ln.into(),
            exponent_log2: exp.log2(),
            iterations: exp.iterations,
            residual: exp.residual,
        }
    }
}

/// Infinite-size exponent `lim (1/n) log E_σ[p_succ]`.
///
/// Runs the fixed-point iteration on the rephased spec with `opts.rho`; if
/// that does not converge, retries with progressively heavier damping.
pub fn qaoa_exponent(problem: &QaoaKsatProblem, opts: FixedPointOptions) -> Result<QaoaExponent> {
    let spec = build_structured(problem)?.rephased();
    let zero = vec![C64::new(0.0, 0.0); spec.dim()];
    let mut last = None;
    for rho in [opts.rho, 0.5, 0.8, 0.95] {
        if rho < opts.rho {
            continue;
        }
        let fp = mnsum::iterate(&spec, &zero, FixedPointOptions { rho, ..opts })?;
        if fp.converged {
            let inner = mnsum::scaling_exponent(&spec, &fp)?;
            let ln = inner + prefactor_exponent(problem.k, problem.r, &problem.angles);
            return Ok(QaoaExponent { ln, iterations: fp.iterations, residual: fp.residual, rho });
        }
        last = Some(fp);
    }
    let fp = last.expect("at least one attempt");
    Err(Error::NotConverged { iterations: fp.iterations, residual: fp.residual })
}

/// First-order-in-γ approximation of the exponent.
pub fn small_gamma_exponent(q: u32, r: f64, angles: &QaoaAngles) -> f64 {
    let k = 1u32 << q;
    let p = angles.p();
    let mut acc = 0.0;
    for j in 0..p {
        let tail: f64 = angles.beta[j..p].iter().sum();
        acc += angles.gamma[j]
            * (2f64.powi(q as i32 - 1) * tail).sin()
            * (tail / 2.0).cos().powi(k as i32);
    }
    -r / 2f64.powi(k as i32) - r * acc / 2f64.powi(k as i32)
}
