//! Generalized multinomial sums
//!
//! ```text
//! S(n) = Σ_{Σ n_s = n} multinomial(n; n_s) Π_s b_s^{n_s} · exp(n Σ_α c_α ((1/n) Σ_s A_{αs} n_s)^{2^q})
//! ```
//!
//! evaluated either directly (small `n`) or through the exponential growth
//! rate `lim (1/n) log S(n)`, which is determined by a fixed point of the
//! parent function `F(z) = log Σ_s b_s exp(Σ_α A_{αs} w_α z_α)` with
//! `w_α = (−c_α)^{1/2^q}` on the principal branch.

mod fixed_point;
mod rephase;

pub use fixed_point::{
    fixed_point_damped, fixed_point_small_c, iterate, scaling_exponent, scaling_exponent_forms,
    ExponentForms, FixedPointOptions, FixedPointResult,
};
pub use rephase::{coupling_angle, rephase, rephase_report, split_phases};

use crate::{Error, ReIm, Result, C64};
use serde::{Deserialize, Serialize};

/// Guard on the number of compositions [`direct_sum`] will enumerate.
pub const MAX_COMPOSITIONS: f64 = 1e8;

const NORMALIZATION_TOL: f64 = 1e-12;
const SINGULAR_TOL: f64 = 1e-14;

/// Data of one generalized multinomial sum.
///
/// `a` is stored row-major over the coupling index (rows `α`, columns `s`).
#[derive(Clone, Debug, PartialEq)]
pub struct MultinomialSpec {
    q: u32,
    a: Vec<Vec<C64>>,
    b: Vec<C64>,
    c: Vec<C64>,
}

impl MultinomialSpec {
    pub fn new(q: u32, a: Vec<Vec<C64>>, b: Vec<C64>, c: Vec<C64>) -> Result<Self> {
        if q == 0 || q > 8 {
            return Err(Error::Invalid(format!("q must lie in 1..=8, got {q}")));
        }
        if b.is_empty() || c.is_empty() {
            return Err(Error::Invalid("index sets must be nonempty".into()));
        }
        if a.len() != c.len() {
            return Err(Error::Invalid(format!("A has {} rows but c has {} entries", a.len(), c.len())));
        }
        if let Some(row) = a.iter().find(|row| row.len() != b.len()) {
            return Err(Error::Invalid(format!("A row has {} columns, expected {}", row.len(), b.len())));
        }
        let total: C64 = b.iter().sum();
        if (total - 1.0).norm() > NORMALIZATION_TOL {
            return Err(Error::Invalid(format!("weights b must sum to 1, got {total}")));
        }
        let finite = |z: &C64| z.re.is_finite() && z.im.is_finite();
        if !(a.iter().flatten().all(finite) && b.iter().all(finite) && c.iter().all(finite)) {
            return Err(Error::Invalid("non-finite entry in spec".into()));
        }
        Ok(MultinomialSpec { q, a, b, c })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// The power `2^q` applied to each linear form.
    pub fn power(&self) -> u32 {
        1 << self.q
    }

    pub fn s_count(&self) -> usize {
        self.b.len()
    }

    pub fn a_count(&self) -> usize {
        self.c.len()
    }

    pub fn a(&self) -> &[Vec<C64>] {
        &self.a
    }

    pub fn b(&self) -> &[C64] {
        &self.b
    }

    pub fn c(&self) -> &[C64] {
        &self.c
    }

    /// Copy with every coupling multiplied by `t`.
    pub fn scale_c(&self, t: f64) -> Self {
        MultinomialSpec { c: self.c.iter().map(|c| c * t).collect(), ..self.clone() }
    }

    /// `w_α = (−c_α)^{1/2^q}`, principal branch.
    pub fn root_couplings(&self) -> Vec<C64> {
        self.c.iter().map(|&c| principal_root(-c, self.q)).collect()
    }

    /// `Σ_s b_s A_{αs}` for every row.
    pub fn row_means(&self) -> Vec<C64> {
        self.a.iter().map(|row| row.iter().zip(&self.b).map(|(a, b)| a * b).sum()).collect()
    }
}

/// Principal `2^q`-th root. A zero imaginary part is treated as `+0`, so the
/// negative real axis maps to argument `+π/2^q` regardless of the sign bit.
pub fn principal_root(z: C64, q: u32) -> C64 {
    let mut w = C64::new(z.re, if z.im == 0.0 { 0.0 } else { z.im });
    for _ in 0..q {
        w = w.sqrt();
    }
    w
}

/// Anything that can report `F(z)` and `∇F(z)` for the fixed-point solvers.
pub trait ParentFunction {
    fn q(&self) -> u32;
    fn dim(&self) -> usize;
    fn value_and_grad(&self, z: &[C64]) -> Result<(C64, Vec<C64>)>;
}

impl ParentFunction for MultinomialSpec {
    fn q(&self) -> u32 {
        self.q
    }

    fn dim(&self) -> usize {
        self.a_count()
    }

    fn value_and_grad(&self, z: &[C64]) -> Result<(C64, Vec<C64>)> {
        check_dim(z, self.a_count())?;
        let w = self.root_couplings();
        let wz: Vec<C64> = w.iter().zip(z).map(|(w, z)| w * z).collect();
        let lin: Vec<C64> = (0..self.s_count())
            .map(|s| self.a.iter().zip(&wz).map(|(row, wz)| row[s] * wz).sum())
            .collect();
        let (f, weights, denom) = log_partition(&self.b, &lin)?;
        let grad = self
            .a
            .iter()
            .zip(&w)
            .map(|(row, w)| {
                let num: C64 = row.iter().zip(&weights).map(|(a, e)| a * e).sum();
                w * num / denom
            })
            .collect();
        Ok((f, grad))
    }
}

pub(crate) fn check_dim(z: &[C64], expected: usize) -> Result<()> {
    if z.len() != expected {
        return Err(Error::Invalid(format!("z has length {}, expected {expected}", z.len())));
    }
    Ok(())
}

/// `log Σ_s b_s exp(lin_s)` with a real shift for stability. Also returns the
/// shifted weights `b_s exp(lin_s − shift)` and their sum, which gradient
/// computations reuse.
pub(crate) fn log_partition(b: &[C64], lin: &[C64]) -> Result<(C64, Vec<C64>, C64)> {
    let shift = b
        .iter()
        .zip(lin)
        .filter(|(b, _)| **b != C64::new(0.0, 0.0))
        .map(|(_, l)| l.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let shift = if shift.is_finite() { shift } else { 0.0 };
    let weights: Vec<C64> = b.iter().zip(lin).map(|(b, l)| b * (l - shift).exp()).collect();
    let mut acc = CompensatedSum::default();
    for e in &weights {
        acc.add(*e);
    }
    let denom = acc.value();
    let log_abs = denom.norm().ln() + shift;
    if !(log_abs >= SINGULAR_TOL.ln()) {
        return Err(Error::Singular(log_abs.exp()));
    }
    Ok((denom.ln() + shift, weights, denom))
}

/// `F(z)`.
pub fn f_value(spec: &MultinomialSpec, z: &[C64]) -> Result<C64> {
    Ok(spec.value_and_grad(z)?.0)
}

/// `∇F(z)`.
pub fn f_grad(spec: &MultinomialSpec, z: &[C64]) -> Result<Vec<C64>> {
    Ok(spec.value_and_grad(z)?.1)
}

/// Leading small-coupling approximation of the exponent,
/// `Σ_α c_α (Σ_s b_s A_{αs})^{2^q}`.
pub fn small_c_exponent(spec: &MultinomialSpec) -> C64 {
    let k = spec.power() as i32;
    spec.c.iter().zip(spec.row_means()).map(|(c, m)| c * m.powi(k)).sum()
}

/// `S(n)` by enumerating every composition of `n`.
pub fn direct_sum(spec: &MultinomialSpec, n: usize) -> Result<C64> {
    Ok(direct_sum_ln(spec, n)?.exp())
}

/// Principal logarithm of `S(n)`, computed without forming the (possibly
/// over- or underflowing) value itself.
pub fn direct_sum_ln(spec: &MultinomialSpec, n: usize) -> Result<C64> {
    if n == 0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let parts = spec.s_count();
    let count = composition_count(n, parts);
    if count > MAX_COMPOSITIONS {
        return Err(Error::Size(format!(
            "{count:.3e} compositions of {n} into {parts} parts exceeds {MAX_COMPOSITIONS:e}"
        )));
    }
    let log_fact: Vec<f64> = std::iter::once(0.0)
        .chain((1..=n).scan(0.0, |acc, i| {
            *acc += (i as f64).ln();
            Some(*acc)
        }))
        .collect();
    let log_b: Vec<Option<C64>> =
        spec.b.iter().map(|b| if b.norm() == 0.0 { None } else { Some(b.ln()) }).collect();
    let k = spec.power() as i32;
    let nf = n as f64;

    let mut acc = CompensatedSum::default();
    let mut shift = f64::NEG_INFINITY;
    let mut counts = vec![0usize; parts];
    for_each_composition(n, &mut counts, &mut |counts| {
        let mut lt = C64::new(log_fact[n], 0.0);
        for (s, &m) in counts.iter().enumerate() {
            if m == 0 {
                continue;
            }
            match log_b[s] {
                Some(lb) => lt += lb * m as f64 - log_fact[m],
                None => return,
            }
        }
        for (row, c) in spec.a.iter().zip(&spec.c) {
            let mean: C64 = row.iter().zip(counts.iter()).map(|(a, &m)| a * m as f64).sum::<C64>() / nf;
            lt += c * nf * mean.powi(k);
        }
        if lt.re > shift {
            if shift.is_finite() {
                acc.scale((shift - lt.re).exp());
            }
            shift = lt.re;
        }
        acc.add(C64::new(lt.re - shift, lt.im).exp());
    });
    let total = acc.value();
    if total.norm() == 0.0 || !shift.is_finite() {
        return Ok(C64::new(f64::NEG_INFINITY, 0.0));
    }
    Ok(total.ln() + shift)
}

fn composition_count(n: usize, parts: usize) -> f64 {
    // C(n + parts − 1, parts − 1) in floating point.
    let k = parts - 1;
    (1..=k).fold(1.0, |acc, i| acc * (n + i) as f64 / i as f64)
}

fn for_each_composition(n: usize, counts: &mut [usize], f: &mut impl FnMut(&[usize])) {
    fn rec(pos: usize, remaining: usize, counts: &mut [usize], f: &mut impl FnMut(&[usize])) {
        if pos + 1 == counts.len() {
            counts[pos] = remaining;
            f(counts);
            return;
        }
        for m in 0..=remaining {
            counts[pos] = m;
            rec(pos + 1, remaining - m, counts, f);
        }
    }
    rec(0, n, counts, f);
}

/// Neumaier-compensated complex accumulator.
#[derive(Clone, Copy, Default, Debug)]
pub(crate) struct CompensatedSum {
    sum: C64,
    comp: C64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: C64) {
        let (re, cre) = two_sum(self.sum.re, x.re);
        let (im, cim) = two_sum(self.sum.im, x.im);
        self.sum = C64::new(re, im);
        self.comp += C64::new(cre, cim);
    }

    pub fn scale(&mut self, f: f64) {
        self.sum *= f;
        self.comp *= f;
    }

    pub fn value(&self) -> C64 {
        self.sum + self.comp
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = if a.abs() >= b.abs() { (a - s) + b } else { (b - s) + a };
    (s, err)
}

/// JSON form of a spec, with complex entries as `{re, im}` pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpecDocument {
    pub q: u32,
    pub a: Vec<Vec<ReIm>>,
    pub b: Vec<ReIm>,
    pub c: Vec<ReIm>,
}

impl From<&MultinomialSpec> for SpecDocument {
    fn from(spec: &MultinomialSpec) -> Self {
        let conv = |v: &[C64]| v.iter().map(|&z| ReIm::from(z)).collect::<Vec<_>>();
        SpecDocument {
            q: spec.q,
            a: spec.a.iter().map(|row| conv(row)).collect(),
            b: conv(&spec.b),
            c: conv(&spec.c),
        }
    }
}

impl TryFrom<SpecDocument> for MultinomialSpec {
    type Error = Error;

    fn try_from(doc: SpecDocument) -> Result<Self> {
        let conv = |v: Vec<ReIm>| v.into_iter().map(C64::from).collect::<Vec<_>>();
        MultinomialSpec::new(doc.q, doc.a.into_iter().map(conv).collect(), conv(doc.b), conv(doc.c))
    }
}

impl MultinomialSpec {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&SpecDocument::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<SpecDocument>(text)?.try_into()
    }
}
