//! Random k-SAT instances: sampling, evaluation, brute-force satisfiability and
//! DIMACS I/O.
//!
//! Assignments over at most 64 variables are also addressed by integer index,
//! with bit `i` holding the value of `x_i`.

use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Largest variable count for which the 2^n enumerations are allowed.
pub const MAX_ENUMERATION_VARS: usize = 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub var: u32,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: u32) -> Self {
        Literal { var, negated: false }
    }

    pub fn neg(var: u32) -> Self {
        Literal { var, negated: true }
    }

    pub fn is_true(self, value: bool) -> bool {
        value != self.negated
    }
}

pub type Clause = Vec<Literal>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfInstance {
    pub n: usize,
    pub k: usize,
    pub clauses: Vec<Clause>,
}

/// Sidecar metadata written next to generated DIMACS files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub n: usize,
    pub k: usize,
    pub r: f64,
    pub seed: u64,
    pub m: usize,
    pub satisfiable: bool,
}

impl CnfInstance {
    pub fn new(n: usize, k: usize, clauses: Vec<Clause>) -> Result<Self> {
        for (j, cl) in clauses.iter().enumerate() {
            if cl.len() != k {
                return Err(Error::Invalid(format!("clause {j} has {} literals, expected {k}", cl.len())));
            }
            if let Some(l) = cl.iter().find(|l| l.var as usize >= n) {
                return Err(Error::Invalid(format!("clause {j} uses variable {} ≥ n = {n}", l.var)));
            }
        }
        Ok(CnfInstance { n, k, clauses })
    }

    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    /// Falsifying cube of each clause as `(fixed bits, their values)`, or
    /// `None` for a clause containing both `x` and `¬x`.
    fn falsifying_cubes(&self) -> impl Iterator<Item = Option<(u64, u64)>> + '_ {
        self.clauses.iter().map(|cl| {
            let mut mask = 0u64;
            let mut val = 0u64;
            for l in cl {
                let bit = 1u64 << l.var;
                let want = if l.negated { bit } else { 0 };
                if mask & bit != 0 && val & bit != want {
                    return None;
                }
                mask |= bit;
                val |= want;
            }
            Some((mask, val))
        })
    }

    fn enumeration_guard(&self) -> Result<()> {
        if self.n > MAX_ENUMERATION_VARS {
            return Err(Error::Size(format!("n = {} exceeds {MAX_ENUMERATION_VARS}", self.n)));
        }
        Ok(())
    }
}

/// Draws `m ~ Poisson(r n)` clauses of `k` literals, each literal uniform over
/// the `2n` signed variables, with replacement.
pub fn sample_instance(n: usize, k: usize, r: f64, seed: u64) -> CnfInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_instance_with(n, k, r, &mut rng)
}

pub fn sample_instance_with<R: Rng + ?Sized>(n: usize, k: usize, r: f64, rng: &mut R) -> CnfInstance {
    assert!(n >= 1 && k >= 1 && r >= 0.0, "need n ≥ 1, k ≥ 1, r ≥ 0");
    let lambda = r * n as f64;
    let m = if lambda > 0.0 {
        Poisson::new(lambda).expect("positive finite rate").sample(rng) as usize
    } else {
        0
    };
    let clauses = (0..m)
        .map(|_| {
            (0..k)
                .map(|_| Literal { var: rng.random_range(0..n as u32), negated: rng.random() })
                .collect()
        })
        .collect();
    CnfInstance { n, k, clauses }
}

/// Number of clauses whose literals are all false under `bits`.
pub fn unsat_count(instance: &CnfInstance, bits: &[bool]) -> usize {
    assert_eq!(bits.len(), instance.n, "assignment length must equal n");
    instance
        .clauses
        .iter()
        .filter(|cl| cl.iter().all(|l| !l.is_true(bits[l.var as usize])))
        .count()
}

/// [`unsat_count`] for an assignment given by integer index.
pub fn unsat_count_index(instance: &CnfInstance, y: u64) -> usize {
    instance
        .clauses
        .iter()
        .filter(|cl| cl.iter().all(|l| !l.is_true((y >> l.var) & 1 == 1)))
        .count()
}

/// Unsatisfied-clause count for every one of the `2^n` assignments.
///
/// Each clause falsifies one subcube, which is walked directly, so the cost is
/// `Σ_clauses 2^{n − distinct vars}` rather than `m·2^n`.
pub fn unsat_count_vector(instance: &CnfInstance) -> Result<Vec<u32>> {
    instance.enumeration_guard()?;
    let full = (1u64 << instance.n) - 1;
    let mut counts = vec![0u32; 1 << instance.n];
    for (mask, val) in instance.falsifying_cubes().flatten() {
        walk_subcube(full & !mask, |sub| counts[(val | sub) as usize] += 1);
    }
    Ok(counts)
}

fn walk_subcube(free: u64, mut f: impl FnMut(u64)) {
    let mut sub = free;
    loop {
        f(sub);
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & free;
    }
}

/// Number of satisfying assignments, by enumeration.
pub fn count_solutions(instance: &CnfInstance) -> Result<u64> {
    instance.enumeration_guard()?;
    let n = instance.n;
    let full = (1u64 << n) - 1;
    let mut falsified = vec![0u64; ((1usize << n) + 63) / 64];
    for (mask, val) in instance.falsifying_cubes().flatten() {
        walk_subcube(full & !mask, |sub| {
            let y = (val | sub) as usize;
            falsified[y / 64] |= 1 << (y % 64);
        });
    }
    let bad: u64 = falsified.iter().map(|w| w.count_ones() as u64).sum();
    Ok((1u64 << n) - bad)
}

pub fn is_satisfiable(instance: &CnfInstance) -> Result<bool> {
    Ok(count_solutions(instance)? > 0)
}

/// Satisfiability thresholds of random k-SAT for the widths used in the experiments.
pub fn threshold(k: usize) -> Result<f64> {
    match k {
        2 => Ok(1.0),
        4 => Ok(9.93),
        8 => Ok(176.54),
        10 => Ok(708.92),
        16 => Ok(45425.2),
        _ => Err(Error::Unsupported(format!("no tabulated threshold for k = {k}; pass r explicitly"))),
    }
}

const WIDTH_COMMENT: &str = "c width ";

/// DIMACS CNF text. A comment line records `k` so that empty instances and
/// mixed-width files survive a round trip.
pub fn write_dimacs(instance: &CnfInstance) -> String {
    let mut out = String::new();
    writeln!(out, "{WIDTH_COMMENT}{}", instance.k).unwrap();
    writeln!(out, "p cnf {} {}", instance.n, instance.m()).unwrap();
    for cl in &instance.clauses {
        for l in cl {
            let v = l.var as i64 + 1;
            write!(out, "{} ", if l.negated { -v } else { v }).unwrap();
        }
        out.push_str("0\n");
    }
    out
}

/// Parses DIMACS CNF. With `strict_k = Some(k)` every clause must have exactly
/// `k` literals; otherwise `k` is taken from the width comment if present, else
/// from the widest clause.
pub fn read_dimacs(text: &str, strict_k: Option<usize>) -> Result<CnfInstance> {
    let mut header: Option<(usize, usize)> = None;
    let mut width_hint = None;
    let mut clauses = Vec::new();
    let mut current: Clause = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix(WIDTH_COMMENT) {
            width_hint = rest.trim().parse::<usize>().ok();
            continue;
        }
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(Error::Parse { line: line_no, msg: "duplicate header".into() });
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parsed = match fields.as_slice() {
                ["p", "cnf", n, m] => n.parse().ok().zip(m.parse().ok()),
                _ => None,
            };
            header = Some(parsed.ok_or_else(|| Error::Parse {
                line: line_no,
                msg: format!("malformed header {line:?}"),
            })?);
            continue;
        }
        let (n, _) = header.ok_or_else(|| Error::Parse { line: line_no, msg: "clause before header".into() })?;
        for tok in line.split_whitespace() {
            let lit: i64 = tok.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad literal {tok:?}"),
            })?;
            if lit == 0 {
                if let Some(k) = strict_k {
                    if current.len() != k {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: format!("clause has {} literals, expected {k}", current.len()),
                        });
                    }
                }
                clauses.push(std::mem::take(&mut current));
                continue;
            }
            let var = lit.unsigned_abs() as usize;
            if var > n {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("variable {var} out of range 1..={n}"),
                });
            }
            current.push(Literal { var: (var - 1) as u32, negated: lit < 0 });
        }
    }
    let (n, m) = header.ok_or(Error::Parse { line: last_line, msg: "missing header".into() })?;
    if !current.is_empty() {
        return Err(Error::Parse { line: last_line, msg: "unterminated clause".into() });
    }
    if clauses.len() != m {
        return Err(Error::Parse {
            line: last_line,
            msg: format!("header declares {m} clauses, found {}", clauses.len()),
        });
    }
    let k = strict_k
        .or(width_hint)
        .unwrap_or_else(|| clauses.iter().map(Vec::len).max().unwrap_or(0));
    Ok(CnfInstance { n, k, clauses })
}
