use super::{principal_root, MultinomialSpec};
use crate::C64;
use std::f64::consts::PI;

/// Distance from the edge ray below which a coupling is treated as on it.
const EDGE_TOL: f64 = 1e-12;

/// Splits `arg x` into `θ + m·π/2^{q−1}` with `θ ∈ (−π/2^q, π/2^q]`.
pub fn coupling_angle(x: C64, q: u32) -> (f64, i64) {
    let half = PI / (1u64 << q) as f64;
    let period = 2.0 * half;
    let arg = x.arg();
    let mut m = ((arg - half) / period).ceil();
    let mut theta = arg - m * period;
    if theta <= -half + EDGE_TOL {
        theta += period;
        m -= 1.0;
    }
    (theta, m as i64)
}

/// Multipliers `e^{iφ_i} / (e^{2^q iφ_0} + e^{2^q iφ_1})^{1/2^q}` for the two
/// copies of a coupling whose effective value is `x`.
///
/// Raising either multiplier to `2^q` and summing gives exactly 1, so the
/// split never changes the sum; the phases are chosen so that both copies end
/// up strictly inside the sector `|arg| < π/2^q`.
pub fn split_phases(x: C64, q: u32) -> [C64; 2] {
    let half = PI / (1u64 << q) as f64;
    let period = 2.0 * half;
    let (theta, m) = coupling_angle(x, q);
    let base = -(m as f64) * period;
    let (phi0, phi1) = if (theta - half).abs() < EDGE_TOL {
        let nudge = half / 4.0;
        (base - nudge, base - period + nudge)
    } else {
        (base, base)
    };
    let k = (1i32 << q) as f64;
    let denom = principal_root(C64::from_polar(1.0, k * phi0) + C64::from_polar(1.0, k * phi1), q);
    [C64::from_polar(1.0, phi0) / denom, C64::from_polar(1.0, phi1) / denom]
}

/// Doubles every coupling row into two rephased copies. See [`rephase_report`].
pub fn rephase(spec: &MultinomialSpec) -> MultinomialSpec {
    rephase_report(spec).0
}

/// Rephased spec plus the indices of rows left untouched because their
/// effective coupling `w_α Σ_s b_s A_{αs}` vanishes (no angle to fix).
pub fn rephase_report(spec: &MultinomialSpec) -> (MultinomialSpec, Vec<usize>) {
    let w = spec.root_couplings();
    let means = spec.row_means();
    let mut a = Vec::with_capacity(2 * spec.a_count());
    let mut c = Vec::with_capacity(2 * spec.a_count());
    let mut untouched = Vec::new();
    for (alpha, row) in spec.a.iter().enumerate() {
        let x = w[alpha] * means[alpha];
        if x.norm() == 0.0 {
            untouched.push(alpha);
            a.push(row.clone());
            c.push(spec.c[alpha]);
            continue;
        }
        for mult in split_phases(x, spec.q) {
            a.push(row.iter().map(|v| v * mult).collect());
            c.push(spec.c[alpha]);
        }
    }
    let out = MultinomialSpec { q: spec.q, a, b: spec.b.clone(), c };
    (out, untouched)
}
