//! Sum-over-subsets kernels over bitmask-indexed vectors.
//!
//! Both return unweighted sums; callers apply the `½` carried by the
//! coupling matrix of the QAOA spec.

use crate::C64;

fn check_len(len: usize) -> usize {
    assert!(len >= 2 && len.is_power_of_two(), "length must be 2^L with L ≥ 1, got {len}");
    len.trailing_zeros() as usize
}

/// `out[s] = Σ_{t ⊆ s} v[t]`.
fn subset_zeta(v: &[C64]) -> Vec<C64> {
    let bits = check_len(v.len());
    let mut f = v.to_vec();
    for i in 0..bits {
        let bit = 1 << i;
        for s in 0..f.len() {
            if s & bit != 0 {
                f[s] = f[s] + f[s ^ bit];
            }
        }
    }
    f
}

/// `out[s] = Σ_{t ⊇ s} v[t]`.
fn superset_zeta(v: &[C64]) -> Vec<C64> {
    let bits = check_len(v.len());
    let mut g = v.to_vec();
    for i in 0..bits {
        let bit = 1 << i;
        for s in 0..g.len() {
            if s & bit == 0 {
                g[s] = g[s] + g[s | bit];
            }
        }
    }
    g
}

/// For every bitstring `s`, the sum of `v_α` over masks `α` on which `s` is
/// constant: `Σ_{α ⊆ zeros(s)} v_α + Σ_{α ⊆ ones(s)} v_α − v_∅`.
pub fn sos_sum_alpha(v: &[C64]) -> Vec<C64> {
    let full = v.len() - 1;
    let f = subset_zeta(v);
    (0..v.len()).map(|s| f[s] + f[full & !s] - v[0]).collect()
}

/// For every mask `α`, the sum of `v_s` over bitstrings `s` constant on `α`:
/// `Σ_{s ⊇ α} v_s + Σ_{s ∩ α = ∅} v_s`, with the total subtracted once at
/// `α = ∅` where both families cover every `s`.
pub fn sos_sum_s(v: &[C64]) -> Vec<C64> {
    let full = v.len() - 1;
    let f = subset_zeta(v);
    let g = superset_zeta(v);
    let mut out: Vec<C64> = (0..v.len()).map(|a| g[a] + f[full & !a]).collect();
    out[0] -= f[full];
    out
}

/// Quadratic-time reference for [`sos_sum_alpha`].
pub fn sos_sum_alpha_naive(v: &[C64]) -> Vec<C64> {
    (0..v.len())
        .map(|s| {
            let mut acc = C64::new(0.0, 0.0);
            for (a, va) in v.iter().enumerate() {
                if constant_on(s, a) {
                    acc += va;
                }
            }
            acc
        })
        .collect()
}

/// Quadratic-time reference for [`sos_sum_s`].
pub fn sos_sum_s_naive(v: &[C64]) -> Vec<C64> {
    (0..v.len())
        .map(|a| {
            let mut acc = C64::new(0.0, 0.0);
            for (s, vs) in v.iter().enumerate() {
                if constant_on(s, a) {
                    acc += vs;
                }
            }
            acc
        })
        .collect()
}

/// Whether bitstring `s` takes a single value on the positions in `mask`.
pub fn constant_on(s: usize, mask: usize) -> bool {
    s & mask == 0 || s & mask == mask
}
