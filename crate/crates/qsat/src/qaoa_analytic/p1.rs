//! Exact instance-averaged success probability of one-layer QAOA at finite `n`.
//!
//! The sum runs over compositions `n_a + n_b + n_c + n_d = n`. Its terms
//! have magnitudes up to `(1 + |sin β|)^n` times the result and alternate in
//! phase, so it is evaluated in MPFR arithmetic with the precision raised
//! until two successive evaluations agree.

use crate::mp::{factorials, MpC};
use crate::{Error, Result};
use rug::ops::Pow;
use rug::{Assign, Float};

const AGREEMENT: f64 = 1e-14;
const MAX_ROUNDS: usize = 8;

fn validate(k: usize, n: usize, r: f64, beta: f64, gamma: f64) -> Result<()> {
    if k == 0 || n == 0 {
        return Err(Error::Invalid("need k ≥ 1 and n ≥ 1".into()));
    }
    if k > 64 {
        return Err(Error::Unsupported(format!("clause width {k} is beyond the supported range")));
    }
    if !(r >= 0.0 && r.is_finite() && beta.is_finite() && gamma.is_finite()) {
        return Err(Error::Invalid("r must be finite and non-negative, angles finite".into()));
    }
    Ok(())
}

/// Returns the sum and `Σ |term|` in f64, which bounds the rounding error of
/// the MPFR evaluation up to a factor of order `n · 2^{-prec}`.
fn evaluate(k: usize, n: usize, r: f64, beta: f64, gamma: f64, prec: u32) -> (MpC, f64) {
    let fl = |x: f64| Float::with_val(prec, x);
    let (sin_half, cos_half) = fl(beta / 2.0).sin_cos(Float::new(prec));
    let same = Float::with_val(prec, cos_half.square_ref());
    let flip = Float::with_val(prec, sin_half.square_ref());
    let cross = Float::with_val(prec, &sin_half * &cos_half);
    let up = MpC { re: Float::new(prec), im: cross.clone() };
    let down = MpC { re: Float::new(prec), im: -cross };

    let (sin_g2, cos_g2) = fl(gamma / 2.0).sin_cos(Float::new(prec));
    let one_minus_cos = Float::with_val(prec, 1 - &cos_g2);
    // 4 sin²(γ/4) = 2(1 − cos(γ/2))
    let diag = Float::with_val(prec, &one_minus_cos * 2u32);
    let b_minus = MpC { re: one_minus_cos.clone(), im: sin_g2.clone() };
    let b_plus = MpC { re: one_minus_cos, im: -sin_g2 };

    let rn = Float::with_val(prec, fl(r) * n as u32);
    let frac: Vec<Float> = (0..=n)
        .map(|t| {
            let x = Float::with_val(prec, Float::with_val(prec, t as u32) / (2 * n) as u32);
            x.pow(k as u32)
        })
        .collect();
    let weight = |t: usize| Float::with_val(prec, &rn * &frac[t]);
    let e_pair: Vec<Float> = (0..=n).map(|t| Float::with_val(prec, weight(t) * &diag).exp()).collect();
    let e_all: Vec<Float> = (0..=n).map(|t| Float::with_val(prec, -(weight(t) * &diag)).exp()).collect();
    let e_minus: Vec<MpC> = (0..=n).map(|t| b_minus.scale(&weight(t)).exp()).collect();
    let e_plus: Vec<MpC> = (0..=n).map(|t| b_plus.scale(&weight(t)).exp()).collect();

    let fact = factorials(prec, n);
    let pow_table = |base: &MpC| {
        let mut out = vec![MpC::from_real(fl(1.0))];
        for i in 1..=n {
            out.push(out[i - 1].mul(base));
        }
        out
    };
    let up_pow = pow_table(&up);
    let down_pow = pow_table(&down);
    let mut same_pow = vec![fl(1.0)];
    let mut flip_pow = vec![fl(1.0)];
    for i in 1..=n {
        same_pow.push(Float::with_val(prec, &same_pow[i - 1] * &same));
        flip_pow.push(Float::with_val(prec, &flip_pow[i - 1] * &flip));
    }

    let mut total = MpC::zero(prec);
    let mut conv = MpC::zero(prec);
    let mut magnitude = 0.0f64;
    let abs = |z: &MpC| z.re.to_f64().hypot(z.im.to_f64());
    for na in 0..=n {
        let rest = n - na;
        let ys: Vec<MpC> = (0..=rest)
            .map(|nc| up_pow[nc].mul(&e_minus[na + nc]).scale(&Float::with_val(prec, 1 / &fact[nc])))
            .collect();
        let zs: Vec<MpC> = (0..=rest)
            .map(|nd| down_pow[nd].mul(&e_plus[na + nd]).scale(&Float::with_val(prec, 1 / &fact[nd])))
            .collect();
        let ys_abs: Vec<f64> = ys.iter().map(abs).collect();
        let zs_abs: Vec<f64> = zs.iter().map(abs).collect();
        for nb in 0..=rest {
            let m = rest - nb;
            conv.re.assign(0);
            conv.im.assign(0);
            let mut conv_abs = 0.0;
            for nc in 0..=m {
                conv.add_mul(&ys[nc], &zs[m - nc]);
                conv_abs += ys_abs[nc] * zs_abs[m - nc];
            }
            let mut x = Float::with_val(prec, &fact[n] / &fact[na]);
            x /= &fact[nb];
            x *= &same_pow[na];
            x *= &flip_pow[nb];
            x *= &e_pair[na + nb];
            x *= &e_all[na];
            magnitude += x.to_f64().abs() * conv_abs;
            total.add_assign(&conv.scale(&x));
        }
    }
    let baseline = Float::with_val(
        prec,
        -(fl(r) * n as u32) * Float::with_val(prec, 1 + &diag) / Float::with_val(prec, 2u32).pow(k as u32),
    );
    let scale = baseline.exp();
    magnitude *= scale.to_f64();
    (total.scale(&scale), magnitude)
}

fn converged_value(k: usize, n: usize, r: f64, beta: f64, gamma: f64) -> Result<MpC> {
    validate(k, n, r, beta, gamma)?;
    let growth = (1.0 + beta.sin().abs()).log2();
    let mut prec = 96 + (n as f64 * growth).ceil() as u32;
    let mut prev: Option<MpC> = None;
    for _ in 0..MAX_ROUNDS {
        let (next, magnitude) = evaluate(k, n, r, beta, gamma, prec);
        if next.is_zero() && magnitude == 0.0 {
            return Ok(next);
        }
        let value = next.to_c64().norm();
        let bound = 8.0 * (n + 4) as f64 * magnitude * 2f64.powi(-(prec as i32));
        if bound.is_finite() && value > 0.0 && bound <= AGREEMENT * value {
            return Ok(next);
        }
        // The f64 bound can overflow or underflow at extreme parameters; then
        // fall back to comparing successive precisions.
        if let Some(p) = &prev {
            let diff = (p.to_c64() - next.to_c64()).norm();
            if diff <= AGREEMENT * value || (next.is_zero() && p.is_zero()) {
                return Ok(next);
            }
        }
        let deficit = if bound.is_finite() && value > 0.0 { (bound / (AGREEMENT * value)).log2().ceil() as u32 } else { 0 };
        prec += deficit.max(48) + 16;
        prev = Some(next);
    }
    Err(Error::Inconsistent("exact one-layer sum did not stabilise with precision".into()))
}

fn real_part_checked(v: &MpC) -> Result<()> {
    let z = v.to_c64();
    if z.im.abs() > 1e-9 * z.norm() {
        return Err(Error::Inconsistent(format!("averaged probability has imaginary part {z}")));
    }
    Ok(())
}

/// `E_σ[p_succ]` over random k-SAT with `m ~ Poisson(r n)` clauses, for one
/// QAOA layer with angles `(β, γ)`. Any clause width `k ≥ 1` is accepted.
pub fn p1_exact(k: usize, n: usize, r: f64, beta: f64, gamma: f64) -> Result<f64> {
    let v = converged_value(k, n, r, beta, gamma)?;
    real_part_checked(&v)?;
    Ok(v.re.to_f64())
}

/// Natural log of [`p1_exact`], exact even where the probability underflows.
pub fn p1_exact_ln(k: usize, n: usize, r: f64, beta: f64, gamma: f64) -> Result<f64> {
    let v = converged_value(k, n, r, beta, gamma)?;
    real_part_checked(&v)?;
    if v.re <= 0 {
        return Err(Error::Inconsistent(format!("non-positive probability at n = {n}")));
    }
    Ok(v.re.clone().ln().to_f64())
}

/// `log(E[p_succ](n + 1) / E[p_succ](n))`.
pub fn local_scaling_exponent(k: usize, n: usize, r: f64, beta: f64, gamma: f64) -> Result<f64> {
    Ok(p1_exact_ln(k, n + 1, r, beta, gamma)? - p1_exact_ln(k, n, r, beta, gamma)?)
}
