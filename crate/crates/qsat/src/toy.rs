//! Warm-up model with cost `(Hamming weight)²` and one QAOA layer, where the
//! amplitude on `|0…0⟩` collapses to a single binomial sum and the saddle
//! point is one complex number.
//!
//! The phase angle is scaled as `γ = γ̃/n`.

use crate::mp::{factorials, MpC};
use crate::{Error, Result, C64};
use rug::ops::Pow;
use rug::Float;
use std::f64::consts::LN_2;

const MAX_ITER: usize = 10_000;

/// `(1/n) log` target accuracy that fixes the working precision of the sum.
const AGREEMENT: f64 = 1e-14;

fn amplitude_mp(n: usize, beta: f64, gamma: f64, prec: u32) -> MpC {
    let (s, c) = Float::with_val(prec, beta / 2.0).sin_cos(Float::new(prec));
    // (−i s)^k = |s|^k e^{∓iπk/2}; folding the sign of s into the phase makes
    // (β, γ) → (−β, −γ) negate every angle exactly, so the result conjugates
    // bit for bit.
    let sign: i32 = if s.is_sign_negative() { -1 } else { 1 };
    let s_abs = Float::with_val(prec, s.abs_ref());
    let fact = factorials(prec, n);
    let mut total = MpC::zero(prec);
    for k in 0..=n {
        let mut mag = Float::with_val(prec, &fact[n] / &fact[k]);
        mag /= &fact[n - k];
        mag *= Float::with_val(prec, (&c).pow((n - k) as u32));
        mag *= Float::with_val(prec, (&s_abs).pow(k as u32));
        let quarter_turns = [0, 1, 2, -1][k % 4] * sign;
        let mut angle = Float::with_val(prec, gamma) * (k as u64 * k as u64) as f64;
        angle += Float::with_val(prec, rug::float::Constant::Pi) * quarter_turns;
        angle /= -2i32;
        let (sa, ca) = angle.sin_cos(Float::new(prec));
        total.add_assign(&MpC { re: Float::with_val(prec, &mag * &ca), im: Float::with_val(prec, &mag * &sa) });
    }
    let norm = Float::with_val(prec, 2u32).pow(n as u32).sqrt();
    MpC { re: total.re / &norm, im: total.im / norm }
}

fn amplitude_converged(n: usize, beta: f64, gamma: f64) -> MpC {
    let spread = ((beta / 2.0).cos().abs() + (beta / 2.0).sin().abs()).log2();
    let mut prec = 96 + (n as f64 * spread).ceil() as u32;
    let mut prev = amplitude_mp(n, beta, gamma, prec);
    loop {
        prec += 64;
        let next = amplitude_mp(n, beta, gamma, prec);
        // Compare logarithms so exponentially small amplitudes are judged relatively.
        let same = next.is_zero() && prev.is_zero()
            || (!next.is_zero() && !prev.is_zero() && {
                let (a, b) = (prev.ln(), next.ln());
                (a.re - b.re).abs() < AGREEMENT && ((a.im - b.im).sin()).abs() < AGREEMENT
            });
        if same || prec > 64 * 1024 {
            return next;
        }
        prev = next;
    }
}

/// `⟨0…0| e^{−iβ H_B/2} e^{−iγ H_C/2} |+…+⟩` with `H_C = (Hamming weight)²`.
pub fn amplitude_exact(n: usize, beta: f64, gamma: f64) -> C64 {
    amplitude_converged(n, beta, gamma).to_c64()
}

/// Principal logarithm of [`amplitude_exact`], valid where the amplitude
/// itself would underflow. Returns `−∞` real part for an exactly zero amplitude.
pub fn amplitude_exact_ln(n: usize, beta: f64, gamma: f64) -> C64 {
    let v = amplitude_converged(n, beta, gamma);
    if v.is_zero() {
        return C64::new(f64::NEG_INFINITY, 0.0);
    }
    v.ln()
}

/// `√(−iγ̃/2)`, principal branch.
fn rate(gamma_tilde: f64) -> C64 {
    (C64::new(0.0, -gamma_tilde / 2.0)).sqrt()
}

fn toy_map(theta: C64, beta: f64, gamma_tilde: f64) -> C64 {
    let (s, c) = ((beta / 2.0).sin(), (beta / 2.0).cos());
    let e = (theta * rate(gamma_tilde)).exp();
    let i = C64::i();
    -i * C64::new(0.0, -2.0 * gamma_tilde).sqrt() * s * e / (c - i * s * e)
}

/// Saddle point `θ*` of the toy exponent, by plain iteration from 0.
pub fn toy_fixed_point(beta: f64, gamma_tilde: f64, eps: f64) -> Result<C64> {
    if !(eps > 0.0) {
        return Err(Error::Invalid("eps must be positive".into()));
    }
    let mut theta = C64::new(0.0, 0.0);
    for it in 1..=MAX_ITER {
        let next = toy_map(theta, beta, gamma_tilde);
        if !(next.re.is_finite() && next.im.is_finite()) {
            return Err(Error::Divergence { iterations: it, last_finite: vec![theta] });
        }
        let step = (next - theta).norm();
        theta = next;
        if step < eps {
            return Ok(theta);
        }
    }
    Err(Error::NotConverged { iterations: MAX_ITER, residual: (toy_map(theta, beta, gamma_tilde) - theta).norm() })
}

/// `Φ(θ) = −log2/2 − iβ/2 − θ²/4 + log(e^{iβ/2}(cos β/2 − i sin β/2 · e^{θ√(−iγ̃/2)}))`.
pub fn toy_phi(theta: C64, beta: f64, gamma_tilde: f64) -> C64 {
    let i = C64::i();
    let (s, c) = ((beta / 2.0).sin(), (beta / 2.0).cos());
    let inner = C64::from_polar(1.0, beta / 2.0) * (c - i * s * (theta * rate(gamma_tilde)).exp());
    -LN_2 / 2.0 - i * beta / 2.0 - theta * theta / 4.0 + inner.ln()
}

/// `Φ(θ*)`, the growth rate of `(1/n) log` of the raw amplitude.
pub fn toy_phi_at_fixed_point(beta: f64, gamma_tilde: f64) -> Result<C64> {
    let theta = toy_fixed_point(beta, gamma_tilde, 1e-13)?;
    Ok(toy_phi(theta, beta, gamma_tilde))
}

/// `iβ/2 + Φ(θ*)`: the limit of `(1/n) log(e^{iβn/2} amplitude)`, i.e. the
/// exponent with the trivial mixer phase removed.
pub fn toy_exponent(beta: f64, gamma_tilde: f64) -> Result<C64> {
    Ok(C64::new(0.0, beta / 2.0) + toy_phi_at_fixed_point(beta, gamma_tilde)?)
}

/// `−log2/2 + (i/2) sin²(β/2) e^{iβ} γ̃`, the first-order expansion of [`toy_exponent`].
pub fn toy_exponent_first_order(beta: f64, gamma_tilde: f64) -> C64 {
    C64::new(-LN_2 / 2.0, 0.0)
        + C64::i() * 0.5 * (beta / 2.0).sin().powi(2) * C64::from_polar(1.0, beta) * gamma_tilde
}
