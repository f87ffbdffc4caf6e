use super::{check_dim, MultinomialSpec, ParentFunction};
use crate::{Error, Result, C64};

/// Magnitude below which the residual switches from relative to absolute.
const ABSOLUTE_BELOW: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixedPointOptions {
    pub eps: f64,
    pub n_iter: usize,
    /// Weight kept on the previous iterate; 0 is the plain iteration.
    pub rho: f64,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        FixedPointOptions { eps: 1e-10, n_iter: 1000, rho: 0.0 }
    }
}

impl FixedPointOptions {
    pub fn damped(rho: f64) -> Self {
        FixedPointOptions { rho, ..Default::default() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixedPointResult {
    pub z: Vec<C64>,
    pub iterations: usize,
    /// Largest per-component relative gap between `z` and its image under the map.
    pub residual: f64,
    pub converged: bool,
}

/// Image of `z` under `z_α ↦ 2^q (−∂_α F(z))^{2^q − 1}`.
fn proposal(q: u32, grad: &[C64]) -> Vec<C64> {
    let k = 1i32 << q;
    grad.iter().map(|g| (-g).powi(k - 1) * k as f64).collect()
}

fn residual(z: &[C64], prop: &[C64]) -> f64 {
    z.iter()
        .zip(prop)
        .map(|(z, p)| {
            let gap = (z - p).norm();
            let mag = z.norm();
            if mag < ABSOLUTE_BELOW {
                gap
            } else {
                gap / mag
            }
        })
        .fold(0.0, f64::max)
}

/// Damped fixed-point iteration on any parent function.
///
/// The returned `z` is the last iterate at which the residual was measured,
/// so `converged` certifies that very vector.
pub fn iterate<P: ParentFunction + ?Sized>(
    f: &P,
    z_init: &[C64],
    opts: FixedPointOptions,
) -> Result<FixedPointResult> {
    check_dim(z_init, f.dim())?;
    if opts.n_iter == 0 || !(opts.eps > 0.0) {
        return Err(Error::Invalid("need n_iter ≥ 1 and eps > 0".into()));
    }
    if !(0.0..1.0).contains(&opts.rho) {
        return Err(Error::Invalid(format!("damping must lie in [0, 1), got {}", opts.rho)));
    }
    let mut z = z_init.to_vec();
    let mut res = f64::INFINITY;
    for it in 1..=opts.n_iter {
        let (_, grad) = f.value_and_grad(&z)?;
        let prop = proposal(f.q(), &grad);
        if prop.iter().any(|p| !(p.re.is_finite() && p.im.is_finite())) {
            return Err(Error::Divergence { iterations: it, last_finite: z });
        }
        res = residual(&z, &prop);
        if res < opts.eps {
            return Ok(FixedPointResult { z, iterations: it, residual: res, converged: true });
        }
        if opts.rho == 0.0 {
            z = prop;
        } else {
            for (zi, pi) in z.iter_mut().zip(&prop) {
                *zi = *zi * opts.rho + pi * (1.0 - opts.rho);
            }
        }
    }
    Ok(FixedPointResult { z, iterations: opts.n_iter, residual: res, converged: false })
}

/// Plain iteration from `z = 0`.
pub fn fixed_point_small_c(spec: &MultinomialSpec, n_iter: usize, eps: f64) -> Result<FixedPointResult> {
    let zero = vec![C64::new(0.0, 0.0); spec.a_count()];
    iterate(spec, &zero, FixedPointOptions { eps, n_iter, rho: 0.0 })
}

/// Damped iteration from a caller-supplied start.
pub fn fixed_point_damped(
    spec: &MultinomialSpec,
    n_iter: usize,
    eps: f64,
    z_init: &[C64],
    rho: f64,
) -> Result<FixedPointResult> {
    iterate(spec, z_init, FixedPointOptions { eps, n_iter, rho })
}

/// Both algebraic forms of the exponent at a fixed point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentForms {
    /// `F(z*) + (2^q − 1) Σ_α (∂_α F(z*))^{2^q}`
    pub primary: C64,
    /// `F(z*) − (1 − 2^{−q}) Σ_α z*_α ∂_α F(z*)`
    pub alternate: C64,
    pub f_at_fixed_point: C64,
}

pub fn scaling_exponent_forms<P: ParentFunction + ?Sized>(
    f: &P,
    fp: &FixedPointResult,
) -> Result<ExponentForms> {
    if !fp.converged {
        return Err(Error::NotConverged { iterations: fp.iterations, residual: fp.residual });
    }
    let (fz, grad) = f.value_and_grad(&fp.z)?;
    let k = 1i32 << f.q();
    let power_sum: C64 = grad.iter().map(|g| g.powi(k)).sum();
    let cross_sum: C64 = fp.z.iter().zip(&grad).map(|(z, g)| z * g).sum();
    let primary = fz + power_sum * (k - 1) as f64;
    let alternate = fz - cross_sum * (1.0 - 1.0 / k as f64);

    // The forms coincide exactly at the fixed point; at an approximate one
    // they differ by roughly the residual times the size of the sums.
    let scale = [primary.norm(), fz.norm(), power_sum.norm() * (k - 1) as f64, 1e-300]
        .into_iter()
        .fold(0.0, f64::max);
    let tol = 1e-9_f64.max(4.0 * fp.residual);
    if (primary - alternate).norm() > tol * scale {
        return Err(Error::Inconsistent(format!(
            "exponent forms disagree: {primary} vs {alternate}"
        )));
    }
    Ok(ExponentForms { primary, alternate, f_at_fixed_point: fz })
}

/// Growth rate `lim (1/n) log S(n)` from a converged fixed point.
pub fn scaling_exponent<P: ParentFunction + ?Sized>(f: &P, fp: &FixedPointResult) -> Result<C64> {
    Ok(scaling_exponent_forms(f, fp)?.primary)
}
