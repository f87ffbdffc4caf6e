//! Minimal complex arithmetic on MPFR floats, for sums whose terms cancel far
//! beyond what f64 can resolve.

use crate::C64;
use rug::Float;

#[derive(Clone, Debug)]
pub(crate) struct MpC {
    pub re: Float,
    pub im: Float,
}

impl MpC {
    pub fn zero(prec: u32) -> Self {
        MpC { re: Float::new(prec), im: Float::new(prec) }
    }

    #[cfg(test)]
    pub fn from_c64(prec: u32, z: C64) -> Self {
        MpC { re: Float::with_val(prec, z.re), im: Float::with_val(prec, z.im) }
    }

    pub fn from_real(x: Float) -> Self {
        let prec = x.prec();
        MpC { re: x, im: Float::new(prec) }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn mul(&self, o: &MpC) -> MpC {
        let p = self.prec();
        let re = Float::with_val(p, &self.re * &o.re) - Float::with_val(p, &self.im * &o.im);
        let im = Float::with_val(p, &self.re * &o.im) + Float::with_val(p, &self.im * &o.re);
        MpC { re, im }
    }

    pub fn scale(&self, f: &Float) -> MpC {
        let p = self.prec();
        MpC { re: Float::with_val(p, &self.re * f), im: Float::with_val(p, &self.im * f) }
    }

    /// `self += a·b` with MPFR fused multiply-adds, no temporaries.
    pub fn add_mul(&mut self, a: &MpC, b: &MpC) {
        self.re += &a.re * &b.re;
        self.re -= &a.im * &b.im;
        self.im += &a.re * &b.im;
        self.im += &a.im * &b.re;
    }

    pub fn add_assign(&mut self, o: &MpC) {
        self.re += &o.re;
        self.im += &o.im;
    }

    pub fn exp(&self) -> MpC {
        let p = self.prec();
        let mag = self.re.clone().exp();
        let (s, c) = self.im.clone().sin_cos(Float::new(p));
        MpC { re: Float::with_val(p, &mag * &c), im: Float::with_val(p, &mag * &s) }
    }

    pub fn to_c64(&self) -> C64 {
        C64::new(self.re.to_f64(), self.im.to_f64())
    }

    /// Principal logarithm, rounded to f64 only at the end so tiny moduli survive.
    pub fn ln(&self) -> C64 {
        let p = self.prec();
        let norm = Float::with_val(p, self.re.clone().square() + self.im.clone().square());
        let re = norm.ln().to_f64() / 2.0;
        let im = Float::with_val(p, self.im.atan2_ref(&self.re)).to_f64();
        C64::new(re, im)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

/// Factorials 0!..=n! at the given precision.
pub(crate) fn factorials(prec: u32, n: usize) -> Vec<Float> {
    let mut out = Vec::with_capacity(n + 1);
    let mut f = Float::with_val(prec, 1);
    out.push(f.clone());
    for i in 1..=n {
        f *= i as u32;
        out.push(f.clone());
    }
    out
}
