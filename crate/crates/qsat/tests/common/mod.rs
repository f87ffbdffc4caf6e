#![allow(dead_code)]

pub mod props;

use qsat::mnsum::MultinomialSpec;
use qsat::C64;
use rand::Rng;

pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn rel_err(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

/// Random complex number with both parts uniform in `[-scale, scale]`.
pub fn rand_c64<R: Rng>(rng: &mut R, scale: f64) -> C64 {
    c64(rng.random_range(-scale..=scale), rng.random_range(-scale..=scale))
}

/// Random spec with weights summing to one and couplings bounded by `c_max`.
pub fn random_spec<R: Rng>(rng: &mut R, q: u32, s_count: usize, a_count: usize, c_max: f64) -> MultinomialSpec {
    let mut b: Vec<C64> = (0..s_count).map(|_| c64(rng.random_range(0.1..1.0), rng.random_range(-0.3..0.3))).collect();
    let total: C64 = b.iter().sum();
    for x in &mut b {
        *x /= total;
    }
    let a = (0..a_count).map(|_| (0..s_count).map(|_| rand_c64(rng, 1.0)).collect()).collect();
    let c = (0..a_count).map(|_| C64::from_polar(rng.random_range(0.0..c_max), rng.random_range(-3.1..3.1))).collect();
    MultinomialSpec::new(q, a, b, c).unwrap()
}

/// Fits `y(n) = e + a/n + b/n²` through three points and returns `e`.
pub fn richardson(points: [(f64, f64); 3]) -> f64 {
    let rows: Vec<[f64; 4]> = points.iter().map(|&(n, y)| [1.0, 1.0 / n, 1.0 / (n * n), y]).collect();
    let mut m = rows;
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs())).unwrap();
        m.swap(col, piv);
        for row in 0..3 {
            if row != col {
                let f = m[row][col] / m[col][col];
                for k in 0..4 {
                    m[row][k] -= f * m[col][k];
                }
            }
        }
    }
    m[0][3] / m[0][0]
}
