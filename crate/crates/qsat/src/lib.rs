//! Infinite-size success-probability exponents for QAOA on random k-SAT.
//!
//! The analytic path reduces the instance-averaged success probability to a
//! generalized multinomial sum ([`mnsum`]) whose exponential growth rate is read
//! off a complex fixed point. Everything else in the crate exists to check that
//! number from other directions: exact finite-size sums for one layer
//! ([`qaoa_analytic::p1_exact`]), dense statevector simulation ([`simulator`]),
//! a solvable warm-up model ([`toy`]), and classical local search ([`solvers`])
//! driven through the benchmarking harness ([`bench`]).
//!
//! Complex numbers are [`num_complex::Complex64`] throughout, re-exported as
//! [`C64`]. Exponents are natural-log unless a field says otherwise.

pub mod bench;
pub mod cli;
mod error;
pub mod mnsum;
mod mp;
pub mod qaoa_analytic;
pub mod sat_core;
pub mod simulator;
pub mod solvers;
pub mod toy;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Complex number as an explicit `{re, im}` pair for JSON documents.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ReIm {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for ReIm {
    fn from(z: C64) -> Self {
        ReIm { re: z.re, im: z.im }
    }
}

impl From<ReIm> for C64 {
    fn from(z: ReIm) -> Self {
        C64::new(z.re, z.im)
    }
}
