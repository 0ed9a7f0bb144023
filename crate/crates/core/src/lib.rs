//! Experiments on the joint distribution of Ω(n) and Ω(n+h).
//!
//! The crate is organised bottom-up:
//!
//! * [`sieve`] tabulates Ω, ω and truncated ω over integer ranges;
//! * [`averaging`] provides Cesàro and logarithmic averages with stable summation;
//! * [`stats`] measures densities of almost primes, Erdős–Kac and Turán–Kubilius;
//! * [`correlation`] computes two-point correlations `𝔼 a(Ω(n)) b(Ω(n+h))`;
//! * [`pretentious`] implements distances between multiplicative functions and Dirichlet characters;
//! * [`reduction`] covers Fourier expansion in the Ω variable, prime windows and exponential sums over primes;
//! * [`oracle`] holds slow trial-division references used by the tests.

// `!(x > 0.0)` style guards are there to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod averaging;
pub mod bounded;
pub mod correlation;
pub mod error;
pub mod io;
pub mod oracle;
pub mod pretentious;
pub mod reduction;
pub mod sieve;
pub mod stats;

pub use averaging::{WeightKind, WeightedAverage};
pub use bounded::BoundedFunction;
pub use error::{Error, Result};
pub use sieve::{CountMode, FactorCountBlock, PrimeTable, SieveConfig};
