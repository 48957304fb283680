//! Construction and mechanical analysis of bounded multiplicative functions.
//!
//! The crate builds multiplicative functions from prime-power rules (Dirichlet
//! characters with finitely many modified primes, Liouville-type signs,
//! Archimedean phases, staged prime-interval constructions) and provides:
//!
//! * exact Dirichlet character arithmetic (products, induction, conductors),
//! * period analysis on truncations: per-position periods, skeletons,
//!   essential periods, period structures with p-valuations, and the
//!   periodic/automatic classifiers,
//! * pretentious-distance calculus and aperiodicity scan functionals,
//! * empirical dynamical statistics: means, correlations, spectral
//!   coefficients, Gowers-type seminorm estimators, best periodic
//!   approximation errors, local factor products.
//!
//! Everything numeric is a finite-truncation estimate and is labelled as
//! such; exact claims are made only where a certificate proves them.

pub mod arith;
pub mod characters;
pub mod dynamics;
mod error;
pub mod multfun;
pub mod pretense;
pub mod scan;
pub mod toeplitz;
pub mod value;
pub mod verify;

pub use arith::{factorize, sieve, valuation, Factorization, PrimeTable};
pub use characters::DirichletCharacter;
pub use error::{Error, Result};
pub use multfun::{MultFunction, ToeplitzCertificate};
pub use value::{Frac, RootOfUnity, Value};

/// Default comparison tolerance for approximate values.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Default sieve limit used by the CLI when none is configured.
pub const DEFAULT_SIEVE_LIMIT: u64 = 10_000_000;
