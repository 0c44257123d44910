//! Computational laboratory for discrete Beurling generalized number systems.
//!
//! The pipeline runs bottom-up:
//!
//! - [`prime_systems`]: exact rational prime multisets (classical, explicit,
//!   modified-classical) and `pi(x)`.
//! - [`semigroup`]: enumeration of every generalized integer up to a cutoff
//!   with its factor counts Ω and ω, plus the Riemann-weighted `Pi(x)`.
//! - [`counting`]: residue-class counts `S_{K,c}(x)`, twisted sums `F_q(x)`,
//!   orthogonality reconstruction and density/Chebyshev diagnostics.
//! - [`measures`]: discrete measures under multiplicative convolution,
//!   `exp*`, Mellin–Stieltjes evaluation and the prime-power weight families.
//! - [`analytic`]: truncated zeta and generating-function evaluation, Euler
//!   products and the inequality and Halász-type probes.
//! - [`cli`]: batch experiment driver behind the `beurling` binary.

pub mod analytic;
pub mod cli;
pub mod counting;
pub mod error;
pub mod measures;
pub mod prime_systems;
pub mod rational;
pub mod semigroup;

pub use error::{BeurlingError, Result};
pub use rational::Rational;
