//! diophlab: an exact-arithmetic workbench for metric Diophantine
//! approximation experiments.
//!
//! The crate builds finite truncations of the classical limsup sets of
//! Diophantine approximation with big-rational arithmetic, verifies the
//! measure identities and counting formulas those sets satisfy, and estimates
//! the critical exponent of the natural covers numerically.
//!
//! Module map:
//! - [`rational`], [`torus`], [`directed`]: exact rational substrate, torus
//!   set algebra, directed-rounded enclosures for the few irrational values.
//! - [`numth`]: Möbius, totient, divisor counts, the totient summatory
//!   function, and primitive lattice shells.
//! - [`psi`], [`limsup`], [`planar`]: approximation functions, 1-D resonant
//!   neighborhoods, and the planar strip families with an exact area engine.
//! - [`metrics`]: Dirichlet search, solution counting, the generalized
//!   Borel-Cantelli lower bound, quasi-independence constants, union growth,
//!   and covering defects.
//! - [`dimension`]: s-volumes of natural covers, critical-exponent and
//!   box-counting estimators, and the closed-form dimension evaluators.
//! - [`report`]: reproducible machine-readable experiment reports.

pub mod dimension;
pub mod directed;
pub mod error;
pub mod limsup;
pub mod metrics;
pub mod numth;
pub mod planar;
pub mod psi;
pub mod rational;
pub mod report;
pub mod torus;

pub use error::{Error, Result};
pub use rational::Rational;
