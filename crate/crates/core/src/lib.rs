//! Accelerated k-ary integer GCD reductions.
//!
//! The right-shift k-ary GCD replaces a pair `(u, v)` with
//! `(|a·u + b·v| / k, min(u, v))` where `a·u + b·v ≡ 0 (mod k)` and
//! `|a|, |b| < √k`. This crate finds such `(a, b)` pairs with several
//! algorithms and instruments them:
//!
//! - [`reduction::jwa`]: the Jebelean–Weber truncated extended Euclid loop.
//! - [`reduction::res`]: the residual algorithm, which skips the loop
//!   whenever both residues already sit in `U_k = ]0,√k[ ∪ ]k−√k,k[`.
//! - [`reduction::res_swapped`]: the same idea applied to `y/x mod k`.
//! - [`reduction::pares`]: races the two residual variants and keeps
//!   the first finisher, either in a deterministic lockstep schedule or on
//!   two threads.
//!
//! [`gcd`] drives a full GCD computation with any of these as the inner step,
//! and [`analysis`] enumerates residue classes to check the worst-case
//! iteration count and the loop-avoidance probability bound exactly.

pub mod analysis;
pub mod error;
pub mod gcd;
pub mod numerics;
pub mod reduction;

pub use error::{Error, Result};
pub use numerics::{Modulus, Natural};
pub use reduction::{Algorithm, Path, RaceMode, Reduction, ReductionPair, ReductionTrace, Region};
