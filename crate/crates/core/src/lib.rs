//! Time-of-arrival operators for a particle confined to `[-l, l]` with a
//! twisted boundary condition `phi(-l) = exp(-2 i gamma) phi(l)`.
//!
//! The operator is built two independent ways ([`operator`]), its spectrum
//! is also available in closed form ([`analytic`]), eigenfunctions evolve
//! exactly in the energy basis ([`dynamics`]) and [`verification`] checks the
//! routes against each other.

// `!(x > 0.0)` is used on purpose so NaN is rejected along with the rest
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// reference tables keep every digit they were computed to
#![allow(clippy::excessive_precision)]

pub mod analytic;
pub mod basis;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod matrix;
pub mod operator;
pub mod par;
pub mod special;
pub mod state;
pub mod verification;
