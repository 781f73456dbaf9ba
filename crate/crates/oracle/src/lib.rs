//! Test oracles for the `respoisson` crate.
//!
//! Everything here is deliberately slow and simple: double-double series,
//! brute-force ODE integration, dense Newton seeding. None of it shares code
//! with the production paths it is used to check.

pub mod bessel;
pub mod dd;
pub mod ode;
pub mod roots;
