//! Numerical verification of the Poisson formula for scattering resonances
//! on exterior-ball models in dimensions 2, 3 and 4.

pub mod cli;
pub mod error;
pub mod fit;
pub mod model_ball;
pub mod quadrature;
pub mod resonance_finder;
pub mod special_functions;
pub mod traces;
pub mod weierstrass;

pub use error::{Error, Result};
