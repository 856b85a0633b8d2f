//! Explicit lower bounds for min σ(T), `T = (1/r)(-(p f')' + q f)` on the
//! real line, with a finite-difference oracle to check them against.

pub mod bounds;
pub mod catalogue;
pub mod cli;
pub mod coeff;
pub mod error;
pub mod exponent;
pub mod norms;
pub mod oracle;
pub mod quadrature;
pub mod verify;

pub use error::{Error, Result};
