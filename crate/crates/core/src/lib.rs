//! Uniform approximation error of Fourier partial sums on classes of
//! generalized Poisson integrals.
//!
//! The crate evaluates the scaled error `e^{αn^r}·E_n` exactly through the
//! kernel `P^{(n)}` and compares it with its asymptotic main terms.

pub mod asymptotics;
pub mod error;
pub mod kernel;
pub mod norms;
pub mod params;
pub mod quad;
pub mod special;
pub mod verification;

pub use error::{Error, Result};
pub use params::{ClassParams, Exponent};
