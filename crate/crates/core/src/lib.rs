pub mod analysis;
pub mod config;
pub mod error;
pub mod mathieu;
pub(crate) mod quadrature;
pub mod resonance;
pub mod scaling;
pub mod spectrum;
pub mod tdse;
pub(crate) mod tridiagonal;

pub use error::{Error, Result};
