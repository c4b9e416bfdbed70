//! Finite Cartan pairs built from inverse monoids and their extensions.

pub mod boolean;
pub mod cli;
pub mod error;
pub mod extension;
pub mod kernel;
pub mod linalg;
pub mod oracle;
pub mod semigroup;
pub mod spectral;

pub use error::{Error, Result};
