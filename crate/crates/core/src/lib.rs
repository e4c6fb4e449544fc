pub mod bounds;
pub mod geometry;
pub mod spectral;
pub mod harness;
pub mod error;

pub use error::{Error, Result};
