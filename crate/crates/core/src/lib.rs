pub mod algebra;
pub mod calculus;
pub mod divcurl;
pub mod error;
pub mod field;
pub mod field_io;
pub mod grid;
pub mod helmholtz;
pub mod random;
pub mod spectral;

pub use error::{Error, Result};
