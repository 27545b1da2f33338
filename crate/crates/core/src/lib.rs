pub mod bethe;
pub mod chain;
pub mod config;
pub mod error;
pub mod expr;
pub mod fusion;
pub mod report;
pub mod rmatrix;
pub mod spectrum;
pub mod suite;
pub mod symmetry;
pub mod tensor;
pub mod twist;

pub use error::{Error, Result};
pub use tensor::{c64, ComplexMatrix};
