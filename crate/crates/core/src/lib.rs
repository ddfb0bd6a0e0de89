pub mod budget;
pub mod cli;
pub mod counting;
pub mod error;
pub mod experiments;
pub mod field;
pub mod harmonic;

pub use error::{Error, Result};
