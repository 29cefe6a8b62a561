pub mod cli;
pub mod data;
pub mod econometrics;
pub mod equilibrium;
pub mod error;
pub mod report;
pub mod surprise;

pub use error::{Error, Result};
