pub mod cli;
pub mod error;
pub mod exec;
pub mod gen;
pub mod laws;
pub mod lens;
pub mod metric;
pub mod metricgames;
pub mod opengame;
pub mod selection;
pub mod specio;

pub use error::{Error, Result};
