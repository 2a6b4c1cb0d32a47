pub mod analysis;
pub mod base;
pub mod bundle;
pub mod constructions;
pub mod error;
pub mod graph;

pub use error::{Error, Result};
