//! Information-scrambling diagnostics for small quantum many-body systems.

pub mod error;
pub mod linalg;
pub mod cli;
pub mod diagnostics;
pub mod dynamics;
pub mod ensemble;
pub mod models;

pub use error::{Result, ScrambleError};
