//! Batch commands and HTTP service around `tracescore_core`.
//!
//! Every command reads JSON Lines and writes JSON Lines (or a single JSON
//! report). The service exposes the same operations over HTTP and renders
//! item bodies with the same functions, so CLI and service output agree
//! byte for byte.

pub mod advantages;
pub mod datagen;
mod error;
pub mod eval;
pub mod schema;
pub mod score;
pub mod service;
pub mod settings;

pub use error::{CliError, RunSummary};
pub use settings::{ScoringContext, ScoringSettings};
