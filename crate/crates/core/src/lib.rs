//! Reward scoring, adjudication and evaluation for Propose-Verify-Decide
//! reasoning traces.

pub mod datagen;
pub mod embed;
pub mod ew;
pub mod grpo;
pub mod labels;
pub mod rewards;
pub mod text;
pub mod trace;

pub use labels::LabelSet;

#[cfg(test)]
mod test_support;
