//! Seeded, parallel Monte-Carlo campaigns over random states: sufficiency and
//! accuracy rates, per-state precision scatter, θ-averaged trade-offs,
//! empirical shot-noise validation, mixed-state distortion, and single-state
//! reconstruction runs.
//!
//! Results depend only on the configuration and seed, never on the worker
//! count.

pub mod campaigns;
pub mod config;
pub mod error;
pub mod output;
pub mod seeding;

pub use config::ExperimentConfig;
pub use error::{LabError, LabResult};
