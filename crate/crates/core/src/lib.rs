//! Scale development and validation for Likert instruments.
//!
//! The crate covers the whole validation pipeline of a questionnaire such as
//! the 18-item XEQ scale: expert content validity, internal consistency,
//! discriminant validity, exploratory and confirmatory factor analysis,
//! test-retest reliability, and the scoring/benchmark layer used once the
//! scale is in production.

pub mod construct;
pub mod content;
pub mod discriminant;
pub mod error;
pub mod exec;
pub mod ingest;
pub mod reliability;
pub mod report;
pub mod scale;
pub mod scoring;
pub mod simulation;
pub mod stats;

pub use error::{Error, Result};
pub use exec::Execution;
pub use scale::{Dimension, Item, RespondentMeta, ResponseMatrix, ScaleDefinition, Wave};
