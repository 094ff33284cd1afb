//! Detection tasks for non-projective measurements.
//!
//! The crate computes quantum correlations from explicit states and POVMs,
//! searches classical (projective-simulable) models for bounds and
//! feasibility, classifies target sets, and models the square-bit box world.

pub mod boxworld;
pub mod classical;
pub mod correlation;
pub mod error;
pub mod linalg;
pub mod quantum;
pub mod sampling;
pub mod search;
pub mod tasks;

pub use correlation::Correlation;
pub use error::{Error, Result};
