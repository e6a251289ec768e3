//! Weak-value statistics, noncontextuality bounds, explicit ontological
//! models and exact polytope pipelines for weak measurements with
//! postselection.

pub mod bounds;
pub mod error;
pub mod onticmodels;
pub mod polytope;
pub mod qmath;
pub mod schemes;

pub use error::{Error, Result};
