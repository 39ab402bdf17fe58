//! File formats, pipeline stages, CLI and HTTP session service over the
//! `hierasm-core` planner.

pub mod error;
pub mod formats;
pub mod pipeline;
pub mod service;

pub use error::GatewayError;
pub use formats::{PlanFile, SceneFile};
pub use pipeline::{Problem, Settings};
