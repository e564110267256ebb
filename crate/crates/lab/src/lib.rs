//! Configuration, reports and the verification suite behind the `horizon`
//! binary.

pub mod cli;
pub mod config;
pub mod error;
pub mod ops;
pub mod report;
pub mod verify;

pub use config::{Format, RunConfig, Tolerances};
pub use error::{LabError, Result};
pub use ops::run;
pub use report::{Check, Report};
