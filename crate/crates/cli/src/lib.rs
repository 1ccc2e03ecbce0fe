//! Front end for the `helmfft` solver: configuration, right-hand sides,
//! timed runs and their CSV / JSON records.

pub mod config;
pub mod error;
pub mod record;
pub mod rhs;
pub mod run;
pub mod slope;

pub use config::{Format, Mode, RhsSpec, RunArgs, RunConfig};
pub use error::{CliError, Result};
pub use record::RunRecord;
