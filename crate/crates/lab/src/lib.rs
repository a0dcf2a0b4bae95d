//! Configuration, serialization and command implementations for the
//! `exchange-lab` binary.

pub mod config;
pub mod error;
pub mod output;
pub mod simulate;
pub mod verify;
pub mod zreport;

pub use config::RunConfig;
pub use error::LabError;
