//! File formats, parallel drivers and the command implementations behind the
//! `cbundle` binary.

pub mod commands;
pub mod drivers;
pub mod error;
pub mod manifest;

pub use error::CliError;
