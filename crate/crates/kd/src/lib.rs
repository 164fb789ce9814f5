//! Std companion to `kd-core`: JSON/CSV formats, the seeded conjecture probe,
//! per-dimension self-checks, and the `kd` command line.

pub mod cli;
pub mod error;
pub mod formats;
pub mod harness;
pub mod verify;

pub use error::CliError;
