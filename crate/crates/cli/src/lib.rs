//! Command-line front end: scenario documents, reports and the `weakval`
//! subcommands.

pub mod commands;
pub mod identities;
pub mod report;
pub mod scenario;
pub mod verify;

pub use commands::{run, Cli};
