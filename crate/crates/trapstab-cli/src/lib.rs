//! The `trapstab` command-line tool: stability sweeps, boundary curves, and
//! multiplier traces over the coupled Mathieu system, emitted as CSV and
//! plain PGM files for external plotting, each with a replayable manifest.
//!
//! The binary in `main.rs` is a thin wrapper around [`run::main_impl`]; the
//! format and orchestration layers live here so they can be tested directly.

pub mod cli;
pub mod manifest;
pub mod output;
pub mod run;
