//! Library half of the `qring` command: config parsing, sweeps and the
//! verification report. `main.rs` only wires these to clap.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

pub use config::{ConfigError, Overrides, RunConfig, SweepSpec};
pub use output::{Cell, Format, Table};
pub use verify::{VerifyOptions, VerifyReport};
