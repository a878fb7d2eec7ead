//! File formats, the command-line front end and a thread-pool executor for
//! [`mono_sgt_core`].
//!
//! * [`json`]: deterministic JSON with 17-significant-digit floats.
//! * [`csv`]: trajectory, path and characteristic-sample tables.
//! * [`resolve`]: builtin names, system files and polyline files.
//! * [`plot`]: gnuplot scripts for every artifact plus the two figure recipes.
//! * [`cli`]: the `mono-sgt` subcommands.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod budget;
pub mod cli;
pub mod csv;
pub mod error;
pub mod exec;
pub mod json;
pub mod plot;
pub mod report;
pub mod resolve;

pub use error::{CliError, CliResult};
pub use exec::Parallel;
