//! Driver for `tfspde-core`: TOML configuration, experiment orchestration, report files
//! and the `tfspde` command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod experiment;
pub mod report;
pub mod selftest;

pub use config::RunConfig;
pub use error::AppError;
