//! Command-line front end for `banach-core`.
//!
//! `compute`, `sweep`, `verify` and `witness` share one option set, write
//! table, CSV or JSON output, and cache every result in an append-only
//! `runs.jsonl` under `$BANACH_DATA_DIR` (default `./.banach-cache`).

pub mod app;
pub mod args;
pub mod cache;
pub mod emit;
pub mod record;

pub use app::{exit, run, Failure};
pub use args::Cli;
