//! Host-side harness for `ddtea-core`: model and configuration files, CSV
//! and SVG output, multi-threaded sweeps, the speed benchmark and the `ddtea`
//! command line.

pub mod bench;
pub mod cli;
pub mod config;
pub mod model_file;
pub mod output;
pub mod parallel;
pub mod svg;

pub use bench::{bench_speed, BenchReport};
pub use config::{ConfigFile, Manifest};
pub use model_file::{format_model, load_model, parse_model, save_model, ModelFileError};
pub use parallel::sweep_parallel;
