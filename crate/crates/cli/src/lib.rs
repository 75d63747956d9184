//! Command-line pipeline around `arbary`: synthetic data, barycenters,
//! order sweeps, centroid fits and classification.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod synth;

pub use error::CliError;
