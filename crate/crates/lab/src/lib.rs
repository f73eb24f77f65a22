//! File formats, run manifests and the `psslab` command line on top of
//! `pss-core`.

pub mod cli;
pub mod commands;
pub mod config;
pub mod definition;
pub mod error;
pub mod manifest;
pub mod svg;
pub mod traj;

pub use error::{LabError, Result};
pub use pss_core;
