//! File formats, reports and the command-line front end for
//! [`covergeo_core`].
//!
//! * [`raster`]: PBM masks with sidecar headers and 16-bit label rasters,
//! * [`shape`]: textual shape specifications,
//! * [`config`]: TOML experiment files merged with flags,
//! * [`report`]: versioned JSON documents, CSV ladders and bound tables,
//! * [`svg`]: static renders,
//! * [`run`]: multi-threaded coverage experiments,
//! * [`commands`]: the subcommands of the `covergeo` binary.

pub mod commands;
pub mod config;
mod error;
pub mod raster;
pub mod report;
pub mod run;
pub mod shape;
pub mod svg;

pub use crate::error::{Error, Result};
