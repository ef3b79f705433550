//! Random covers of bounded open sets on regular lattices.
//!
//! A bounded set `E` is represented by the cell centers of a regular grid
//! ([`GridSet`]). On top of that representation the crate provides
//!
//! * exact Euclidean distance transforms and ball morphology ([`edt`], [`morphology`]),
//! * isotropic perimeter and diameter estimators ([`measure`]),
//! * Whitney-type partitions into regions of bounded diameter and
//!   measure bounded from below, with certificates ([`partition`]),
//! * closed-form lower bounds on the probability that radius-`3δ` balls
//!   around i.i.d. uniform samples cover `E` ([`bounds`]),
//! * a 2D multiscale flat-norm minimizer solved exactly by min-cut
//!   ([`flatnorm`]),
//! * Monte Carlo estimation of the coverage probabilities those bounds
//!   are about ([`montecarlo`]).
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod bounds;
pub mod edt;
mod error;
pub mod flatnorm;
mod grid;
pub mod maxflow;
pub mod measure;
pub mod montecarlo;
pub mod morphology;
pub mod partition;
pub mod rng;
pub mod shapes;

pub use crate::error::{Error, Result};
pub use crate::grid::{Ball, DistanceField, GridSet, Lattice};
