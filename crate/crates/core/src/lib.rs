//! Transverse-field Ising dynamics on frustrated fullerene graphs.
//!
//! The crate is `no_std` + `alloc`; the default `std` and `parallel`
//! features add standard-library error impls and rayon fan-out. File
//! formats and the command-line front end live in the `fullersim` crate.

#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` deliberately rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod calibrate;
pub mod error;
pub mod evolve;
pub mod linalg;
pub mod manifold;
pub mod measures;
mod par;
pub mod perturbation;
pub mod schedule;
pub mod spin;
pub mod topology;

pub use error::{Error, Result};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use spin::SpinConfig;
