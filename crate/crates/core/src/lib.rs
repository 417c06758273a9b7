//! Spectral solution of the impedance-matched right-angle penetrable wedge at
//! index ratio √2, built from Weierstrass functions on the square torus.

// `!(x < y)` is used on purpose so that NaN falls into the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod elliptic;
pub mod error;
pub mod farfield;
pub mod jet;
pub mod numerics;
pub mod poles;
pub mod reconstruct;
pub mod residues;
pub mod surface;
pub mod verify;

pub use config::{Tolerances, WedgeConfig};
pub use error::{Error, Result};
