//! Crystal lattices, multidimensional Shintani zeta functions and finite
//! Euler products defined on them, the discrete and compound Poisson laws
//! they generate, and the finite- and infinite-range random walks those laws
//! drive.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod dist;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod presets;
pub mod verify;
pub mod walk;
pub mod zeta;

pub use error::{Error, Result};
