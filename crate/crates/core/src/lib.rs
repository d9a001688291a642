//! Invisible penetrable obstacles in a 2D acoustic waveguide.
//!
//! The guide is the strip R × (0, 1) with Neumann walls and the time-harmonic
//! field solves Δu + k²(1+ρ)u = 0. Obstacles ρ supported in a bounded region
//! O are built by a fixed-point continuation on functionals of the
//! scattering matrix, using a P1/P2 finite-element solver truncated with
//! Dirichlet-to-Neumann maps.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constraints;
pub mod error;
pub mod fem;
pub mod invisibility;
pub mod model;
pub mod oracles;
pub mod scattering;

pub use error::{Error, Result};
