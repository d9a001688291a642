//! Geometry, modes and scattering data shared by the other modules.

pub mod config;
pub mod geometry;
pub mod material;
pub mod modes;
pub mod smatrix;

pub use config::WaveguideConfig;
pub use geometry::{BBox, Region, Shape};
pub use material::MaterialField;
pub use modes::{mode_eval, propagating_mode_count, Direction, ModeBasis};
pub use smatrix::{Block, ScatteringMatrix};
