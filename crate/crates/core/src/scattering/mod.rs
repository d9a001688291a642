//! Scattering matrix, its differential and structural checks.

mod bundle;
mod differential;
mod verify;

pub use bundle::{scattering_matrix, FieldBundle, Scatterer};
pub use differential::scattering_differential;
pub use verify::{sample_lattice, verify_structure, StructureReport};

