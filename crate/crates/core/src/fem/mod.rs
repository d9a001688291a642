//! Finite elements for the truncated strip with DtN boundaries.

pub mod assembly;
pub mod band;
pub mod basis;
pub mod dtn;
pub mod mesh;
pub mod quadrature;
pub mod vtk;

pub use assembly::{AssembledSystem, DiscreteField, HelmholtzProblem};
pub use dtn::{dtn_apply, DtnImage, DtnOperator};
pub use mesh::{build_mesh, Discretization, ObstacleQuadrature, StripMesh};
