//! Vector-valued quadratic Lagrange finite elements for linear elasticity.

mod assembly;
pub mod basis;
mod dofmap;
mod fields;
mod material;
pub mod quadrature;
mod sparse;

pub use assembly::{assemble, element_stiffness, SparseSystem};
pub use basis::P2Element;
pub use dofmap::{DofMap, NodeClass};
pub use fields::{apply, StressField, Tensor};
pub use material::{lame_from_young_poisson, MaterialLaw};
pub use sparse::{write_vector_market, CsrMatrix};
