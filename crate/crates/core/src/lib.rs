//! Adaptive quadratic finite elements for frictionless unilateral contact
//! of a linear elastic body with a rigid obstacle.

// `!(x > 0.0)` deliberately rejects NaN as well; index loops mirror the
// component formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod adapt;
pub mod contact;
pub mod density;
pub mod error;
pub mod estimator;
pub mod fem;
pub mod linalg;
pub mod mesh;
pub mod problem;

pub use adapt::{adapt, AdaptParams, AdaptiveTrace, LevelRecord};
pub use density::{compute_density, ContactClass, DensityField, QuasiDensity};
pub use error::{Error, Result};
pub use estimator::{estimate, EstimatorInput, EstimatorReport};
pub use fem::{assemble, DofMap, MaterialLaw, NodeClass, SparseSystem, StressField};
pub use mesh::{BoundaryTag, Mesh, PatchTable, Point, SideTags};
pub use problem::{manufactured_contact, wedge_obstacle, ProblemSpec};
