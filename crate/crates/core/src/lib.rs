//! sheafkit: presheaves and sheaf cohomology on finite topological spaces.
//!
//! The crate models finite spaces by explicit open-set lists, presheaves of
//! free integer modules by restriction matrices, and computes gluing,
//! sheafification and Čech cohomology with exact arbitrary-precision
//! arithmetic. A small categorical layer models entangled entities over a
//! generalized time category and measurement as natural transformations.

pub mod algebra;
pub mod cech;
pub mod cli;
pub mod epr;
pub mod topology;
pub mod presheaf;

pub use algebra::{FGAbelianGroup, IntMatrix};
pub use cech::{CechComplex, CohomologyResult};
pub use presheaf::{GlueOutcome, Presheaf, Section, Sheafification};
pub use topology::{Cover, FiniteTopology, OpenId};
