//! Exact toric geometry: reflexive polytopes, their toric varieties, line-bundle
//! cohomology on the ambient space and on generic anticanonical hypersurfaces,
//! and checks of B-brane statements built on top of those dimensions.

pub mod branes;
pub mod cli;
pub mod equivariant;
pub mod error;
pub mod gauge;
pub mod polytope;
pub mod sheafcoh;
pub mod toric;
pub mod zlinalg;

pub use error::{Error, Result};
pub use polytope::{CharacterPoint, Facet, LatticePolytope, Point, PolytopeDocument};
pub use toric::{CartierData, EmbeddingData, NormalFan, TorusDivisor};
