//! Exact arithmetic: quadratic and cyclotomic integers, lattices and
//! their duals, integer module reduction, and the crystallographic
//! restriction.

pub mod cyclo;
pub mod hnf;
pub mod lattice;
pub mod quad;
pub mod symmetry;

pub use cyclo::{Cyclo, CycloOrder};
pub use hnf::{hermite_normal_form, is_submodule, module_contains};
pub use lattice::{ExactField, Lattice};
pub use quad::{Golden, GoldenInt, GoldenRat, Quad, QuadInt, QuadRat, QuadRing, Silver};
pub use symmetry::{
    crystallographic_orders, euler_totient, is_crystallographic_rotation, min_embedding_dim,
    ExactRotation, OrthogonalMap, SymmetryType,
};
