//! Aperiodic order toolkit: cut-and-project model sets, substitution
//! tilings, kinematic diffraction, local-equivalence tests and
//! random-tiling entropy.

pub mod algebra;
pub mod cut_project;
pub mod diffraction;
pub mod equivalence;
pub mod error;
pub mod pattern;
pub mod random_tiling;
pub mod spatial;
pub mod substitution;

pub use error::{Error, Result};

/// The golden mean (1 + √5) / 2.
pub const TAU: f64 = 1.618_033_988_749_895;

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
