//! Quivers of sections and exceptional collections on toric varieties.
//!
//! Everything is exact: integers are arbitrary precision and polyhedral
//! computations use rational Fourier–Motzkin elimination.

pub mod cohomology;
pub mod error;
pub mod fano_db;
pub mod homology;
pub mod lattice;
pub mod matrix;
pub mod polyhedron;
pub mod positivity;
pub mod quiver;
pub mod scalar;
pub mod sections;
pub mod toric;

pub type Int = num_bigint::BigInt;
pub type IntMatrix = matrix::Matrix<Int>;

pub use cohomology::{
    cohomology_oracle, do_higher_self_exts_vanish, do_higher_self_exts_vanish_twisted, forbidden_sets,
    higher_cohomology_vanishes, nonvanishing_region_contains, projected_cone, ForbiddenSet,
};
pub use error::{Error, Result};
pub use fano_db::{Database, DatabaseEntry};
pub use positivity::{bundles_nef_check, is_nef};
pub use quiver::{order_vertices, Arrow, QuiverOfSections};
pub use sections::{hom_basis, hom_dimension, Monomial};
pub use toric::{DivisorClass, Fan, FanSpec, ToricVariety};
