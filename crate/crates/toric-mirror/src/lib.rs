//! Exact lattice-polytope, toric-fan and spectral-sequence toolkit for
//! checking hybrid Landau–Ginzburg mirror statements on small examples.

pub mod combinat;
pub mod error;
pub mod fan_toolkit;
pub mod io;
pub mod lattice_geometry;
pub mod lg_models;
pub mod linalg;
pub mod nef_partitions;
pub mod partition_engine;
pub mod polyhedral;
pub mod spectral_engine;
pub mod strata_calculus;

pub use error::{Error, Result};
