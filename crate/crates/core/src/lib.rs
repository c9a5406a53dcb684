//! Exact deformation cohomology of module homomorphisms over
//! finite-dimensional associative algebras.

pub mod algebra;
pub mod cli;
pub mod cohomology;
pub mod defcomplex;
pub mod deformation;
pub mod error;
pub mod fixtures;
pub mod hochschild;
pub mod io;
pub mod linalg;
pub mod report;
pub mod scalars;

pub use error::{Error, Limits, Result};
