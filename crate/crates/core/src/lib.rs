//! Exact topological complexity computations for finite spaces.

pub mod budget;
pub mod complexity;
pub mod corpus;
pub mod cover;
pub mod error;
mod extension;
mod homology;
pub mod homotopy;
pub mod io;
pub mod poset;
pub mod report;
pub mod simplicial;
pub mod subdivision;
pub mod verify;

pub use budget::{Budget, Decision};
pub use error::{Error, Result};
