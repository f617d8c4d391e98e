//! Exact computations for preprojective algebras of Dynkin quivers deformed
//! by a central element `z` of degree 2.

pub mod algebra;
pub mod deformation;
pub mod error;
pub mod frobenius;
pub mod hochschild;
pub mod linalg;
pub mod quiver;
pub mod resolution;
pub mod series;
pub mod subspace;
pub mod suites;

pub use error::{Error, Result};
