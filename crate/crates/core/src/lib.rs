//! Exact Hochschild cohomology of bound quiver algebras, their split and
//! trivial extensions, relation extensions, and the maps between them.

pub mod algebra;
pub mod bimodule;
pub mod error;
pub mod exactlin;
pub mod extcohom;
pub mod extension;
pub mod hochschild;
pub mod minres;
pub mod quiver;
pub mod relext;

pub use error::{Error, Result};
pub use exactlin::{Field, Mat, Scalar, SparseVec, Q};
