//! SU(2)-covariant quantum codes: intrinsic codes on a single irrep, their
//! equivariant embeddings into physical spaces, and error-correction checks
//! organized by angular momentum.

pub mod catalog;
pub mod cli;
pub mod codefile;
pub mod embed;
pub mod error;
pub mod extrinsic;
pub mod intrinsic;
pub mod isotypic;
pub mod linalg;
pub mod repcore;
pub mod search;
pub mod spaces;

pub use error::{Error, Result};
