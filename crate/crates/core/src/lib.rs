//! Random directed d-regular graphs and the simple switching method.
//!
//! The adjacency matrix of a directed d-regular graph on `n` vertices (loops
//! allowed, no multiple edges) is a 0/1 matrix with exactly `d` ones in every
//! row and every column. The crate samples these matrices and works out how
//! simple switchings move their exact rank and kernels.
//!
//! All indices are 0-based.

pub mod error;
pub mod lemmas;
pub mod linalg;
pub mod matrix;
pub mod rng;
pub mod sampler;
pub mod switching;

pub use error::{Error, Result};
pub use matrix::{BiregularMatrix, MatrixId};
pub use switching::{Switch, SwitchCount};
