//! Differential chains: exact Dirac and dipole
//! chains, the chain-side operator algebra, bracketed B^r norms, and a
//! small Plateau solver built on integral dipole surfaces.

pub mod algebra;
pub mod chains;
pub mod error;
pub mod forms;
pub mod lp;
pub mod norms;
pub mod operators;
pub mod plateau;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{Q, Scalar};
