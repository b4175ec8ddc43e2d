//! Dirac and dipole chains, simplicial chains of plain, monopole and dipole
//! cells, and restriction to cubes.

mod chain;
mod cube;
mod dipole;
pub mod io;
mod simplicial;

pub use chain::{Chain, DualOp};
pub use cube::CubeSpec;
pub use dipole::{DipoleChain, PointSupport};
pub use simplicial::{affine_combo, diameter, edgewise_pieces, tangent, Cell, CellKind, SimplicialChain};
