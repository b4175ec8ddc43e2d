//! Area minimization over integral dipole surfaces in ℝ³.

pub mod area;
pub mod curve;
pub mod flow;
pub mod geom;
pub mod lattice;
pub mod link;
pub mod mesh;
pub mod problem;
pub mod quantize;
pub mod seeds;
pub mod shadow;
pub mod solve;
pub mod spanning;

pub use curve::{BoundaryCurve, Polyline};
pub use geom::V3;
pub use link::linking_number;
pub use problem::{Backend, Problem, Seed};
pub use solve::{minimize, Report, Solution};
