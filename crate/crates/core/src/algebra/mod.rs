//! Exterior and symmetric algebra over ℝⁿ.

mod mass;
mod multivector;
mod symtensor;

pub use mass::{always_simple, mass, Bracket};
pub use multivector::{
    binom, blade_of, grade_of, indices, lex_blades, unit, wedge_sign, Blade, Covector, Multivector,
};
pub use symtensor::SymTensor;
