//! Differential forms with expression coefficients, and the integral
//! pairing between forms and chains.

mod expr;
mod form;
mod integrate;
pub mod quadrature;

pub use expr::{newton_cotes, Expr, Node, BOUND_BASE};
pub use form::{Form, SMOOTH};
pub use integrate::{integrate, integrate_cell, Quadrature};
