use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("grade error: {0}")]
    Grade(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("form class too low: need r >= {need}, have r = {have}")]
    Class { need: u32, have: u32 },
    #[error("quadrature did not converge (refinement disagrees by {0:e})")]
    Quadrature(f64),
    #[error("cube is not compatible with the chain: {0}")]
    Incompatible(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("lp: {0}")]
    Lp(String),
    #[error("not an integral surface: {0}")]
    NotIntegral(String),
    #[error("geometry: {0}")]
    Geometry(String),
    #[error("mass cap exceeded: {mass} > {cap}")]
    Cap { mass: f64, cap: f64 },
    #[error("no spanning surface in complex: {0}")]
    Infeasible(String),
    #[error("degenerate mesh: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}
