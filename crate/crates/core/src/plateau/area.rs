use crate::chains::{Cell, CellKind, Chain, CubeSpec, SimplicialChain};
use crate::error::{Error, Result};
use crate::forms::{integrate, Form, Quadrature};
use crate::operators::cone;

/// Tolerance of the unit-orthogonal check on each cell.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// A(S) = Σ H²(τᵢ) for an integral dipole surface S = Σ P_{Xᵢ} τ̃ᵢ; each
/// cell must be unit-orthogonal, positively oriented and carry a positive
/// integer weight.
pub fn area(s: &SimplicialChain<f64>) -> Result<f64> {
    if s.n != 3 || s.k != 2 {
        return Err(Error::NotIntegral(format!("expected a 2-chain in ℝ³, got a {}-chain in ℝ^{}", s.k, s.n)));
    }
    let mut total = 0.0;
    for (i, c) in s.cells.iter().enumerate() {
        if c.kind != CellKind::Dipole {
            return Err(Error::NotIntegral(format!("cell {} is {}, not dipole", i, c.kind.tag())));
        }
        if c.weight < 1.0 || c.weight.fract() != 0.0 {
            return Err(Error::NotIntegral(format!("cell {} has weight {}", i, c.weight)));
        }
        if !c.unit_orthogonal(NORMALIZATION_TOL) {
            return Err(Error::NotIntegral(format!("cell {} violates the unit-orthogonal normalization", i)));
        }
        total += c.weight * c.volume();
    }
    Ok(total)
}

/// S̄ = Σ E_{Xᵢ} τ̃ᵢ, the monopole 3-chain filling S.
pub fn fill(s: &SimplicialChain<f64>) -> SimplicialChain<f64> {
    let cells = s.cells.iter().map(|c| Cell { kind: CellKind::Monopole, ..c.clone() }).collect();
    SimplicialChain { n: s.n, k: s.k + 1, cells }
}

/// ∫_{S̄} dV.
pub fn fill_area(s: &SimplicialChain<f64>) -> Result<f64> {
    integrate(&Chain::Simplicial(fill(s)), &Form::volume(3), &Quadrature::default())
}

/// ∫_{κ_q(∂S̄)} dV. Since κ∂ + ∂κ = I and κS̄ = 0 in ℝ³, this equals
/// ∫_{S̄} dV, computed through an independent path.
pub fn cone_area(s: &SimplicialChain<f64>, q: &[f64]) -> Result<f64> {
    let b = fill(s).boundary()?;
    let k = cone(q, &Chain::Simplicial(b))?;
    integrate(&k, &Form::volume(3), &Quadrature::default())
}

/// ∫_{S̄⌊_Q} dV for a compatible cube Q.
pub fn restricted_fill_area(s: &SimplicialChain<f64>, cube: &CubeSpec<f64>) -> Result<f64> {
    let clipped = cube.restrict_simplicial(s)?;
    fill_area(&clipped)
}

#[derive(Clone, Debug)]
pub struct AreaCheck {
    pub area: f64,
    pub by_cone: f64,
    pub rel_diff: f64,
}

/// Hausdorff-sum area and the cone formula, with their relative difference.
pub fn checked_area(s: &SimplicialChain<f64>, q: &[f64]) -> Result<AreaCheck> {
    let a = area(s)?;
    let c = cone_area(s, q)?;
    Ok(AreaCheck { area: a, by_cone: c, rel_diff: (a - c).abs() / a.abs().max(1e-300) })
}
