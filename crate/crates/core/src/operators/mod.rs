//! Chain-side operators. Dirac and plain simplicial inputs are handled
//! explicitly; everything else is carried lazily through the dual form
//! operator, which keeps every pairing exact.

mod field;
mod push;
mod product;

pub use field::{MapSpec, VectorField};
pub use push::{flow_dirac, pushforward, pushforward_subdivided};
pub use product::{cartesian_wedge, cone};

use crate::algebra::{Covector, Multivector, SymTensor};
use crate::chains::{Cell, CellKind, Chain, DipoleChain, DualOp, SimplicialChain};
use crate::error::{Error, Result};
use crate::forms::{integrate, Form, Quadrature};
use crate::scalar::Scalar;

fn check_dim(field_n: usize, n: usize) -> Result<()> {
    if field_n != n {
        return Err(Error::Dimension(format!("field on ℝ^{} applied to a chain in ℝ^{}", field_n, n)));
    }
    Ok(())
}

fn lazy<S: Scalar>(j: &Chain<S>, n: usize, k: usize, op: DualOp<S>) -> Chain<S> {
    Chain::Dual { n, k, op, base: Box::new(j.clone()) }
}

/// Sum of the non-empty parts, or the zero chain of the given shape.
pub(crate) fn join<S: Scalar>(n: usize, k: usize, parts: Vec<Chain<S>>) -> Chain<S> {
    let mut parts: Vec<Chain<S>> = parts
        .into_iter()
        .filter(|c| match c {
            Chain::Dirac(d) => !d.is_zero(),
            Chain::Simplicial(s) => !s.cells.is_empty(),
            Chain::Sum(v) => !v.is_empty(),
            _ => true,
        })
        .collect();
    match parts.len() {
        0 => Chain::Dirac(DipoleChain::zero(n, k)),
        1 => parts.pop().unwrap(),
        _ => Chain::Sum(parts),
    }
}

/// Splits a simplicial chain into plain cells and the rest.
fn split_plain<S: Scalar>(s: &SimplicialChain<S>) -> (Vec<Cell<S>>, SimplicialChain<S>) {
    let (plain, other): (Vec<_>, Vec<_>) = s.cells.iter().cloned().partition(|c| c.kind == CellKind::Plain);
    (plain, SimplicialChain { n: s.n, k: s.k, cells: other })
}

/// Applies `f` through sums and scalings.
fn distribute<S: Scalar>(j: &Chain<S>, n: usize, k: usize, f: &dyn Fn(&Chain<S>) -> Result<Chain<S>>) -> Option<Result<Chain<S>>> {
    match j {
        Chain::Sum(v) => Some(v.iter().map(f).collect::<Result<Vec<_>>>().map(|p| join(n, k, p))),
        Chain::Scaled(c, b) => Some(f(b).map(|x| x.scale(c))),
        _ => None,
    }
}

/// E_X: (p; α) ↦ (p; X(p)∧α).
pub fn extrude<S: Scalar>(x: &VectorField<S>, j: &Chain<S>) -> Result<Chain<S>> {
    let (n, k) = (j.n(), j.k() + 1);
    check_dim(x.n(), n)?;
    if let Some(r) = distribute(j, n, k, &|c| extrude(x, c)) {
        return r;
    }
    match j {
        Chain::Dirac(d) => Ok(Chain::Dirac(extrude_dirac(x, d)?)),
        Chain::Simplicial(s) if x.is_affine() => {
            let (plain, rest) = split_plain(s);
            let mut out = SimplicialChain::zero(n, k);
            for c in plain {
                let field = c.verts.iter().map(|v| x.at(v)).collect();
                out.cells.push(Cell::with_field(CellKind::Monopole, c.verts, field, c.weight));
            }
            let lazy_part = if rest.cells.is_empty() {
                Chain::Simplicial(rest)
            } else {
                lazy(&Chain::Simplicial(rest), n, k, DualOp::Interior(x.exprs()))
            };
            Ok(join(n, k, vec![Chain::Simplicial(out), lazy_part]))
        }
        _ => Ok(lazy(j, n, k, DualOp::Interior(x.exprs()))),
    }
}

pub fn extrude_dirac<S: Scalar>(x: &VectorField<S>, d: &DipoleChain<S>) -> Result<DipoleChain<S>> {
    let cst = x.constant();
    let mut out = DipoleChain::zero(d.n, d.k + 1);
    for (p, s, a) in d.terms() {
        let v = match (&cst, s.degree()) {
            (Some(v), _) => v.clone(),
            (None, 0) => x.at(p),
            (None, _) => return Err(Error::Unsupported("extrusion of a dipole term by a nonconstant field".into())),
        };
        out.push(p.to_vec(), s.clone(), Multivector::vector(&v).wedge(a)?);
    }
    Ok(out)
}

/// E†_X: (p; α) ↦ (p; X(p)♭ ⌟ α).
pub fn retract<S: Scalar>(x: &VectorField<S>, j: &Chain<S>) -> Result<Chain<S>> {
    let n = j.n();
    check_dim(x.n(), n)?;
    if j.k() == 0 {
        return Err(Error::Grade("retraction of a 0-chain".into()));
    }
    let k = j.k() - 1;
    if let Some(r) = distribute(j, n, k, &|c| retract(x, c)) {
        return r;
    }
    match j {
        Chain::Dirac(d) => Ok(Chain::Dirac(retract_dirac(x, d)?)),
        _ => Ok(lazy(j, n, k, DualOp::FlatWedge(x.exprs()))),
    }
}

pub fn retract_dirac<S: Scalar>(x: &VectorField<S>, d: &DipoleChain<S>) -> Result<DipoleChain<S>> {
    if d.k == 0 {
        return Err(Error::Grade("retraction of a 0-chain".into()));
    }
    let cst = x.constant();
    let mut out = DipoleChain::zero(d.n, d.k - 1);
    for (p, s, a) in d.terms() {
        let v = match (&cst, s.degree()) {
            (Some(v), _) => v.clone(),
            (None, 0) => x.at(p),
            (None, _) => return Err(Error::Unsupported("retraction of a dipole term by a nonconstant field".into())),
        };
        out.push(p.to_vec(), s.clone(), Covector::from_vector(&v).interior(a)?);
    }
    Ok(out)
}

/// P_X = E_X ∂ + ∂ E_X.
pub fn prederivative<S: Scalar>(x: &VectorField<S>, j: &Chain<S>) -> Result<Chain<S>> {
    let (n, k) = (j.n(), j.k());
    check_dim(x.n(), n)?;
    if let Some(r) = distribute(j, n, k, &|c| prederivative(x, c)) {
        return r;
    }
    match j {
        Chain::Dirac(d) => Ok(Chain::Dirac(prederivative_dirac(x, d)?)),
        Chain::Simplicial(s) if x.is_affine() => {
            let (plain, rest) = split_plain(s);
            let mut out = SimplicialChain::zero(n, k);
            for c in plain {
                let field = c.verts.iter().map(|v| x.at(v)).collect();
                out.cells.push(Cell::with_field(CellKind::Dipole, c.verts, field, c.weight));
            }
            let lazy_part = if rest.cells.is_empty() {
                Chain::Simplicial(rest)
            } else {
                lazy(&Chain::Simplicial(rest), n, k, DualOp::Lie(x.exprs()))
            };
            Ok(join(n, k, vec![Chain::Simplicial(out), lazy_part]))
        }
        _ => Ok(lazy(j, n, k, DualOp::Lie(x.exprs()))),
    }
}

/// Constant v: (p; σ⊗α) ↦ (p; v∘σ⊗α). A nonconstant X on an order-zero
/// term gives (p; X(p)⊗α) + (p; DX(p)·α), with DX acting as a derivation.
pub fn prederivative_dirac<S: Scalar>(x: &VectorField<S>, d: &DipoleChain<S>) -> Result<DipoleChain<S>> {
    let cst = x.constant();
    let mut out = DipoleChain::zero(d.n, d.k);
    for (p, s, a) in d.terms() {
        match (&cst, s.degree()) {
            (Some(v), _) => out.push(p.to_vec(), s.product(&SymTensor::vector(v.clone()))?, a.clone()),
            (None, 0) => {
                out.push(p.to_vec(), SymTensor::vector(x.at(p)), a.clone());
                out.push(p.to_vec(), SymTensor::one(d.n), a.derivation(&x.jacobian_at(p)));
            }
            (None, _) => return Err(Error::Unsupported("prederivative of a dipole term along a nonconstant field".into())),
        }
    }
    Ok(out)
}

/// ∂. The boundary of a 0-chain is the zero chain by convention; callers
/// can detect that case with [`boundary_is_conventional`].
pub fn boundary<S: Scalar>(j: &Chain<S>) -> Result<Chain<S>> {
    let n = j.n();
    if j.k() == 0 {
        return Ok(Chain::Dirac(DipoleChain::zero(n, 0)));
    }
    let k = j.k() - 1;
    if let Some(r) = distribute(j, n, k, &|c| boundary(c)) {
        return r;
    }
    match j {
        Chain::Dirac(d) => Ok(Chain::Dirac(boundary_dirac(d))),
        Chain::Simplicial(s) => Ok(Chain::Simplicial(s.boundary()?)),
        Chain::Dual { op: DualOp::Homotopy(q), base, .. } => {
            // ∂κA = A − κ∂A, and for 0-chains ∂κA = A − (q; ∫_A 1)
            if base.k() == 0 {
                let total: S = integrate(base, &Form::function(n, crate::forms::Expr::one()), &Quadrature::default())?;
                let apex = Chain::Dirac(DipoleChain::dirac(q.clone(), Multivector::scalar(n, -total)));
                Ok(join(n, k, vec![(**base).clone(), apex]))
            } else {
                let c = cone(q, &boundary(base)?)?;
                Ok(join(n, k, vec![(**base).clone(), c.scale(&-S::one())]))
            }
        }
        _ => Ok(lazy(j, n, k, DualOp::Exterior)),
    }
}

pub fn boundary_is_conventional<S: Scalar>(j: &Chain<S>) -> bool {
    j.k() == 0
}

/// ∂(p; σ⊗α) = Σᵢ (p; eᵢ∘σ ⊗ eⁱ⌟α).
pub fn boundary_dirac<S: Scalar>(d: &DipoleChain<S>) -> DipoleChain<S> {
    let n = d.n;
    if d.k == 0 {
        return DipoleChain::zero(n, 0);
    }
    let mut out = DipoleChain::zero(n, d.k - 1);
    for (p, s, a) in d.terms() {
        for i in 0..n {
            let e = crate::algebra::unit::<S>(n, i);
            let b = Covector::from_vector(&e).interior(a).expect("grade checked");
            if b.is_zero() {
                continue;
            }
            out.push(p.to_vec(), s.product(&SymTensor::vector(e)).expect("same n"), b);
        }
    }
    out
}
