use super::dipole::DipoleChain;
use super::simplicial::SimplicialChain;
use crate::error::{Error, Result};
use crate::forms::{Expr, Form};
use crate::scalar::Scalar;

/// Form-side operator whose adjoint defines a lazily represented chain:
/// ∫_{op* J} ω = ∫_J op(ω).
#[derive(Clone, Debug, PartialEq)]
pub enum DualOp<S> {
    /// d, adjoint of ∂.
    Exterior,
    /// Straight-line homotopy toward the apex, adjoint of the cone κ.
    Homotopy(Vec<S>),
    /// i_X, adjoint of E_X.
    Interior(Vec<Expr>),
    /// X♭∧, adjoint of E†_X.
    FlatWedge(Vec<Expr>),
    /// L_X, adjoint of P_X.
    Lie(Vec<Expr>),
    /// F^*, adjoint of F_*; F maps ℝ^m to ℝ^{map.len()}.
    Pullback { map: Vec<Expr>, m: usize },
}

impl<S: Scalar> DualOp<S> {
    pub fn apply(&self, w: &Form) -> Result<Form> {
        match self {
            DualOp::Exterior => w.d(),
            DualOp::Homotopy(q) => Ok(w.homotopy(q)),
            DualOp::Interior(x) => w.interior(x),
            DualOp::FlatWedge(x) => Ok(w.flat_wedge(x)),
            DualOp::Lie(x) => w.lie(x),
            DualOp::Pullback { map, m } => Ok(w.pullback(map, *m)),
        }
    }
}

/// Any chain the library can pair with forms. Dirac and simplicial chains
/// are explicit; `Dual` nodes are exact but carried through their adjoint.
#[derive(Clone, Debug, PartialEq)]
pub enum Chain<S> {
    Dirac(DipoleChain<S>),
    Simplicial(SimplicialChain<S>),
    Sum(Vec<Chain<S>>),
    Scaled(S, Box<Chain<S>>),
    Dual { n: usize, k: usize, op: DualOp<S>, base: Box<Chain<S>> },
}

impl<S: Scalar> Chain<S> {
    pub fn n(&self) -> usize {
        match self {
            Chain::Dirac(d) => d.n,
            Chain::Simplicial(s) => s.n,
            Chain::Sum(v) => v.first().map_or(0, |c| c.n()),
            Chain::Scaled(_, c) => c.n(),
            Chain::Dual { n, .. } => *n,
        }
    }

    pub fn k(&self) -> usize {
        match self {
            Chain::Dirac(d) => d.k,
            Chain::Simplicial(s) => s.k,
            Chain::Sum(v) => v.first().map_or(0, |c| c.k()),
            Chain::Scaled(_, c) => c.k(),
            Chain::Dual { k, .. } => *k,
        }
    }

    pub fn sum(parts: Vec<Chain<S>>) -> Result<Chain<S>> {
        if let Some(f) = parts.first() {
            if parts.iter().any(|c| c.n() != f.n() || c.k() != f.k()) {
                return Err(Error::Grade("summands of different grade or dimension".into()));
            }
        }
        Ok(Chain::Sum(parts))
    }

    pub fn add(&self, o: &Chain<S>) -> Result<Chain<S>> {
        match (self, o) {
            (Chain::Dirac(a), Chain::Dirac(b)) => Ok(Chain::Dirac(a.add(b)?)),
            (Chain::Simplicial(a), Chain::Simplicial(b)) => Ok(Chain::Simplicial(a.add(b)?.canonicalize())),
            _ => Chain::sum(vec![self.clone(), o.clone()]),
        }
    }

    pub fn scale(&self, c: &S) -> Chain<S> {
        match self {
            Chain::Dirac(a) => Chain::Dirac(a.scale(c)),
            Chain::Simplicial(a) => Chain::Simplicial(a.scale(c)),
            _ => Chain::Scaled(c.clone(), Box::new(self.clone())),
        }
    }

    pub fn sub(&self, o: &Chain<S>) -> Result<Chain<S>> {
        self.add(&o.scale(&-S::one()))
    }

    pub fn as_dirac(&self) -> Option<&DipoleChain<S>> {
        match self {
            Chain::Dirac(d) => Some(d),
            _ => None,
        }
    }

    pub fn as_simplicial(&self) -> Option<&SimplicialChain<S>> {
        match self {
            Chain::Simplicial(s) => Some(s),
            _ => None,
        }
    }
}
