use crate::error::{Error, Result};
use crate::forms::{Expr, Form};
use crate::scalar::Scalar;

/// A vector field on ℝⁿ: a constant vector or expression components.
#[derive(Clone, Debug, PartialEq)]
pub enum VectorField<S> {
    Constant(Vec<S>),
    Expr(Vec<Expr>),
}

impl<S: Scalar> VectorField<S> {
    pub fn n(&self) -> usize {
        match self {
            VectorField::Constant(v) => v.len(),
            VectorField::Expr(e) => e.len(),
        }
    }

    /// The constant value, also for expression fields without variables.
    pub fn constant(&self) -> Option<Vec<S>> {
        match self {
            VectorField::Constant(v) => Some(v.clone()),
            VectorField::Expr(e) => e.iter().map(|c| c.as_const().map(S::from_q)).collect(),
        }
    }

    pub fn at(&self, p: &[S]) -> Vec<S> {
        match self {
            VectorField::Constant(v) => v.clone(),
            VectorField::Expr(e) => e.iter().map(|c| c.eval(p)).collect(),
        }
    }

    /// DX(p) by rows: entry [i][j] = ∂_j X_i.
    pub fn jacobian_at(&self, p: &[S]) -> Vec<Vec<S>> {
        let n = self.n();
        match self {
            VectorField::Constant(_) => vec![vec![S::zero(); n]; n],
            VectorField::Expr(e) => e.iter().map(|c| (0..n).map(|j| c.diff(j).eval(p)).collect()).collect(),
        }
    }

    pub fn exprs(&self) -> Vec<Expr> {
        match self {
            VectorField::Constant(v) => v.iter().map(Expr::from_scalar).collect(),
            VectorField::Expr(e) => e.clone(),
        }
    }

    /// Affine fields are reproduced exactly by per-vertex samples.
    pub fn is_affine(&self) -> bool {
        self.exprs().iter().all(|e| e.degree().is_some_and(|d| d <= 1))
    }

    /// Upper estimate of ‖X‖_{B^r} over a box.
    pub fn norm_upper(&self, r: u32, bx: &[(f64, f64)]) -> f64 {
        let mut w = Form::zero(self.n(), 1);
        for (i, e) in self.exprs().into_iter().enumerate() {
            w = w.add(&Form::term(self.n(), &[i], e));
        }
        w.br_upper(r, bx, 2)
    }

    /// `;`-separated component expressions.
    pub fn parse(s: &str, n: usize) -> Result<Self> {
        let parts: Vec<Expr> = s.split(';').map(|p| Expr::parse(p.trim())).collect::<Result<_>>()?;
        if parts.len() != n {
            return Err(Error::Dimension(format!("field has {} components, expected {}", parts.len(), n)));
        }
        Ok(VectorField::Expr(parts))
    }
}

/// A map F: ℝᵐ → ℝⁿ given by n coordinate expressions in x1..xm.
#[derive(Clone, Debug, PartialEq)]
pub struct MapSpec {
    pub f: Vec<Expr>,
    pub m: usize,
}

impl MapSpec {
    pub fn new(f: Vec<Expr>, m: usize) -> Self {
        MapSpec { f, m }
    }

    pub fn identity(n: usize) -> Self {
        MapSpec { f: (0..n).map(Expr::var).collect(), m: n }
    }

    pub fn target_dim(&self) -> usize {
        self.f.len()
    }

    pub fn eval<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        self.f.iter().map(|e| e.eval(p)).collect()
    }

    pub fn jacobian<S: Scalar>(&self, p: &[S]) -> Vec<Vec<S>> {
        self.f.iter().map(|e| (0..self.m).map(|j| e.diff(j).eval(p)).collect()).collect()
    }

    /// D_u DF at p.
    pub fn jacobian_derivative<S: Scalar>(&self, p: &[S], u: &[S]) -> Vec<Vec<S>> {
        self.f
            .iter()
            .map(|e| {
                (0..self.m)
                    .map(|j| {
                        let dj = e.diff(j);
                        u.iter().enumerate().fold(S::zero(), |a, (l, ul)| {
                            if ul.is_zero() {
                                a
                            } else {
                                a + ul.clone() * dj.diff(l).eval(p)
                            }
                        })
                    })
                    .collect()
            })
            .collect()
    }

    pub fn is_affine(&self) -> bool {
        self.f.iter().all(|e| e.degree().is_some_and(|d| d <= 1))
    }

    pub fn parse(s: &str, m: usize) -> Result<Self> {
        let f: Vec<Expr> = s.split(';').map(|p| Expr::parse(p.trim())).collect::<Result<_>>()?;
        Ok(MapSpec { f, m })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, Q};

    #[test]
    fn constant_detection() {
        let x: VectorField<Q> = VectorField::parse("1; 2/3", 2).unwrap();
        assert_eq!(x.constant(), Some(vec![q(1, 1), q(2, 3)]));
        let y: VectorField<Q> = VectorField::parse("x2; (- x1)", 2).unwrap();
        assert!(y.constant().is_none() && y.is_affine());
        assert_eq!(y.jacobian_at(&[q(0, 1), q(0, 1)]), vec![vec![q(0, 1), q(1, 1)], vec![q(-1, 1), q(0, 1)]]);
        assert!(VectorField::<Q>::parse("1", 2).is_err());
    }

    #[test]
    fn map_jacobians() {
        let f = MapSpec::parse("(pow x1 2); (* x1 x2)", 2).unwrap();
        assert!(!f.is_affine());
        let p = [q(3, 1), q(5, 1)];
        assert_eq!(f.jacobian(&p), vec![vec![q(6, 1), q(0, 1)], vec![q(5, 1), q(3, 1)]]);
        let d = f.jacobian_derivative(&p, &[q(1, 1), q(0, 1)]);
        assert_eq!(d, vec![vec![q(2, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]]);
    }
}
