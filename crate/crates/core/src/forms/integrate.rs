use super::form::Form;
use super::quadrature::{grundmann_moller, order_for_degree};
use crate::algebra::Multivector;
use crate::chains::{affine_combo, Cell, CellKind, Chain, DipoleChain, SimplicialChain};
use crate::error::{Error, Result};
use crate::scalar::{sub_vec, Scalar};

/// Settings for cell quadrature of non-polynomial integrands.
#[derive(Clone, Debug)]
pub struct Quadrature {
    /// Polynomial degree of the base rule.
    pub g: u32,
    /// Allowed disagreement between the rule and its refinement.
    pub tol: f64,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature { g: 4, tol: 1e-9 }
    }
}

/// ∫_J ω.
pub fn integrate<S: Scalar>(j: &Chain<S>, w: &Form, quad: &Quadrature) -> Result<S> {
    if j.n() != w.n || j.k() != w.k {
        return Err(Error::Grade(format!(
            "cannot pair a {}-form on ℝ^{} with a {}-chain in ℝ^{}",
            w.k,
            w.n,
            j.k(),
            j.n()
        )));
    }
    match j {
        Chain::Dirac(d) => integrate_dirac(d, w),
        Chain::Simplicial(s) => integrate_simplicial(s, w, quad),
        Chain::Sum(v) => v.iter().try_fold(S::zero(), |a, c| Ok(a + integrate(c, w, quad)?)),
        Chain::Scaled(c, x) => Ok(c.clone() * integrate(x, w, quad)?),
        Chain::Dual { op, base, .. } => integrate(base, &op.apply(w)?, quad),
    }
}

pub fn integrate_dirac<S: Scalar>(d: &DipoleChain<S>, w: &Form) -> Result<S> {
    let mut s = S::zero();
    for (p, sig, a) in d.terms() {
        s = s + if sig.degree() == 0 { w.eval(p, a)? } else { w.eval_dipole(p, sig, a)? };
    }
    Ok(s)
}

pub fn integrate_simplicial<S: Scalar>(c: &SimplicialChain<S>, w: &Form, quad: &Quadrature) -> Result<S> {
    let partials: Vec<Form> = if c.cells.iter().any(|x| x.kind == CellKind::Dipole) {
        (0..w.n).map(|j| w.map_coeffs(|e| e.diff(j))).collect()
    } else {
        vec![]
    };
    c.cells.iter().try_fold(S::zero(), |a, x| Ok(a + cell_integral(x, w, &partials, quad)?))
}

/// ∫ over a single weighted cell.
pub fn integrate_cell<S: Scalar>(cell: &Cell<S>, w: &Form, quad: &Quadrature) -> Result<S> {
    let partials: Vec<Form> =
        if cell.kind == CellKind::Dipole { (0..w.n).map(|j| w.map_coeffs(|e| e.diff(j))).collect() } else { vec![] };
    cell_integral(cell, w, &partials, quad)
}

fn cell_integral<S: Scalar>(cell: &Cell<S>, w: &Form, partials: &[Form], quad: &Quadrature) -> Result<S> {
    if cell.kind == CellKind::Dipole && w.r < 1 {
        return Err(Error::Class { need: 1, have: w.r });
    }
    let extra = if cell.kind == CellKind::Plain { 0 } else { 1 };
    match w.degree() {
        Some(d) => Ok(cell.weight.clone() * rule_sum(cell, w, partials, order_for_degree(d + extra))?),
        None => {
            let s = order_for_degree(quad.g);
            let coarse = rule_sum(cell, w, partials, s)?;
            let refined = SimplicialChain { n: cell.n(), k: cell.grade(), cells: vec![Cell { weight: S::one(), ..cell.clone() }] }.refine();
            let fine = refined.cells.iter().try_fold(S::zero(), |a, x| Ok::<S, Error>(a + rule_sum(x, w, partials, s)?))?;
            let diff = (coarse.to_f64() - fine.to_f64()).abs();
            if diff > quad.tol * fine.to_f64().abs().max(1.0) {
                return Err(Error::Quadrature(diff));
            }
            Ok(cell.weight.clone() * fine)
        }
    }
}

/// Unweighted rule evaluation on one cell.
fn rule_sum<S: Scalar>(cell: &Cell<S>, w: &Form, partials: &[Form], s: usize) -> Result<S> {
    let rule = grundmann_moller(cell.dim(), s);
    let t = cell.tangent();
    let dxt = if cell.kind == CellKind::Dipole { tangential_derivation(cell) } else { Multivector::zero(cell.n(), 0) };
    let mut acc = S::zero();
    for (i, (bary, wq)) in rule.nodes.iter().enumerate() {
        let wq = S::from_const(wq, rule.nodes_f[i].1);
        let lam: Vec<S> = bary.iter().enumerate().map(|(j, b)| S::from_const(b, rule.nodes_f[i].0[j])).collect();
        let x = affine_combo(&cell.verts, &lam);
        let v = match cell.kind {
            CellKind::Plain => w.eval(&x, &t)?,
            CellKind::Monopole => {
                let xf = affine_combo(&cell.field, &lam);
                w.eval(&x, &Multivector::vector(&xf).wedge(&t)?)?
            }
            CellKind::Dipole => {
                let xf = affine_combo(&cell.field, &lam);
                let mut dir = S::zero();
                for (j, xj) in xf.iter().enumerate() {
                    if !xj.is_zero() {
                        dir = dir + xj.clone() * partials[j].eval(&x, &t)?;
                    }
                }
                dir + w.eval(&x, &dxt)?
            }
        };
        acc = acc + wq * v;
    }
    Ok(acc)
}

/// DX·T for the affine field: Σᵢ e₁∧…∧(X(vᵢ)−X(v₀))∧…∧e_k / k!.
fn tangential_derivation<S: Scalar>(cell: &Cell<S>) -> Multivector<S> {
    let n = cell.n();
    let k = cell.dim();
    let edges: Vec<Vec<S>> = (1..=k).map(|i| sub_vec(&cell.verts[i], &cell.verts[0])).collect();
    let dedges: Vec<Vec<S>> = (1..=k).map(|i| sub_vec(&cell.field[i], &cell.field[0])).collect();
    let mut fact = S::one();
    for i in 2..=k {
        fact = fact * S::from_i64(i as i64);
    }
    let mut out = Multivector::zero(n, k);
    for slot in 0..k {
        let mut m = Multivector::scalar(n, S::one() / fact.clone());
        for (i, e) in edges.iter().enumerate() {
            let v = if i == slot { &dedges[i] } else { e };
            m = m.wedge(&Multivector::vector(v)).unwrap();
        }
        out = out.add(&m);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::Expr;
    use crate::scalar::{q, Q};

    fn v(x: &[i64]) -> Vec<Q> {
        x.iter().map(|&a| q(a, 1)).collect()
    }

    #[test]
    fn representative_integrals() {
        let quad = Quadrature::default();
        let seg: Chain<Q> = Chain::Simplicial(SimplicialChain::representative(vec![v(&[0]), v(&[1])]));
        assert_eq!(integrate(&seg, &Form::term(1, &[0], Expr::one()), &quad).unwrap(), q(1, 1));
        let tri: Chain<Q> = Chain::Simplicial(SimplicialChain::representative(vec![v(&[0, 0]), v(&[1, 0]), v(&[0, 1])]));
        let w = Form::term(2, &[0, 1], Expr::var(0));
        assert_eq!(integrate(&tri, &w, &quad).unwrap(), q(1, 6));
    }

    #[test]
    fn dirac_examples() {
        let quad = Quadrature::default();
        let w = Form::term(2, &[1], Expr::var(0));
        let d = DipoleChain::dirac(v(&[5, 7]), Multivector::basis(2, &[1]));
        assert_eq!(integrate(&Chain::Dirac(d), &w, &quad).unwrap(), q(5, 1));
        let w = Form::term(1, &[0], Expr::var(0).pow(2));
        let d = DipoleChain::dirac(v(&[3]), Multivector::basis(1, &[0]));
        assert_eq!(integrate(&Chain::Dirac(d), &w, &quad).unwrap(), q(9, 1));
        let dv = Form::volume(3);
        let d = DipoleChain::dirac(v(&[1, 2, 3]), Multivector::basis(3, &[0, 1, 2]));
        assert_eq!(integrate(&Chain::Dirac(d), &dv, &quad).unwrap(), q(1, 1));
    }

    #[test]
    fn dipole_term_matches_difference_quotient() {
        // ω = x dy, (p; e1⊗e2) → ∂_x(x) = 1
        let w = Form::term(2, &[1], Expr::var(0));
        let d = DipoleChain::dipole(
            vec![0.3, 0.4],
            crate::algebra::SymTensor::vector(vec![1.0, 0.0]),
            Multivector::basis(2, &[1]),
        );
        let got: f64 = integrate_dirac(&d, &w).unwrap();
        let a = Multivector::basis(2, &[1]);
        let h = 1e-6;
        let fd = (w.eval(&[0.3 + h, 0.4], &a).unwrap() - w.eval(&[0.3, 0.4], &a).unwrap()) / h;
        assert!((got - 1.0).abs() < 1e-15 && (fd - got).abs() < 1e-6);
    }

    #[test]
    fn nonpolynomial_uses_refinement() {
        let seg: Chain<f64> = Chain::Simplicial(SimplicialChain::representative(vec![vec![0.0], vec![0.01]]));
        let w = Form::term(1, &[0], Expr::var(0).sin());
        let got = integrate(&seg, &w, &Quadrature::default()).unwrap();
        assert!((got - (1.0 - 0.01f64.cos())).abs() < 1e-14);
        let long: Chain<f64> = Chain::Simplicial(SimplicialChain::representative(vec![vec![0.0], vec![40.0]]));
        assert!(matches!(integrate(&long, &w, &Quadrature::default()), Err(Error::Quadrature(_))));
    }

    #[test]
    fn grade_mismatch() {
        let d: Chain<Q> = Chain::Dirac(DipoleChain::dirac(v(&[0, 0]), Multivector::basis(2, &[0])));
        assert!(integrate(&d, &Form::volume(2), &Quadrature::default()).is_err());
    }
}
