use super::field::{MapSpec, VectorField};
use super::distribute;
use crate::algebra::{indices, unit, Multivector, SymTensor};
use crate::chains::{Cell, CellKind, Chain, DipoleChain, DualOp, SimplicialChain};
use crate::error::{Error, Result};
use crate::scalar::{add_vec, scale_vec, Scalar};

fn matvec<S: Scalar>(m: &[Vec<S>], v: &[S]) -> Vec<S> {
    m.iter().map(|r| r.iter().zip(v).fold(S::zero(), |a, (x, y)| a + x.clone() * y.clone())).collect()
}

fn column<S: Scalar>(m: &[Vec<S>], j: usize) -> Vec<S> {
    m.iter().map(|r| r[j].clone()).collect()
}

/// Σᵢ Av₁∧…∧Bvᵢ∧…∧Avₖ, the derivative of Λᵏ(A + tB) at t = 0.
fn mixed_linear<S: Scalar>(a: &Multivector<S>, ma: &[Vec<S>], mb: &[Vec<S>]) -> Multivector<S> {
    let m = ma.len();
    let mut out = Multivector::zero(m, a.k);
    for (b, x) in a.terms() {
        let idx = indices(*b);
        for slot in 0..idx.len() {
            let mut w = Multivector::scalar(m, x.clone());
            for (t, &j) in idx.iter().enumerate() {
                let col = if t == slot { column(mb, j) } else { column(ma, j) };
                w = w.wedge(&Multivector::vector(&col)).unwrap();
            }
            out = out.add(&w);
        }
    }
    out
}

/// F_*. Dirac terms of order ≤ 1 are pushed for any smooth F, higher orders
/// need affine F. Simplicial chains are pushed cellwise when F is affine
/// and carried through F^* otherwise.
pub fn pushforward<S: Scalar>(f: &MapSpec, j: &Chain<S>) -> Result<Chain<S>> {
    if f.m != j.n() {
        return Err(Error::Dimension(format!("map from ℝ^{} applied to a chain in ℝ^{}", f.m, j.n())));
    }
    let (n, k) = (f.target_dim(), j.k());
    if let Some(r) = distribute(j, n, k, &|c| pushforward(f, c)) {
        return r;
    }
    match j {
        Chain::Dirac(d) => Ok(Chain::Dirac(pushforward_dirac(f, d)?)),
        Chain::Simplicial(s) if f.is_affine() => {
            let mut out = SimplicialChain::zero(n, k);
            for c in &s.cells {
                let verts: Vec<Vec<S>> = c.verts.iter().map(|v| f.eval(v)).collect();
                let field = c.field.iter().zip(&c.verts).map(|(x, v)| matvec(&f.jacobian(v), x)).collect();
                out.cells.push(Cell { kind: c.kind, verts, field, weight: c.weight.clone() });
            }
            Ok(Chain::Simplicial(out))
        }
        _ => Ok(Chain::Dual { n, k, op: DualOp::Pullback { map: f.f.clone(), m: f.m }, base: Box::new(j.clone()) }),
    }
}

pub fn pushforward_dirac<S: Scalar>(f: &MapSpec, d: &DipoleChain<S>) -> Result<DipoleChain<S>> {
    let n = f.target_dim();
    let affine = f.is_affine();
    let mut out = DipoleChain::zero(n, d.k);
    for (p, s, a) in d.terms() {
        let fp = f.eval(p);
        let df = f.jacobian(p);
        let fa = a.apply_linear(&df);
        match s.degree() {
            0 => out.push(fp, SymTensor::one(n), fa),
            1 if !affine => {
                let u = &s.factors()[0];
                out.push(fp.clone(), SymTensor::vector(matvec(&df, u)), fa);
                out.push(fp, SymTensor::one(n), mixed_linear(a, &df, &f.jacobian_derivative(p, u)));
            }
            _ if affine => out.push(fp, s.map_factors(n, |u| matvec(&df, u)), fa),
            s => return Err(Error::Unsupported(format!("pushforward of an order-{} dipole term by a non-affine map", s))),
        }
    }
    Ok(out)
}

/// Explicit simplicial approximation of F_* for plain cells: refine
/// `depth` times and push the vertices.
pub fn pushforward_subdivided<S: Scalar>(f: &MapSpec, s: &SimplicialChain<S>, depth: u32) -> Result<SimplicialChain<S>> {
    if f.m != s.n {
        return Err(Error::Dimension(format!("map from ℝ^{} applied to a chain in ℝ^{}", f.m, s.n)));
    }
    if s.cells.iter().any(|c| c.kind != CellKind::Plain) {
        return Err(Error::Unsupported("subdivided pushforward of cells carrying fields".into()));
    }
    let mut cur = s.clone();
    for _ in 0..depth {
        cur = cur.refine();
    }
    let cells = cur.cells.into_iter().map(|c| Cell::plain(c.verts.iter().map(|v| f.eval(v)).collect(), c.weight)).collect();
    Ok(SimplicialChain { n: f.target_dim(), k: s.k, cells })
}

/// Time-t flow φ_t of X applied to order-zero Dirac terms, with the
/// trajectory and its Jacobian integrated by classical RK4.
pub fn flow_dirac<S: Scalar>(x: &VectorField<S>, d: &DipoleChain<S>, t: &S, steps: usize) -> Result<DipoleChain<S>> {
    if d.order() > 0 {
        return Err(Error::Unsupported("flow of dipole terms".into()));
    }
    let n = d.n;
    let h = t.clone() / S::from_i64(steps as i64);
    let half = h.clone() / S::from_i64(2);
    let sixth = h.clone() / S::from_i64(6);
    // state = (point, columns of Dφ)
    let rhs = |p: &[S], m: &[Vec<S>]| -> (Vec<S>, Vec<Vec<S>>) {
        let dx = x.jacobian_at(p);
        (x.at(p), m.iter().map(|c| matvec(&dx, c)).collect())
    };
    let axpy = |p: &[S], m: &[Vec<S>], c: &S, dp: &[S], dm: &[Vec<S>]| -> (Vec<S>, Vec<Vec<S>>) {
        (add_vec(p, &scale_vec(c, dp)), m.iter().zip(dm).map(|(a, b)| add_vec(a, &scale_vec(c, b))).collect())
    };
    let mut out = DipoleChain::zero(n, d.k);
    for (p0, _, a) in d.terms() {
        let mut p = p0.to_vec();
        let mut m: Vec<Vec<S>> = (0..n).map(|i| unit(n, i)).collect();
        for _ in 0..steps {
            let k1 = rhs(&p, &m);
            let s2 = axpy(&p, &m, &half, &k1.0, &k1.1);
            let k2 = rhs(&s2.0, &s2.1);
            let s3 = axpy(&p, &m, &half, &k2.0, &k2.1);
            let k3 = rhs(&s3.0, &s3.1);
            let s4 = axpy(&p, &m, &h, &k3.0, &k3.1);
            let k4 = rhs(&s4.0, &s4.1);
            let two = S::from_i64(2);
            let dp: Vec<S> = (0..n)
                .map(|i| k1.0[i].clone() + two.clone() * k2.0[i].clone() + two.clone() * k3.0[i].clone() + k4.0[i].clone())
                .collect();
            let dm: Vec<Vec<S>> = (0..n)
                .map(|c| {
                    (0..n)
                        .map(|i| {
                            k1.1[c][i].clone() + two.clone() * k2.1[c][i].clone() + two.clone() * k3.1[c][i].clone() + k4.1[c][i].clone()
                        })
                        .collect()
                })
                .collect();
            let next = axpy(&p, &m, &sixth, &dp, &dm);
            p = next.0;
            m = next.1;
        }
        // rows of Dφ from its columns
        let rows: Vec<Vec<S>> = (0..n).map(|i| m.iter().map(|c| c[i].clone()).collect()).collect();
        out.push(p, SymTensor::one(n), a.apply_linear(&rows));
    }
    Ok(out)
}
