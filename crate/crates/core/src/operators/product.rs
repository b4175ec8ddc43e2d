use super::join;
use crate::chains::{tangent, Cell, CellKind, Chain, DipoleChain, DualOp, SimplicialChain};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// J ×̂ K in ℝ^{n+m}. Dirac terms combine as
/// ((p,q); σ∘τ ⊗ ι₁α ∧ ι₂β); plain cells give the staircase triangulation
/// of the product of simplices.
pub fn cartesian_wedge<S: Scalar>(j: &Chain<S>, kc: &Chain<S>) -> Result<Chain<S>> {
    let (n, m) = (j.n(), kc.n());
    let (nn, kk) = (n + m, j.k() + kc.k());
    match (j, kc) {
        (Chain::Sum(v), _) => Ok(join(nn, kk, v.iter().map(|c| cartesian_wedge(c, kc)).collect::<Result<_>>()?)),
        (_, Chain::Sum(v)) => Ok(join(nn, kk, v.iter().map(|c| cartesian_wedge(j, c)).collect::<Result<_>>()?)),
        (Chain::Scaled(c, b), _) => Ok(cartesian_wedge(b, kc)?.scale(c)),
        (_, Chain::Scaled(c, b)) => Ok(cartesian_wedge(j, b)?.scale(c)),
        (Chain::Dirac(a), Chain::Dirac(b)) => Ok(Chain::Dirac(wedge_dirac(a, b))),
        (Chain::Simplicial(a), Chain::Simplicial(b)) => Ok(Chain::Simplicial(wedge_simplicial(a, b)?)),
        _ => Err(Error::Unsupported("Cartesian wedge of mixed or lazy chains".into())),
    }
}

pub fn wedge_dirac<S: Scalar>(a: &DipoleChain<S>, b: &DipoleChain<S>) -> DipoleChain<S> {
    let nn = a.n + b.n;
    let mut out = DipoleChain::zero(nn, a.k + b.k);
    for (p, s, x) in a.terms() {
        let (s1, x1) = (s.embed(0, nn), x.embed(0, nn));
        for (q, t, y) in b.terms() {
            let mut pq = p.to_vec();
            pq.extend_from_slice(q);
            let sig = s1.product(&t.embed(a.n, nn)).expect("same n");
            out.push(pq, sig, x1.wedge(&y.embed(a.n, nn)).expect("same n"));
        }
    }
    out
}

/// Monotone lattice paths from (0,0) to (a,b).
fn staircases(a: usize, b: usize) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    let mut path = vec![(0, 0)];
    fn go(a: usize, b: usize, path: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        let (i, j) = *path.last().unwrap();
        if i == a && j == b {
            out.push(path.clone());
            return;
        }
        if i < a {
            path.push((i + 1, j));
            go(a, b, path, out);
            path.pop();
        }
        if j < b {
            path.push((i, j + 1));
            go(a, b, path, out);
            path.pop();
        }
    }
    go(a, b, &mut path, &mut out);
    out
}

pub fn wedge_simplicial<S: Scalar>(a: &SimplicialChain<S>, b: &SimplicialChain<S>) -> Result<SimplicialChain<S>> {
    let nn = a.n + b.n;
    let mut out = SimplicialChain::zero(nn, a.k + b.k);
    for c in &a.cells {
        for d in &b.cells {
            if c.kind != CellKind::Plain || d.kind != CellKind::Plain {
                return Err(Error::Unsupported("Cartesian wedge of cells carrying fields".into()));
            }
            let target = c.tangent().embed(0, nn).wedge(&d.tangent().embed(a.n, nn))?;
            for path in staircases(c.dim(), d.dim()) {
                let verts: Vec<Vec<S>> = path
                    .iter()
                    .map(|&(i, j)| {
                        let mut v = c.verts[i].clone();
                        v.extend_from_slice(&d.verts[j]);
                        v
                    })
                    .collect();
                let sign = tangent(&verts).inner(&target);
                let w = c.weight.clone() * d.weight.clone();
                let w = if sign.total_cmp(&S::zero()) == std::cmp::Ordering::Less { -w } else { w };
                out.cells.push(Cell::plain(verts, w));
            }
        }
    }
    Ok(out)
}

/// κ_q. Plain cells are coned explicitly to [q, v₀, …, v_k]; other chains are
/// carried through the homotopy operator. Cones of n-chains in ℝⁿ vanish.
pub fn cone<S: Scalar>(q: &[S], j: &Chain<S>) -> Result<Chain<S>> {
    let (n, k) = (j.n(), j.k() + 1);
    if q.len() != n {
        return Err(Error::Dimension(format!("cone point in ℝ^{} for a chain in ℝ^{}", q.len(), n)));
    }
    if k > n {
        return Ok(Chain::Dirac(DipoleChain::zero(n, k)));
    }
    let lazy = |c: &Chain<S>| Chain::Dual { n, k, op: DualOp::Homotopy(q.to_vec()), base: Box::new(c.clone()) };
    match j {
        Chain::Sum(v) => Ok(join(n, k, v.iter().map(|c| cone(q, c)).collect::<Result<_>>()?)),
        Chain::Scaled(c, b) => Ok(cone(q, b)?.scale(c)),
        Chain::Simplicial(s) => {
            let mut out = SimplicialChain::zero(n, k);
            let mut rest = SimplicialChain::zero(n, k - 1);
            for c in &s.cells {
                if c.kind != CellKind::Plain {
                    rest.cells.push(c.clone());
                    continue;
                }
                let mut verts = vec![q.to_vec()];
                verts.extend(c.verts.iter().cloned());
                if !tangent(&verts).is_zero() {
                    out.cells.push(Cell::plain(verts, c.weight.clone()));
                }
            }
            let tail = if rest.cells.is_empty() { Chain::Simplicial(rest) } else { lazy(&Chain::Simplicial(rest)) };
            Ok(join(n, k, vec![Chain::Simplicial(out), tail]))
        }
        _ => Ok(lazy(j)),
    }
}
