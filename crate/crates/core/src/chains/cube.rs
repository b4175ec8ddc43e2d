use super::dipole::DipoleChain;
use super::simplicial::{Cell, SimplicialChain};
use crate::error::{Error, Result};
use crate::scalar::{add_vec, scale_vec, sub_vec, Scalar};

/// Axis-aligned box with each face independently open or closed.
#[derive(Clone, Debug, PartialEq)]
pub struct CubeSpec<S> {
    pub lo: Vec<S>,
    pub hi: Vec<S>,
    pub lo_closed: Vec<bool>,
    pub hi_closed: Vec<bool>,
}

impl<S: Scalar> CubeSpec<S> {
    /// [lo, hi) on every axis.
    pub fn half_open(lo: Vec<S>, hi: Vec<S>) -> Self {
        let n = lo.len();
        CubeSpec { lo, hi, lo_closed: vec![true; n], hi_closed: vec![false; n] }
    }

    pub fn closed(lo: Vec<S>, hi: Vec<S>) -> Self {
        let n = lo.len();
        CubeSpec { lo, hi, lo_closed: vec![true; n], hi_closed: vec![true; n] }
    }

    pub fn contains(&self, p: &[S]) -> bool {
        p.iter().enumerate().all(|(i, x)| {
            let a = x.total_cmp(&self.lo[i]);
            let b = x.total_cmp(&self.hi[i]);
            use std::cmp::Ordering::*;
            (a == Greater || (a == Equal && self.lo_closed[i])) && (b == Less || (b == Equal && self.hi_closed[i]))
        })
    }

    /// The frontier hyperplane through p, if any.
    fn frontier_hit(&self, p: &[S]) -> Option<String> {
        for (i, x) in p.iter().enumerate() {
            if *x == self.lo[i] {
                return Some(format!("x{} = {}", i + 1, self.lo[i].fmt_value()));
            }
            if *x == self.hi[i] {
                return Some(format!("x{} = {}", i + 1, self.hi[i].fmt_value()));
            }
        }
        None
    }

    /// J⌊_Q for Dirac chains. Order-zero terms are kept or dropped by the
    /// open/closed flags; a dipole term on a frontier hyperplane makes the
    /// cube incompatible.
    pub fn restrict_dirac(&self, j: &DipoleChain<S>) -> Result<DipoleChain<S>> {
        let mut out = DipoleChain::zero(j.n, j.k);
        for (p, s, a) in j.terms() {
            if s.degree() > 0 {
                if let Some(h) = self.frontier_hit(p) {
                    return Err(Error::Incompatible(format!("dipole term based on the frontier hyperplane {}", h)));
                }
            }
            if self.contains(p) {
                out.push(p.to_vec(), s.clone(), a.clone());
            }
        }
        Ok(out)
    }

    /// J⌊_Q for simplicial chains by convex clipping; fields are carried by
    /// affine interpolation and clipped polygons are fanned from vertex 0.
    pub fn restrict_simplicial(&self, j: &SimplicialChain<S>) -> Result<SimplicialChain<S>> {
        let mut out = SimplicialChain::zero(j.n, j.k);
        for c in &j.cells {
            self.check_cell(c)?;
            for piece in self.clip_cell(c)? {
                out.cells.push(piece);
            }
        }
        Ok(out)
    }

    fn check_cell(&self, c: &Cell<S>) -> Result<()> {
        if c.dim() == 0 {
            return Ok(());
        }
        for i in 0..self.lo.len() {
            for bound in [&self.lo[i], &self.hi[i]] {
                let on = c.verts.iter().filter(|v| v[i] == *bound).count();
                if on >= 2 {
                    return Err(Error::Incompatible(format!(
                        "a face of a cell lies in the frontier hyperplane x{} = {}",
                        i + 1,
                        bound.fmt_value()
                    )));
                }
            }
        }
        Ok(())
    }

    fn clip_cell(&self, c: &Cell<S>) -> Result<Vec<Cell<S>>> {
        let has_field = !c.field.is_empty();
        let mut poly: Vec<(Vec<S>, Vec<S>)> = c
            .verts
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), if has_field { c.field[i].clone() } else { vec![] }))
            .collect();
        match c.dim() {
            0 => {
                return Ok(if self.contains(&c.verts[0]) { vec![c.clone()] } else { vec![] });
            }
            1 | 2 => {}
            d => return Err(Error::Unsupported(format!("clipping {}-dimensional cells", d))),
        }
        let closed_poly = c.dim() == 2;
        for i in 0..self.lo.len() {
            for (bound, upper) in [(&self.lo[i], false), (&self.hi[i], true)] {
                let inside = |p: &Vec<S>| -> bool {
                    let o = p[i].total_cmp(bound);
                    if upper {
                        o != std::cmp::Ordering::Greater
                    } else {
                        o != std::cmp::Ordering::Less
                    }
                };
                poly = clip_half(&poly, i, bound, &inside, closed_poly);
                if poly.is_empty() {
                    return Ok(vec![]);
                }
            }
        }
        let mk = |idx: &[usize]| Cell {
            kind: c.kind,
            verts: idx.iter().map(|&i| poly[i].0.clone()).collect(),
            field: if has_field { idx.iter().map(|&i| poly[i].1.clone()).collect() } else { vec![] },
            weight: c.weight.clone(),
        };
        if c.dim() == 1 {
            return Ok(if poly.len() == 2 && poly[0].0 != poly[1].0 { vec![mk(&[0, 1])] } else { vec![] });
        }
        let mut out = Vec::new();
        for t in 1..poly.len().saturating_sub(1) {
            let cell = mk(&[0, t, t + 1]);
            if !cell.tangent().is_zero() {
                out.push(cell);
            }
        }
        Ok(out)
    }
}

type Vtx<S> = (Vec<S>, Vec<S>);

fn lerp<S: Scalar>(a: &Vtx<S>, b: &Vtx<S>, axis: usize, c: &S) -> Vtx<S> {
    let t = (c.clone() - a.0[axis].clone()) / (b.0[axis].clone() - a.0[axis].clone());
    let mut p = add_vec(&a.0, &scale_vec(&t, &sub_vec(&b.0, &a.0)));
    p[axis] = c.clone();
    let f = if a.1.is_empty() { vec![] } else { add_vec(&a.1, &scale_vec(&t, &sub_vec(&b.1, &a.1))) };
    (p, f)
}

/// Sutherland–Hodgman against one axis half-space. Open polylines (segments)
/// are clipped without the closing edge.
fn clip_half<S: Scalar>(poly: &[Vtx<S>], axis: usize, c: &S, inside: &dyn Fn(&Vec<S>) -> bool, closed: bool) -> Vec<Vtx<S>> {
    let m = poly.len();
    let mut out = Vec::new();
    if !closed {
        let (a, b) = (&poly[0], &poly[1]);
        let (ia, ib) = (inside(&a.0), inside(&b.0));
        match (ia, ib) {
            (true, true) => return poly.to_vec(),
            (false, false) => return vec![],
            (true, false) => return vec![a.clone(), lerp(a, b, axis, c)],
            (false, true) => return vec![lerp(a, b, axis, c), b.clone()],
        }
    }
    for i in 0..m {
        let cur = &poly[i];
        let prev = &poly[(i + m - 1) % m];
        let (ic, ip) = (inside(&cur.0), inside(&prev.0));
        if ic {
            if !ip {
                out.push(lerp(prev, cur, axis, c));
            }
            out.push(cur.clone());
        } else if ip {
            out.push(lerp(prev, cur, axis, c));
        }
    }
    // drop consecutive duplicates from clipping exactly at a vertex
    out.dedup_by(|a, b| a.0 == b.0);
    if out.len() > 1 && out.first().map(|x| &x.0) == out.last().map(|x| &x.0) {
        out.pop();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Multivector, SymTensor};
    use crate::scalar::{q, Q};

    #[test]
    fn interior_point_kept() {
        let c = CubeSpec::half_open(vec![q(0, 1), q(0, 1)], vec![q(1, 1), q(1, 1)]);
        let d = DipoleChain::dirac(vec![q(1, 2), q(1, 2)], Multivector::<Q>::basis(2, &[0, 1]));
        assert_eq!(c.restrict_dirac(&d).unwrap(), d);
        let e = DipoleChain::dirac(vec![q(1, 1), q(1, 2)], Multivector::<Q>::basis(2, &[0, 1]));
        assert!(c.restrict_dirac(&e).unwrap().is_zero());
    }

    #[test]
    fn dipole_on_frontier_is_incompatible() {
        let c = CubeSpec::half_open(vec![q(0, 1)], vec![q(1, 1)]);
        let d = DipoleChain::dipole(vec![q(1, 1)], SymTensor::vector(vec![q(1, 1)]), Multivector::scalar(1, q(1, 1)));
        let err = c.restrict_dirac(&d).unwrap_err();
        assert!(err.to_string().contains("x1 = 1"));
    }

    #[test]
    fn triangle_clip_area() {
        let t = SimplicialChain::representative(vec![
            vec![q(0, 1), q(0, 1), q(1, 3)],
            vec![q(2, 1), q(0, 1), q(1, 3)],
            vec![q(0, 1), q(2, 1), q(1, 3)],
        ]);
        let c = CubeSpec::half_open(vec![q(0, 1), q(0, 1), q(0, 1)], vec![q(1, 1), q(1, 1), q(1, 1)]);
        // vertices at x=0 and y=0 lie on frontier planes; shift the cube
        let c2 = CubeSpec::half_open(vec![q(-1, 1), q(-1, 1), q(-1, 1)], vec![q(1, 1), q(1, 1), q(1, 1)]);
        assert!(c.restrict_simplicial(&t).is_err());
        let r = c2.restrict_simplicial(&t).unwrap();
        // the unit-square corner of the triangle
        assert!((r.hausdorff() - 1.0).abs() < 1e-15);
    }
}
