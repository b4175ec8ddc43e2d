use super::geom::{key, point_line_dist, point_seg_dist, seg_seg_dist, to_vec, V3};
use crate::chains::{Cell, CellKind, SimplicialChain};
use crate::error::{Error, Result};
use crate::forms::Expr;

#[derive(Clone, Debug, PartialEq)]
pub struct Polyline {
    pub pts: Vec<V3>,
    pub closed: bool,
}

impl Polyline {
    pub fn new(pts: Vec<V3>, closed: bool) -> Self {
        Polyline { pts, closed }
    }

    pub fn segments(&self) -> Vec<(V3, V3)> {
        let m = self.pts.len();
        let mut out: Vec<(V3, V3)> = self.pts.windows(2).map(|w| (w[0], w[1])).collect();
        if self.closed && m > 2 {
            out.push((self.pts[m - 1], self.pts[0]));
        }
        out
    }

    pub fn length(&self) -> f64 {
        self.segments().iter().map(|(a, b)| (b - a).norm()).sum()
    }

    pub fn reversed(&self) -> Polyline {
        let mut pts = self.pts.clone();
        pts.reverse();
        Polyline { pts, closed: self.closed }
    }

    /// Inserts the midpoint of every segment.
    pub fn refine(&self) -> Polyline {
        let mut pts = Vec::new();
        for (a, b) in self.segments() {
            pts.push(a);
            pts.push((a + b) * 0.5);
        }
        if !self.closed {
            pts.push(*self.pts.last().unwrap());
        }
        Polyline { pts, closed: self.closed }
    }

    /// Regular m-gon inscribed in the circle of radius r about c in the plane
    /// spanned by the orthonormal pair (e1, e2).
    pub fn circle(c: V3, e1: V3, e2: V3, r: f64, m: usize) -> Polyline {
        let pts = (0..m)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / m as f64;
                c + e1 * (r * t.cos()) + e2 * (r * t.sin())
            })
            .collect();
        Polyline { pts, closed: true }
    }

    /// Closed polyline through x(t) at t = 2πi/m, the parameter being x1.
    pub fn parametric(exprs: &[Expr; 3], m: usize) -> Result<Polyline> {
        if m < 3 {
            return Err(Error::Geometry("a closed curve needs at least 3 segments".into()));
        }
        let mut pts = Vec::with_capacity(m);
        for i in 0..m {
            let t = 2.0 * std::f64::consts::PI * i as f64 / m as f64;
            let p = V3::new(exprs[0].eval(&[t]), exprs[1].eval(&[t]), exprs[2].eval(&[t]));
            if !p.iter().all(|x| x.is_finite()) {
                return Err(Error::Geometry(format!("curve not finite at t = {}", t)));
            }
            pts.push(p);
        }
        Ok(Polyline { pts, closed: true })
    }
}

/// The prescribed curve γ as a union of polyline arcs, with the cone point q.
#[derive(Clone, Debug)]
pub struct BoundaryCurve {
    pub arcs: Vec<Polyline>,
    pub q: V3,
}

impl BoundaryCurve {
    /// Checks that the arcs are simple and meet only at shared vertices, and
    /// that q stays 1e-6 away from the line of every segment.
    pub fn new(arcs: Vec<Polyline>, q: V3) -> Result<Self> {
        if arcs.is_empty() || arcs.iter().any(|a| a.pts.len() < 2) {
            return Err(Error::Geometry("empty boundary curve".into()));
        }
        let c = BoundaryCurve { arcs, q };
        let segs = c.segments();
        let scale = c.scale();
        let tol = 1e-9 * scale;
        for (i, (a, b)) in segs.iter().enumerate() {
            if (b - a).norm() <= tol {
                return Err(Error::Geometry(format!("segment {} has zero length", i)));
            }
            if point_line_dist(&q, a, b) <= 1e-6 {
                return Err(Error::Geometry(format!("cone point lies on the line of segment {}", i)));
            }
        }
        for i in 0..segs.len() {
            for j in i + 1..segs.len() {
                let (a, b) = segs[i];
                let (c2, d) = segs[j];
                let shared: Vec<V3> =
                    [a, b].into_iter().filter(|p| key(p) == key(&c2) || key(p) == key(&d)).collect();
                let bad = match shared.len() {
                    0 => seg_seg_dist(&a, &b, &c2, &d) <= tol,
                    1 => {
                        let s = shared[0];
                        let other_i = if key(&a) == key(&s) { b } else { a };
                        let other_j = if key(&c2) == key(&s) { d } else { c2 };
                        point_seg_dist(&other_i, &c2, &d) <= tol || point_seg_dist(&other_j, &a, &b) <= tol
                    }
                    _ => true,
                };
                if bad {
                    return Err(Error::Geometry(format!("curve is not simple: segments {} and {} meet", i, j)));
                }
            }
        }
        Ok(c)
    }

    pub fn with_q(&self, q: V3) -> Result<Self> {
        BoundaryCurve::new(self.arcs.clone(), q)
    }

    pub fn segments(&self) -> Vec<(V3, V3)> {
        self.arcs.iter().flat_map(|a| a.segments()).collect()
    }

    pub fn points(&self) -> Vec<V3> {
        self.arcs.iter().flat_map(|a| a.pts.iter().copied()).collect()
    }

    pub fn length(&self) -> f64 {
        self.arcs.iter().map(Polyline::length).sum()
    }

    /// Corners of the bounding box of γ ∪ {q}.
    pub fn bbox(&self) -> (V3, V3) {
        let mut lo = self.q;
        let mut hi = self.q;
        for p in self.points() {
            lo = lo.inf(&p);
            hi = hi.sup(&p);
        }
        (lo, hi)
    }

    pub fn scale(&self) -> f64 {
        let (lo, hi) = self.bbox();
        (hi - lo).norm().max(1e-300)
    }

    /// Y(p) = (q − p)/|q − p|.
    pub fn y(&self, p: &V3) -> V3 {
        (self.q - p).normalize()
    }

    /// Whether p lies on γ.
    pub fn contains(&self, p: &V3, tol: f64) -> bool {
        self.segments().iter().any(|(a, b)| point_seg_dist(p, a, b) <= tol)
    }

    /// Whether [a, b] lies inside a single segment of γ.
    pub fn covers(&self, a: &V3, b: &V3, tol: f64) -> bool {
        self.segments().iter().any(|(u, v)| point_seg_dist(a, u, v) <= tol && point_seg_dist(b, u, v) <= tol)
    }

    /// Cycles to test links against: the closed arcs, and arc₀ − arcⱼ for
    /// open arcs sharing arc₀'s endpoints (a theta graph).
    pub fn cycles(&self) -> Vec<Polyline> {
        let mut out: Vec<Polyline> = self.arcs.iter().filter(|a| a.closed).cloned().collect();
        let open: Vec<&Polyline> = self.arcs.iter().filter(|a| !a.closed).collect();
        if let Some(first) = open.first() {
            let (s, e) = (key(&first.pts[0]), key(first.pts.last().unwrap()));
            for other in open.iter().skip(1) {
                let (os, oe) = (key(&other.pts[0]), key(other.pts.last().unwrap()));
                let back = if os == s && oe == e {
                    other.reversed()
                } else if os == e && oe == s {
                    (*other).clone()
                } else {
                    continue;
                };
                let mut pts = first.pts.clone();
                pts.extend(back.pts.iter().skip(1).take(back.pts.len() - 2));
                out.push(Polyline { pts, closed: true });
            }
        }
        out
    }

    /// P_Y γ̃ as dipole 1-cells.
    pub fn dipole_chain(&self) -> SimplicialChain<f64> {
        let mut c = SimplicialChain::zero(3, 1);
        for (a, b) in self.segments() {
            let cell = Cell::with_field(
                CellKind::Dipole,
                vec![to_vec(&a), to_vec(&b)],
                vec![to_vec(&self.y(&a)), to_vec(&self.y(&b))],
                1.0,
            );
            c.cells.push(cell);
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_circle(m: usize) -> Polyline {
        Polyline::circle(V3::zeros(), V3::x(), V3::y(), 1.0, m)
    }

    #[test]
    fn circle_lengths_and_refinement() {
        let c = unit_circle(64);
        let want = 128.0 * (std::f64::consts::PI / 64.0).sin();
        assert!((c.length() - want).abs() < 1e-12);
        assert_eq!(c.refine().pts.len(), 128);
        assert!((c.refine().length() - c.length()).abs() < 1e-12);
    }

    #[test]
    fn parametric_matches_circle() {
        let e = |s: &str| Expr::parse(s).unwrap();
        let p = Polyline::parametric(&[e("(cos x1)"), e("(sin x1)"), e("0")], 16).unwrap();
        let c = unit_circle(16);
        for (a, b) in p.pts.iter().zip(&c.pts) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn validation() {
        let q = V3::new(0.1, 0.2, 0.6);
        assert!(BoundaryCurve::new(vec![unit_circle(64)], q).is_ok());
        // q on the line of a segment
        let c = unit_circle(4);
        assert!(BoundaryCurve::new(vec![c.clone()], V3::new(2.0, -1.0, 0.0)).is_err());
        // figure eight crossing itself
        let eight = Polyline::new(
            vec![V3::new(0.0, 0.0, 0.0), V3::new(1.0, 1.0, 0.0), V3::new(1.0, 0.0, 0.0), V3::new(0.0, 1.0, 0.0)],
            true,
        );
        assert!(BoundaryCurve::new(vec![eight], V3::new(0.3, 0.3, 1.0)).is_err());
    }

    #[test]
    fn theta_cycles() {
        let a = V3::zeros();
        let b = V3::z();
        let arcs: Vec<Polyline> = (0..3)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / 3.0;
                let d = V3::new(t.cos(), t.sin(), 0.0);
                Polyline::new(vec![a, a + d, b + d, b], false)
            })
            .collect();
        let c = BoundaryCurve::new(arcs, V3::new(0.0, 0.0, 0.5)).unwrap();
        let cyc = c.cycles();
        assert_eq!(cyc.len(), 2);
        assert_eq!(cyc[0].pts.len(), 6);
    }
}
