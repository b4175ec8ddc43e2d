use super::curve::{BoundaryCurve, Polyline};
use super::geom::{seg_tri_hit, V3};
use super::link::{linking_number, meridian};
use super::mesh::Mesh;

/// Largest ∂-residual a spanning surface may have.
pub const RESIDUAL_TOL: f64 = 0.05;

#[derive(Clone, Debug)]
pub struct SpanReport {
    pub spans: bool,
    pub residual: f64,
    pub links: usize,
    /// Indices of links that miss the surface.
    pub unhit: Vec<usize>,
    pub warnings: Vec<String>,
}

/// Linking numbers of a loop with γ: one total for a union of closed
/// curves, one per cycle when γ is a theta graph.
pub fn gamma_linking(curve: &BoundaryCurve, link: &Polyline) -> Option<Vec<i64>> {
    if curve.arcs.iter().all(|a| a.closed) {
        let mut total = 0;
        for a in &curve.arcs {
            total += linking_number(a, link).ok()?;
        }
        Some(vec![total])
    } else {
        curve.cycles().iter().map(|c| linking_number(c, link).ok()).collect()
    }
}

fn links_once(curve: &BoundaryCurve, link: &Polyline) -> bool {
    gamma_linking(curve, link).is_some_and(|v| v.iter().any(|x| x.abs() == 1))
}

/// Meridian circles of radius R/8 and R/4 at about eight samples per arc,
/// keeping those that link γ once.
pub fn auto_links(curve: &BoundaryCurve, r_box: f64) -> (Vec<Polyline>, Vec<String>) {
    let mut keep = Vec::new();
    let mut warnings = Vec::new();
    for (ai, arc) in curve.arcs.iter().enumerate() {
        let n = arc.pts.len();
        let segs = if arc.closed { n } else { n - 1 };
        let samples = segs.min(8);
        for s in 0..samples {
            // midpoint of a segment, so the meridian never grazes a vertex
            let i = s * segs / samples;
            let (a, b) = (arc.pts[i], arc.pts[(i + 1) % n]);
            let at = (a + b) * 0.5;
            let t = (b - a).normalize();
            for r in [r_box / 8.0, r_box / 4.0] {
                let m = meridian(&at, &t, r, 32);
                if links_once(curve, &m) {
                    keep.push(m);
                } else {
                    warnings.push(format!("dropped meridian of radius {:.4} at arc {} segment {}: linking number is not one", r, ai, i));
                }
            }
        }
    }
    (keep, warnings)
}

/// Whether the polyline meets some triangle of the mesh.
pub fn hits(mesh: &Mesh, link: &Polyline, tol: f64) -> bool {
    let segs = link.segments();
    (0..mesh.tris.len()).any(|f| {
        let [a, b, c] = mesh.corners(f);
        let lo = a.inf(&b).inf(&c).add_scalar(-tol);
        let hi = a.sup(&b).sup(&c).add_scalar(tol);
        segs.iter().any(|(p, q)| {
            let (sl, sh) = (p.inf(q), p.sup(q));
            let apart = (0..3).any(|i| sh[i] < lo[i] || sl[i] > hi[i]);
            !apart && seg_tri_hit(p, q, &a, &b, &c, tol)
        })
    })
}

/// ∂-residual within tolerance and every test link meets the surface.
pub fn spans(mesh: &Mesh, curve: &BoundaryCurve, r_box: f64, user_links: &[Polyline]) -> SpanReport {
    let (mut links, mut warnings) = auto_links(curve, r_box);
    for (i, l) in user_links.iter().enumerate() {
        if links_once(curve, l) {
            links.push(l.clone());
        } else {
            warnings.push(format!("dropped user link {}: linking number is not one", i));
        }
    }
    if mesh.tris.is_empty() {
        return SpanReport { spans: false, residual: 1.0, links: links.len(), unhit: (0..links.len()).collect(), warnings };
    }
    let residual = mesh.boundary_report(curve).residual;
    let unhit: Vec<usize> = links.iter().enumerate().filter(|(_, l)| !hits(mesh, l, 1e-9)).map(|(i, _)| i).collect();
    SpanReport { spans: residual <= RESIDUAL_TOL && unhit.is_empty() && !links.is_empty(), residual, links: links.len(), unhit, warnings }
}

/// A loop through the middle of a planar curve's disk, linking it once:
/// the circle through `center` and `center + 2(edge − center)` in the plane
/// spanned by that direction and `normal`.
pub fn central_link(center: &V3, edge: &V3, normal: &V3, m: usize) -> Polyline {
    let d = edge - center;
    Polyline::circle(*edge, -d, normal.normalize() * d.norm(), 1.0, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plateau::seeds;

    fn unit_circle() -> BoundaryCurve {
        BoundaryCurve::new(vec![Polyline::circle(V3::zeros(), V3::x(), V3::y(), 1.0, 64)], V3::new(0.1, 0.2, 0.6)).unwrap()
    }

    #[test]
    fn cone_spans() {
        let curve = unit_circle();
        let r = spans(&seeds::cone(&curve, 1), &curve, 3.0, &[]);
        assert!(r.spans, "{:?}", r);
        assert_eq!(r.links, 16);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn annulus_misses_the_central_link() {
        let curve = unit_circle();
        let outer = &curve.arcs[0].pts;
        let inner: Vec<V3> = outer.iter().map(|p| p * 0.5).collect();
        let mut verts = outer.clone();
        verts.extend(inner);
        let n = outer.len();
        let tris = (0..n).flat_map(|i| [[i, (i + 1) % n, n + (i + 1) % n], [i, n + (i + 1) % n, n + i]]).collect();
        let annulus = Mesh::new(verts, tris);
        // through the hole: the origin is on the link
        let link = central_link(&V3::zeros(), &V3::new(1.0, 0.0, 0.0), &V3::z(), 64);
        assert!(link.pts.iter().any(|p| p.norm() < 1e-12));
        let r = spans(&annulus, &curve, 3.0, &[link]);
        assert!(!r.spans);
        assert!(r.unhit.contains(&(r.links - 1)));
        // the wide meridians pass through the hole as well, the narrow ones hit
        assert!(r.unhit.iter().all(|i| *i == r.links - 1 || i % 2 == 1));
        // the same link does hit the cone
        let link = central_link(&V3::zeros(), &V3::new(1.0, 0.0, 0.0), &V3::z(), 64);
        assert!(spans(&seeds::cone(&curve, 0), &curve, 3.0, &[link]).spans);
    }

    #[test]
    fn empty_mesh_does_not_span() {
        let curve = unit_circle();
        assert!(!spans(&Mesh::default(), &curve, 3.0, &[]).spans);
    }

    #[test]
    fn unlinked_user_link_is_dropped() {
        let curve = unit_circle();
        let far = Polyline::circle(V3::new(5.0, 0.0, 0.0), V3::x(), V3::y(), 1.0, 16);
        let r = spans(&seeds::cone(&curve, 0), &curve, 3.0, &[far]);
        assert!(r.spans);
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn meridians_enclosing_both_rims_are_dropped() {
        let lo = Polyline::circle(V3::new(0.0, 0.0, -0.25), V3::x(), V3::y(), 1.0, 32);
        let hi = Polyline::circle(V3::new(0.0, 0.0, 0.25), V3::x(), V3::y(), 1.0, 32);
        let curve = BoundaryCurve::new(vec![lo, hi], V3::zeros()).unwrap();
        let (links, warnings) = auto_links(&curve, 3.0);
        // R/4 = 0.75 encloses both rims, R/8 = 0.375 only one
        assert_eq!(links.len(), 16);
        assert_eq!(warnings.len(), 16);
    }
}
