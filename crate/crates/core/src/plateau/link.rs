use super::curve::Polyline;
use super::geom::{frame, seg_seg_dist, V3};
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Linking number of two closed polylines by counting signed crossings in a
/// random generic projection; degenerate views are re-drawn.
pub fn linking_number(a: &Polyline, b: &Polyline) -> Result<i64> {
    if !a.closed || !b.closed {
        return Err(Error::Geometry("linking number needs closed polylines".into()));
    }
    let sa = a.segments();
    let sb = b.segments();
    let scale = sa.iter().chain(&sb).map(|(p, q)| p.norm().max(q.norm())).fold(1e-300, f64::max);
    for (p, q) in &sa {
        for (u, v) in &sb {
            if seg_seg_dist(p, q, u, v) <= 1e-12 * scale {
                return Err(Error::Geometry("polylines intersect".into()));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x4c4b);
    for _ in 0..100 {
        let w = V3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if w.norm() < 0.1 {
            continue;
        }
        if let Some(lk) = crossings(&sa, &sb, &w.normalize()) {
            return Ok(lk);
        }
    }
    Err(Error::Geometry("no generic projection found".into()))
}

/// Σ of crossing signs where a passes over b, seen from +w; None when the
/// view is not generic.
fn crossings(sa: &[(V3, V3)], sb: &[(V3, V3)], w: &V3) -> Option<i64> {
    let (e1, e2) = frame(w);
    let pr = |x: &V3| (x.dot(&e1), x.dot(&e2));
    let eps = 1e-9;
    let mut total = 0i64;
    for (p0, p1) in sa {
        let (a0, a1) = (pr(p0), pr(p1));
        let da = (a1.0 - a0.0, a1.1 - a0.1);
        for (q0, q1) in sb {
            let (b0, b1) = (pr(q0), pr(q1));
            let db = (b1.0 - b0.0, b1.1 - b0.1);
            let den = da.0 * db.1 - da.1 * db.0;
            let la = (da.0 * da.0 + da.1 * da.1).sqrt();
            let lb = (db.0 * db.0 + db.1 * db.1).sqrt();
            if la < eps || lb < eps {
                return None;
            }
            let r = (b0.0 - a0.0, b0.1 - a0.1);
            if den.abs() <= eps * la * lb {
                // parallel in projection: fine unless collinear
                if (r.0 * da.1 - r.1 * da.0).abs() <= eps * la * (1.0 + la) {
                    return None;
                }
                continue;
            }
            let s = (r.0 * db.1 - r.1 * db.0) / den;
            let t = (r.0 * da.1 - r.1 * da.0) / den;
            let inside = |x: f64| x > eps && x < 1.0 - eps;
            let near = |x: f64| x > -eps && x < 1.0 + eps;
            if inside(s) && inside(t) {
                let ha = (p0 + (p1 - p0) * s).dot(w);
                let hb = (q0 + (q1 - q0) * t).dot(w);
                if ha > hb {
                    total += if den > 0.0 { 1 } else { -1 };
                }
            } else if near(s) && near(t) {
                return None;
            }
        }
    }
    Some(total)
}

/// Meridian circles of radius r around the curve at point `at` with unit
/// tangent `t`, discretized with m segments.
pub fn meridian(at: &V3, t: &V3, r: f64, m: usize) -> Polyline {
    let (e1, e2) = frame(t);
    Polyline::circle(*at, e1, e2, r, m)
}

/// Gauss double integral, summed exactly per segment pair as a signed
/// solid angle (quadrilateral formula).
#[cfg(test)]
pub(crate) fn gauss_sum(a: &Polyline, b: &Polyline) -> f64 {
    let mut s = 0.0;
    for (p1, p2) in a.segments() {
        for (p3, p4) in b.segments() {
            let (r13, r14, r23, r24) = (p3 - p1, p4 - p1, p3 - p2, p4 - p2);
            let n = [r13.cross(&r14), r14.cross(&r24), r24.cross(&r23), r23.cross(&r13)];
            if n.iter().any(|x| x.norm() == 0.0) {
                continue;
            }
            let n: Vec<V3> = n.iter().map(|x| x.normalize()).collect();
            let w: f64 = (0..4).map(|i| n[i].dot(&n[(i + 1) % 4]).clamp(-1.0, 1.0).asin()).sum();
            let sign = (p4 - p3).cross(&(p2 - p1)).dot(&r13).signum();
            s += w * sign;
        }
    }
    s / (4.0 * std::f64::consts::PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(c: V3, e1: V3, e2: V3, m: usize) -> Polyline {
        Polyline::circle(c, e1, e2, 1.0, m)
    }

    #[test]
    fn coplanar_disjoint_circles_are_unlinked() {
        let a = circle(V3::zeros(), V3::x(), V3::y(), 32);
        let b = circle(V3::new(3.0, 0.0, 0.0), V3::x(), V3::y(), 32);
        assert_eq!(linking_number(&a, &b).unwrap(), 0);
    }

    #[test]
    fn hopf_pair_matches_gauss_integral() {
        let a = circle(V3::zeros(), V3::x(), V3::y(), 48);
        let b = circle(V3::new(1.0, 0.0, 0.0), V3::x(), V3::z(), 48);
        let lk = linking_number(&a, &b).unwrap();
        let g = gauss_sum(&a, &b);
        assert_eq!(lk.abs(), 1);
        assert!((g - lk as f64).abs() < 1e-6, "gauss {} vs crossings {}", g, lk);
        assert_eq!(linking_number(&a, &b.reversed()).unwrap(), -lk);
        assert_eq!(linking_number(&b, &a).unwrap(), lk);
        // refining one curve changes nothing
        assert_eq!(linking_number(&a, &b.refine().refine()).unwrap(), lk);
    }

    #[test]
    fn random_links_agree_with_gauss() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let pts = |rng: &mut ChaCha8Rng, n: usize| {
                Polyline::new(
                    (0..n).map(|_| V3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
                    true,
                )
            };
            let a = pts(&mut rng, 6);
            let b = pts(&mut rng, 6);
            let Ok(lk) = linking_number(&a, &b) else { continue };
            let g = gauss_sum(&a, &b);
            assert!((g - lk as f64).abs() < 1e-6, "gauss {} vs crossings {}", g, lk);
        }
    }

    #[test]
    fn touching_curves_are_rejected() {
        let a = circle(V3::zeros(), V3::x(), V3::y(), 8);
        let b = circle(V3::new(2.0, 0.0, 0.0), V3::x(), V3::y(), 8);
        assert!(linking_number(&a, &b).is_err());
    }

    #[test]
    fn meridians_link_once() {
        let a = circle(V3::zeros(), V3::x(), V3::y(), 64);
        let m = meridian(&a.pts[5], &(a.pts[6] - a.pts[4]).normalize(), 0.3, 24);
        assert_eq!(linking_number(&a, &m).unwrap().abs(), 1);
    }
}
