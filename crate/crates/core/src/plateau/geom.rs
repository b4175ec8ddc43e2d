use nalgebra::Vector3;

pub type V3 = Vector3<f64>;

pub fn v3(p: &[f64]) -> V3 {
    V3::new(p[0], p[1], p[2])
}

pub fn to_vec(v: &V3) -> Vec<f64> {
    vec![v.x, v.y, v.z]
}

/// Grid key used to identify coincident vertices.
pub fn key(p: &V3) -> [i64; 3] {
    let r = |x: f64| (x * 1e9).round() as i64;
    [r(p.x), r(p.y), r(p.z)]
}

pub fn tri_cross(a: &V3, b: &V3, c: &V3) -> V3 {
    (b - a).cross(&(c - a))
}

pub fn tri_area(a: &V3, b: &V3, c: &V3) -> f64 {
    0.5 * tri_cross(a, b, c).norm()
}

/// Two unit vectors completing d to a right-handed orthonormal frame.
pub fn frame(d: &V3) -> (V3, V3) {
    let d = d.normalize();
    let helper = if d.x.abs() < 0.6 { V3::x() } else if d.y.abs() < 0.6 { V3::y() } else { V3::z() };
    let e1 = helper.cross(&d).normalize();
    let e2 = d.cross(&e1);
    (e1, e2)
}

/// Distance from p to the infinite line through a and b.
pub fn point_line_dist(p: &V3, a: &V3, b: &V3) -> f64 {
    let d = b - a;
    let len = d.norm();
    if len == 0.0 {
        return (p - a).norm();
    }
    (p - a).cross(&d).norm() / len
}

pub fn point_seg_dist(p: &V3, a: &V3, b: &V3) -> f64 {
    let d = b - a;
    let l2 = d.norm_squared();
    if l2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&d) / l2).clamp(0.0, 1.0);
    (p - (a + d * t)).norm()
}

/// Closest distance between segments [p1,q1] and [p2,q2].
pub fn seg_seg_dist(p1: &V3, q1: &V3, p2: &V3, q2: &V3) -> f64 {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(&r);
    let (s, t);
    if a <= f64::EPSILON && e <= f64::EPSILON {
        return r.norm();
    }
    if a <= f64::EPSILON {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e <= f64::EPSILON {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > 1e-300 { ((b * f - c * e) / denom).clamp(0.0, 1.0) } else { 0.0 };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    ((p1 + d1 * s) - (p2 + d2 * t)).norm()
}

/// Whether the closed segment [s0,s1] meets the closed triangle abc, with
/// every comparison slackened by `tol`.
pub fn seg_tri_hit(s0: &V3, s1: &V3, a: &V3, b: &V3, c: &V3, tol: f64) -> bool {
    let e1 = b - a;
    let e2 = c - a;
    let d = s1 - s0;
    let h = d.cross(&e2);
    let det = e1.dot(&h);
    let scale = e1.norm() * e2.norm() * d.norm();
    if scale == 0.0 {
        return false;
    }
    if det.abs() <= 1e-12 * scale {
        // parallel: only a coplanar overlap counts
        let n = e1.cross(&e2);
        let nn = n.norm();
        if nn == 0.0 || ((s0 - a).dot(&n) / nn).abs() > tol {
            return false;
        }
        let inside = |p: &V3| bary_inside(p, a, b, c, tol);
        return inside(s0)
            || inside(s1)
            || [(a, b), (b, c), (c, a)].iter().any(|(u, v)| seg_seg_dist(s0, s1, u, v) <= tol);
    }
    let inv = 1.0 / det;
    let sv = s0 - a;
    let u = sv.dot(&h) * inv;
    let qv = sv.cross(&e1);
    let v = d.dot(&qv) * inv;
    let t = e2.dot(&qv) * inv;
    let tu = tol / e1.norm().min(e2.norm()).max(1e-300);
    let tt = tol / d.norm();
    u >= -tu && v >= -tu && u + v <= 1.0 + tu && t >= -tt && t <= 1.0 + tt
}

fn bary_inside(p: &V3, a: &V3, b: &V3, c: &V3, tol: f64) -> bool {
    let n = tri_cross(a, b, c);
    let nn = n.norm_squared();
    if nn == 0.0 {
        return false;
    }
    let w = |u: &V3, v: &V3| tri_cross(u, v, p).dot(&n) / nn;
    let l = [w(b, c), w(c, a), w(a, b)];
    let slack = tol / n.norm().sqrt().max(1e-300);
    l.iter().all(|x| *x >= -slack)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_distances() {
        let o = V3::zeros();
        let d = seg_seg_dist(&o, &V3::x(), &V3::new(0.5, 1.0, 1.0), &V3::new(0.5, -1.0, 1.0));
        assert!((d - 1.0).abs() < 1e-12);
        let d = seg_seg_dist(&o, &V3::x(), &V3::new(2.0, 0.0, 0.0), &V3::new(3.0, 0.0, 0.0));
        assert!((d - 1.0).abs() < 1e-12);
        assert!((point_line_dist(&V3::new(5.0, 2.0, 0.0), &o, &V3::x()) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn segment_triangle() {
        let (a, b, c) = (V3::zeros(), V3::x(), V3::y());
        assert!(seg_tri_hit(&V3::new(0.2, 0.2, -1.0), &V3::new(0.2, 0.2, 1.0), &a, &b, &c, 1e-9));
        assert!(!seg_tri_hit(&V3::new(0.8, 0.8, -1.0), &V3::new(0.8, 0.8, 1.0), &a, &b, &c, 1e-9));
        assert!(!seg_tri_hit(&V3::new(0.2, 0.2, 0.5), &V3::new(0.2, 0.2, 1.0), &a, &b, &c, 1e-9));
        // touching an edge counts
        assert!(seg_tri_hit(&V3::new(0.5, 0.0, -1.0), &V3::new(0.5, 0.0, 1.0), &a, &b, &c, 1e-9));
        // coplanar crossing
        assert!(seg_tri_hit(&V3::new(-1.0, 0.3, 0.0), &V3::new(1.0, 0.3, 0.0), &a, &b, &c, 1e-9));
    }

    #[test]
    fn frames_are_orthonormal() {
        for d in [V3::x(), V3::new(1.0, 2.0, 3.0), V3::new(0.0, 0.0, -1.0)] {
            let (e1, e2) = frame(&d);
            let dn = d.normalize();
            assert!(e1.dot(&e2).abs() < 1e-12 && e1.dot(&dn).abs() < 1e-12);
            assert!((e1.cross(&e2) - dn).norm() < 1e-12);
        }
    }
}
