//! Shadow lower bound: a spanning surface must cover every bounded face of
//! the projected curve that borders the unbounded face.

use super::curve::BoundaryCurve;
use super::geom::{frame, key, V3};
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

#[derive(Clone, Debug)]
pub struct Shadow {
    pub a0: f64,
    pub direction: V3,
    pub attempts: usize,
}

/// Tries `dir`, then up to 99 perturbations of it by at most 1e-6 rad.
pub fn shadow_lower_bound(curve: &BoundaryCurve, dir: &V3) -> Result<Shadow> {
    let d0 = dir.normalize();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5d);
    let (e1, e2) = frame(&d0);
    for attempt in 0..100 {
        let d = if attempt == 0 {
            d0
        } else {
            let a: f64 = rng.gen_range(0.0..1e-6);
            let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            (d0 * a.cos() + (e1 * phi.cos() + e2 * phi.sin()) * a.sin()).normalize()
        };
        if let Some(a0) = projected_a0(curve, &d) {
            return Ok(Shadow { a0, direction: d, attempts: attempt + 1 });
        }
    }
    Err(Error::Geometry("projection of the curve is not generic after 100 perturbations".into()))
}

/// Normal of the least-squares plane of the curve.
pub fn pca_normal(curve: &BoundaryCurve) -> V3 {
    let pts = curve.points();
    let c = pts.iter().fold(V3::zeros(), |a, p| a + p) / pts.len() as f64;
    let mut m = nalgebra::Matrix3::zeros();
    for p in &pts {
        let d = p - c;
        m += d * d.transpose();
    }
    let eig = m.symmetric_eigen();
    let i = (0..3).min_by(|a, b| eig.eigenvalues[*a].total_cmp(&eig.eigenvalues[*b])).unwrap();
    eig.eigenvectors.column(i).into_owned()
}

/// Largest a₀ over the plane-fit normal and a few fixed oblique directions,
/// skipping the non-generic ones.
pub fn best_shadow(curve: &BoundaryCurve) -> Result<Shadow> {
    let mut dirs = vec![pca_normal(curve)];
    for d in [[1.0, 2.0, 3.0], [3.0, 1.0, 2.0], [2.0, 3.0, 1.0], [-1.0, 2.0, 3.0], [1.0, -3.0, 2.0]] {
        dirs.push(V3::new(d[0], d[1], d[2]).normalize());
    }
    let mut best: Option<Shadow> = None;
    let mut last = None;
    for d in dirs {
        match shadow_lower_bound(curve, &d) {
            Ok(s) => {
                if best.as_ref().is_none_or(|b| s.a0 > b.a0) {
                    best = Some(s);
                }
            }
            Err(e) => last = Some(e),
        }
    }
    best.ok_or_else(|| last.unwrap())
}

type P2 = (f64, f64);

fn sub(a: P2, b: P2) -> P2 {
    (a.0 - b.0, a.1 - b.1)
}

fn cross(a: P2, b: P2) -> f64 {
    a.0 * b.1 - a.1 * b.0
}

fn len(a: P2) -> f64 {
    (a.0 * a.0 + a.1 * a.1).sqrt()
}

/// a₀ for the projection along d, or None when the projection is not
/// generic (overlaps, a vertex on an edge, triple points, a vanishing face).
fn projected_a0(curve: &BoundaryCurve, d: &V3) -> Option<f64> {
    let (e1, e2) = frame(d);
    let mut ids: BTreeMap<[i64; 3], usize> = BTreeMap::new();
    let mut nodes: Vec<P2> = Vec::new();
    let mut segs: Vec<(usize, usize)> = Vec::new();
    for (a, b) in curve.segments() {
        let mut id = |p: &V3| {
            *ids.entry(key(p)).or_insert_with(|| {
                nodes.push((p.dot(&e1), p.dot(&e2)));
                nodes.len() - 1
            })
        };
        let (i, j) = (id(&a), id(&b));
        segs.push((i, j));
    }
    let scale = nodes.iter().map(|p| len(*p)).fold(0.0, f64::max).max(1e-300);
    let eps = 1e-9 * scale;
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            if len(sub(nodes[i], nodes[j])) <= eps {
                return None;
            }
        }
    }
    // cut points along each segment, as (parameter, node)
    let mut cuts: Vec<Vec<(f64, usize)>> = segs.iter().map(|(a, b)| vec![(0.0, *a), (1.0, *b)]).collect();
    for s in 0..segs.len() {
        for t in s + 1..segs.len() {
            let (a0, a1) = (nodes[segs[s].0], nodes[segs[s].1]);
            let (b0, b1) = (nodes[segs[t].0], nodes[segs[t].1]);
            let shared = [segs[s].0, segs[s].1].iter().any(|x| *x == segs[t].0 || *x == segs[t].1);
            let (da, db) = (sub(a1, a0), sub(b1, b0));
            let den = cross(da, db);
            let r = sub(b0, a0);
            if den.abs() <= 1e-12 * len(da) * len(db) {
                // parallel: reject if collinear and overlapping
                if cross(r, da).abs() <= eps * len(da) {
                    let la = len(da) * len(da);
                    let p0 = (r.0 * da.0 + r.1 * da.1) / la;
                    let p1 = ((b1.0 - a0.0) * da.0 + (b1.1 - a0.1) * da.1) / la;
                    let (lo, hi) = (p0.min(p1), p0.max(p1));
                    if hi > 1e-9 && lo < 1.0 - 1e-9 {
                        return None;
                    }
                }
                continue;
            }
            let u = cross(r, db) / den;
            let v = cross(r, da) / den;
            let tol_a = eps / len(da);
            let tol_b = eps / len(db);
            let in_a = u > tol_a && u < 1.0 - tol_a;
            let in_b = v > tol_b && v < 1.0 - tol_b;
            let near_a = u > -tol_a && u < 1.0 + tol_a;
            let near_b = v > -tol_b && v < 1.0 + tol_b;
            if in_a && in_b {
                if shared {
                    return None;
                }
                nodes.push((a0.0 + u * da.0, a0.1 + u * da.1));
                let n = nodes.len() - 1;
                cuts[s].push((u, n));
                cuts[t].push((v, n));
            } else if near_a && near_b && !shared {
                // a vertex touching another segment
                return None;
            } else if shared && (in_a || in_b) && near_a && near_b {
                return None;
            }
        }
    }
    let first_cross = nodes.len() - cuts.iter().map(|c| c.len() - 2).sum::<usize>() / 2;
    for i in first_cross..nodes.len() {
        for j in 0..nodes.len() {
            if i != j && len(sub(nodes[i], nodes[j])) <= eps {
                return None;
            }
        }
    }
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for c in cuts.iter_mut() {
        c.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in c.windows(2) {
            edges.push((w[0].1, w[1].1));
        }
    }
    faces_a0(&nodes, &edges).filter(|a| *a >= 1e-4 * scale * scale)
}

/// Traces faces of the planar graph and returns the largest bounded face
/// sharing an edge with the unbounded face.
fn faces_a0(nodes: &[P2], edges: &[(usize, usize)]) -> Option<f64> {
    // half-edge 2e is u→v, 2e+1 is v→u
    let nh = 2 * edges.len();
    let from = |h: usize| if h % 2 == 0 { edges[h / 2].0 } else { edges[h / 2].1 };
    let to = |h: usize| if h % 2 == 0 { edges[h / 2].1 } else { edges[h / 2].0 };
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for h in 0..nh {
        out[from(h)].push(h);
    }
    let angle = |h: usize| {
        let d = sub(nodes[to(h)], nodes[from(h)]);
        d.1.atan2(d.0)
    };
    for o in out.iter_mut() {
        o.sort_by(|a, b| angle(*a).total_cmp(&angle(*b)));
    }
    let mut pos = vec![0usize; nh];
    for o in &out {
        for (i, h) in o.iter().enumerate() {
            pos[*h] = i;
        }
    }
    let next = |h: usize| {
        let v = to(h);
        let twin = h ^ 1;
        let o = &out[v];
        o[(pos[twin] + o.len() - 1) % o.len()]
    };
    let mut face_of = vec![usize::MAX; nh];
    let mut areas: Vec<f64> = Vec::new();
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for h0 in 0..nh {
        if face_of[h0] != usize::MAX {
            continue;
        }
        let f = areas.len();
        let mut h = h0;
        let mut cyc = Vec::new();
        let mut a = 0.0;
        loop {
            face_of[h] = f;
            cyc.push(h);
            let (p, q) = (nodes[from(h)], nodes[to(h)]);
            a += 0.5 * cross(p, q);
            h = next(h);
            if h == h0 {
                break;
            }
            if cyc.len() > nh {
                return None;
            }
        }
        areas.push(a);
        cycles.push(cyc);
    }
    // connected components of the graph
    let mut comp: Vec<usize> = (0..nodes.len()).collect();
    fn find(c: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while c[r] != r {
            r = c[r];
        }
        c[x] = r;
        r
    }
    for (u, v) in edges {
        let (a, b) = (find(&mut comp, *u), find(&mut comp, *v));
        comp[a] = b;
    }
    let comp_of_face = |f: usize, comp: &mut Vec<usize>| find(comp, from(cycles[f][0]));
    let polygon = |f: usize| -> Vec<P2> { cycles[f].iter().map(|h| nodes[from(*h)]).collect() };
    let mut unbounded = vec![false; areas.len()];
    for f in 0..areas.len() {
        if areas[f] >= 0.0 {
            continue;
        }
        let cf = comp_of_face(f, &mut comp);
        let probe = nodes[from(cycles[f][0])];
        let mut nested = false;
        for g in 0..areas.len() {
            if areas[g] > 0.0 && comp_of_face(g, &mut comp) != cf && point_in(&polygon(g), probe) {
                nested = true;
                break;
            }
        }
        unbounded[f] = !nested;
    }
    let mut best: Option<f64> = None;
    for f in 0..areas.len() {
        if areas[f] <= 0.0 {
            continue;
        }
        if cycles[f].iter().any(|h| unbounded[face_of[h ^ 1]]) {
            best = Some(best.map_or(areas[f], |b| b.max(areas[f])));
        }
    }
    best
}

fn point_in(poly: &[P2], p: P2) -> bool {
    let mut inside = false;
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        if (a.1 > p.1) != (b.1 > p.1) {
            let x = a.0 + (p.1 - a.1) / (b.1 - a.1) * (b.0 - a.0);
            if x > p.0 {
                inside = !inside;
            }
        }
    }
    inside
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plateau::curve::Polyline;

    fn circle(m: usize) -> BoundaryCurve {
        BoundaryCurve::new(vec![Polyline::circle(V3::zeros(), V3::x(), V3::y(), 1.0, m)], V3::new(0.1, 0.2, 0.6)).unwrap()
    }

    #[test]
    fn axial_shadow_of_a_circle() {
        let s = shadow_lower_bound(&circle(256), &V3::z()).unwrap();
        let polygon = 128.0 * (2.0 * std::f64::consts::PI / 256.0).sin();
        assert!((s.a0 - polygon).abs() < 1e-12);
        assert!((s.a0 - std::f64::consts::PI).abs() < 1e-3);
        assert!((pca_normal(&circle(64)).z.abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn in_plane_projection_is_rejected() {
        assert!(shadow_lower_bound(&circle(64), &V3::x()).is_err());
    }

    /// Independent oracle: the trefoil diagram has four bounded faces; the
    /// three lobes touch the unbounded face and the centre does not.
    #[test]
    fn trefoil_a0() {
        let m = 300;
        let pts: Vec<V3> = (0..m)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / m as f64;
                V3::new((t).sin() + 2.0 * (2.0 * t).sin(), (t).cos() - 2.0 * (2.0 * t).cos(), -(3.0 * t).sin())
            })
            .collect();
        let c = BoundaryCurve::new(vec![Polyline::new(pts.clone(), true)], V3::new(0.3, 0.1, 5.0)).unwrap();
        let s = shadow_lower_bound(&c, &V3::z()).unwrap();
        assert!(s.a0 > 0.0);
        // brute-force: area enclosed with winding number ±1 around a grid of
        // sample points in the lobe through the point (0, 3)
        let lobe = lobe_area(&pts);
        assert!((s.a0 - lobe).abs() < 0.02 * lobe, "{} vs {}", s.a0, lobe);
    }

    /// Largest grid region of constant nonzero winding number that touches
    /// the outer region, by connected-component labelling.
    fn lobe_area(pts: &[V3]) -> f64 {
        let poly: Vec<P2> = pts.iter().map(|p| (p.x, p.y)).collect();
        let winding = |p: P2| -> i32 {
            let mut w = 0;
            for i in 0..poly.len() {
                let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
                if a.1 <= p.1 && b.1 > p.1 && cross(sub(b, a), sub(p, a)) > 0.0 {
                    w += 1;
                } else if a.1 > p.1 && b.1 <= p.1 && cross(sub(b, a), sub(p, a)) < 0.0 {
                    w -= 1;
                }
            }
            w
        };
        let n = 400;
        let h = 8.0 / n as f64;
        let cell = |i: usize, j: usize| (-4.0 + (i as f64 + 0.5) * h, -4.0 + (j as f64 + 0.5) * h);
        let grid: Vec<Vec<i32>> = (0..n).map(|i| (0..n).map(|j| winding(cell(i, j))).collect()).collect();
        let mut label = vec![vec![usize::MAX; n]; n];
        let mut sizes = Vec::new();
        for i0 in 0..n {
            for j0 in 0..n {
                if label[i0][j0] != usize::MAX {
                    continue;
                }
                let l = sizes.len();
                let mut count = 0usize;
                let mut stack = vec![(i0, j0)];
                label[i0][j0] = l;
                while let Some((i, j)) = stack.pop() {
                    count += 1;
                    let nb = [(i.wrapping_sub(1), j), (i + 1, j), (i, j.wrapping_sub(1)), (i, j + 1)];
                    for (a, b) in nb {
                        if a < n && b < n && label[a][b] == usize::MAX && grid[a][b] == grid[i][j] {
                            label[a][b] = l;
                            stack.push((a, b));
                        }
                    }
                }
                sizes.push(count);
            }
        }
        let outer = label[0][0];
        let mut best = 0usize;
        for i in 0..n {
            for j in 0..n {
                let l = label[i][j];
                if l == outer || grid[i][j] == 0 {
                    continue;
                }
                let nb = [(i.wrapping_sub(1), j), (i + 1, j), (i, j.wrapping_sub(1)), (i, j + 1)];
                let touches = nb.iter().any(|&(a, b)| a < n && b < n && label[a][b] == outer);
                if touches {
                    best = best.max(sizes[l]);
                }
            }
        }
        best as f64 * h * h
    }
}
