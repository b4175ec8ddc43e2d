use super::curve::BoundaryCurve;
use super::geom::{key, tri_area, V3};
use super::mesh::Mesh;
use super::seeds;
use crate::error::{Error, Result};
use crate::lp;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// The cube Ω_R: center and side.
#[derive(Clone, Copy, Debug)]
pub struct SceneBox {
    pub center: V3,
    pub side: f64,
}

impl SceneBox {
    /// Bounding box of γ ∪ {q}, its longest side inflated by half.
    pub fn around(curve: &BoundaryCurve) -> SceneBox {
        let (lo, hi) = curve.bbox();
        SceneBox { center: (lo + hi) * 0.5, side: 1.5 * (hi - lo).max() }
    }

    pub fn contains(&self, p: &V3) -> bool {
        (0..3).all(|i| (p[i] - self.center[i]).abs() <= 0.5 * self.side * (1.0 + 1e-12))
    }
}

struct Grid {
    origin: V3,
    h: f64,
    n: usize,
}

impl Grid {
    fn id(&self, i: usize, j: usize, k: usize) -> usize {
        (i * (self.n + 1) + j) * (self.n + 1) + k
    }

    fn point(&self, i: usize, j: usize, k: usize) -> V3 {
        self.origin + V3::new(i as f64, j as f64, k as f64) * self.h
    }

    fn coords(&self, id: usize) -> [usize; 3] {
        let m = self.n + 1;
        [id / (m * m), (id / m) % m, id % m]
    }

    fn nearest(&self, p: &V3) -> usize {
        let c = (p - self.origin) / self.h;
        let r = |x: f64| (x.round().max(0.0) as usize).min(self.n);
        self.id(r(c.x), r(c.y), r(c.z))
    }
}

const STEPS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Triangles of the Freudenthal subdivision of Ω_R into 2^k cubes per side.
fn lattice(bx: &SceneBox, k: u32) -> (Grid, Vec<[usize; 3]>) {
    let n = 1usize << k;
    let grid = Grid { origin: bx.center - V3::repeat(0.5 * bx.side), h: bx.side / n as f64, n };
    let mut faces: BTreeSet<[usize; 3]> = BTreeSet::new();
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                for order in STEPS {
                    let mut c = [i, j, l];
                    let mut tet = vec![grid.id(c[0], c[1], c[2])];
                    for axis in order {
                        c[axis] += 1;
                        tet.push(grid.id(c[0], c[1], c[2]));
                    }
                    for skip in 0..4 {
                        let mut f: Vec<usize> = (0..4).filter(|x| *x != skip).map(|x| tet[x]).collect();
                        f.sort();
                        faces.insert([f[0], f[1], f[2]]);
                    }
                }
            }
        }
    }
    (grid, faces.into_iter().collect())
}

/// Shortest lattice path between two grid vertices along Freudenthal edges.
fn path(adj: &BTreeMap<usize, Vec<usize>>, from: usize, to: usize) -> Vec<usize> {
    let mut prev: BTreeMap<usize, usize> = BTreeMap::new();
    let mut queue = VecDeque::from([from]);
    prev.insert(from, from);
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for w in adj.get(&v).into_iter().flatten() {
            if !prev.contains_key(w) {
                prev.insert(*w, v);
                queue.push_back(*w);
            }
        }
    }
    let mut out = vec![to];
    while *out.last().unwrap() != from {
        out.push(prev[out.last().unwrap()]);
    }
    out.reverse();
    out
}

/// The complex K: cone from q, the lattice faces, strips joining γ to the
/// lattice, and any extra mesh.
pub fn complex(curve: &BoundaryCurve, bx: &SceneBox, k: u32, extra: Option<&Mesh>) -> Mesh {
    let cone = seeds::cone(curve, 0);
    let (grid, faces) = lattice(bx, k);
    let m = grid.n + 1;
    let lat_verts: Vec<V3> = (0..m * m * m).map(|id| {
        let c = grid.coords(id);
        grid.point(c[0], c[1], c[2])
    }).collect();
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for f in &faces {
        for i in 0..3 {
            let (a, b) = (f[i], f[(i + 1) % 3]);
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
    }
    for v in adj.values_mut() {
        v.sort();
        v.dedup();
    }
    // strips from each γ segment to a lattice path between the nearest
    // lattice vertices of its ends; the union welds shared points
    let mut strip = Mesh::default();
    for (a, b) in curve.segments() {
        let p = path(&adj, grid.nearest(&a), grid.nearest(&b));
        let base = strip.verts.len();
        strip.verts.extend([a, b]);
        strip.verts.extend(p.iter().map(|v| lat_verts[*v]));
        let last = base + 1 + p.len();
        strip.tris.push([base, base + 1, last]);
        for j in (base + 2..last).rev() {
            strip.tris.push([base, j + 1, j]);
        }
    }
    let mesh = Mesh::new(lat_verts, faces).union(&strip);
    let mut mesh = mesh.union(&cone);
    if let Some(e) = extra {
        mesh = mesh.union(e);
    }
    // drop zero-area faces and duplicates
    let mut seen = BTreeSet::new();
    let tris: Vec<[usize; 3]> = mesh
        .tris
        .iter()
        .filter(|t| {
            let mut s = **t;
            s.sort();
            tri_area(&mesh.verts[t[0]], &mesh.verts[t[1]], &mesh.verts[t[2]]) > 1e-14 * bx.side * bx.side && seen.insert(s)
        })
        .copied()
        .collect();
    Mesh::new(mesh.verts, tris)
}

#[derive(Clone, Debug)]
pub struct LpOutcome {
    /// Support faces, oriented by the sign of their weight.
    pub mesh: Mesh,
    pub weights: Vec<f64>,
    pub value: f64,
    pub complex_faces: usize,
    pub complex_edges: usize,
    /// Relative orientation of the arcs of γ that gave the optimum.
    pub signs: Vec<i32>,
    /// max |w − round(w)| over support weights.
    pub non_integrality: f64,
    pub pivots: usize,
}

/// min Σ area_f |x_f| subject to ∂x = ±γ on K, through the dual
/// max Σ b_e y_e with |Σ_{e ∈ ∂f} ±y_e| ≤ area_f.
pub fn lp_minimize(curve: &BoundaryCurve, bx: &SceneBox, k: u32, extra: Option<&Mesh>) -> Result<LpOutcome> {
    let kx = complex(curve, bx, k, extra);
    let edges = kx.edges();
    let index: BTreeMap<(usize, usize), usize> = edges.keys().enumerate().map(|(i, e)| (*e, i)).collect();
    let ids: BTreeMap<[i64; 3], usize> = kx.verts.iter().enumerate().map(|(i, p)| (key(p), i)).collect();
    let ne = index.len();
    let nf = kx.tris.len();
    // arc segments as signed edge indices
    let mut arcs: Vec<Vec<(usize, f64)>> = Vec::new();
    for arc in &curve.arcs {
        let mut v = Vec::new();
        for (a, b) in arc.segments() {
            let (ia, ib) = (ids[&key(&a)], ids[&key(&b)]);
            let (e, s) = if ia < ib { ((ia, ib), 1.0) } else { ((ib, ia), -1.0) };
            v.push((index[&e], s));
        }
        arcs.push(v);
    }
    if arcs.len() > 6 {
        return Err(Error::Unsupported("more than six arcs in the LP backend".into()));
    }
    let mut rows = Vec::with_capacity(2 * nf);
    let mut rhs = Vec::with_capacity(2 * nf);
    for (f, t) in kx.tris.iter().enumerate() {
        let mut row = vec![0.0; 2 * ne];
        for i in 0..3 {
            let (a, b) = (t[i], t[(i + 1) % 3]);
            let (e, s) = if a < b { ((a, b), 1.0) } else { ((b, a), -1.0) };
            let j = index[&e];
            row[j] += s;
            row[ne + j] -= s;
        }
        let neg: Vec<f64> = row.iter().map(|x| -x).collect();
        let area = kx.face_area(f);
        rows.push(row);
        rows.push(neg);
        rhs.push(area);
        rhs.push(area);
    }
    let mut best: Option<(lp::LpSolution, Vec<i32>)> = None;
    for mask in 0..(1usize << (arcs.len() - 1)) {
        let signs: Vec<i32> = (0..arcs.len()).map(|i| if i > 0 && mask >> (i - 1) & 1 == 1 { -1 } else { 1 }).collect();
        let mut c = vec![0.0; 2 * ne];
        for (arc, s) in arcs.iter().zip(&signs) {
            for (e, o) in arc {
                c[*e] += o * *s as f64;
                c[ne + e] -= o * *s as f64;
            }
        }
        match lp::maximize(&c, &rows, &rhs) {
            Ok(sol) => {
                if best.as_ref().is_none_or(|(b, _)| sol.value < b.value) {
                    best = Some((sol, signs));
                }
            }
            // an unbounded dual means this boundary has no filling in K
            Err(Error::Lp(msg)) if msg.contains("unbounded") => {}
            Err(e) => return Err(e),
        }
    }
    let Some((sol, signs)) = best else {
        return Err(Error::Infeasible("γ bounds no real 2-chain of the complex".into()));
    };
    let mut tris = Vec::new();
    let mut weights = Vec::new();
    for f in 0..nf {
        let x = sol.y[2 * f] - sol.y[2 * f + 1];
        if x.abs() > 1e-6 {
            let t = kx.tris[f];
            tris.push(if x > 0.0 { t } else { [t[0], t[2], t[1]] });
            weights.push(x.abs());
        }
    }
    let non_integrality = weights.iter().map(|w| (w - w.round()).abs()).fold(0.0, f64::max);
    let mesh = Mesh::new(kx.verts.clone(), tris).weld();
    Ok(LpOutcome { mesh, weights, value: sol.value, complex_faces: nf, complex_edges: ne, signs, non_integrality, pivots: sol.pivots })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plateau::curve::Polyline;

    #[test]
    fn freudenthal_counts() {
        let bx = SceneBox { center: V3::zeros(), side: 1.0 };
        let (_, faces) = lattice(&bx, 0);
        // one cube, six tetrahedra: 6 boundary squares × 2 + 6 interior faces
        assert_eq!(faces.len(), 18);
        let (_, faces) = lattice(&bx, 1);
        assert!(faces.len() > 8 * 12);
    }

    #[test]
    fn complex_contains_gamma_and_cone() {
        let c = Polyline::circle(V3::zeros(), V3::x(), V3::y(), 1.0, 12);
        let curve = BoundaryCurve::new(vec![c], V3::new(0.1, 0.2, 0.6)).unwrap();
        let bx = SceneBox::around(&curve);
        let k = complex(&curve, &bx, 1, None);
        let e = k.edges();
        for (a, b) in curve.segments() {
            let ia = k.verts.iter().position(|p| (p - a).norm() < 1e-12).unwrap();
            let ib = k.verts.iter().position(|p| (p - b).norm() < 1e-12).unwrap();
            assert!(e.contains_key(&(ia.min(ib), ia.max(ib))));
        }
        // every γ vertex reaches the lattice through its strip
        assert!(k.tris.len() > 12 + 8 * 12);
    }

    #[test]
    fn square_frame_gets_the_flat_square() {
        // a square on lattice lines: the minimum is the square itself
        let s = 0.75;
        let pts = vec![V3::new(0.0, 0.0, 0.0), V3::new(s, 0.0, 0.0), V3::new(s, s, 0.0), V3::new(0.0, s, 0.0)];
        let curve = BoundaryCurve::new(vec![Polyline::new(pts, true)], V3::new(0.3, 0.4, 0.5)).unwrap();
        let bx = SceneBox { center: V3::new(0.75, 0.75, 0.0), side: 1.5 };
        let out = lp_minimize(&curve, &bx, 1, None).unwrap();
        assert!((out.value - s * s).abs() < 1e-9, "{}", out.value);
        assert!((out.mesh.area() - s * s).abs() < 1e-9);
        assert!(out.non_integrality < 1e-9);
        assert!(out.mesh.boundary_report(&curve).residual < 1e-9);
    }

    #[test]
    fn lp_beats_the_cone_for_a_circle() {
        let c = Polyline::circle(V3::zeros(), V3::x(), V3::y(), 1.0, 12);
        let curve = BoundaryCurve::new(vec![c], V3::new(0.1, 0.2, 0.6)).unwrap();
        let bx = SceneBox::around(&curve);
        let out = lp_minimize(&curve, &bx, 1, None).unwrap();
        let cone = seeds::cone(&curve, 0).area();
        let poly = 6.0 * (std::f64::consts::PI / 6.0).sin();
        assert!(out.value <= cone + 1e-9 && out.value >= poly - 1e-9, "{} {} {}", out.value, cone, poly);
        assert!(out.mesh.boundary_report(&curve).missing < 1e-9);
    }
}
