use super::curve::BoundaryCurve;
use super::geom::{key, tri_area, tri_cross, to_vec, V3};
use crate::chains::{Cell, CellKind, SimplicialChain};
use crate::error::{parse_err, Error, Result};
use nalgebra::Matrix3;
use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

/// A triangle soup with shared vertices. Edges may carry any number of
/// faces, so sheets can meet along junctions.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Mesh {
    pub verts: Vec<V3>,
    pub tris: Vec<[usize; 3]>,
}

/// Faces on an edge (a < b), each with +1 when the face runs a → b.
pub type EdgeMap = BTreeMap<(usize, usize), Vec<(usize, f64)>>;

impl Mesh {
    pub fn new(verts: Vec<V3>, tris: Vec<[usize; 3]>) -> Self {
        Mesh { verts, tris }
    }

    pub fn corners(&self, f: usize) -> [V3; 3] {
        let t = self.tris[f];
        [self.verts[t[0]], self.verts[t[1]], self.verts[t[2]]]
    }

    pub fn face_area(&self, f: usize) -> f64 {
        let [a, b, c] = self.corners(f);
        tri_area(&a, &b, &c)
    }

    pub fn area(&self) -> f64 {
        (0..self.tris.len()).map(|f| self.face_area(f)).sum()
    }

    pub fn normal(&self, f: usize) -> V3 {
        let [a, b, c] = self.corners(f);
        let n = tri_cross(&a, &b, &c);
        let l = n.norm();
        if l == 0.0 {
            V3::zeros()
        } else {
            n / l
        }
    }

    pub fn edges(&self) -> EdgeMap {
        let mut m: EdgeMap = BTreeMap::new();
        for (f, t) in self.tris.iter().enumerate() {
            for i in 0..3 {
                let (a, b) = (t[i], t[(i + 1) % 3]);
                let (k, s) = if a < b { ((a, b), 1.0) } else { ((b, a), -1.0) };
                m.entry(k).or_default().push((f, s));
            }
        }
        m
    }

    /// Edges carried by three or more faces.
    pub fn junction_edges(&self) -> Vec<(usize, usize)> {
        self.edges().into_iter().filter(|(_, fs)| fs.len() >= 3).map(|(e, _)| e).collect()
    }

    /// min over faces of 4√3·area / Σ edge², 1 for equilateral triangles.
    pub fn quality(&self) -> f64 {
        (0..self.tris.len())
            .map(|f| {
                let [a, b, c] = self.corners(f);
                let s = (b - a).norm_squared() + (c - b).norm_squared() + (a - c).norm_squared();
                if s == 0.0 {
                    0.0
                } else {
                    4.0 * 3f64.sqrt() * tri_area(&a, &b, &c) / s
                }
            })
            .fold(1.0, f64::min)
    }

    /// Four-way midpoint subdivision.
    pub fn refine(&self) -> Mesh {
        let mut verts = self.verts.clone();
        let mut mid: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut m = |a: usize, b: usize, verts: &mut Vec<V3>| {
            let k = (a.min(b), a.max(b));
            *mid.entry(k).or_insert_with(|| {
                verts.push((verts[a] + verts[b]) * 0.5);
                verts.len() - 1
            })
        };
        let mut tris = Vec::with_capacity(4 * self.tris.len());
        for t in &self.tris {
            let ab = m(t[0], t[1], &mut verts);
            let bc = m(t[1], t[2], &mut verts);
            let ca = m(t[2], t[0], &mut verts);
            tris.push([t[0], ab, ca]);
            tris.push([ab, t[1], bc]);
            tris.push([ca, bc, t[2]]);
            tris.push([ab, bc, ca]);
        }
        Mesh { verts, tris }
    }

    /// Merges coincident vertices and drops faces that became degenerate.
    pub fn weld(&self) -> Mesh {
        let mut ids: BTreeMap<[i64; 3], usize> = BTreeMap::new();
        let mut verts = Vec::new();
        let map: Vec<usize> = self
            .verts
            .iter()
            .map(|p| {
                *ids.entry(key(p)).or_insert_with(|| {
                    verts.push(*p);
                    verts.len() - 1
                })
            })
            .collect();
        let tris = self
            .tris
            .iter()
            .map(|t| [map[t[0]], map[t[1]], map[t[2]]])
            .filter(|t| t[0] != t[1] && t[1] != t[2] && t[0] != t[2])
            .collect();
        Mesh { verts, tris }
    }

    /// Appends another mesh, welding shared vertices.
    pub fn union(&self, o: &Mesh) -> Mesh {
        let mut m = self.clone();
        let off = m.verts.len();
        m.verts.extend(o.verts.iter().copied());
        m.tris.extend(o.tris.iter().map(|t| [t[0] + off, t[1] + off, t[2] + off]));
        m.weld()
    }

    /// Per-corner fields X with X·n_f = 1 on every face.
    ///
    /// Around each vertex the faces split into sheets connected through
    /// two-face edges. Normals in a sheet are sign-aligned through the
    /// orientation of the shared edges, a common X_v is fitted to X·m_f = 1 by
    /// least squares, and each corner gets X_v plus the normal correction
    /// (1 − X_v·m_f)m_f. Shared edges then cancel exactly wherever a common
    /// solution exists (flat regions, ridges) and to second order elsewhere.
    pub fn fields(&self) -> Vec<[V3; 3]> {
        let edges = self.edges();
        let normals: Vec<V3> = (0..self.tris.len()).map(|f| self.normal(f)).collect();
        let mut incident: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.verts.len()];
        for (f, t) in self.tris.iter().enumerate() {
            for (c, v) in t.iter().enumerate() {
                incident[*v].push((f, c));
            }
        }
        let mut out = vec![[V3::zeros(); 3]; self.tris.len()];
        for (v, inc) in incident.iter().enumerate() {
            let local: BTreeMap<usize, usize> = inc.iter().map(|(f, c)| (*f, *c)).collect();
            let mut sign: BTreeMap<usize, f64> = BTreeMap::new();
            for &(f0, _) in inc {
                if sign.contains_key(&f0) {
                    continue;
                }
                let mut sheet = vec![f0];
                sign.insert(f0, 1.0);
                let mut queue = VecDeque::from([f0]);
                while let Some(f) = queue.pop_front() {
                    let t = self.tris[f];
                    for w in t.iter().filter(|w| **w != v) {
                        let e = (v.min(*w), v.max(*w));
                        let fs = &edges[&e];
                        if fs.len() != 2 {
                            continue;
                        }
                        let (sf, g, sg) = if fs[0].0 == f { (fs[0].1, fs[1].0, fs[1].1) } else { (fs[1].1, fs[0].0, fs[0].1) };
                        if g == f || !local.contains_key(&g) || sign.contains_key(&g) {
                            continue;
                        }
                        sign.insert(g, -sign[&f] * sf * sg);
                        sheet.push(g);
                        queue.push_back(g);
                    }
                }
                let mut m = Matrix3::identity() * 1e-10 * sheet.len() as f64;
                let mut rhs = V3::zeros();
                for f in &sheet {
                    let n = normals[*f] * sign[f];
                    m += n * n.transpose();
                    rhs += n;
                }
                let mut x = m.lu().solve(&rhs).unwrap_or_else(|| normals[f0] * sign[&f0]);
                if x.norm() > 3.0 {
                    x *= 3.0 / x.norm();
                }
                for f in &sheet {
                    let s = sign[f];
                    let mf = normals[*f] * s;
                    let corner = (x + mf * (1.0 - x.dot(&mf))) * s;
                    out[*f][local[f]] = corner;
                }
            }
        }
        out
    }

    /// S = Σ P_{X_f} τ̃_f with the fields above.
    pub fn dipole_chain(&self) -> SimplicialChain<f64> {
        let fields = self.fields();
        let mut c = SimplicialChain::zero(3, 2);
        for (f, t) in self.tris.iter().enumerate() {
            if self.face_area(f) == 0.0 {
                continue;
            }
            let verts = t.iter().map(|i| to_vec(&self.verts[*i])).collect();
            let field = fields[f].iter().map(to_vec).collect();
            c.cells.push(Cell::with_field(CellKind::Dipole, verts, field, 1.0));
        }
        c
    }

    /// Net boundary field on every edge: Σ ±X_f at each endpoint.
    pub fn net_fields(&self) -> BTreeMap<(usize, usize), (V3, V3)> {
        let fields = self.fields();
        let mut out = BTreeMap::new();
        for ((a, b), fs) in self.edges() {
            let mut na = V3::zeros();
            let mut nb = V3::zeros();
            for (f, s) in fs {
                let t = self.tris[f];
                let ca = t.iter().position(|x| *x == a).unwrap();
                let cb = t.iter().position(|x| *x == b).unwrap();
                na += fields[f][ca] * s;
                nb += fields[f][cb] * s;
            }
            out.insert((a, b), (na, nb));
        }
        out
    }

    /// Compares ∂S with γ edge by edge.
    pub fn boundary_report(&self, curve: &BoundaryCurve) -> BoundaryReport {
        let tol = 1e-9 * curve.scale();
        let len_gamma = curve.length();
        let mut covered = 0.0;
        let mut stray = 0.0;
        let mut support = Vec::new();
        for ((a, b), (na, nb)) in self.net_fields() {
            let mag = na.norm().max(nb.norm());
            let (pa, pb) = (self.verts[a], self.verts[b]);
            let len = (pb - pa).norm();
            if mag > 1e-6 {
                support.push((a, b));
            }
            if curve.covers(&pa, &pb, tol) {
                if mag > 0.5 {
                    covered += len;
                }
            } else {
                stray += len * mag;
            }
        }
        let missing = (len_gamma - covered).max(0.0);
        BoundaryReport { residual: (stray + missing) / len_gamma, stray: stray / len_gamma, missing: missing / len_gamma, support }
    }

    pub fn to_obj(&self, lines: &[Vec<usize>]) -> String {
        let mut s = String::new();
        for v in &self.verts {
            let _ = writeln!(s, "v {:.12} {:.12} {:.12}", v.x, v.y, v.z);
        }
        for t in &self.tris {
            let _ = writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
        }
        for l in lines {
            let ids: Vec<String> = l.iter().map(|i| (i + 1).to_string()).collect();
            let _ = writeln!(s, "l {}", ids.join(" "));
        }
        s
    }

    /// Reads `v` and `f` records; polygons are fanned, other records ignored.
    pub fn from_obj(text: &str) -> Result<Mesh> {
        let mut m = Mesh::default();
        for (ln, line) in text.lines().enumerate() {
            let mut it = line.split_whitespace();
            match it.next() {
                Some("v") => {
                    let xs: Vec<f64> = it.take(3).map(|t| t.parse::<f64>()).collect::<std::result::Result<_, _>>()
                        .map_err(|_| parse_err(ln + 1, "bad vertex"))?;
                    if xs.len() != 3 {
                        return Err(parse_err(ln + 1, "vertex needs three coordinates"));
                    }
                    m.verts.push(V3::new(xs[0], xs[1], xs[2]));
                }
                Some("f") => {
                    let ids: Vec<usize> = it
                        .map(|t| t.split('/').next().unwrap_or("").parse::<usize>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| parse_err(ln + 1, "bad face index"))?;
                    if ids.len() < 3 || ids.iter().any(|i| *i == 0 || *i > m.verts.len()) {
                        return Err(parse_err(ln + 1, "face index out of range"));
                    }
                    for k in 1..ids.len() - 1 {
                        m.tris.push([ids[0] - 1, ids[k] - 1, ids[k + 1] - 1]);
                    }
                }
                _ => {}
            }
        }
        if m.tris.is_empty() {
            return Err(Error::Geometry("mesh has no faces".into()));
        }
        Ok(m)
    }
}

#[derive(Clone, Debug)]
pub struct BoundaryReport {
    /// (stray + missing) / length(γ).
    pub residual: f64,
    /// Σ len·|net field| over edges off γ, relative to length(γ).
    pub stray: f64,
    /// Length of γ not carried by any boundary edge, relative.
    pub missing: f64,
    /// Edges whose net field does not vanish.
    pub support: Vec<(usize, usize)>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plateau::curve::Polyline;

    fn square() -> Mesh {
        Mesh::new(
            vec![V3::new(0.0, 0.0, 0.0), V3::new(1.0, 0.0, 0.0), V3::new(1.0, 1.0, 0.0), V3::new(0.0, 1.0, 0.0)],
            vec![[0, 1, 2], [0, 2, 3]],
        )
    }

    #[test]
    fn unit_square_has_area_one_and_unit_fields() {
        let m = square();
        assert!((m.area() - 1.0).abs() < 1e-15);
        let s = m.dipole_chain();
        for c in &s.cells {
            assert!(c.unit_orthogonal(1e-12));
        }
        // the diagonal cancels
        let net = m.net_fields();
        assert!(net[&(0, 2)].0.norm() < 1e-12 && net[&(0, 2)].1.norm() < 1e-12);
    }

    #[test]
    fn flipped_face_still_cancels() {
        let mut m = square();
        m.tris[1] = [0, 3, 2];
        let net = m.net_fields();
        assert!(net[&(0, 2)].0.norm() < 1e-12);
        for c in &m.dipole_chain().cells {
            assert!(c.unit_orthogonal(1e-12));
        }
    }

    #[test]
    fn ridge_cancels_exactly() {
        let m = Mesh::new(
            vec![V3::new(0.0, 0.0, 0.0), V3::new(0.0, 1.0, 0.0), V3::new(1.0, 0.0, 0.3), V3::new(-1.0, 0.2, 0.5)],
            vec![[0, 2, 1], [0, 1, 3]],
        );
        let net = m.net_fields();
        assert!(net[&(0, 1)].0.norm() < 1e-9 && net[&(0, 1)].1.norm() < 1e-9);
        for c in &m.dipole_chain().cells {
            assert!(c.unit_orthogonal(1e-9));
        }
    }

    #[test]
    fn refinement_preserves_area_and_junctions() {
        let m = square().refine().refine();
        assert_eq!(m.tris.len(), 32);
        assert!((m.area() - 1.0).abs() < 1e-14);
        assert!(m.quality() > 0.5);
        let y = Mesh::new(
            vec![V3::zeros(), V3::z(), V3::x(), V3::new(-0.5, 0.8, 0.0), V3::new(-0.5, -0.8, 0.0)],
            vec![[0, 1, 2], [0, 1, 3], [0, 1, 4]],
        );
        assert_eq!(y.junction_edges(), vec![(0, 1)]);
        assert_eq!(y.refine().junction_edges().len(), 2);
    }

    #[test]
    fn obj_round_trip() {
        let m = square();
        let text = m.to_obj(&[vec![0, 1]]);
        assert!(text.contains("l 1 2"));
        let back = Mesh::from_obj(&text).unwrap();
        assert_eq!(back, m);
        assert!(Mesh::from_obj("v 0 0 0\nf 1 2 3\n").is_err());
    }

    #[test]
    fn boundary_of_a_disk_fan() {
        let poly = Polyline::circle(V3::zeros(), V3::x(), V3::y(), 1.0, 32);
        let curve = BoundaryCurve::new(vec![poly.clone()], V3::new(0.0, 0.0, 0.5)).unwrap();
        let mut verts = poly.pts.clone();
        verts.push(V3::zeros());
        let tris = (0..32).map(|i| [32, i, (i + 1) % 32]).collect();
        let m = Mesh::new(verts, tris);
        let r = m.boundary_report(&curve);
        assert!(r.residual < 1e-12, "{:?}", r.residual);
        assert_eq!(r.support.len(), 32);
        // dropping a face opens a hole
        let mut holed = m.clone();
        holed.tris.remove(3);
        assert!(holed.boundary_report(&curve).residual > 0.05);
    }
}
