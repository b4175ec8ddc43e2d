use super::curve::{BoundaryCurve, Polyline};
use super::geom::V3;
use super::mesh::Mesh;
use crate::error::{Error, Result};

/// Fan from q over every segment of γ, refined `levels` times.
pub fn cone(curve: &BoundaryCurve, levels: usize) -> Mesh {
    let mut verts = vec![curve.q];
    let mut tris = Vec::new();
    for (a, b) in curve.segments() {
        let i = verts.len();
        verts.push(a);
        verts.push(b);
        tris.push([0, i, i + 1]);
    }
    let mut m = Mesh::new(verts, tris).weld();
    for _ in 0..levels {
        m = m.refine();
    }
    m
}

/// Ruled strip between two closed loops with equal vertex counts; the
/// second loop is shifted and possibly reversed to best match the first.
pub fn cylinder(curve: &BoundaryCurve, rings: usize, levels: usize) -> Result<Mesh> {
    let loops: Vec<&Polyline> = curve.arcs.iter().filter(|a| a.closed).collect();
    if loops.len() != 2 || loops[0].pts.len() != loops[1].pts.len() {
        return Err(Error::Geometry("cylinder seed needs two closed loops with equal vertex counts".into()));
    }
    let a = &loops[0].pts;
    let n = a.len();
    let mut best = (f64::INFINITY, Vec::new());
    for b in [loops[1].pts.clone(), loops[1].reversed().pts] {
        for off in 0..n {
            let d: f64 = (0..n).map(|i| (a[i] - b[(i + off) % n]).norm_squared()).sum();
            if d < best.0 {
                best = (d, (0..n).map(|i| b[(i + off) % n]).collect());
            }
        }
    }
    let b = best.1;
    let rings = rings.max(1);
    let mut verts = Vec::with_capacity(n * (rings + 1));
    for j in 0..=rings {
        let t = j as f64 / rings as f64;
        for i in 0..n {
            verts.push(a[i] * (1.0 - t) + b[i] * t);
        }
    }
    let mut tris = Vec::new();
    for j in 0..rings {
        for i in 0..n {
            let (p, q) = (j * n + i, j * n + (i + 1) % n);
            let (r, s) = (p + n, q + n);
            tris.push([p, q, s]);
            tris.push([p, s, r]);
        }
    }
    let mut m = Mesh::new(verts, tris);
    for _ in 0..levels {
        m = m.refine();
    }
    Ok(m)
}

/// Band of straight rulings γ(l) → γ(l + m) for a closed curve with 2m
/// vertices that winds twice around its core; the band closes with a flip.
pub fn moebius(curve: &BoundaryCurve, rungs: usize, levels: usize) -> Result<Mesh> {
    let g = match curve.arcs.as_slice() {
        [a] if a.closed && a.pts.len() % 2 == 0 && a.pts.len() >= 6 => &a.pts,
        _ => return Err(Error::Geometry("moebius seed needs one closed curve with an even vertex count".into())),
    };
    let m = g.len() / 2;
    let rungs = rungs.max(2);
    let ruling = |l: usize, j: usize| -> V3 {
        let t = j as f64 / rungs as f64;
        g[l] * (1.0 - t) + g[l + m] * t
    };
    let mut verts = Vec::new();
    for l in 0..m {
        for j in 0..=rungs {
            verts.push(ruling(l, j));
        }
    }
    let id = |l: usize, j: usize| -> usize {
        if l == m {
            // ruling m is ruling 0 run backwards
            rungs - j
        } else {
            l * (rungs + 1) + j
        }
    };
    let mut tris = Vec::new();
    for l in 0..m {
        for j in 0..rungs {
            let (p, q) = (id(l, j), id(l + 1, j));
            let (r, s) = (id(l, j + 1), id(l + 1, j + 1));
            tris.push([p, q, s]);
            tris.push([p, s, r]);
        }
    }
    let mut mesh = Mesh::new(verts, tris);
    for _ in 0..levels {
        mesh = mesh.refine();
    }
    Ok(mesh)
}
