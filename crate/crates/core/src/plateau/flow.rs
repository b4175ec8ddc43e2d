use super::curve::BoundaryCurve;
use super::geom::V3;
use super::mesh::Mesh;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct FlowOptions {
    pub max_sweeps: usize,
    /// Stop once an accepted sweep lowers the area by less than this, relative.
    pub tol: f64,
    /// Triangle quality that triggers remeshing.
    pub min_quality: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions { max_sweeps: 20000, tol: 1e-6, min_quality: 1e-4 }
    }
}

#[derive(Clone, Debug)]
pub struct FlowResult {
    pub mesh: Mesh,
    /// Area before and after every accepted sweep.
    pub sweeps: Vec<(f64, f64)>,
    pub rejected: usize,
    pub remeshes: usize,
    pub converged: bool,
}

impl FlowResult {
    pub fn monotone(&self) -> bool {
        self.sweeps.iter().all(|(a, b)| b <= a)
    }
}

enum Freedom {
    Pinned,
    Line(V3),
    Free,
}

fn freedoms(mesh: &Mesh, curve: &BoundaryCurve) -> Vec<Freedom> {
    let tol = 1e-9 * curve.scale();
    let mut dirs: Vec<Vec<V3>> = vec![Vec::new(); mesh.verts.len()];
    for (a, b) in mesh.junction_edges() {
        let d = (mesh.verts[b] - mesh.verts[a]).normalize();
        dirs[a].push(d);
        dirs[b].push(d);
    }
    mesh.verts
        .iter()
        .zip(dirs)
        .map(|(p, ds)| {
            if curve.contains(p, tol) {
                return Freedom::Pinned;
            }
            if ds.is_empty() {
                return Freedom::Free;
            }
            let mut t = V3::zeros();
            for d in &ds {
                t += if d.dot(&ds[0]) >= 0.0 { *d } else { -d };
            }
            // a junction that branches or turns sharply stays put
            if ds.len() > 2 || t.norm() < 1.5 {
                Freedom::Pinned
            } else {
                Freedom::Line(t.normalize())
            }
        })
        .collect()
}

/// Area gradient per vertex and the diagonal of the area Hessian in the
/// normal direction, Σ |b − c|²/(4A) over incident faces.
fn gradient(mesh: &Mesh) -> (Vec<V3>, Vec<f64>) {
    let mut g = vec![V3::zeros(); mesh.verts.len()];
    let mut d = vec![0.0; mesh.verts.len()];
    for (f, t) in mesh.tris.iter().enumerate() {
        let area = mesh.face_area(f);
        if area <= 0.0 {
            continue;
        }
        let n = mesh.normal(f);
        let p = mesh.corners(f);
        for i in 0..3 {
            let (b, c) = (p[(i + 1) % 3], p[(i + 2) % 3]);
            g[t[i]] += (b - c).cross(&n) * 0.5;
            d[t[i]] += (b - c).norm_squared() / (4.0 * area);
        }
    }
    (g, d)
}

fn step(mesh: &Mesh, free: &[Freedom], g: &[V3], d: &[f64], tau: f64) -> Mesh {
    let mut out = mesh.clone();
    for (v, p) in out.verts.iter_mut().enumerate() {
        if d[v] <= 0.0 {
            continue;
        }
        let dir = match &free[v] {
            Freedom::Pinned => continue,
            Freedom::Line(t) => t * t.dot(&g[v]),
            Freedom::Free => g[v],
        };
        *p -= dir * (tau / d[v]);
    }
    out
}

/// Moves free vertices toward the mean of their neighbours within the
/// local tangent plane.
fn smooth(mesh: &Mesh, free: &[Freedom], passes: usize) -> Mesh {
    let mut m = mesh.clone();
    let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); m.verts.len()];
    for (a, b) in m.edges().keys() {
        nbrs[*a].push(*b);
        nbrs[*b].push(*a);
    }
    for _ in 0..passes {
        let mut normal = vec![V3::zeros(); m.verts.len()];
        for (f, t) in m.tris.iter().enumerate() {
            let n = m.normal(f) * m.face_area(f);
            for v in t {
                // sheets may disagree in sign; align with what is there
                let s = if normal[*v].dot(&n) >= 0.0 { 1.0 } else { -1.0 };
                normal[*v] += n * s;
            }
        }
        let old = m.verts.clone();
        for v in 0..old.len() {
            if nbrs[v].is_empty() {
                continue;
            }
            let mean = nbrs[v].iter().map(|w| old[*w]).sum::<V3>() / nbrs[v].len() as f64;
            let delta = mean - old[v];
            let moved = match &free[v] {
                Freedom::Pinned => continue,
                Freedom::Line(t) => t * t.dot(&delta),
                Freedom::Free => {
                    let n = normal[v];
                    if n.norm() > 0.0 {
                        let n = n.normalize();
                        delta - n * n.dot(&delta)
                    } else {
                        delta
                    }
                }
            };
            m.verts[v] = old[v] + moved * 0.5;
        }
    }
    m
}

/// Discrete area descent: Jacobi steps scaled by the Hessian diagonal,
/// reverted and halved whenever the area goes up.
pub fn flow(seed: &Mesh, curve: &BoundaryCurve, opts: &FlowOptions) -> Result<FlowResult> {
    let mut mesh = seed.clone();
    let free = freedoms(&mesh, curve);
    let mut area = mesh.area();
    let mut tau = 0.25;
    let mut res = FlowResult { mesh: mesh.clone(), sweeps: Vec::new(), rejected: 0, remeshes: 0, converged: false };
    let mut attempts = 0;
    while res.sweeps.len() < opts.max_sweeps && attempts < 4 * opts.max_sweeps {
        attempts += 1;
        let (g, d) = gradient(&mesh);
        let next = step(&mesh, &free, &g, &d, tau);
        let next_area = next.area();
        if !(next_area <= area) {
            res.rejected += 1;
            tau *= 0.5;
            if tau < 1e-12 {
                res.converged = true;
                break;
            }
            continue;
        }
        let mut next = next;
        let mut next_area = next_area;
        if next.quality() < opts.min_quality {
            res.remeshes += 1;
            let smoothed = smooth(&next, &free, 5);
            if smoothed.quality() < opts.min_quality {
                return Err(Error::Degenerate(format!("triangle quality {:.3e} after remeshing", smoothed.quality())));
            }
            if smoothed.area() <= area {
                next_area = smoothed.area();
                next = smoothed;
            } else {
                // smoothing cannot be accepted without raising the area
                res.rejected += 1;
                tau *= 0.5;
                continue;
            }
        }
        res.sweeps.push((area, next_area));
        let decrease = (area - next_area) / area.max(1e-300);
        mesh = next;
        area = next_area;
        tau = (tau * 1.2).min(1.0);
        if decrease < opts.tol {
            res.converged = true;
            break;
        }
    }
    res.mesh = mesh;
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plateau::curve::Polyline;
    use crate::plateau::seeds;

    #[test]
    fn cone_relaxes_to_the_flat_disk() {
        let m = 32;
        let circle = Polyline::circle(V3::zeros(), V3::x(), V3::y(), 1.0, m);
        let curve = BoundaryCurve::new(vec![circle], V3::new(0.1, 0.2, 0.6)).unwrap();
        let seed = seeds::cone(&curve, 2);
        let r = flow(&seed, &curve, &FlowOptions::default()).unwrap();
        assert!(r.converged && r.monotone());
        // oracle: the inscribed polygon area
        let poly = 0.5 * m as f64 * (2.0 * std::f64::consts::PI / m as f64).sin();
        let a = r.mesh.area();
        assert!(a >= poly - 1e-9 && a < poly * 1.01, "{} vs {}", a, poly);
        assert!(r.mesh.verts.iter().all(|v| v.z.abs() < 0.05));
    }

    #[test]
    fn planar_fan_is_already_stationary() {
        let circle = Polyline::circle(V3::zeros(), V3::x(), V3::y(), 1.0, 16);
        let curve = BoundaryCurve::new(vec![circle], V3::new(0.1, 0.0, 0.0)).unwrap();
        let flat = seeds::cone(&curve, 1);
        let r = flow(&flat, &curve, &FlowOptions::default()).unwrap();
        assert!((r.mesh.area() - flat.area()).abs() < 1e-6 * flat.area());
    }
}
