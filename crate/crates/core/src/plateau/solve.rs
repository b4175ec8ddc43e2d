use super::area::{area, checked_area};
use super::curve::BoundaryCurve;
use super::flow::{flow, FlowOptions};
use super::geom::V3;
use super::lattice::{lp_minimize, SceneBox};
use super::mesh::Mesh;
use super::problem::{Backend, Problem, Seed};
use super::quantize::quantize;
use super::seeds;
use super::shadow::best_shadow;
use super::spanning::{spans, SpanReport};
use crate::error::{Error, Result};
use std::fmt::Write as _;

/// Relative agreement required between the runs from q and q′.
pub const INDEPENDENCE_TOL: f64 = 0.02;
/// Relative agreement required between the two area formulas.
pub const AREA_FORMULA_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Default)]
pub struct RunInfo {
    pub sweeps: usize,
    pub rejected: usize,
    pub remeshes: usize,
    pub converged: bool,
    pub monotone: bool,
    pub lp_value: Option<f64>,
    pub lp_faces: usize,
    pub lp_non_integrality: f64,
    pub lp_pivots: usize,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub config: Vec<(String, String)>,
    pub area: f64,
    pub area_by_cone: f64,
    pub area_rel_diff: f64,
    pub a0: Option<f64>,
    pub a0_note: String,
    pub cap: f64,
    pub span: SpanReport,
    pub run: RunInfo,
    pub junction_edges: usize,
    pub junction_support: usize,
    pub independence: Option<(f64, f64)>,
    /// (certificate cost, 4kc·2^{-k}, atoms), or why it could not be built.
    pub quantization: std::result::Result<(f64, f64, usize), String>,
}

impl Report {
    pub fn a0_ok(&self) -> bool {
        self.a0.is_none_or(|a0| self.area >= a0 * (1.0 - 1e-9))
    }

    pub fn cap_ok(&self) -> bool {
        self.area <= self.cap * (1.0 + 1e-9)
    }

    pub fn ok(&self) -> bool {
        self.span.spans && self.a0_ok() && self.cap_ok()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("plateau report\n");
        for (k, v) in &self.config {
            let _ = writeln!(s, "config {}: {}", k, v);
        }
        let yes = |b: bool| if b { "pass" } else { "FAIL" };
        let _ = writeln!(s, "area: {:.12}", self.area);
        let _ = writeln!(s, "area by cone formula: {:.12} (relative difference {:.3e}, {})", self.area_by_cone, self.area_rel_diff, yes(self.area_rel_diff <= AREA_FORMULA_TOL));
        match self.a0 {
            Some(a0) => {
                let _ = writeln!(s, "shadow lower bound a0: {:.12} ({}; {})", a0, self.a0_note, yes(self.a0_ok()));
            }
            None => {
                let _ = writeln!(s, "shadow lower bound a0: unavailable ({})", self.a0_note);
            }
        }
        let _ = writeln!(s, "cap: {:.12} ({})", self.cap, yes(self.cap_ok()));
        let _ = writeln!(s, "boundary residual: {:.3e}", self.span.residual);
        let _ = writeln!(s, "test links: {} used, {} missed", self.span.links, self.span.unhit.len());
        for w in &self.span.warnings {
            let _ = writeln!(s, "warning: {}", w);
        }
        let _ = writeln!(s, "spans: {}", self.span.spans);
        let _ = writeln!(s, "junction edges: {} ({} carrying boundary)", self.junction_edges, self.junction_support);
        let r = &self.run;
        if let Some(v) = r.lp_value {
            let _ = writeln!(s, "lp optimum: {:.12} over {} faces, {} pivots, non-integrality {:.3e}", v, r.lp_faces, r.lp_pivots, r.lp_non_integrality);
        } else {
            let _ = writeln!(
                s,
                "flow: {} sweeps, {} rejected, {} remeshes, converged {}, area nonincreasing {}",
                r.sweeps, r.rejected, r.remeshes, r.converged, r.monotone
            );
        }
        match self.independence {
            Some((a2, rel)) => {
                let _ = writeln!(s, "second cone point area: {:.12} (relative difference {:.3e}, {})", a2, rel, yes(rel <= INDEPENDENCE_TOL));
            }
            None => {
                let _ = writeln!(s, "second cone point area: not run");
            }
        }
        match &self.quantization {
            Ok((cost, bound, atoms)) => {
                let _ = writeln!(s, "lattice quantization: {} atoms, displacement certificate {:.6e} (r = 2) vs 4kc2^-k = {:.6e}", atoms, cost, bound);
            }
            Err(e) => {
                let _ = writeln!(s, "lattice quantization: not available ({})", e);
            }
        }
        s.push_str("checked properties:\n");
        for line in [
            "area as a Hausdorff sum over unit-orthogonal dipole cells",
            "area as the volume integral over the cone of the filled boundary",
            "shadow lower bound a0 <= area",
            "area <= cap",
            "boundary of the surface matches the dipole curve of the frame",
            "every test link with linking number one meets the surface",
            "area independent of the cone point",
        ] {
            let _ = writeln!(s, "  - {}", line);
        }
        let _ = writeln!(s, "result: {}", if self.ok() { "ok" } else { "FAILED" });
        s
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub mesh: Mesh,
    pub curve: BoundaryCurve,
    pub report: Report,
}

impl Solution {
    /// OBJ with junction edges and the edges along γ as `l` records.
    pub fn to_obj(&self) -> String {
        let tol = 1e-9 * self.curve.scale();
        let mut lines: Vec<Vec<usize>> = self.mesh.junction_edges().into_iter().map(|(a, b)| vec![a, b]).collect();
        for (a, b) in self.mesh.edges().keys() {
            if self.curve.covers(&self.mesh.verts[*a], &self.mesh.verts[*b], tol) {
                lines.push(vec![*a, *b]);
            }
        }
        self.mesh.to_obj(&lines)
    }
}

fn seed_mesh(p: &Problem, curve: &BoundaryCurve) -> Result<Mesh> {
    Ok(match &p.seed {
        Seed::Cone => seeds::cone(curve, p.refine.unwrap_or(3)),
        Seed::Cylinder => seeds::cylinder(curve, 5, p.refine.unwrap_or(1))?,
        Seed::Moebius => seeds::moebius(curve, 4, p.refine.unwrap_or(1))?,
        Seed::Mesh(path) => {
            let mut m = Mesh::from_obj(&std::fs::read_to_string(path)?)?;
            for _ in 0..p.refine.unwrap_or(0) {
                m = m.refine();
            }
            m
        }
    })
}

fn run(p: &Problem, curve: &BoundaryCurve, bx: &SceneBox) -> Result<(Mesh, RunInfo)> {
    match p.backend {
        Backend::Flow => {
            let seed = seed_mesh(p, curve)?;
            let r = flow(&seed, curve, &FlowOptions::default())?;
            let info = RunInfo {
                sweeps: r.sweeps.len(),
                rejected: r.rejected,
                remeshes: r.remeshes,
                converged: r.converged,
                monotone: r.monotone(),
                ..Default::default()
            };
            Ok((r.mesh, info))
        }
        Backend::Lp => {
            let extra = match p.seed {
                Seed::Cone => None,
                _ => Some(seed_mesh(p, curve)?),
            };
            let out = lp_minimize(curve, bx, p.k, extra.as_ref())?;
            let info = RunInfo {
                lp_value: Some(out.value),
                lp_faces: out.complex_faces,
                lp_non_integrality: out.non_integrality,
                lp_pivots: out.pivots,
                converged: true,
                monotone: true,
                ..Default::default()
            };
            Ok((out.mesh, info))
        }
    }
}

pub fn scene_box(p: &Problem, curve: &BoundaryCurve) -> SceneBox {
    let auto = SceneBox::around(curve);
    match p.box_side {
        Some(side) => SceneBox { center: auto.center, side },
        None => auto,
    }
}

/// Builds γ with the first cone point, checks the scene, runs the backend
/// and evaluates the result.
pub fn minimize(p: &Problem) -> Result<Solution> {
    let curve = BoundaryCurve::new(p.arcs.clone(), p.conepoints[0])?;
    let bx = scene_box(p, &curve);
    if !curve.points().iter().all(|x| bx.contains(x)) || !bx.contains(&curve.q) {
        return Err(Error::Geometry(format!("γ ∪ {{q}} does not fit in the box of side {}", bx.side)));
    }
    let cap = match p.cap {
        Some(c) => c,
        None => seeds::cone(&curve, 0).area(),
    };
    let (a0, a0_note) = match best_shadow(&curve) {
        Ok(sh) => {
            let d = sh.direction;
            (Some(sh.a0), format!("direction {:.6} {:.6} {:.6}", d.x, d.y, d.z))
        }
        Err(e) => (None, e.to_string()),
    };
    if let Some(a0) = a0 {
        if cap < a0 {
            return Err(Error::Geometry(format!("cap {} is below the shadow lower bound {}", cap, a0)));
        }
    }
    let (mesh, info) = run(p, &curve, &bx)?;
    let s = mesh.dipole_chain();
    let check = checked_area(&s, &[curve.q.x, curve.q.y, curve.q.z])?;
    let span = spans(&mesh, &curve, bx.side, &p.links);
    let edges = mesh.edges();
    let junctions = mesh.junction_edges();
    let report_b = mesh.boundary_report(&curve);
    let junction_support = report_b.support.iter().filter(|e| edges[e].len() >= 3).count();
    let independence = match p.conepoints.get(1) {
        Some(q2) => {
            let c2 = curve.with_q(*q2)?;
            let (m2, _) = run(p, &c2, &bx)?;
            let a2 = area(&m2.dipole_chain())?;
            Some((a2, (a2 - check.area).abs() / check.area))
        }
        None => None,
    };
    let quantization = quantize(&s.pointize(p.k.min(3)), p.k, cap).map(|q| (q.certificate.cost(), q.bound, q.atoms.len())).map_err(|e| e.to_string());
    let mut config = vec![
        ("backend".to_string(), format!("{:?}", p.backend).to_lowercase()),
        ("seed".to_string(), match &p.seed {
            Seed::Mesh(path) => format!("mesh {}", path.display()),
            other => format!("{:?}", other).to_lowercase(),
        }),
        ("arcs".to_string(), p.arcs.iter().map(|a| a.pts.len().to_string()).collect::<Vec<_>>().join(" ")),
        ("q".to_string(), fmt_v(&curve.q)),
        ("box".to_string(), format!("center {} side {:.6}", fmt_v(&bx.center), bx.side)),
        ("lattice k".to_string(), p.k.to_string()),
        ("cap".to_string(), if p.cap.is_some() { "given".to_string() } else { "cone area".to_string() }),
        ("tolerances".to_string(), format!("geometry 1e-9, area formulas {:e}, residual 5e-2, independence {:e}", AREA_FORMULA_TOL, INDEPENDENCE_TOL)),
    ];
    if let Some(q2) = p.conepoints.get(1) {
        config.push(("q'".to_string(), fmt_v(q2)));
    }
    let report = Report {
        config,
        area: check.area,
        area_by_cone: check.by_cone,
        area_rel_diff: check.rel_diff,
        a0,
        a0_note,
        cap,
        span,
        run: info,
        junction_edges: junctions.len(),
        junction_support,
        independence,
        quantization,
    };
    Ok(Solution { mesh, curve, report })
}

fn fmt_v(v: &V3) -> String {
    format!("{} {} {}", v.x, v.y, v.z)
}
