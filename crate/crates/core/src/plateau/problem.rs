//! Plateau problem files.
//!
//! ```text
//! plateau
//! curve param (cos x1) (sin x1) 0 segments=64
//! conepoint 0.1 0.2 0.6
//! conepoint -0.3 0.1 -0.4
//! box R=3
//! lattice k=3
//! cap c=auto
//! seed cone
//! backend flow
//! link 1 0 0; 2 0 1; 2 0 -1
//! ```
//! `curve points x y z; x y z; ... [closed|open]` gives a polyline arc
//! directly; several `curve` lines build a multi-arc frame. The second
//! cone point, when present, drives the independence re-run. `refine
//! levels=n` overrides the seed refinement.

use super::curve::Polyline;
use super::geom::V3;
use crate::error::{parse_err, Error, Result};
use crate::forms::Expr;
use std::path::PathBuf;

#[derive(Clone, Debug, PartialEq)]
pub enum Seed {
    Cone,
    Cylinder,
    Moebius,
    Mesh(PathBuf),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Lp,
    Flow,
}

#[derive(Clone, Debug)]
pub struct Problem {
    pub arcs: Vec<Polyline>,
    pub conepoints: Vec<V3>,
    pub box_side: Option<f64>,
    pub k: u32,
    /// None: the area of the cone from q over γ.
    pub cap: Option<f64>,
    pub seed: Seed,
    pub backend: Backend,
    pub links: Vec<Polyline>,
    pub refine: Option<usize>,
}

/// Top-level tokens: parenthesized groups stay whole.
fn groups(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0i32;
    for ch in s.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth -= 1;
                cur.push(ch);
                if depth == 0 {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c if c.is_whitespace() && depth == 0 => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn floats(ln: usize, s: &str, n: usize) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| parse_err(ln, format!("bad number `{}`", t))))
        .collect::<Result<_>>()?;
    if v.len() != n {
        return Err(parse_err(ln, format!("expected {} numbers, got {}", n, v.len())));
    }
    Ok(v)
}

fn point_list(ln: usize, s: &str) -> Result<Vec<V3>> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| floats(ln, p, 3).map(|v| V3::new(v[0], v[1], v[2])))
        .collect()
}

fn key_value<'a>(ln: usize, tok: &'a str, key: &str) -> Result<&'a str> {
    tok.strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| parse_err(ln, format!("expected `{}=<value>`, got `{}`", key, tok)))
}

impl Problem {
    pub fn parse(text: &str, base: Option<&std::path::Path>) -> Result<Problem> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.split('#').next().unwrap().trim())).filter(|(_, l)| !l.is_empty());
        match lines.next() {
            Some((_, "plateau")) => {}
            Some((ln, _)) => return Err(parse_err(ln, "expected `plateau` header")),
            None => return Err(parse_err(1, "empty problem file")),
        }
        let mut p = Problem {
            arcs: Vec::new(),
            conepoints: Vec::new(),
            box_side: None,
            k: 3,
            cap: None,
            seed: Seed::Cone,
            backend: Backend::Flow,
            links: Vec::new(),
            refine: None,
        };
        for (ln, line) in lines {
            let (word, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match word {
                "curve" => {
                    let (kind, body) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                    match kind {
                        "param" => {
                            let g = groups(body);
                            if g.len() < 3 || g.len() > 4 {
                                return Err(parse_err(ln, "expected three coordinate expressions and optional segments=<m>"));
                            }
                            let mut exprs = Vec::new();
                            for e in &g[..3] {
                                exprs.push(Expr::parse(e).map_err(|e| parse_err(ln, e.to_string()))?);
                            }
                            let m = match g.get(3) {
                                Some(t) => key_value(ln, t, "segments")?.parse::<usize>().map_err(|_| parse_err(ln, "bad segment count"))?,
                                None => 64,
                            };
                            if m < 3 {
                                return Err(parse_err(ln, "need at least three segments"));
                            }
                            let exprs: [Expr; 3] = exprs.try_into().unwrap();
                            p.arcs.push(Polyline::parametric(&exprs, m).map_err(|e| parse_err(ln, e.to_string()))?);
                        }
                        "points" => {
                            let (body, closed) = match body.rsplit_once(char::is_whitespace) {
                                Some((b, "open")) => (b, false),
                                Some((b, "closed")) => (b, true),
                                _ => (body, true),
                            };
                            let pts = point_list(ln, body)?;
                            if pts.len() < if closed { 3 } else { 2 } {
                                return Err(parse_err(ln, "too few curve points"));
                            }
                            p.arcs.push(Polyline::new(pts, closed));
                        }
                        _ => return Err(parse_err(ln, "expected `curve param` or `curve points`")),
                    }
                }
                "conepoint" => {
                    let v = floats(ln, rest, 3)?;
                    p.conepoints.push(V3::new(v[0], v[1], v[2]));
                }
                "box" => {
                    let r: f64 = key_value(ln, rest, "R")?.parse().map_err(|_| parse_err(ln, "bad box side"))?;
                    if !(r > 0.0) {
                        return Err(parse_err(ln, "box side must be positive"));
                    }
                    p.box_side = Some(r);
                }
                "lattice" => {
                    p.k = key_value(ln, rest, "k")?.parse().map_err(|_| parse_err(ln, "bad lattice depth"))?;
                    if p.k == 0 || p.k > 10 {
                        return Err(parse_err(ln, "lattice depth must be in 1..=10"));
                    }
                }
                "cap" => {
                    let v = key_value(ln, rest, "c")?;
                    p.cap = if v == "auto" { None } else { Some(v.parse().map_err(|_| parse_err(ln, "bad cap"))?) };
                }
                "seed" => {
                    let (kind, path) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                    p.seed = match kind {
                        "cone" => Seed::Cone,
                        "cylinder" => Seed::Cylinder,
                        "moebius" => Seed::Moebius,
                        "mesh" => {
                            let path = path.trim();
                            if path.is_empty() {
                                return Err(parse_err(ln, "seed mesh needs a path"));
                            }
                            let pb = PathBuf::from(path);
                            Seed::Mesh(match base {
                                Some(b) if pb.is_relative() => b.join(pb),
                                _ => pb,
                            })
                        }
                        _ => return Err(parse_err(ln, format!("unknown seed `{}`", kind))),
                    };
                }
                "backend" => {
                    p.backend = match rest {
                        "lp" => Backend::Lp,
                        "flow" => Backend::Flow,
                        _ => return Err(parse_err(ln, format!("unknown backend `{}`", rest))),
                    };
                }
                "link" => {
                    let pts = point_list(ln, rest)?;
                    if pts.len() < 3 {
                        return Err(parse_err(ln, "a link needs at least three points"));
                    }
                    p.links.push(Polyline::new(pts, true));
                }
                "refine" => {
                    p.refine = Some(key_value(ln, rest, "levels")?.parse().map_err(|_| parse_err(ln, "bad refinement level"))?);
                }
                _ => return Err(parse_err(ln, format!("unknown directive `{}`", word))),
            }
        }
        if p.arcs.is_empty() {
            return Err(parse_err(0, "no curve given"));
        }
        if p.conepoints.is_empty() {
            return Err(parse_err(0, "no conepoint given"));
        }
        Ok(p)
    }

    pub fn read(path: &std::path::Path) -> Result<Problem> {
        let text = std::fs::read_to_string(path).map_err(Error::Io)?;
        Problem::parse(&text, path.parent())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_file() {
        let text = "# unit circle\nplateau\ncurve param (cos x1) (sin x1) 0 segments=32\nconepoint 0.1 0.2 0.6\nconepoint -0.3 0.1 -0.4\nbox R=3\nlattice k=2\ncap c=auto\nseed mesh disk.obj\nbackend lp\nlink 1 0 0; 2 0 1; 2 0 -1\nrefine levels=2\n";
        let p = Problem::parse(text, Some(std::path::Path::new("/tmp/x"))).unwrap();
        assert_eq!(p.arcs[0].pts.len(), 32);
        assert!((p.arcs[0].pts[8] - V3::new(0.0, 1.0, 0.0)).norm() < 1e-12);
        assert_eq!(p.conepoints.len(), 2);
        assert_eq!(p.box_side, Some(3.0));
        assert_eq!(p.k, 2);
        assert_eq!(p.cap, None);
        assert_eq!(p.seed, Seed::Mesh(PathBuf::from("/tmp/x/disk.obj")));
        assert_eq!(p.backend, Backend::Lp);
        assert_eq!(p.links[0].pts.len(), 3);
        assert_eq!(p.refine, Some(2));
    }

    #[test]
    fn open_point_arcs() {
        let p = Problem::parse("plateau\ncurve points 0 0 0; 1 0 0; 1 0 1 open\nconepoint 0 1 0\n", None).unwrap();
        assert!(!p.arcs[0].closed);
        assert_eq!(p.arcs[0].pts.len(), 3);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = Problem::parse("chain n=2\n", None).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = Problem::parse("plateau\n\ncurve param (cos x1) (sin x1)\n", None).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{:?}", e);
        let e = Problem::parse("plateau\ncurve param (cos x1) (sin x1) 0\nbackend simplex\n", None).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
        assert!(Problem::parse("plateau\ncurve param (cos x1) (sin x1) 0\n", None).is_err());
    }
}
