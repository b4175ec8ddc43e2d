//! Line-oriented chain files.
//!
//! ```text
//! chain n=2 k=1 s=1 mode=rat
//! T P 0 0 S 1 1 0 A 0 1
//! C plain W 1 V 0 0 1 0
//! C dipole W 1 V 0 0 1 0 X 0 1 0 1
//! K Q 0 0 P 1 1 S 0 A 1
//! ```
//! `T` lines are Dirac/dipole terms, `C` lines weighted cells (plain cells
//! carry no `X`), `K` lines cones κ_Q over a single Dirac term.

use super::chain::{Chain, DualOp};
use super::dipole::DipoleChain;
use super::simplicial::{Cell, CellKind, SimplicialChain};
use crate::algebra::{binom, Multivector, SymTensor};
use crate::error::{parse_err, Error, Result};
use crate::scalar::{Pt, Scalar};
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Rational,
    Float,
}

#[derive(Clone, Debug)]
pub struct Header {
    pub n: usize,
    pub k: usize,
    pub s: usize,
    pub mode: Mode,
}

pub fn parse_header(text: &str) -> Result<Header> {
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let rest = line.strip_prefix("chain").ok_or_else(|| parse_err(ln + 1, "expected `chain n=.. k=.. s=.. mode=..` header"))?;
        let (mut n, mut k, mut s, mut mode) = (None, None, 0usize, Mode::Rational);
        for kv in rest.split_whitespace() {
            let (key, val) = kv.split_once('=').ok_or_else(|| parse_err(ln + 1, format!("expected key=value, got `{}`", kv)))?;
            let bad = || parse_err(ln + 1, format!("bad value for {}", key));
            match key {
                "n" => n = Some(val.parse().map_err(|_| bad())?),
                "k" => k = Some(val.parse().map_err(|_| bad())?),
                "s" => s = val.parse().map_err(|_| bad())?,
                "mode" => {
                    mode = match val {
                        "rat" => Mode::Rational,
                        "f64" => Mode::Float,
                        _ => return Err(bad()),
                    }
                }
                _ => return Err(parse_err(ln + 1, format!("unknown header key `{}`", key))),
            }
        }
        let n: usize = n.ok_or_else(|| parse_err(ln + 1, "missing n"))?;
        let k: usize = k.ok_or_else(|| parse_err(ln + 1, "missing k"))?;
        if k > n || n == 0 || n > 32 {
            return Err(parse_err(ln + 1, "need 0 <= k <= n and 1 <= n <= 32"));
        }
        return Ok(Header { n, k, s, mode });
    }
    Err(parse_err(0, "empty chain file"))
}

struct Toks<'a> {
    it: std::iter::Peekable<std::str::SplitWhitespace<'a>>,
    ln: usize,
}

impl<'a> Toks<'a> {
    fn tag(&mut self, t: &str) -> Result<()> {
        match self.it.next() {
            Some(x) if x == t => Ok(()),
            other => Err(parse_err(self.ln, format!("expected `{}`, found `{}`", t, other.unwrap_or("end of line")))),
        }
    }
    fn vals<S: Scalar>(&mut self, m: usize) -> Result<Vec<S>> {
        (0..m)
            .map(|_| {
                let t = self.it.next().ok_or_else(|| parse_err(self.ln, "too few numbers"))?;
                S::parse_value(t).ok_or_else(|| parse_err(self.ln, format!("bad number `{}`", t)))
            })
            .collect()
    }
    fn usize(&mut self) -> Result<usize> {
        let t = self.it.next().ok_or_else(|| parse_err(self.ln, "missing count"))?;
        t.parse().map_err(|_| parse_err(self.ln, format!("bad count `{}`", t)))
    }
    fn done(&mut self) -> Result<()> {
        match self.it.next() {
            None => Ok(()),
            Some(t) => Err(parse_err(self.ln, format!("unexpected trailing token `{}`", t))),
        }
    }
}

fn term<S: Scalar>(t: &mut Toks, n: usize, k: usize) -> Result<(Vec<S>, SymTensor<S>, Multivector<S>)> {
    t.tag("P")?;
    let p = t.vals(n)?;
    t.tag("S")?;
    let s = t.usize()?;
    let ent: Vec<S> = t.vals(s * n)?;
    let sig = SymTensor::from_factors(n, ent.chunks(n).map(|c| c.to_vec()).collect());
    t.tag("A")?;
    let a = Multivector::from_lex(n, k, &t.vals(binom(n, k))?)?;
    Ok((p, sig, a))
}

/// Parses a chain file in the scalar type matching its mode.
pub fn parse_chain<S: Scalar>(text: &str) -> Result<Chain<S>> {
    let h = parse_header(text)?;
    let (n, k) = (h.n, h.k);
    let mut dirac = DipoleChain::zero(n, k);
    let mut simp = SimplicialChain::zero(n, k);
    let mut cones: BTreeMap<Pt<S>, DipoleChain<S>> = BTreeMap::new();
    let mut seen_header = false;
    for (ln, raw) in text.lines().enumerate() {
        let ln = ln + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        if !seen_header {
            seen_header = true;
            continue;
        }
        let mut t = Toks { it: line.split_whitespace().peekable(), ln };
        match t.it.next() {
            Some("T") => {
                let (p, sig, a) = term::<S>(&mut t, n, k)?;
                if sig.degree() > h.s {
                    return Err(parse_err(ln, format!("term of dipole order {} exceeds header s={}", sig.degree(), h.s)));
                }
                t.done()?;
                dirac.push(p, sig, a);
            }
            Some("C") => {
                let tag = t.it.next().ok_or_else(|| parse_err(ln, "missing cell kind"))?;
                let kind = CellKind::from_tag(tag).ok_or_else(|| parse_err(ln, format!("unknown cell kind `{}`", tag)))?;
                t.tag("W")?;
                let w = t.vals::<S>(1)?.remove(0);
                let nv = if kind == CellKind::Monopole { k } else { k + 1 };
                if nv == 0 {
                    return Err(parse_err(ln, "monopole cells need k >= 1"));
                }
                t.tag("V")?;
                let v: Vec<S> = t.vals(nv * n)?;
                let verts: Vec<Vec<S>> = v.chunks(n).map(|c| c.to_vec()).collect();
                let field = if kind == CellKind::Plain {
                    vec![]
                } else {
                    t.tag("X")?;
                    let x: Vec<S> = t.vals(nv * n)?;
                    x.chunks(n).map(|c| c.to_vec()).collect()
                };
                t.done()?;
                simp.push(Cell::with_field(kind, verts, field, w)).map_err(|e| parse_err(ln, e.to_string()))?;
            }
            Some("K") => {
                if k == 0 {
                    return Err(parse_err(ln, "cone terms need k >= 1"));
                }
                t.tag("Q")?;
                let q = t.vals::<S>(n)?;
                let (p, sig, a) = term::<S>(&mut t, n, k - 1)?;
                t.done()?;
                cones.entry(Pt(q)).or_insert_with(|| DipoleChain::zero(n, k - 1)).push(p, sig, a);
            }
            Some(x) => return Err(parse_err(ln, format!("unknown record `{}`", x))),
            None => {}
        }
    }
    let mut parts = Vec::new();
    if !dirac.is_zero() {
        parts.push(Chain::Dirac(dirac.clone()));
    }
    if !simp.cells.is_empty() {
        parts.push(Chain::Simplicial(simp.canonicalize()));
    }
    for (q, base) in cones {
        if !base.is_zero() {
            parts.push(Chain::Dual { n, k, op: DualOp::Homotopy(q.0), base: Box::new(Chain::Dirac(base)) });
        }
    }
    Ok(match parts.len() {
        0 => Chain::Dirac(dirac),
        1 => parts.pop().unwrap(),
        _ => Chain::Sum(parts),
    })
}

fn fmt_vals<S: Scalar>(out: &mut String, v: &[S]) {
    for x in v {
        out.push(' ');
        out.push_str(&x.fmt_value());
    }
}

fn write_term<S: Scalar>(out: &mut String, p: &[S], s: &SymTensor<S>, a: &Multivector<S>) {
    out.push_str(" P");
    fmt_vals(out, p);
    let _ = write!(out, " S {}", s.degree());
    for u in s.factors() {
        fmt_vals(out, u);
    }
    out.push_str(" A");
    fmt_vals(out, &a.to_lex());
}

fn collect<'c, S: Scalar>(c: &'c Chain<S>, scale: S, acc: &mut Vec<(S, &'c Chain<S>)>) -> Result<()> {
    match c {
        Chain::Sum(v) => v.iter().try_for_each(|x| collect(x, scale.clone(), acc)),
        Chain::Scaled(s, x) => collect(x, scale * s.clone(), acc),
        _ => {
            acc.push((scale, c));
            Ok(())
        }
    }
}

/// Serializes Dirac, simplicial and cone-over-Dirac parts; other lazy
/// chains have no file representation.
pub fn write_chain<S: Scalar>(c: &Chain<S>) -> Result<String> {
    let (n, k) = (c.n(), c.k());
    let mut parts = Vec::new();
    collect(c, S::one(), &mut parts)?;
    let mut dirac = DipoleChain::zero(n, k);
    let mut simp = SimplicialChain::zero(n, k);
    let mut cones: BTreeMap<Pt<S>, DipoleChain<S>> = BTreeMap::new();
    for (s, part) in parts {
        match part {
            Chain::Dirac(d) => dirac = dirac.add(&d.scale(&s))?,
            Chain::Simplicial(x) => simp = simp.add(&x.scale(&s))?,
            Chain::Dual { op: DualOp::Homotopy(q), base, .. } => match base.as_ref() {
                Chain::Dirac(d) => {
                    let e = cones.entry(Pt(q.clone())).or_insert_with(|| DipoleChain::zero(n, k - 1));
                    *e = e.add(&d.scale(&s))?;
                }
                _ => return Err(Error::Unsupported("only cones over Dirac chains can be written".into())),
            },
            _ => return Err(Error::Unsupported("lazy chain has no file representation".into())),
        }
    }
    let simp = simp.canonicalize();
    let order = dirac.order().max(cones.values().map(|d| d.order()).max().unwrap_or(0));
    let mode = if S::EXACT { "rat" } else { "f64" };
    let mut out = format!("chain n={} k={} s={} mode={}\n", n, k, order, mode);
    for (p, s, a) in dirac.terms() {
        out.push('T');
        write_term(&mut out, p, s, a);
        out.push('\n');
    }
    for cell in &simp.cells {
        let _ = write!(out, "C {} W {} V", cell.kind.tag(), cell.weight.fmt_value());
        for v in &cell.verts {
            fmt_vals(&mut out, v);
        }
        if cell.kind != CellKind::Plain {
            out.push_str(" X");
            for v in &cell.field {
                fmt_vals(&mut out, v);
            }
        }
        out.push('\n');
    }
    for (q, base) in &cones {
        for (p, s, a) in base.terms() {
            out.push_str("K Q");
            fmt_vals(&mut out, &q.0);
            write_term(&mut out, p, s, a);
            out.push('\n');
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Q;

    #[test]
    fn round_trip_rational() {
        let text = "chain n=2 k=1 s=1 mode=rat\n\
                    T P 0 1/2 S 1 1 0 A 0 1\n\
                    T P 1 1 S 0 A 2 -3/4\n\
                    C plain W 1 V 0 0 1 0\n\
                    C dipole W 2 V 0 0 0 1 X 1 0 1 0\n\
                    K Q 0 0 P 1 1 S 0 A 1\n";
        let c: Chain<Q> = parse_chain(text).unwrap();
        let w = write_chain(&c).unwrap();
        let c2: Chain<Q> = parse_chain(&w).unwrap();
        assert_eq!(write_chain(&c2).unwrap(), w);
    }

    #[test]
    fn round_trip_float_bits() {
        let text = format!("chain n=1 k=0 s=0 mode=f64\nT P {:?} S 0 A {:?}\n", 0.1f64, 1.0f64 / 3.0);
        let c: Chain<f64> = parse_chain(&text).unwrap();
        let w = write_chain(&c).unwrap();
        assert_eq!(w, text);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_chain::<Q>("chain n=2 k=1 s=0 mode=rat\nT P 0 0 S 0 A 1\n").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{}", e);
        assert!(parse_chain::<Q>("chian n=2").is_err());
        assert!(parse_chain::<Q>("chain n=2 k=1 s=0 mode=rat\nT P 0 0 S 1 1 0 A 1 0\n").is_err());
    }
}
