use super::lower::{run_lp, RowKind};
use super::polytope::{default_facets, DualBall};
use super::{expand_dipoles, lex_coords, NormOptions};
use crate::algebra::{binom, mass, Multivector, SymTensor};
use crate::chains::DipoleChain;
use crate::error::Result;
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Clone, Debug)]
pub enum Piece {
    /// (p; α), cost mass(α).
    Mass { p: Vec<f64>, a: Multivector<f64> },
    /// (p + u; α) − (p; α), cost |u|·mass(α).
    Diff { p: Vec<f64>, u: Vec<f64>, a: Multivector<f64> },
    /// (p; σ ⊗ α) with deg σ ≤ r, cost ‖σ‖·mass(α).
    Dipole { p: Vec<f64>, sigma: SymTensor<f64>, a: Multivector<f64> },
    /// (p + v; σ ⊗ α) − (p; σ ⊗ α), cost |v|·‖σ‖·mass(α); needs r > deg σ.
    Shifted { p: Vec<f64>, v: Vec<f64>, sigma: SymTensor<f64>, a: Multivector<f64> },
}

impl Piece {
    pub fn cost(&self) -> f64 {
        match self {
            Piece::Mass { a, .. } => mass(a).ub,
            Piece::Diff { u, a, .. } => norm(u) * mass(a).ub,
            Piece::Dipole { sigma, a, .. } => sigma.norm() * mass(a).ub,
            Piece::Shifted { v, sigma, a, .. } => norm(v) * sigma.norm() * mass(a).ub,
        }
    }

    /// Smallest r for which the cost bounds the piece's B^r norm.
    pub fn min_r(&self) -> u32 {
        match self {
            Piece::Mass { .. } => 0,
            Piece::Diff { .. } => 1,
            Piece::Dipole { sigma, .. } => sigma.degree() as u32,
            Piece::Shifted { sigma, .. } => sigma.degree() as u32 + 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub n: usize,
    pub k: usize,
    pub pieces: Vec<Piece>,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{:?}", x)).collect::<Vec<_>>().join(" ")
}

impl Decomposition {
    pub fn empty(n: usize, k: usize) -> Self {
        Decomposition { n, k, pieces: Vec::new() }
    }

    /// Every order-zero term as its own mass; higher terms as dipoles.
    pub fn masses(a: &DipoleChain<f64>) -> Self {
        let pieces = a
            .terms()
            .map(|(p, s, al)| {
                if s.degree() == 0 {
                    Piece::Mass { p: p.to_vec(), a: al.clone() }
                } else {
                    Piece::Dipole { p: p.to_vec(), sigma: s.clone(), a: al.clone() }
                }
            })
            .collect();
        Decomposition { n: a.n, k: a.k, pieces }
    }

    pub fn cost(&self) -> f64 {
        self.pieces.iter().map(Piece::cost).sum()
    }

    /// Smallest r at which `cost` is a valid B^r upper bound.
    pub fn min_r(&self) -> u32 {
        self.pieces.iter().map(Piece::min_r).max().unwrap_or(0)
    }

    /// The chain the pieces add up to.
    pub fn reconstruct(&self) -> DipoleChain<f64> {
        let mut out = DipoleChain::zero(self.n, self.k);
        let one = SymTensor::one(self.n);
        for piece in &self.pieces {
            match piece {
                Piece::Mass { p, a } => out.push(p.clone(), one.clone(), a.clone()),
                Piece::Diff { p, u, a } => {
                    let q: Vec<f64> = p.iter().zip(u).map(|(x, y)| x + y).collect();
                    out.push(q, one.clone(), a.clone());
                    out.push(p.clone(), one.clone(), a.scale(&-1.0));
                }
                Piece::Dipole { p, sigma, a } => out.push(p.clone(), sigma.clone(), a.clone()),
                Piece::Shifted { p, v, sigma, a } => {
                    let q: Vec<f64> = p.iter().zip(v).map(|(x, y)| x + y).collect();
                    out.push(q, sigma.clone(), a.clone());
                    out.push(p.clone(), sigma.clone(), a.scale(&-1.0));
                }
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("upper n={} k={} cost={:?}\n", self.n, self.k, self.cost());
        for piece in &self.pieces {
            let _ = match piece {
                Piece::Mass { p, a } => writeln!(s, "M P {} A {}", join(p), join(&a.to_lex())),
                Piece::Diff { p, u, a } => writeln!(s, "D P {} U {} A {}", join(p), join(u), join(&a.to_lex())),
                Piece::Dipole { p, sigma, a } => {
                    let us: Vec<String> = sigma.factors().iter().map(|u| join(u)).collect();
                    writeln!(s, "S P {} U {} A {}", join(p), us.join(" | "), join(&a.to_lex()))
                }
                Piece::Shifted { p, v, sigma, a } => {
                    let us: Vec<String> = sigma.factors().iter().map(|u| join(u)).collect();
                    writeln!(s, "T P {} V {} U {} A {}", join(p), join(v), us.join(" | "), join(&a.to_lex()))
                }
            };
        }
        s
    }

    fn extend(&mut self, o: Decomposition) {
        self.pieces.extend(o.pieces);
    }
}

/// A decomposition of A certifying an upper bound of ‖A‖_{B^r}, r ≥ 1.
/// The flag reports whether terms of order above r were replaced by
/// finite differences.
pub fn decompose(a: &DipoleChain<f64>, r: u32, opts: &NormOptions) -> Result<(Decomposition, bool)> {
    let (n, k) = (a.n, a.k);
    let mut low = DipoleChain::zero(n, k);
    let mut high = DipoleChain::zero(n, k);
    let mut direct = Decomposition::empty(n, k);
    for (p, s, al) in a.terms() {
        let deg = s.degree();
        if deg == 0 {
            low.push(p.to_vec(), s.clone(), al.clone());
        } else if deg as u32 <= r {
            direct.pieces.push(Piece::Dipole { p: p.to_vec(), sigma: s.clone(), a: al.clone() });
        } else {
            high.push(p.to_vec(), s.clone(), al.clone());
        }
    }
    let expanded = !high.is_zero();
    if expanded {
        let (ex, _) = expand_dipoles(&high, opts.h, 0);
        for (p, s, al) in ex.terms() {
            low.push(p.to_vec(), s.clone(), al.clone());
        }
    }
    if !low.is_zero() {
        direct.extend(transport(&low, opts)?);
    }
    Ok((direct, expanded))
}

/// Best of: all masses, the LP dual over the full polytope, and scalar
/// transport along each common direction of α.
fn transport(a: &DipoleChain<f64>, opts: &NormOptions) -> Result<Decomposition> {
    let (n, k) = (a.n, a.k);
    let mut best = Decomposition::masses(a);
    if a.len() < 2 {
        return Ok(best);
    }
    let nd = binom(n, k);
    let ball = DualBall::new(nd, opts.facets.unwrap_or_else(|| default_facets(n, k)));
    let full = lp_dual(a, ball)?;
    if full.cost() < best.cost() {
        best = full;
    }
    if nd > 1 {
        let grouped = grouped_transport(a)?;
        if grouped.cost() < best.cost() {
            best = grouped;
        }
    }
    Ok(best)
}

fn lp_dual(a: &DipoleChain<f64>, ball: DualBall) -> Result<Decomposition> {
    let (n, k) = (a.n, a.k);
    let points: Vec<Vec<f64>> = a.terms().map(|(p, _, _)| p.to_vec()).collect();
    let alphas: Vec<Vec<f64>> = a.terms().map(|(_, _, al)| lex_coords(al)).collect();
    let run = run_lp(&points, &alphas, ball)?;
    let nd = run.ball.dim;
    let mut mass_at: Vec<Vec<f64>> = vec![vec![0.0; nd]; points.len()];
    let mut flows: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
    for (row, y) in run.rows.iter().zip(&run.sol.y) {
        if *y <= 0.0 {
            continue;
        }
        match *row {
            RowKind::Bound { i, d, sign } => {
                for (m, xi) in mass_at[i].iter_mut().zip(&run.ball.normals[d]) {
                    *m += sign * y * xi;
                }
            }
            RowKind::Pair { i, j, d, sign } => {
                let f = flows.entry((i, j)).or_insert_with(|| vec![0.0; nd]);
                for (m, xi) in f.iter_mut().zip(&run.ball.normals[d]) {
                    *m += sign * y * xi;
                }
            }
        }
    }
    let mut out = Decomposition::empty(n, k);
    for (i, m) in mass_at.into_iter().enumerate() {
        if m.iter().any(|x| *x != 0.0) {
            out.pieces.push(Piece::Mass { p: points[i].clone(), a: Multivector::from_lex(n, k, &m)? });
        }
    }
    for ((i, j), f) in flows {
        if f.iter().all(|x| *x == 0.0) {
            continue;
        }
        // β at p_i and −β at p_j is Δ_{p_j − p_i}(p_i; −β)
        let u: Vec<f64> = points[j].iter().zip(&points[i]).map(|(x, y)| x - y).collect();
        let neg: Vec<f64> = f.iter().map(|x| -x).collect();
        out.pieces.push(Piece::Diff { p: points[i].clone(), u, a: Multivector::from_lex(n, k, &neg)? });
    }
    patch_residual(a, &mut out)?;
    Ok(out)
}

/// Adds masses for whatever the pieces miss, so the decomposition is exact.
fn patch_residual(a: &DipoleChain<f64>, d: &mut Decomposition) -> Result<()> {
    let res = a.sub(&d.reconstruct())?;
    for (p, _, al) in res.terms() {
        if !al.is_zero() {
            d.pieces.push(Piece::Mass { p: p.to_vec(), a: al.clone() });
        }
    }
    Ok(())
}

/// Groups terms by the direction of α and solves a scalar transport per group.
fn grouped_transport(a: &DipoleChain<f64>) -> Result<Decomposition> {
    let (n, k) = (a.n, a.k);
    let mut groups: BTreeMap<Vec<i64>, (Vec<f64>, DipoleChain<f64>)> = BTreeMap::new();
    for (p, _, al) in a.terms() {
        let c = lex_coords(al);
        let len = norm(&c);
        if len == 0.0 {
            continue;
        }
        let lead = c.iter().find(|x| x.abs() > 1e-12 * len).copied().unwrap_or(1.0).signum();
        let dir: Vec<f64> = c.iter().map(|x| lead * x / len).collect();
        let key: Vec<i64> = dir.iter().map(|x| (x * 1e9).round() as i64).collect();
        let entry = groups.entry(key).or_insert_with(|| (dir.clone(), DipoleChain::zero(n, 0)));
        entry.1.push(p.to_vec(), SymTensor::one(n), Multivector::scalar(n, lead * len));
    }
    let mut out = Decomposition::empty(n, k);
    for (dir, scalars) in groups.into_values() {
        let unit = Multivector::from_lex(n, k, &dir)?;
        let scalar = if scalars.len() < 2 {
            Decomposition::masses(&scalars)
        } else {
            lp_dual(&scalars, DualBall::new(1, 2))?
        };
        for piece in scalar.pieces {
            out.pieces.push(match piece {
                Piece::Mass { p, a } => Piece::Mass { p, a: unit.scale(&a.get(0)) },
                Piece::Diff { p, u, a } => Piece::Diff { p, u, a: unit.scale(&a.get(0)) },
                other => other,
            });
        }
    }
    patch_residual(a, &mut out)?;
    Ok(out)
}
