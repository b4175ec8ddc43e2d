use super::polytope::{default_facets, DualBall};
use super::{lex_coords, NormOptions};
use crate::algebra::{binom, lex_blades, indices};
use crate::chains::DipoleChain;
use crate::error::Result;
use crate::forms::{Expr, Form};
use crate::lp::{maximize, LpSolution};
use std::fmt::Write as _;

#[derive(Clone, Debug)]
pub enum LowerCert {
    Zero,
    Masses { value: f64 },
    /// Form values ω(pᵢ) (lex coordinates, already divided by the ball
    /// radius) with ‖ω(pᵢ)‖ ≤ 1 and ‖ω(pᵢ) − ω(pⱼ)‖ ≤ |pᵢ − pⱼ|.
    Lp { points: Vec<Vec<f64>>, values: Vec<Vec<f64>>, radius: f64, value: f64 },
    /// ω = g(x) Σ c_I dx_I with g from a fixed family and ‖ω‖_{B^r} ≤ norm_ub.
    TestForm { kind: TestKind, xi: Vec<f64>, phase: f64, center: Vec<f64>, coeffs: Vec<f64>, norm_ub: f64, value: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TestKind {
    Constant,
    Sine,
}

impl LowerCert {
    pub fn value(&self) -> f64 {
        match self {
            LowerCert::Zero => 0.0,
            LowerCert::Masses { value } | LowerCert::Lp { value, .. } | LowerCert::TestForm { value, .. } => *value,
        }
    }

    /// The test form itself, for independent re-evaluation.
    pub fn form(&self, n: usize, k: usize) -> Option<Form> {
        let LowerCert::TestForm { kind, xi, phase, center, coeffs, .. } = self else {
            return None;
        };
        let arg = xi.iter().zip(center).enumerate().fold(Expr::from_scalar(phase), |acc, (j, (x, c))| {
            acc.add(&Expr::from_scalar(x).mul(&Expr::var(j).sub(&Expr::from_scalar(c))))
        });
        let g = match kind {
            TestKind::Constant => Expr::one(),
            TestKind::Sine => arg.sin(),
        };
        let mut w = Form::zero(n, k);
        for (b, c) in lex_blades(n, k).into_iter().zip(coeffs) {
            w = w.add(&Form::term(n, &indices(b), g.mul(&Expr::from_scalar(c))));
        }
        Some(w)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        match self {
            LowerCert::Zero => s.push_str("lower zero\n"),
            LowerCert::Masses { value } => {
                let _ = writeln!(s, "lower masses {:?}", value);
            }
            LowerCert::Lp { points, values, radius, value } => {
                let _ = writeln!(s, "lower lp value={:?} radius={:?}", value, radius);
                for (p, v) in points.iter().zip(values) {
                    let _ = writeln!(s, "W P {} V {}", join(p), join(v));
                }
            }
            LowerCert::TestForm { kind, xi, phase, center, coeffs, norm_ub, value } => {
                let _ = writeln!(s, "lower testform {:?} value={:?} norm_ub={:?}", kind, value, norm_ub);
                let _ = writeln!(s, "G xi {} phase {:?} center {} coeffs {}", join(xi), phase, join(center), join(coeffs));
            }
        }
        s
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{:?}", x)).collect::<Vec<_>>().join(" ")
}

#[derive(Clone, Copy, Debug)]
pub(crate) enum RowKind {
    Bound { i: usize, d: usize, sign: f64 },
    Pair { i: usize, j: usize, d: usize, sign: f64 },
}

pub(crate) struct LpRun {
    pub sol: LpSolution,
    pub rows: Vec<RowKind>,
    pub ball: DualBall,
}

/// max Σ⟨ω_i, α_i⟩ over |⟨ω_i, ξ⟩| ≤ 1 and |⟨ω_i − ω_j, ξ⟩| ≤ |p_i − p_j|.
pub(crate) fn run_lp(points: &[Vec<f64>], alphas: &[Vec<f64>], ball: DualBall) -> Result<LpRun> {
    let m = points.len();
    let nd = ball.dim;
    let nv = 2 * m * nd;
    let var = |i: usize, c: usize, neg: bool| 2 * (i * nd + c) + neg as usize;
    let mut c = vec![0.0; nv];
    for i in 0..m {
        for cc in 0..nd {
            c[var(i, cc, false)] = alphas[i][cc];
            c[var(i, cc, true)] = -alphas[i][cc];
        }
    }
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut rows = Vec::new();
    for i in 0..m {
        for (d, xi) in ball.normals.iter().enumerate() {
            for sign in [1.0, -1.0] {
                let mut row = vec![0.0; nv];
                for cc in 0..nd {
                    row[var(i, cc, false)] = sign * xi[cc];
                    row[var(i, cc, true)] = -sign * xi[cc];
                }
                a.push(row);
                b.push(1.0);
                rows.push(RowKind::Bound { i, d, sign });
            }
        }
    }
    for i in 0..m {
        for j in i + 1..m {
            let dist = points[i].iter().zip(&points[j]).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
            for (d, xi) in ball.normals.iter().enumerate() {
                for sign in [1.0, -1.0] {
                    let mut row = vec![0.0; nv];
                    for cc in 0..nd {
                        row[var(i, cc, false)] = sign * xi[cc];
                        row[var(i, cc, true)] = -sign * xi[cc];
                        row[var(j, cc, false)] = -sign * xi[cc];
                        row[var(j, cc, true)] = sign * xi[cc];
                    }
                    a.push(row);
                    b.push(dist);
                    rows.push(RowKind::Pair { i, j, d, sign });
                }
            }
        }
    }
    let sol = maximize(&c, &a, &b)?;
    Ok(LpRun { sol, rows, ball })
}

/// LP lower bound for order-zero chains with r = 1.
pub fn lp_lower(a: &DipoleChain<f64>, opts: &NormOptions) -> Result<LowerCert> {
    let (n, k) = (a.n, a.k);
    let points: Vec<Vec<f64>> = a.terms().map(|(p, _, _)| p.to_vec()).collect();
    let alphas: Vec<Vec<f64>> = a.terms().map(|(_, _, al)| lex_coords(al)).collect();
    let nd = binom(n, k);
    let ball = DualBall::new(nd, opts.facets.unwrap_or_else(|| default_facets(n, k)));
    let run = run_lp(&points, &alphas, ball)?;
    let radius = run.ball.radius;
    let values: Vec<Vec<f64>> = (0..points.len())
        .map(|i| (0..nd).map(|c| (run.sol.x[2 * (i * nd + c)] - run.sol.x[2 * (i * nd + c) + 1]) / radius).collect())
        .collect();
    // recompute the objective from the certified values
    let value: f64 = values.iter().zip(&alphas).map(|(w, al)| w.iter().zip(al).map(|(x, y)| x * y).sum::<f64>()).sum();
    Ok(LowerCert::Lp { points, values, radius, value: value.max(0.0) })
}

/// Best test form g(x) c with g constant or a plane sine wave; both have
/// globally bounded derivatives.
pub fn test_form_lower(a: &DipoleChain<f64>, r: u32) -> LowerCert {
    let (n, k) = (a.n, a.k);
    let nd = binom(n, k);
    let pts: Vec<&[f64]> = a.terms().map(|(p, _, _)| p).collect();
    let lo: Vec<f64> = (0..n).map(|j| pts.iter().map(|p| p[j]).fold(f64::INFINITY, f64::min)).collect();
    let hi: Vec<f64> = (0..n).map(|j| pts.iter().map(|p| p[j]).fold(f64::NEG_INFINITY, f64::max)).collect();
    let center: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let halfdiag = lo.iter().zip(&hi).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt() * 0.5;
    let width = (2.0 * halfdiag).max(1e-9);
    let dirs = directions(n);
    let mut best = LowerCert::Zero;
    let mut consider = |kind: TestKind, xi: Vec<f64>, phase: f64, norm_ub: f64| {
        let mut v = vec![0.0; nd];
        for (p, s, al) in a.terms() {
            let g = derivative_value(kind, &xi, phase, &center, p, s.factors());
            if g != 0.0 {
                for (vc, ac) in v.iter_mut().zip(lex_coords(al)) {
                    *vc += g * ac;
                }
            }
        }
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len == 0.0 || !len.is_finite() {
            return;
        }
        let value = len / norm_ub;
        if value > best.value() {
            let coeffs = v.iter().map(|x| x / len).collect();
            best = LowerCert::TestForm { kind, xi, phase, center: center.clone(), coeffs, norm_ub, value };
        }
    };
    consider(TestKind::Constant, vec![0.0; n], 0.0, 1.0);
    for d in &dirs {
        for m in -3..=5 {
            let t = 2f64.powi(m) / width;
            let xi: Vec<f64> = d.iter().map(|x| x * t).collect();
            let norm_ub = (0..=r).map(|j| t.powi(j as i32)).fold(1.0, f64::max);
            for phase in [0.0, std::f64::consts::FRAC_PI_2] {
                consider(TestKind::Sine, xi.clone(), phase, norm_ub);
            }
        }
    }
    best
}

/// D_{u₁}⋯D_{u_s} g at p.
fn derivative_value(kind: TestKind, xi: &[f64], phase: f64, center: &[f64], p: &[f64], us: &[Vec<f64>]) -> f64 {
    let dot = |u: &[f64]| u.iter().zip(xi).map(|(a, b)| a * b).sum::<f64>();
    let s = us.len();
    match kind {
        TestKind::Constant => (s == 0) as u8 as f64,
        TestKind::Sine => {
            let arg = dot(&p.iter().zip(center).map(|(a, c)| a - c).collect::<Vec<_>>()) + phase;
            let f: f64 = us.iter().map(|u| dot(u)).product();
            f * (arg + s as f64 * std::f64::consts::FRAC_PI_2).sin()
        }
    }
}

/// Unit vectors of {−1,0,1}ⁿ up to sign (axes only beyond n = 4).
fn directions(n: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    if n > 4 {
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            out.push(e);
        }
        return out;
    }
    let total = 3usize.pow(n as u32);
    for code in 1..total {
        let v: Vec<f64> = (0..n).map(|i| (code / 3usize.pow(i as u32) % 3) as f64 - 1.0).collect();
        if v.iter().find(|x| **x != 0.0).is_some_and(|x| *x > 0.0) {
            let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            out.push(v.iter().map(|x| x / len).collect());
        }
    }
    out
}
