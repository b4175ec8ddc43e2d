use super::*;
use crate::algebra::Multivector;
use crate::chains::Chain;
use crate::forms::{integrate, Quadrature};
use crate::verify::gen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dirac(n: usize, k: usize, terms: &[(Vec<f64>, Vec<f64>)]) -> DipoleChain<f64> {
    let mut a = DipoleChain::zero(n, k);
    for (p, c) in terms {
        a.push(p.clone(), SymTensor::one(n), Multivector::from_lex(n, k, c).unwrap());
    }
    a
}

fn residual(a: &DipoleChain<f64>, d: &Decomposition) -> f64 {
    a.sub(&d.reconstruct()).unwrap().terms().map(|(_, s, al)| (1.0 + s.norm()) * al.norm()).sum()
}

#[test]
fn single_term_is_its_mass() {
    let a = dirac(3, 2, &[(vec![0.5, 1.0, -2.0], vec![3.0, 0.0, 4.0])]);
    for r in 0..=3 {
        let b = br_bracket(&a, r, &NormOptions::default()).unwrap();
        assert!((b.ub - 5.0).abs() < 1e-12, "r={} ub={}", r, b.ub);
        assert!((b.lb - 5.0).abs() < 1e-9, "r={} lb={}", r, b.lb);
    }
}

#[test]
fn two_points_cost_min_of_two_and_distance() {
    for d in [0.25, 1.0, 1.5, 2.0, 3.0, 10.0] {
        let a = dirac(2, 0, &[(vec![0.0, 0.0], vec![1.0]), (vec![d * 0.6, d * 0.8], vec![-1.0])]);
        let b = br_bracket(&a, 1, &NormOptions::default()).unwrap();
        let want = f64::min(2.0, d);
        assert!((b.lb - want).abs() < 1e-9 && (b.ub - want).abs() < 1e-9, "d={} got [{}, {}]", d, b.lb, b.ub);
    }
}

#[test]
fn empty_chain_is_zero() {
    let b = br_bracket(&DipoleChain::<f64>::zero(3, 1), 2, &NormOptions::default()).unwrap();
    assert_eq!((b.lb, b.ub), (0.0, 0.0));
}

/// Exact B¹ norm of a 0-chain on the line: the cheapest split into masses
/// mᵢ and flows F_g over the gaps, found by enumerating vertices of the
/// piecewise-linear cost.
fn line_oracle(pts: &[(f64, f64)]) -> f64 {
    let mut pts = pts.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let m = pts.len();
    let gaps: Vec<f64> = pts.windows(2).map(|w| w[1].0 - w[0].0).collect();
    // unknowns m_0..m_{m-1}; F_g = Σ_{i≤g}(a_i − m_i); Σ_i (a_i − m_i) = 0
    let cum_a: Vec<f64> = pts.iter().scan(0.0, |s, p| {
        *s += p.1;
        Some(*s)
    }).collect();
    let conds = 2 * m - 1;
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << conds) {
        if mask.count_ones() as usize != m - 1 {
            continue;
        }
        let mut rows: Vec<(Vec<f64>, f64)> = vec![(vec![1.0; m], cum_a[m - 1])];
        for c in 0..conds {
            if mask >> c & 1 == 0 {
                continue;
            }
            if c < m {
                let mut r = vec![0.0; m];
                r[c] = 1.0;
                rows.push((r, 0.0));
            } else {
                let g = c - m;
                let r: Vec<f64> = (0..m).map(|i| if i <= g { 1.0 } else { 0.0 }).collect();
                rows.push((r, cum_a[g]));
            }
        }
        let Some(x) = solve(rows) else { continue };
        let mut cost: f64 = x.iter().map(|v| v.abs()).sum();
        let mut flow = 0.0;
        for g in 0..m - 1 {
            flow += pts[g].1 - x[g];
            cost += flow.abs() * gaps[g];
        }
        best = best.min(cost);
    }
    best
}

fn solve(mut rows: Vec<(Vec<f64>, f64)>) -> Option<Vec<f64>> {
    let m = rows.len();
    for col in 0..m {
        let piv = (col..m).max_by(|a, b| rows[*a].0[col].abs().total_cmp(&rows[*b].0[col].abs()))?;
        if rows[piv].0[col].abs() < 1e-12 {
            return None;
        }
        rows.swap(col, piv);
        let (pr, pb) = rows[col].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != col {
                let f = row.0[col] / pr[col];
                for j in 0..m {
                    row.0[j] -= f * pr[j];
                }
                row.1 -= f * pb;
            }
        }
    }
    Some(rows.iter().enumerate().map(|(i, r)| r.1 / r.0[i]).collect())
}

#[test]
fn line_chains_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let m = rng.gen_range(2..=4);
        let mut pts: Vec<(f64, f64)> = Vec::new();
        while pts.len() < m {
            let x = rng.gen_range(-16i32..=16) as f64 / 8.0;
            if pts.iter().all(|p| p.0 != x) {
                pts.push((x, rng.gen_range(-8i32..=8) as f64 / 4.0));
            }
        }
        let a = dirac(1, 0, &pts.iter().map(|(x, c)| (vec![*x], vec![*c])).collect::<Vec<_>>());
        let want = line_oracle(&pts);
        let b = br_bracket(&a, 1, &NormOptions::default()).unwrap();
        assert!((b.lb - want).abs() < 1e-9 && (b.ub - want).abs() < 1e-9, "{:?}: [{}, {}] vs {}", pts, b.lb, b.ub, want);
    }
}

#[test]
fn brackets_are_consistent_on_random_chains() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let opts = NormOptions::default();
    for t in 0..30 {
        let n = rng.gen_range(1..=3);
        let k = rng.gen_range(0..=n);
        let order = t % 2;
        let terms = rng.gen_range(1..=3);
        let a = gen::dirac(&mut rng, n, k, terms, order).to_f64();
        let b = gen::dirac(&mut rng, n, k, 2, 0).to_f64();
        let mut prev_ub = f64::INFINITY;
        for r in 1..=3 {
            let x = br_bracket(&a, r, &opts).unwrap();
            assert!(x.lb <= x.ub * (1.0 + 1e-9) + 1e-12, "lb {} > ub {} (n={} k={} r={})", x.lb, x.ub, n, k, r);
            assert!(residual(&a, &x.upper) < 1e-9, "decomposition does not add up");
            // norms decrease with r
            assert!(x.lb <= prev_ub * (1.0 + 1e-9) + 1e-12);
            prev_ub = x.ub;
            let two = br_bracket(&a.scale(&2.0), r, &opts).unwrap();
            assert!((two.lb - 2.0 * x.lb).abs() <= 1e-9 * (1.0 + x.lb));
            let xb = br_bracket(&b, r, &opts).unwrap();
            let sum = br_bracket(&a.add(&b).unwrap(), r, &opts).unwrap();
            assert!(sum.lb <= (x.ub + xb.ub) * (1.0 + 1e-9) + 1e-12);
        }
    }
}

#[test]
fn test_form_certificate_reevaluates() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..10 {
        let n = rng.gen_range(1..=3);
        let k = rng.gen_range(0..=n);
        let a = gen::dirac(&mut rng, n, k, 3, 1);
        let af = a.to_f64();
        let r = rng.gen_range(1..=3);
        let cert = test_form_lower(&af, r);
        let LowerCert::TestForm { norm_ub, value, .. } = &cert else { continue };
        let w = cert.form(n, k).unwrap();
        let paired = integrate(&Chain::Dirac(af.clone()), &w, &Quadrature::default()).unwrap();
        assert!((paired - value * norm_ub).abs() < 1e-6 * (1.0 + paired.abs()), "{} vs {}", paired, value * norm_ub);
        // sampled values and difference quotients stay below the claimed norm
        for _ in 0..20 {
            let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            assert!(w.at(&p).norm() <= norm_ub * (1.0 + 1e-9));
            if r >= 1 {
                let h = 1e-5;
                let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let len = u.iter().map(|x| x * x).sum::<f64>().sqrt();
                let q: Vec<f64> = p.iter().zip(&u).map(|(x, y)| x + h * y).collect();
                let dq = w.at(&q).sub(&w.at(&p)).norm() / (h * len);
                assert!(dq <= norm_ub * (1.0 + 1e-3));
            }
        }
    }
}

#[test]
fn lp_certificate_is_feasible() {
    let a = dirac(3, 1, &[(vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0]), (vec![0.5, 0.0, 0.0], vec![0.0, -1.0, 0.0]), (vec![0.0, 0.3, 0.0], vec![-1.0, 1.0, 0.0])]);
    let LowerCert::Lp { points, values, value, .. } = lp_lower(&a, &NormOptions::default()).unwrap() else { panic!() };
    let e = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for i in 0..points.len() {
        assert!(e(&values[i]) <= 1.0 + 1e-9);
        for j in 0..points.len() {
            let dw: Vec<f64> = values[i].iter().zip(&values[j]).map(|(x, y)| x - y).collect();
            let dp: Vec<f64> = points[i].iter().zip(&points[j]).map(|(x, y)| x - y).collect();
            assert!(e(&dw) <= e(&dp) + 1e-9);
        }
    }
    let b = br_bracket(&a, 1, &NormOptions::default()).unwrap();
    assert!(value > 0.0 && b.lb <= b.ub);
    assert!(b.certificate().contains("upper"));
}
