use super::{gen, Check, Config};
use crate::chains::{Chain, DipoleChain};
use crate::error::Result;
use crate::norms::{br_bracket, NormOptions};
use crate::operators::{boundary_dirac, cartesian_wedge, extrude_dirac, prederivative_dirac, retract_dirac, VectorField};
use crate::scalar::Scalar;
use rand::Rng;

const SUITE: &str = "bounds";
const SLACK: f64 = 1e-9;

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

struct Harness {
    opts: NormOptions,
    brackets: Check,
}

impl Harness {
    fn bracket(&mut self, a: &DipoleChain<f64>, r: u32) -> Result<(f64, f64)> {
        let b = br_bracket(a, r, &self.opts)?;
        self.brackets.record(if b.ub > 0.0 { b.lb / b.ub } else { 0.0 }, b.lb <= b.ub * (1.0 + SLACK) + 1e-12, || {
            format!("lb {} > ub {} at r={} (n={} k={})", b.lb, b.ub, r, a.n, a.k)
        });
        Ok((b.lb, b.ub))
    }

    /// lb‖lhs‖_{B^r} ≤ factor · ub(rhs).
    fn check(&mut self, c: &mut Check, lhs: Result<DipoleChain<f64>>, r: u32, factor: f64, rhs_ub: f64) {
        let lb = match lhs.and_then(|l| self.bracket(&l, r)) {
            Ok((lb, _)) => lb,
            Err(e) => {
                c.record(f64::INFINITY, false, || e.to_string());
                return;
            }
        };
        let bound = factor * rhs_ub;
        let ratio = if bound > 0.0 { lb / bound } else if lb > 1e-12 { f64::INFINITY } else { 0.0 };
        c.record(ratio, lb <= bound * (1.0 + SLACK) + 1e-12, || format!("lb {} > bound {}", lb, bound));
    }
}

pub fn bound_suite(cfg: &Config) -> Vec<Check> {
    let mut rng = cfg.rng(3);
    let mut h = Harness { opts: NormOptions::default(), brackets: Check::new(SUITE, "every bracket has lb <= ub", SLACK) };
    let mut d = Check::new(SUITE, "boundary: lb|dA|_B2 <= kn ub|A|_B1", SLACK);
    let mut e = Check::new(SUITE, "extrusion: lb|E_v A|_B1 <= n^2 |v| ub|A|_B1", SLACK);
    let mut ed = Check::new(SUITE, "retraction: lb|E+_v A|_B1 <= k C(n,k) |v| ub|A|_B1", SLACK);
    let mut p = Check::new(SUITE, "prederivative: lb|P_v A|_B2 <= 2kn^3 2 |v| ub|A|_B1", SLACK);
    let mut pv = Check::new(SUITE, "constant prederivative: lb|P_v A|_B2 <= |v| ub|A|_B1", SLACK);
    let mut gg = Check::new(SUITE, "Cartesian wedge: lb|J x K|_B2 <= ub|J|_B1 ub|K|_B1", SLACK);
    for i in 0..cfg.trials {
        let n = 2 + i % 2;
        let k = rng.gen_range(0..=n);
        let terms = rng.gen_range(1..=3);
        let a = gen::dirac(&mut rng, n, k, terms, 0).to_f64();
        let v = gen::const_field(&mut rng, n);
        let vv: Vec<f64> = v.constant().expect("constant field").iter().map(|x| x.to_f64()).collect();
        let vn = vv.iter().map(|x| x * x).sum::<f64>().sqrt();
        let vf = VectorField::Constant(vv);
        let ub = match h.bracket(&a, 1) {
            Ok((_, ub)) => ub,
            Err(err) => {
                d.record(f64::INFINITY, false, || err.to_string());
                continue;
            }
        };
        let (kf, nf) = (k as f64, n as f64);
        if k > 0 {
            h.check(&mut d, Ok(boundary_dirac(&a)), 2, kf * nf, ub);
            h.check(&mut ed, retract_dirac(&vf, &a), 1, kf * binom(n, k) * vn, ub);
            h.check(&mut p, prederivative_dirac(&vf, &a), 2, 2.0 * kf * nf.powi(3) * 2.0 * vn, ub);
        }
        if k < n {
            h.check(&mut e, extrude_dirac(&vf, &a), 1, nf * nf * vn, ub);
        }
        h.check(&mut pv, prederivative_dirac(&vf, &a), 2, vn, ub);
        let (kj, kk) = (rng.gen_range(0..=1), rng.gen_range(0..n));
        let (tj, tk) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
        let j = gen::dirac(&mut rng, 1, kj, tj, 0).to_f64();
        let kc = gen::dirac(&mut rng, n - 1, kk, tk, 0).to_f64();
        let (uj, uk) = match (h.bracket(&j, 1), h.bracket(&kc, 1)) {
            (Ok(x), Ok(y)) => (x.1, y.1),
            _ => continue,
        };
        let jk = cartesian_wedge(&Chain::Dirac(j), &Chain::Dirac(kc)).map(|c| c.as_dirac().unwrap().clone());
        h.check(&mut gg, jk, 2, uj, uk);
    }
    vec![h.brackets, d, e, ed, p, pv, gg]
}
