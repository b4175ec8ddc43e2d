use super::{gen, Check, Config, Fault};
use crate::algebra::Multivector;
use crate::chains::{Chain, DipoleChain};
use crate::error::Result;
use crate::forms::{integrate, Expr, Form, Quadrature};
use crate::operators::{boundary, cartesian_wedge, cone, extrude, prederivative, retract, VectorField};
use crate::scalar::{q, Scalar, Q};
use rand::Rng;

const SUITE: &str = "identities";

fn pair(j: &Chain<Q>, w: &Form) -> Result<Q> {
    integrate(j, w, &Quadrature::default())
}

/// (n, k) pairs with n ∈ {2, 3}, k ∈ 0..=n, filtered.
fn shapes(keep: impl Fn(usize, usize) -> bool) -> Vec<(usize, usize)> {
    (2..=3).flat_map(|n| (0..=n).map(move |k| (n, k))).filter(|(n, k)| keep(*n, *k)).collect()
}

fn compare(c: &mut Check, lhs: Result<Q>, rhs: Result<Q>, ctx: impl Fn() -> String) {
    match (lhs, rhs) {
        (Ok(a), Ok(b)) => {
            let d = (a.clone() - b.clone()).abs();
            c.record(d.to_f64(), d.is_zero_val(), || format!("{}: {} vs {}", ctx(), a, b));
        }
        (Err(e), _) | (_, Err(e)) => c.record(f64::INFINITY, false, || format!("{}: {}", ctx(), e)),
    }
}

fn retract_with(cfg: &Config, x: &VectorField<Q>, j: &Chain<Q>) -> Result<Chain<Q>> {
    let r = retract(x, j)?;
    Ok(match cfg.fault {
        Some(Fault::RetractSign) => r.scale(&q(-1, 1)),
        None => r,
    })
}

fn zero_terms(c: &Chain<Q>) -> usize {
    match c {
        Chain::Dirac(d) => d.len(),
        Chain::Simplicial(s) => s.canonicalize().cells.len(),
        _ => usize::MAX,
    }
}

pub fn identity_suite(cfg: &Config) -> Vec<Check> {
    let mut rng = cfg.rng(1);
    let t = cfg.trials;
    let all = shapes(|_, _| true);

    let mut bb = Check::new(SUITE, "boundary of a boundary is zero", 0.0);
    for i in 0..t {
        let (n, k) = all[i % all.len()];
        let j = if i % 2 == 0 { Chain::Dirac(gen::dirac(&mut rng, n, k, 3, 1)) } else { Chain::Simplicial(gen::simplicial(&mut rng, n, k, 2)) };
        match boundary(&j).and_then(|b| boundary(&b)) {
            Ok(b2) => {
                let left = zero_terms(&b2);
                bb.record(left as f64, left == 0, || format!("n={} k={}: {} terms survive", n, k, left));
            }
            Err(e) => bb.record(f64::INFINITY, false, || e.to_string()),
        }
    }

    let mut homotopy = Check::new(SUITE, "cone homotopy: cone of boundary plus boundary of cone is the identity", 0.0);
    for i in 0..t {
        let (n, k) = all[i % all.len()];
        let j = if i % 2 == 0 { Chain::Dirac(gen::dirac(&mut rng, n, k, 3, 1)) } else { Chain::Simplicial(gen::simplicial(&mut rng, n, k, 2)) };
        let qp = gen::point(&mut rng, n);
        let w = gen::poly_form(&mut rng, n, k, 3);
        let lhs = (|| {
            let dk = pair(&boundary(&cone(&qp, &j)?)?, &w)?;
            if k == 0 {
                Ok(dk)
            } else {
                Ok(dk + pair(&cone(&qp, &boundary(&j)?)?, &w)?)
            }
        })();
        // on 0-chains the identity holds up to the apex term (q; Σ a)
        let rhs = (|| {
            let v = pair(&j, &w)?;
            if k == 0 {
                let total = pair(&j, &Form::function(n, Expr::one()))?;
                Ok(v - w.eval(&qp, &Multivector::scalar(n, total))?)
            } else {
                Ok(v)
            }
        })();
        compare(&mut homotopy, lhs, rhs, || format!("n={} k={}", n, k));
    }

    let mut ext = Check::new(SUITE, "extrusion is dual to interior product", 0.0);
    let up = shapes(|n, k| k < n);
    for i in 0..t {
        let (n, k) = up[i % up.len()];
        let (j, x) = if i % 2 == 0 {
            (gen::dirac(&mut rng, n, k, 3, 0), gen::poly_field(&mut rng, n, 2))
        } else {
            (gen::dirac(&mut rng, n, k, 3, 1), gen::const_field(&mut rng, n))
        };
        let j = Chain::Dirac(j);
        let w = gen::poly_form(&mut rng, n, k + 1, 3);
        let lhs = extrude(&x, &j).and_then(|e| pair(&e, &w));
        let rhs = w.interior(&x.exprs()).and_then(|iw| pair(&j, &iw));
        compare(&mut ext, lhs, rhs, || format!("n={} k={}", n, k));
    }

    let mut ret = Check::new(SUITE, "retraction is dual to wedge with the field's covector", 0.0);
    let down = shapes(|_, k| k > 0);
    for i in 0..t {
        let (n, k) = down[i % down.len()];
        let (j, x) = if i % 2 == 0 {
            (gen::dirac(&mut rng, n, k, 3, 0), gen::poly_field(&mut rng, n, 2))
        } else {
            (gen::dirac(&mut rng, n, k, 3, 1), gen::const_field(&mut rng, n))
        };
        let j = Chain::Dirac(j);
        let w = gen::poly_form(&mut rng, n, k - 1, 3);
        let lhs = retract_with(cfg, &x, &j).and_then(|e| pair(&e, &w));
        let rhs = pair(&j, &w.flat_wedge(&x.exprs()));
        compare(&mut ret, lhs, rhs, || format!("n={} k={}", n, k));
    }

    let mut pre = Check::new(SUITE, "prederivative along a constant field is dual to the Lie derivative", 0.0);
    for i in 0..t {
        let (n, k) = all[i % all.len()];
        let j = Chain::Dirac(gen::dirac(&mut rng, n, k, 3, 1));
        let x = gen::const_field(&mut rng, n);
        let w = gen::poly_form(&mut rng, n, k, 3);
        let lhs = prederivative(&x, &j).and_then(|p| pair(&p, &w));
        let rhs = w.lie(&x.exprs()).and_then(|lw| pair(&j, &lw));
        compare(&mut pre, lhs, rhs, || format!("n={} k={}", n, k));
    }

    let mut leib = Check::new(SUITE, "boundary of a Cartesian wedge obeys the graded Leibniz rule", 0.0);
    for i in 0..t {
        let n = 2 + i % 2;
        let n1 = if n == 2 { 1 } else { 1 + (i / 2) % 2 };
        let n2 = n - n1;
        let k = rng.gen_range(0..=n1);
        let l = rng.gen_range(0..=n2);
        let a = gen::dirac(&mut rng, n1, k, 2, 1);
        let b = gen::dirac(&mut rng, n2, l, 2, 1);
        let res = (|| -> Result<DipoleChain<Q>> {
            let (ja, jb) = (Chain::Dirac(a.clone()), Chain::Dirac(b.clone()));
            let lhs = boundary(&cartesian_wedge(&ja, &jb)?)?;
            let lhs = lhs.as_dirac().cloned().unwrap_or_else(|| DipoleChain::zero(n, (k + l).saturating_sub(1)));
            let left = || -> Result<DipoleChain<Q>> { Ok(cartesian_wedge(&boundary(&ja)?, &jb)?.as_dirac().unwrap().clone()) };
            let right = || -> Result<DipoleChain<Q>> { Ok(cartesian_wedge(&ja, &boundary(&jb)?)?.as_dirac().unwrap().clone()) };
            let rhs = match (k > 0, l > 0) {
                (true, true) => {
                    let sign = if k % 2 == 0 { q(1, 1) } else { q(-1, 1) };
                    left()?.add(&right()?.scale(&sign))?
                }
                (true, false) => left()?,
                (false, true) => right()?,
                (false, false) => return Ok(DipoleChain::zero(n, 0)),
            };
            lhs.sub(&rhs)
        })();
        match res {
            Ok(d) => leib.record(d.len() as f64, d.is_zero(), || format!("ℝ^{} × ℝ^{}, grades {} and {}: {} terms differ", n1, n2, k, l, d.len())),
            Err(e) => leib.record(f64::INFINITY, false, || e.to_string()),
        }
    }

    let mut comm = Check::new(SUITE, "prederivatives along constant fields commute", 0.0);
    for i in 0..t {
        let (n, k) = all[i % all.len()];
        let j = Chain::Dirac(gen::dirac(&mut rng, n, k, 3, 1));
        let (u, v) = (gen::const_field(&mut rng, n), gen::const_field(&mut rng, n));
        let res = (|| -> Result<DipoleChain<Q>> {
            let a = prederivative(&u, &prederivative(&v, &j)?)?;
            let b = prederivative(&v, &prederivative(&u, &j)?)?;
            a.as_dirac().unwrap().sub(b.as_dirac().unwrap())
        })();
        match res {
            Ok(d) => comm.record(d.len() as f64, d.is_zero(), || format!("n={} k={}: {} terms differ", n, k, d.len())),
            Err(e) => comm.record(f64::INFINITY, false, || e.to_string()),
        }
    }

    vec![bb, homotopy, ext, ret, pre, leib, comm]
}
