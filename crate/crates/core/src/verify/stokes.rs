use super::{gen, Check, Config};
use crate::chains::{Chain, SimplicialChain};
use crate::error::Result;
use crate::forms::{integrate, Form, Quadrature};
use crate::operators::{boundary, cartesian_wedge};
use crate::scalar::{Scalar, Q};
use rand::seq::SliceRandom;
use rand::Rng;

const SUITE: &str = "stokes";
pub const FLOAT_TOL: f64 = 1e-12;

/// Axis-parallel k-cube in ℝⁿ as a product of intervals and points.
pub fn random_cube<R: Rng>(rng: &mut R, n: usize, k: usize) -> Result<SimplicialChain<Q>> {
    let mut axes: Vec<usize> = (0..n).collect();
    axes.shuffle(rng);
    let open = &axes[..k];
    let mut out: Option<SimplicialChain<Q>> = None;
    for i in 0..n {
        let a = gen::rat(rng, 2, 4);
        let factor = if open.contains(&i) {
            let mut b = gen::rat(rng, 2, 4);
            while b == a {
                b = gen::rat(rng, 2, 4);
            }
            SimplicialChain::representative(vec![vec![a], vec![b]])
        } else {
            SimplicialChain::representative(vec![vec![a]])
        };
        out = Some(match out {
            None => factor,
            Some(c) => cartesian_wedge(&Chain::Simplicial(c), &Chain::Simplicial(factor))?.as_simplicial().unwrap().clone(),
        });
    }
    Ok(out.unwrap().scale(&gen::rat(rng, 2, 2)))
}

fn random_polyhedral<R: Rng>(rng: &mut R, n: usize, k: usize, which: usize) -> Result<SimplicialChain<Q>> {
    Ok(match which % 3 {
        0 => gen::simplicial(rng, n, k, 2),
        1 => random_cube(rng, n, k)?,
        _ => gen::simplicial(rng, n, k, 1).add(&random_cube(rng, n, k)?)?,
    })
}

pub fn stokes_suite(cfg: &Config) -> Vec<Check> {
    let mut rng = cfg.rng(2);
    let shapes: Vec<(usize, usize)> = (2..=3).flat_map(|n| (1..=n).map(move |k| (n, k))).collect();
    let mut exact = Check::new(SUITE, "boundary is dual to the exterior derivative (rational)", 0.0);
    let mut float = Check::new(SUITE, "boundary is dual to the exterior derivative (float)", FLOAT_TOL);
    let quad = Quadrature::default();
    for i in 0..cfg.trials {
        let (n, k) = shapes[i % shapes.len()];
        let j = match random_polyhedral(&mut rng, n, k, i) {
            Ok(j) => j,
            Err(e) => {
                exact.record(f64::INFINITY, false, || e.to_string());
                continue;
            }
        };
        let w: Form = gen::poly_form(&mut rng, n, k - 1, 3);
        let ctx = || format!("n={} k={} cells={}", n, k, j.cells.len());
        let jq = Chain::Simplicial(j.clone());
        let r = (|| -> Result<(Q, Q)> { Ok((integrate(&boundary(&jq)?, &w, &quad)?, integrate(&jq, &w.d()?, &quad)?)) })();
        match r {
            Ok((a, b)) => {
                let d = (a.clone() - b.clone()).abs();
                exact.record(d.to_f64(), d.is_zero_val(), || format!("{}: {} vs {}", ctx(), a, b));
            }
            Err(e) => exact.record(f64::INFINITY, false, || format!("{}: {}", ctx(), e)),
        }
        let jf = Chain::Simplicial(j.to_f64());
        let r = (|| -> Result<(f64, f64)> { Ok((integrate(&boundary(&jf)?, &w, &quad)?, integrate(&jf, &w.d()?, &quad)?)) })();
        match r {
            Ok((a, b)) => {
                let d = (a - b).abs();
                float.record(d, d <= FLOAT_TOL, || format!("{}: {} vs {}", ctx(), a, b));
            }
            Err(e) => float.record(f64::INFINITY, false, || format!("{}: {}", ctx(), e)),
        }
    }
    vec![exact, float]
}
