//! Grundmann–Möller rules on simplices, with rational weights so that
//! polynomials integrate exactly in rational mode.

use crate::scalar::Q;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Barycentric nodes and weights normalized to sum to one.
pub struct Rule {
    pub nodes: Vec<(Vec<Q>, Q)>,
    pub nodes_f: Vec<(Vec<f64>, f64)>,
}

fn factorial(n: usize) -> Q {
    (1..=n).fold(Q::one(), |a, i| a * Q::from_integer((i as i64).into()))
}

fn compositions(total: usize, parts: usize, out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>) {
    if cur.len() + 1 == parts {
        cur.push(total);
        out.push(cur.clone());
        cur.pop();
        return;
    }
    for a in (0..=total).rev() {
        cur.push(a);
        compositions(total - a, parts, out, cur);
        cur.pop();
    }
}

/// Rule on the m-simplex exact for polynomials of degree ≤ 2s+1.
pub fn grundmann_moller(m: usize, s: usize) -> Arc<Rule> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Rule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().unwrap().get(&(m, s)) {
        return r.clone();
    }
    let mut nodes = Vec::new();
    if m == 0 {
        nodes.push((vec![Q::one()], Q::one()));
    } else {
        let d = 2 * s + 1;
        let mfact = factorial(m);
        for i in 0..=s {
            let den = (d + m - 2 * i) as i64;
            let mut w = num_traits::pow(Q::from_integer(den.into()), d) / (factorial(i) * factorial(d + m - i));
            w = w / num_traits::pow(Q::from_integer(2.into()), 2 * s) * &mfact;
            if i % 2 == 1 {
                w = -w;
            }
            let mut comps = Vec::new();
            compositions(s - i, m + 1, &mut comps, &mut Vec::new());
            for beta in comps {
                let x: Vec<Q> = beta.iter().map(|&b| Q::new(((2 * b + 1) as i64).into(), den.into())).collect();
                nodes.push((x, w.clone()));
            }
        }
    }
    let nodes_f = nodes
        .iter()
        .map(|(x, w)| (x.iter().map(|v| v.to_f64().unwrap()).collect(), w.to_f64().unwrap()))
        .collect();
    let r = Arc::new(Rule { nodes, nodes_f });
    cache.lock().unwrap().insert((m, s), r.clone());
    r
}

/// Smallest s whose rule is exact to the given degree.
pub fn order_for_degree(deg: u32) -> usize {
    (deg.saturating_sub(1) as usize).div_ceil(2)
}

pub fn weight_sum(r: &Rule) -> Q {
    r.nodes.iter().fold(Q::zero(), |a, (_, w)| a + w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    // ∫_Δ λ^a dV / |Δ| = m! a! / (|a| + m)!  (Dirichlet moment)
    fn moment(a: &[usize], m: usize) -> Q {
        let num = a.iter().fold(factorial(m), |acc, &ai| acc * factorial(ai));
        num / factorial(a.iter().sum::<usize>() + m)
    }

    #[test]
    fn exact_on_monomials() {
        for m in 1..=3 {
            for s in 0..=3 {
                let r = grundmann_moller(m, s);
                assert_eq!(weight_sum(&r), Q::one());
                let deg = 2 * s + 1;
                // all exponent vectors on m+1 barycentric coords up to deg
                for total in 0..=deg {
                    let mut comps = Vec::new();
                    compositions(total, m + 1, &mut comps, &mut Vec::new());
                    for a in comps {
                        let got = r.nodes.iter().fold(Q::zero(), |acc, (x, w)| {
                            acc + w * x.iter().zip(&a).fold(Q::one(), |p, (xi, &ai)| p * num_traits::pow(xi.clone(), ai))
                        });
                        assert_eq!(got, moment(&a, m), "m={} s={} a={:?}", m, s, a);
                    }
                }
            }
        }
    }

    #[test]
    fn order_selection() {
        for deg in 0..12u32 {
            let s = order_for_degree(deg);
            assert!(2 * s + 1 >= deg as usize);
            assert!(s == 0 || 2 * s - 1 < deg as usize);
        }
        assert_eq!(moment(&[1, 0, 0], 2), q(1, 3));
    }
}
