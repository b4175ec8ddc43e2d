//! Dense simplex for max cᵀx subject to Ax ≤ b, x ≥ 0 with b ≥ 0, so the
//! slack basis is feasible from the start. Pivoting follows Bland's rule.

use crate::error::{Error, Result};

const EPS: f64 = 1e-11;

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub x: Vec<f64>,
    /// Multipliers of the rows of A; bᵀy equals the optimum.
    pub y: Vec<f64>,
    pub value: f64,
    pub pivots: usize,
}

/// Solves the LP in dictionary form. Rows of `a` have length `c.len()`.
pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpSolution> {
    let (m, n) = (a.len(), c.len());
    if b.iter().any(|&x| x < 0.0) {
        return Err(Error::Lp("right-hand side must be nonnegative".into()));
    }
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::Lp("constraint row of wrong length".into()));
    }
    let mut t: Vec<Vec<f64>> = a.to_vec();
    let mut rhs = b.to_vec();
    let mut obj = c.to_vec();
    let mut z0 = 0.0;
    // labels: 0..n structural, n..n+m slack
    let mut nonbasic: Vec<usize> = (0..n).collect();
    let mut basic: Vec<usize> = (n..n + m).collect();
    let cap = 50_000 + 50 * (m + n);
    let mut pivots = 0;
    loop {
        let mut enter: Option<usize> = None;
        for j in 0..n {
            if obj[j] > EPS && enter.is_none_or(|e| nonbasic[j] < nonbasic[e]) {
                enter = Some(j);
            }
        }
        let Some(s) = enter else { break };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            if t[i][s] > EPS {
                let ratio = rhs[i] / t[i][s];
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((r, best)) => {
                        if ratio < best - 1e-14 || (ratio <= best + 1e-14 && basic[i] < basic[r]) {
                            Some((i, ratio))
                        } else {
                            Some((r, best))
                        }
                    }
                };
            }
        }
        let Some((r, _)) = leave else {
            return Err(Error::Lp("unbounded objective".into()));
        };
        pivot(&mut t, &mut rhs, &mut obj, &mut z0, r, s);
        std::mem::swap(&mut basic[r], &mut nonbasic[s]);
        pivots += 1;
        if pivots > cap {
            return Err(Error::Lp(format!("no convergence after {} pivots", pivots)));
        }
    }
    let mut x = vec![0.0; n];
    for (i, &lab) in basic.iter().enumerate() {
        if lab < n {
            x[lab] = rhs[i].max(0.0);
        }
    }
    let mut y = vec![0.0; m];
    for (j, &lab) in nonbasic.iter().enumerate() {
        if lab >= n {
            y[lab - n] = (-obj[j]).max(0.0);
        }
    }
    Ok(LpSolution { x, y, value: z0, pivots })
}

fn pivot(t: &mut [Vec<f64>], rhs: &mut [f64], obj: &mut [f64], z0: &mut f64, r: usize, s: usize) {
    let p = t[r][s];
    let n = obj.len();
    for j in 0..n {
        if j != s {
            t[r][j] /= p;
        }
    }
    t[r][s] = 1.0 / p;
    rhs[r] /= p;
    let row_r = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == r {
            continue;
        }
        let f = row[s];
        if f == 0.0 {
            continue;
        }
        for j in 0..n {
            if j != s {
                row[j] -= f * row_r[j];
            }
        }
        row[s] = -f * row_r[s];
        rhs[i] -= f * rhs[r];
        if rhs[i] < 0.0 && rhs[i] > -1e-13 {
            rhs[i] = 0.0;
        }
    }
    let f = obj[s];
    for j in 0..n {
        if j != s {
            obj[j] -= f * row_r[j];
        }
    }
    obj[s] = -f * row_r[s];
    *z0 += f * rhs[r];
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_instance() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → 36 at (2, 6)
        let s = maximize(&[3.0, 5.0], &[vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]], &[4.0, 12.0, 18.0]).unwrap();
        assert!((s.value - 36.0).abs() < 1e-12);
        assert!((s.x[0] - 2.0).abs() < 1e-12 && (s.x[1] - 6.0).abs() < 1e-12);
        let dual: f64 = s.y.iter().zip([4.0, 12.0, 18.0]).map(|(y, b)| y * b).sum();
        assert!((dual - 36.0).abs() < 1e-12);
        assert!((s.y[1] - 1.5).abs() < 1e-12 && (s.y[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under the textbook rule; Bland terminates.
        let c = [0.75, -150.0, 0.02, -6.0];
        let a = vec![vec![0.25, -60.0, -0.04, 9.0], vec![0.5, -90.0, -0.02, 3.0], vec![0.0, 0.0, 1.0, 0.0]];
        let s = maximize(&c, &a, &[0.0, 0.0, 1.0]).unwrap();
        assert!((s.value - 0.05).abs() < 1e-12);
    }

    #[test]
    fn unbounded_is_reported() {
        assert!(maximize(&[1.0], &[vec![-1.0]], &[1.0]).is_err());
    }
}
