//! Polyhedral approximations of the unit ball of covectors.

use crate::algebra::binom;

/// Unit facet normals ξ_d of P = {ω : |⟨ω, ξ_d⟩| ≤ 1} and a certified
/// Euclidean circumradius R of P, so that P / R sits inside the unit ball.
#[derive(Clone, Debug)]
pub struct DualBall {
    pub dim: usize,
    pub normals: Vec<Vec<f64>>,
    pub radius: f64,
}

/// Default facet count 2·C(n,k)·2^{min(k(n−k), 6)}.
pub fn default_facets(n: usize, k: usize) -> usize {
    2 * binom(n, k) * (1usize << (k * (n - k)).min(6))
}

impl DualBall {
    /// `facets` counts half-spaces, so there are facets/2 antipodal pairs.
    pub fn new(dim: usize, facets: usize) -> Self {
        let pairs = (facets / 2).max(1);
        match dim {
            0 | 1 => DualBall { dim, normals: if dim == 0 { vec![] } else { vec![vec![1.0]] }, radius: 1.0 },
            2 => {
                let d = pairs.max(2);
                let normals = (0..d)
                    .map(|i| {
                        let t = std::f64::consts::PI * i as f64 / d as f64;
                        vec![t.cos(), t.sin()]
                    })
                    .collect();
                let radius = 1.0 / (std::f64::consts::PI / (2.0 * d as f64)).cos();
                DualBall { dim, normals, radius: radius * (1.0 + 1e-12) }
            }
            3 => {
                let d = pairs.max(3);
                let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
                let mut normals: Vec<Vec<f64>> = (0..d)
                    .map(|i| {
                        let z = 1.0 - (i as f64 + 0.5) / d as f64;
                        let r = (1.0 - z * z).sqrt();
                        let phi = golden * i as f64;
                        vec![r * phi.cos(), r * phi.sin(), z]
                    })
                    .collect();
                // make sure the coordinate axes are present
                for axis in 0..3 {
                    let mut e = vec![0.0; 3];
                    e[axis] = 1.0;
                    normals.push(e);
                }
                let radius = circumradius3(&normals);
                DualBall { dim, normals, radius: radius * (1.0 + 1e-9) }
            }
            _ => {
                // box [−1,1]^dim, circumradius √dim
                let normals = (0..dim)
                    .map(|i| {
                        let mut e = vec![0.0; dim];
                        e[i] = 1.0;
                        e
                    })
                    .collect();
                DualBall { dim, normals, radius: (dim as f64).sqrt() * (1.0 + 1e-12) }
            }
        }
    }
}

/// Largest vertex norm of {|⟨x, ξ⟩| ≤ 1} in ℝ³ by enumerating plane triples.
fn circumradius3(normals: &[Vec<f64>]) -> f64 {
    let mut planes: Vec<([f64; 3], f64)> = Vec::new();
    for v in normals {
        planes.push(([v[0], v[1], v[2]], 1.0));
        planes.push(([-v[0], -v[1], -v[2]], 1.0));
    }
    let mut best: f64 = 0.0;
    let m = planes.len();
    for a in 0..m {
        for b in a + 1..m {
            for c in b + 1..m {
                let (pa, pb, pc) = (planes[a].0, planes[b].0, planes[c].0);
                let det = pa[0] * (pb[1] * pc[2] - pb[2] * pc[1]) - pa[1] * (pb[0] * pc[2] - pb[2] * pc[0])
                    + pa[2] * (pb[0] * pc[1] - pb[1] * pc[0]);
                if det.abs() < 1e-9 {
                    continue;
                }
                // Cramer with right-hand side (1,1,1)
                let col = |i: usize| -> f64 {
                    let mut m3 = [pa, pb, pc];
                    for row in m3.iter_mut() {
                        row[i] = 1.0;
                    }
                    m3[0][0] * (m3[1][1] * m3[2][2] - m3[1][2] * m3[2][1]) - m3[0][1] * (m3[1][0] * m3[2][2] - m3[1][2] * m3[2][0])
                        + m3[0][2] * (m3[1][0] * m3[2][1] - m3[1][1] * m3[2][0])
                };
                let x = [col(0) / det, col(1) / det, col(2) / det];
                if planes.iter().all(|(p, r)| p[0] * x[0] + p[1] * x[1] + p[2] * x[2] <= r + 1e-9) {
                    best = best.max((x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt());
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_circumradius() {
        let axes = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        assert!((circumradius3(&axes) - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn polytopes_contain_the_ball_and_shrink_inside() {
        for dim in 1..=4 {
            let b = DualBall::new(dim, 24);
            assert!(b.radius >= 1.0);
            // sampled points on P's boundary stay within the radius
            for s in 0..200 {
                let mut v: Vec<f64> = (0..dim).map(|i| ((s * 7 + i * 13) as f64 * 0.37).sin()).collect();
                let scale = b.normals.iter().map(|xi| xi.iter().zip(&v).map(|(a, c)| a * c).sum::<f64>().abs()).fold(0.0, f64::max);
                if scale == 0.0 {
                    continue;
                }
                v.iter_mut().for_each(|x| *x /= scale);
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                assert!(norm <= b.radius + 1e-9);
            }
        }
        assert_eq!(default_facets(3, 1), 24);
        assert_eq!(default_facets(2, 0), 2);
    }
}
