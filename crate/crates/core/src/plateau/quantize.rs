use crate::algebra::{mass, Multivector, SymTensor};
use crate::chains::DipoleChain;
use crate::error::{Error, Result};
use crate::norms::{Decomposition, Piece};

/// One lattice atom P_v(q; β) of a quantized chain.
#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub q: Vec<f64>,
    pub v: Vec<f64>,
    pub beta: Multivector<f64>,
}

#[derive(Clone, Debug)]
pub struct Quantized {
    pub k: u32,
    pub atoms: Vec<Atom>,
    pub chain: DipoleChain<f64>,
    /// Exact decomposition of S − S′ into differences, shifted dipoles and
    /// small dipoles; its cost bounds ‖S − S′‖ for r ≥ `certificate.min_r()`.
    pub certificate: Decomposition,
    /// 4kc·2^{-k}.
    pub bound: f64,
    pub total_mass: f64,
}

fn dyadic(x: f64, step: f64) -> f64 {
    (x / step).round() * step
}

/// Nearest point of the binary lattice of edge 2^{-k}.
pub fn snap_point(p: &[f64], k: u32) -> Vec<f64> {
    let h = 0.5f64.powi(k as i32);
    p.iter().map(|x| dyadic(*x, h)).collect()
}

/// v with v/k in Q(k)³: coordinates k·j/2^k, |j| ≤ 2^k.
pub fn snap_vector(u: &[f64], k: u32) -> Vec<f64> {
    let h = 0.5f64.powi(k as i32);
    let kf = k as f64;
    u.iter().map(|x| kf * dyadic((x / kf).clamp(-1.0, 1.0), h)).collect()
}

/// Scale s = 2^⌈log₂‖α‖⌉ and β′ = s·round(α/s) on the grid 2^{-k-2}, so
/// ‖α − β′‖ ≤ √3·2^{-k-2}·s < 2^{-k}‖α‖ and β′/s has coordinates in Q(k+2).
pub fn snap_bivector(a: &Multivector<f64>, k: u32) -> (Multivector<f64>, f64) {
    let len = a.norm();
    if len == 0.0 {
        return (a.clone(), 0.0);
    }
    let s = 2f64.powi(len.log2().ceil() as i32);
    let h = s * 0.5f64.powi(k as i32 + 2);
    let c: Vec<f64> = a.to_lex().iter().map(|x| dyadic(*x, h)).collect();
    (Multivector::from_lex(a.n, a.k, &c).expect("same grade"), s)
}

/// Splits each term as (p; u⊗α) with the scale of u a multiple of k·2^{-k}
/// closest to ‖u‖ = 1 when one is near, so chains built from lattice atoms split back into
/// the same atoms. Order-zero terms get u = 0.
fn atoms_of(s: &DipoleChain<f64>, k: u32) -> Result<Vec<(Vec<f64>, Vec<f64>, Multivector<f64>)>> {
    let step = k as f64 * 0.5f64.powi(k as i32);
    let mut out = Vec::new();
    for (p, sigma, a) in s.terms() {
        match sigma.degree() {
            0 => out.push((p.to_vec(), vec![0.0; s.n], a.clone())),
            1 => {
                let u = &sigma.factors()[0];
                let len = u.iter().map(|x| x * x).sum::<f64>().sqrt();
                let grid = step * (1.0 / (len * step)).round();
                let t = if (grid * len - 1.0).abs() <= 0.5 { grid } else { 1.0 / len };
                out.push((p.to_vec(), u.iter().map(|x| x * t).collect(), a.scale(&(1.0 / t))));
            }
            d => return Err(Error::Unsupported(format!("quantization of dipole order {}", d))),
        }
    }
    Ok(out)
}

fn push_atom(out: &mut DipoleChain<f64>, p: &[f64], u: &[f64], a: &Multivector<f64>) {
    if a.is_zero() {
        return;
    }
    let sigma = if u.iter().all(|x| *x == 0.0) { SymTensor::one(p.len()) } else { SymTensor::vector(u.to_vec()) };
    out.push(p.to_vec(), sigma, a.clone());
}

/// Snaps a pointized dipole 2-chain into the finite family Z(k) and
/// certifies the displacement.
pub fn quantize(s: &DipoleChain<f64>, k: u32, cap: f64) -> Result<Quantized> {
    if k == 0 {
        return Err(Error::Unsupported("lattice depth k must be at least 1".into()));
    }
    let mut atoms = Vec::new();
    let mut chain = DipoleChain::zero(s.n, s.k);
    let mut cert = Decomposition::empty(s.n, s.k);
    let mut total = 0.0;
    for (p, u, a) in atoms_of(s, k)? {
        let q = snap_point(&p, k);
        let v = snap_vector(&u, k);
        if v.iter().map(|x| x * x).sum::<f64>().sqrt() > k as f64 {
            return Err(Error::Geometry(format!("dipole vector {:?} does not fit ‖v‖ ≤ {}", v, k)));
        }
        let (beta, _) = snap_bivector(&a, k);
        total += mass(&beta).ub;
        let du: Vec<f64> = u.iter().zip(&v).map(|(x, y)| x - y).collect();
        let dp: Vec<f64> = p.iter().zip(&q).map(|(x, y)| x - y).collect();
        if du.iter().any(|x| *x != 0.0) {
            cert.pieces.push(Piece::Dipole { p: p.clone(), sigma: SymTensor::vector(du), a: a.clone() });
        }
        let v_zero = v.iter().all(|x| *x == 0.0);
        if dp.iter().any(|x| *x != 0.0) {
            if v_zero {
                cert.pieces.push(Piece::Diff { p: q.clone(), u: dp, a: a.clone() });
            } else {
                cert.pieces.push(Piece::Shifted { p: q.clone(), v: dp, sigma: SymTensor::vector(v.clone()), a: a.clone() });
            }
        }
        let da = a.sub(&beta);
        if !da.is_zero() {
            if v_zero {
                cert.pieces.push(Piece::Mass { p: q.clone(), a: da });
            } else {
                cert.pieces.push(Piece::Dipole { p: q.clone(), sigma: SymTensor::vector(v.clone()), a: da });
            }
        }
        push_atom(&mut chain, &q, &v, &beta);
        atoms.push(Atom { q, v, beta });
    }
    if total > cap {
        return Err(Error::Cap { mass: total, cap });
    }
    let kf = k as f64;
    Ok(Quantized { k, atoms, chain, certificate: cert, bound: 4.0 * kf * cap * 0.5f64.powi(k as i32), total_mass: total })
}

impl Quantized {
    /// Lattice points, v/k ∈ Q(k)³ with ‖v‖ ≤ k, β/s ∈ Q(k+2) for a power of two s.
    pub fn audit(&self) -> bool {
        let k = self.k as i32;
        let kf = self.k as f64;
        let on = |x: f64, step: f64, lim: f64| {
            let j = x / step;
            j == j.round() && j.abs() <= lim
        };
        self.atoms.iter().all(|at| {
            let grid = 2f64.powi(k);
            let pts = at.q.iter().all(|x| (x * grid) == (x * grid).round());
            let vs = at.v.iter().all(|x| on(x / kf, 1.0 / grid, grid)) && at.v.iter().map(|x| x * x).sum::<f64>().sqrt() <= kf;
            let len = at.beta.norm();
            // rounding can move ‖β‖ across a power of two
            let bs = len == 0.0 || {
                let s = 2f64.powi(len.log2().ceil() as i32);
                let g = 2f64.powi(k + 2);
                [s, 2.0 * s, s / 2.0].iter().any(|s| at.beta.to_lex().iter().all(|x| on(x / s, 1.0 / g, g)))
            };
            pts && vs && bs
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::Chain;
    use crate::forms::{integrate, Expr, Form, Quadrature};
    use crate::norms::{br_bracket, NormOptions};
    use crate::plateau::{curve::BoundaryCurve, geom::V3, Polyline};
    use crate::plateau::seeds;

    fn e12(c: f64) -> Multivector<f64> {
        Multivector::basis(3, &[0, 1]).scale(&c)
    }

    #[test]
    fn lattice_chain_is_a_fixed_point() {
        let mut s = DipoleChain::zero(3, 2);
        // v/3 on the 1/8 grid
        s.push(vec![0.125, -0.25, 0.5], SymTensor::vector(vec![0.0, 0.0, 1.125]), e12(0.09375));
        s.push(vec![0.0, 0.375, 0.5], SymTensor::vector(vec![0.375, 0.0, 1.125]), e12(-0.5));
        let q = quantize(&s, 3, 10.0).unwrap();
        assert_eq!(q.chain, s);
        assert!(q.certificate.pieces.is_empty());
        assert!(q.audit());
    }

    #[test]
    fn cap_is_enforced() {
        let s = DipoleChain::dipole(vec![0.1, 0.2, 0.3], SymTensor::vector(vec![0.0, 0.0, 1.0]), e12(2.0));
        assert!(matches!(quantize(&s, 3, 1.0), Err(Error::Cap { .. })));
    }

    fn cone_chain(m: usize) -> DipoleChain<f64> {
        let circle = Polyline::circle(V3::zeros(), V3::x(), V3::y(), 1.0, m);
        let curve = BoundaryCurve::new(vec![circle], V3::new(0.1, 0.2, 0.6)).unwrap();
        seeds::cone(&curve, 0).dipole_chain().pointize(2)
    }

    #[test]
    fn certificate_reconstructs_the_difference() {
        let s = cone_chain(16);
        let q = quantize(&s, 4, 10.0).unwrap();
        assert!(q.audit());
        let diff = s.sub(&q.chain).unwrap();
        let rec = q.certificate.reconstruct();
        let forms = [([0, 1], "(* x1 x2)"), ([0, 2], "(+ (pow x3 2) (- x1))"), ([1, 2], "(+ (* x2 (* x3 x1)) 1)")];
        for (idx, f) in forms {
            let w = Form::term(3, &idx, Expr::parse(f).unwrap());
            let a = integrate(&Chain::Dirac(diff.clone()), &w, &Quadrature::default()).unwrap();
            let b = integrate(&Chain::Dirac(rec.clone()), &w, &Quadrature::default()).unwrap();
            assert!((a - b).abs() < 1e-12, "{} vs {}", a, b);
        }
        assert_eq!(q.certificate.min_r(), 2);
    }

    #[test]
    fn bound_holds_with_shifted_dipoles() {
        let s = cone_chain(64);
        for k in 3..=7 {
            let c = 4.0;
            let q = quantize(&s, k, c).unwrap();
            assert!(q.certificate.cost() <= q.bound, "k={} cost {} bound {}", k, q.certificate.cost(), q.bound);
        }
    }

    #[test]
    fn moving_a_dipole_is_not_small_in_b1() {
        // (p+v; u⊗α) − (p; u⊗α) stays of size |u||α| in B¹ however small v is
        let mut a = DipoleChain::zero(3, 2);
        let u = SymTensor::vector(vec![0.0, 0.0, 1.0]);
        a.push(vec![0.01, 0.0, 0.0], u.clone(), e12(1.0));
        a.push(vec![0.0, 0.0, 0.0], u, e12(-1.0));
        let b = br_bracket(&a, 1, &NormOptions::default()).unwrap();
        assert!(b.lb > 1.5, "{:?}", b.lb);
    }
}
