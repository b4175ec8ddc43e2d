use crate::algebra::{mass, Multivector, SymTensor};
use crate::error::{Error, Result};
use crate::scalar::{cmp_slices, Pt, Scalar};
use std::cmp::Ordering;
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq)]
pub struct TermKey<S> {
    pub p: Pt<S>,
    pub sigma: SymTensor<S>,
}

impl<S: Scalar> Eq for TermKey<S> {}
impl<S: Scalar> PartialOrd for TermKey<S> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<S: Scalar> Ord for TermKey<S> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.p.cmp(&o.p).then_with(|| self.sigma.total_cmp(&o.sigma))
    }
}

/// Σ (pᵢ; σᵢ⊗αᵢ) with same-point same-tensor terms merged.
#[derive(Clone, Debug, PartialEq)]
pub struct DipoleChain<S> {
    pub n: usize,
    pub k: usize,
    terms: BTreeMap<TermKey<S>, Multivector<S>>,
}

/// Base points of a chain; `zero` is set when nothing survives.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSupport<S> {
    pub points: Vec<Vec<S>>,
    pub zero: bool,
}

impl<S: Scalar> DipoleChain<S> {
    pub fn zero(n: usize, k: usize) -> Self {
        DipoleChain { n, k, terms: BTreeMap::new() }
    }

    pub fn dirac(p: Vec<S>, a: Multivector<S>) -> Self {
        let mut c = Self::zero(a.n, a.k);
        c.push(p, SymTensor::one(a.n), a);
        c
    }

    pub fn dipole(p: Vec<S>, sigma: SymTensor<S>, a: Multivector<S>) -> Self {
        let mut c = Self::zero(a.n, a.k);
        c.push(p, sigma, a);
        c
    }

    /// Adds (p; σ⊗α), moving σ's scale into α so equal tensors merge.
    pub fn push(&mut self, p: Vec<S>, sigma: SymTensor<S>, a: Multivector<S>) {
        debug_assert_eq!(a.k, self.k);
        debug_assert_eq!(p.len(), self.n);
        let Some((sig, c)) = sigma.normalized() else {
            return;
        };
        let a = a.scale(&c);
        if a.is_zero() {
            return;
        }
        let p: Vec<S> = p.into_iter().map(|x| if x.is_zero() { S::zero() } else { x }).collect();
        let key = TermKey { p: Pt(p), sigma: sig };
        match self.terms.get_mut(&key) {
            Some(v) => {
                let s = v.add(&a);
                if s.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(key, a);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[S], &SymTensor<S>, &Multivector<S>)> {
        self.terms.iter().map(|(k, a)| (k.p.0.as_slice(), &k.sigma, a))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest dipole order present.
    pub fn order(&self) -> usize {
        self.terms.keys().map(|k| k.sigma.degree()).max().unwrap_or(0)
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.n != o.n {
            return Err(Error::Dimension(format!("chains in ℝ^{} and ℝ^{}", self.n, o.n)));
        }
        if self.k != o.k {
            return Err(Error::Grade(format!("chains of grade {} and {}", self.k, o.k)));
        }
        Ok(())
    }

    /// c·A + B.
    pub fn combine(c: &S, a: &Self, b: &Self) -> Result<Self> {
        a.check(b)?;
        let mut out = b.clone();
        for (key, x) in &a.terms {
            out.push(key.p.0.clone(), key.sigma.clone(), x.scale(c));
        }
        Ok(out)
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        Self::combine(&S::one(), self, o)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        Self::combine(&-S::one(), o, self)
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(self.n, self.k);
        for (key, x) in &self.terms {
            out.push(key.p.0.clone(), key.sigma.clone(), x.scale(c));
        }
        out
    }

    pub fn support(&self) -> PointSupport<S> {
        let mut pts: Vec<Vec<S>> = self.terms.keys().map(|k| k.p.0.clone()).collect();
        pts.dedup_by(|a, b| cmp_slices(a, b) == Ordering::Equal);
        PointSupport { zero: pts.is_empty(), points: pts }
    }

    /// Σ ‖σ‖·mass(α), upper ends of the mass brackets.
    pub fn total_mass(&self) -> f64 {
        self.terms().map(|(_, s, a)| s.norm() * mass(a).ub).sum()
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> DipoleChain<T> {
        let mut out = DipoleChain::zero(self.n, self.k);
        for (p, s, a) in self.terms() {
            let sig = SymTensor::from_factors(self.n, s.factors().iter().map(|u| u.iter().map(f).collect()).collect());
            out.push(p.iter().map(f).collect(), sig, a.map_scalar(f));
        }
        out
    }

    pub fn to_f64(&self) -> DipoleChain<f64> {
        self.map_scalar(|x| x.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, Q};

    fn e(n: usize, i: &[usize]) -> Multivector<Q> {
        Multivector::basis(n, i)
    }

    #[test]
    fn same_point_merges() {
        let p = vec![q(1, 2), q(0, 1)];
        let a = DipoleChain::dirac(p.clone(), e(2, &[0]));
        let b = DipoleChain::dirac(p.clone(), e(2, &[1]));
        let s = a.add(&b).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s, DipoleChain::dirac(p.clone(), e(2, &[0]).add(&e(2, &[1]))));
        assert_eq!(a.scale(&q(2, 1)), DipoleChain::dirac(p, e(2, &[0]).scale(&q(2, 1))));
    }

    #[test]
    fn distinct_points_and_cancellation() {
        let a = DipoleChain::dirac(vec![q(0, 1)], e(1, &[0]));
        let b = DipoleChain::dirac(vec![q(1, 1)], e(1, &[0]));
        let s = a.add(&b).unwrap();
        assert_eq!(s.support().points.len(), 2);
        let z = a.sub(&a).unwrap();
        assert!(z.support().zero && z.support().points.is_empty());
    }

    #[test]
    fn tensor_scale_is_absorbed() {
        let p = vec![q(0, 1), q(0, 1)];
        let u = SymTensor::vector(vec![q(2, 1), q(0, 1)]);
        let v = SymTensor::vector(vec![q(1, 1), q(0, 1)]);
        let a = DipoleChain::dipole(p.clone(), u, e(2, &[1]));
        let b = DipoleChain::dipole(p, v, e(2, &[1]).scale(&q(2, 1)));
        assert_eq!(a, b);
    }

    #[test]
    fn grade_mismatch_rejected() {
        let a = DipoleChain::dirac(vec![q(0, 1)], e(1, &[0]));
        let b = DipoleChain::dirac(vec![q(0, 1)], Multivector::scalar(1, q(1, 1)));
        assert!(a.add(&b).is_err());
    }
}
