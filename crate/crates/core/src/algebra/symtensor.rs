use crate::error::{Error, Result};
use crate::scalar::{cmp_slices, norm_f64, Scalar};
use std::cmp::Ordering;

/// u₁∘…∘u_s, stored as a sorted multiset of direction vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTensor<S> {
    pub n: usize,
    factors: Vec<Vec<S>>,
}

impl<S: Scalar> SymTensor<S> {
    pub fn one(n: usize) -> Self {
        SymTensor { n, factors: Vec::new() }
    }

    pub fn from_factors(n: usize, mut factors: Vec<Vec<S>>) -> Self {
        factors.sort_by(|a, b| cmp_slices(a, b));
        SymTensor { n, factors }
    }

    pub fn vector(v: Vec<S>) -> Self {
        SymTensor { n: v.len(), factors: vec![v] }
    }

    pub fn degree(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[Vec<S>] {
        &self.factors
    }

    pub fn product(&self, o: &Self) -> Result<Self> {
        if self.n != o.n {
            return Err(Error::Dimension(format!("symmetric product of ℝ^{} and ℝ^{}", self.n, o.n)));
        }
        let mut f = self.factors.clone();
        f.extend(o.factors.iter().cloned());
        Ok(Self::from_factors(self.n, f))
    }

    /// ‖σ‖ = ‖u₁‖⋯‖u_s‖.
    pub fn norm(&self) -> f64 {
        self.factors.iter().map(|u| norm_f64(u)).product()
    }

    /// Splits off a scalar so that every factor has leading coordinate 1.
    /// Returns None when some factor vanishes.
    pub fn normalized(&self) -> Option<(Self, S)> {
        let mut c = S::one();
        let mut out = Vec::with_capacity(self.factors.len());
        for u in &self.factors {
            let lead = u.iter().find(|x| !x.is_zero())?.clone();
            out.push(u.iter().map(|x| x.clone() / lead.clone()).collect());
            c = c * lead;
        }
        Some((Self::from_factors(self.n, out), c))
    }

    pub fn embed(&self, shift: usize, new_n: usize) -> Self {
        let f = self
            .factors
            .iter()
            .map(|u| {
                let mut v = vec![S::zero(); new_n];
                for (i, x) in u.iter().enumerate() {
                    v[i + shift] = x.clone();
                }
                v
            })
            .collect();
        Self::from_factors(new_n, f)
    }

    pub fn map_factors(&self, new_n: usize, f: impl Fn(&[S]) -> Vec<S>) -> Self {
        Self::from_factors(new_n, self.factors.iter().map(|u| f(u)).collect())
    }

    pub fn total_cmp(&self, o: &Self) -> Ordering {
        self.factors.len().cmp(&o.factors.len()).then_with(|| {
            for (a, b) in self.factors.iter().zip(&o.factors) {
                match cmp_slices(a, b) {
                    Ordering::Equal => continue,
                    x => return x,
                }
            }
            Ordering::Equal
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, Q};

    #[test]
    fn commutative_and_unit() {
        let u = SymTensor::vector(vec![q(1, 1), q(2, 1)]);
        let v = SymTensor::vector(vec![q(0, 1), q(3, 1)]);
        assert_eq!(u.product(&v).unwrap(), v.product(&u).unwrap());
        assert_eq!(SymTensor::one(2).product(&u).unwrap(), u);
        assert_eq!(u.product(&v).unwrap().degree(), 2);
    }

    #[test]
    fn norm_is_product_of_factor_norms() {
        let u = SymTensor::vector(vec![3.0, 4.0]);
        let v = SymTensor::vector(vec![0.0, 2.0]);
        assert_eq!(u.product(&v).unwrap().norm(), 10.0);
    }

    #[test]
    fn normalization_moves_scale_out() {
        let u = SymTensor::vector(vec![q(0, 1), q(-2, 1), q(4, 1)]);
        let (s, c) = u.normalized().unwrap();
        assert_eq!(c, q(-2, 1));
        assert_eq!(s.factors()[0], vec![q(0, 1), q(1, 1), q(-2, 1)]);
        assert!(SymTensor::vector(vec![Q::from_integer(0.into())]).normalized().is_none());
    }

    #[test]
    fn dimension_mismatch() {
        let u = SymTensor::vector(vec![1.0, 2.0]);
        let v = SymTensor::vector(vec![1.0]);
        assert!(u.product(&v).is_err());
    }
}
