use super::multivector::{grade_of, indices, Blade, Multivector};
use crate::scalar::Scalar;
use nalgebra::DMatrix;
use std::collections::BTreeMap;

/// An interval known to contain a nonnegative quantity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bracket {
    pub lb: f64,
    pub ub: f64,
}

impl Bracket {
    pub fn exact(x: f64) -> Self {
        Bracket { lb: x, ub: x }
    }
    pub fn gap(&self) -> f64 {
        self.ub - self.lb
    }
    pub fn is_exact(&self) -> bool {
        self.lb == self.ub
    }
    pub fn scale(&self, c: f64) -> Self {
        Bracket { lb: self.lb * c.abs(), ub: self.ub * c.abs() }
    }
}

/// Whether every k-vector in ℝⁿ is simple.
pub fn always_simple(n: usize, k: usize) -> bool {
    n <= 3 || k <= 1 || k + 1 >= n
}

/// Mass of a k-vector: exact when every element is simple or when the
/// grade is 2 or n−2; otherwise [Euclidean norm, greedy decomposition].
pub fn mass<S: Scalar>(a: &Multivector<S>) -> Bracket {
    let (n, k) = (a.n, a.k);
    if a.is_zero() {
        return Bracket::exact(0.0);
    }
    if always_simple(n, k) {
        return Bracket::exact(a.norm());
    }
    if k == 2 {
        return Bracket::exact(bivector_mass(a));
    }
    if k + 2 == n {
        return Bracket::exact(bivector_mass(&a.hodge()));
    }
    let lb = a.norm();
    let ub = greedy_simple(a).max(lb);
    Bracket { lb, ub }
}

/// Half the sum of the singular values of the antisymmetric matrix of a.
fn bivector_mass<S: Scalar>(a: &Multivector<S>) -> f64 {
    let n = a.n;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for (b, c) in a.terms() {
        let ij = indices(*b);
        let v = c.to_f64();
        m[(ij[0], ij[1])] = v;
        m[(ij[1], ij[0])] = -v;
    }
    0.5 * m.singular_values().iter().sum::<f64>()
}

/// Groups terms sharing a (k−1)-face: e_J∧(Σ a_i e_i) is simple with mass
/// |(a_i)|. Repeatedly takes the heaviest group.
fn greedy_simple<S: Scalar>(a: &Multivector<S>) -> f64 {
    let mut left: BTreeMap<Blade, f64> = a.terms().map(|(b, c)| (*b, c.to_f64())).collect();
    let mut total = 0.0;
    while !left.is_empty() {
        let mut groups: BTreeMap<Blade, f64> = BTreeMap::new();
        for (b, c) in &left {
            for i in indices(*b) {
                *groups.entry(b & !(1 << i)).or_default() += c * c;
            }
        }
        let (face, w) = groups
            .iter()
            .max_by(|x, y| x.1.total_cmp(y.1).then_with(|| y.0.cmp(x.0)))
            .map(|(f, w)| (*f, *w))
            .unwrap();
        total += w.sqrt();
        left.retain(|b, _| !(b & face == face && grade_of(b & !face) == 1));
    }
    total
}
