use crate::error::{Error, Result};
use crate::scalar::Scalar;
use std::collections::BTreeMap;

/// A basis blade e_{i1..ik} stored as a bitmask of 0-based axes.
pub type Blade = u64;

pub fn blade_of(idx: &[usize]) -> Blade {
    idx.iter().fold(0, |b, &i| b | (1u64 << i))
}

pub fn indices(b: Blade) -> Vec<usize> {
    (0..64).filter(|i| b >> i & 1 == 1).collect()
}

pub fn grade_of(b: Blade) -> usize {
    b.count_ones() as usize
}

/// Sign of e_a ∧ e_b relative to e_{a|b}; zero when they share an axis.
pub fn wedge_sign(a: Blade, b: Blade) -> i32 {
    if a & b != 0 {
        return 0;
    }
    let mut swaps = 0u32;
    let mut bb = b;
    while bb != 0 {
        let j = bb.trailing_zeros();
        swaps += (a >> j >> 1).count_ones();
        bb &= bb - 1;
    }
    if swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

/// All grade-k blades in ℝⁿ in lexicographic order of their index tuples.
pub fn lex_blades(n: usize, k: usize) -> Vec<Blade> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(blade_of(&idx));
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

pub fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r = 1usize;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

#[derive(Clone, Debug, PartialEq)]
pub struct Multivector<S> {
    pub n: usize,
    pub k: usize,
    coeffs: BTreeMap<Blade, S>,
}

impl<S: Scalar> Multivector<S> {
    pub fn zero(n: usize, k: usize) -> Self {
        Multivector { n, k, coeffs: BTreeMap::new() }
    }

    pub fn scalar(n: usize, c: S) -> Self {
        let mut m = Self::zero(n, 0);
        m.add_term(0, c);
        m
    }

    /// e_{i1} ∧ … ∧ e_{ik} with 0-based indices in any order.
    pub fn basis(n: usize, idx: &[usize]) -> Self {
        let mut m = Self::scalar(n, S::one());
        for &i in idx {
            m = m.wedge(&Self::vector(&unit::<S>(n, i))).unwrap();
        }
        m
    }

    pub fn vector(v: &[S]) -> Self {
        let mut m = Self::zero(v.len(), 1);
        for (i, x) in v.iter().enumerate() {
            m.add_term(1 << i, x.clone());
        }
        m
    }

    pub fn from_lex(n: usize, k: usize, c: &[S]) -> Result<Self> {
        let bl = lex_blades(n, k);
        if bl.len() != c.len() {
            return Err(Error::Dimension(format!(
                "expected {} coefficients for grade {} in dimension {}, got {}",
                bl.len(),
                k,
                n,
                c.len()
            )));
        }
        let mut m = Self::zero(n, k);
        for (b, x) in bl.into_iter().zip(c) {
            m.add_term(b, x.clone());
        }
        Ok(m)
    }

    pub fn to_lex(&self) -> Vec<S> {
        lex_blades(self.n, self.k).into_iter().map(|b| self.get(b)).collect()
    }

    pub fn get(&self, b: Blade) -> S {
        self.coeffs.get(&b).cloned().unwrap_or_else(S::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Blade, &S)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, b: Blade, c: S) {
        debug_assert_eq!(grade_of(b), self.k);
        if c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&b) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.coeffs.remove(&b);
                } else {
                    *v = s;
                }
            }
            None => {
                self.coeffs.insert(b, c);
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert!(self.n == o.n && self.k == o.k);
        let mut m = self.clone();
        for (b, c) in &o.coeffs {
            m.add_term(*b, c.clone());
        }
        m
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-S::one()))
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut m = Self::zero(self.n, self.k);
        if c.is_zero() {
            return m;
        }
        for (b, x) in &self.coeffs {
            m.add_term(*b, x.clone() * c.clone());
        }
        m
    }

    pub fn wedge(&self, o: &Self) -> Result<Self> {
        if self.n != o.n {
            return Err(Error::Dimension(format!("wedge of ℝ^{} and ℝ^{} elements", self.n, o.n)));
        }
        let mut m = Self::zero(self.n, self.k + o.k);
        if self.k + o.k > self.n {
            return Ok(m);
        }
        for (a, x) in &self.coeffs {
            for (b, y) in &o.coeffs {
                let s = wedge_sign(*a, *b);
                if s == 0 {
                    continue;
                }
                let v = x.clone() * y.clone();
                m.add_term(a | b, if s > 0 { v } else { -v });
            }
        }
        Ok(m)
    }

    /// Euclidean inner product in the orthonormal blade basis.
    pub fn inner(&self, o: &Self) -> S {
        let mut s = S::zero();
        for (b, x) in &self.coeffs {
            if let Some(y) = o.coeffs.get(b) {
                s = s + x.clone() * y.clone();
            }
        }
        s
    }

    pub fn norm2(&self) -> S {
        self.inner(self)
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.values().map(|x| x.to_f64().powi(2)).sum::<f64>().sqrt()
    }

    pub fn l1(&self) -> f64 {
        self.coeffs.values().map(|x| x.to_f64().abs()).sum()
    }

    /// Λ^k L: v1∧…∧vk ↦ Lv1∧…∧Lvk for an m×n matrix given by rows.
    pub fn apply_linear(&self, rows: &[Vec<S>]) -> Self {
        let m = rows.len();
        let col = |j: usize| -> Vec<S> { rows.iter().map(|r| r[j].clone()).collect() };
        let mut out = Multivector::zero(m, self.k);
        for (b, x) in &self.coeffs {
            let mut w = Multivector::scalar(m, x.clone());
            for j in indices(*b) {
                w = w.wedge(&Multivector::vector(&col(j))).unwrap();
            }
            out = out.add(&w);
        }
        out
    }

    /// The derivation induced by A: Σ v1∧…∧Avi∧…∧vk.
    pub fn derivation(&self, rows: &[Vec<S>]) -> Self {
        let n = self.n;
        let mut out = Multivector::zero(n, self.k);
        for (b, x) in &self.coeffs {
            let idx = indices(*b);
            for slot in 0..idx.len() {
                let mut w = Multivector::scalar(n, x.clone());
                for (t, &j) in idx.iter().enumerate() {
                    let v = if t == slot {
                        rows.iter().map(|r| r[j].clone()).collect()
                    } else {
                        unit::<S>(n, j)
                    };
                    w = w.wedge(&Multivector::vector(&v)).unwrap();
                }
                out = out.add(&w);
            }
        }
        out
    }

    /// Re-seat into ℝ^{new_n} with axes shifted up by `shift`.
    pub fn embed(&self, shift: usize, new_n: usize) -> Self {
        let mut m = Multivector::zero(new_n, self.k);
        for (b, x) in &self.coeffs {
            m.add_term(b << shift, x.clone());
        }
        m
    }

    /// Hodge star: e_I ↦ sign(I, Iᶜ) e_{Iᶜ}. Preserves norm and simplicity.
    pub fn hodge(&self) -> Self {
        let full: Blade = if self.n == 64 { !0 } else { (1u64 << self.n) - 1 };
        let mut m = Multivector::zero(self.n, self.n - self.k);
        for (b, x) in &self.coeffs {
            let c = full & !b;
            let s = wedge_sign(*b, c);
            m.add_term(c, if s > 0 { x.clone() } else { -x.clone() });
        }
        m
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Multivector<T> {
        let mut m = Multivector::zero(self.n, self.k);
        for (b, x) in &self.coeffs {
            m.add_term(*b, f(x));
        }
        m
    }

    /// `A n k c1 … cC`
    pub fn serialize(&self) -> String {
        let mut s = format!("A {} {}", self.n, self.k);
        for c in self.to_lex() {
            s.push(' ');
            s.push_str(&c.fmt_value());
        }
        s
    }

    pub fn parse(line: &str) -> Result<Self> {
        let mut it = line.split_whitespace();
        let bad = |m: &str| crate::error::parse_err(0, m);
        if it.next() != Some("A") {
            return Err(bad("multivector must start with A"));
        }
        let n: usize = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("bad n"))?;
        let k: usize = it.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("bad k"))?;
        let c: Option<Vec<S>> = it.map(S::parse_value).collect();
        Self::from_lex(n, k, &c.ok_or_else(|| bad("bad coefficient"))?)
    }
}

pub fn unit<S: Scalar>(n: usize, i: usize) -> Vec<S> {
    (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect()
}

/// A k-covector; pairs with k-vectors through the dual basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Covector<S>(pub Multivector<S>);

impl<S: Scalar> Covector<S> {
    pub fn from_vector(v: &[S]) -> Self {
        Covector(Multivector::vector(v))
    }

    pub fn pair(&self, a: &Multivector<S>) -> S {
        self.0.inner(a)
    }

    pub fn wedge(&self, o: &Covector<S>) -> Result<Covector<S>> {
        Ok(Covector(self.0.wedge(&o.0)?))
    }

    /// w ⌟ a, the adjoint of η ↦ w∧η: ⟨w∧η, a⟩ = ⟨η, w⌟a⟩.
    pub fn interior(&self, a: &Multivector<S>) -> Result<Multivector<S>> {
        let w = &self.0;
        if w.n != a.n {
            return Err(Error::Dimension(format!("interior of ℝ^{} covector on ℝ^{} vector", w.n, a.n)));
        }
        if a.k == 0 || w.k > a.k {
            return Err(Error::Grade(format!("cannot contract a grade-{} covector into a grade-{} vector", w.k, a.k)));
        }
        let mut m = Multivector::zero(a.n, a.k - w.k);
        for (j, x) in w.terms() {
            for (i, y) in a.terms() {
                if j & i != *j {
                    continue;
                }
                let rest = i & !j;
                let s = wedge_sign(*j, rest);
                let v = x.clone() * y.clone();
                m.add_term(rest, if s > 0 { v } else { -v });
            }
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, Q};

    fn e(n: usize, idx: &[usize]) -> Multivector<Q> {
        Multivector::basis(n, idx)
    }

    #[test]
    fn basis_products() {
        assert_eq!(e(3, &[0]).wedge(&e(3, &[1])).unwrap(), e(3, &[0, 1]));
        assert!(e(3, &[0]).wedge(&e(3, &[0])).unwrap().is_zero());
        let s = e(3, &[0]).add(&e(3, &[1]));
        assert_eq!(s.wedge(&e(3, &[1])).unwrap(), e(3, &[0, 1]));
        assert_eq!(e(3, &[1, 0]), e(3, &[0, 1]).scale(&q(-1, 1)));
    }

    #[test]
    fn wedge_dimension_error() {
        assert!(matches!(e(2, &[0]).wedge(&e(3, &[0])), Err(Error::Dimension(_))));
    }

    #[test]
    fn interior_examples() {
        let e1 = Covector(e(3, &[0]));
        assert_eq!(e1.interior(&e(3, &[0, 1])).unwrap(), e(3, &[1]));
        assert!(e1.interior(&e(3, &[1, 2])).unwrap().is_zero());
        let w = Covector(e(3, &[0]).add(&e(3, &[2])));
        assert_eq!(w.interior(&e(3, &[0, 1])).unwrap(), e(3, &[1]));
        assert!(matches!(e1.interior(&Multivector::scalar(3, q(1, 1))), Err(Error::Grade(_))));
    }

    #[test]
    fn lex_order_and_count() {
        let b = lex_blades(4, 2);
        let want: Vec<Blade> = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]].iter().map(|i| blade_of(i)).collect();
        assert_eq!(b, want);
        assert_eq!(lex_blades(5, 3).len(), binom(5, 3));
        assert_eq!(lex_blades(3, 0), vec![0]);
    }

    #[test]
    fn serialization_round_trip() {
        let m = Multivector::from_lex(3, 2, &[q(1, 2), q(0, 1), q(-3, 1)]).unwrap();
        let s = m.serialize();
        assert_eq!(s, "A 3 2 1/2 0 -3");
        assert_eq!(Multivector::<Q>::parse(&s).unwrap(), m);
    }

    #[test]
    fn linear_action_on_top_grade_is_determinant() {
        let rows = vec![vec![q(2, 1), q(1, 1)], vec![q(3, 1), q(5, 1)]];
        let top = e(2, &[0, 1]).apply_linear(&rows);
        assert_eq!(top.get(0b11), q(7, 1));
    }
}
