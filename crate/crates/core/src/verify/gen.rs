use crate::algebra::{lex_blades, Multivector, SymTensor};
use crate::chains::{Cell, DipoleChain, SimplicialChain};
use crate::forms::{Expr, Form};
use crate::operators::VectorField;
use crate::scalar::{q, Scalar, Q};
use rand::Rng;

/// Small rational in [-range, range] with denominator ≤ den.
pub fn rat<R: Rng>(rng: &mut R, range: i64, den: i64) -> Q {
    let d = rng.gen_range(1..=den);
    q(rng.gen_range(-range * d..=range * d), d)
}

pub fn point<R: Rng>(rng: &mut R, n: usize) -> Vec<Q> {
    (0..n).map(|_| rat(rng, 2, 4)).collect()
}

pub fn multivector<R: Rng>(rng: &mut R, n: usize, k: usize) -> Multivector<Q> {
    let mut m = Multivector::zero(n, k);
    for b in lex_blades(n, k) {
        if rng.gen_bool(0.7) {
            m.add_term(b, rat(rng, 3, 3));
        }
    }
    if m.is_zero() {
        m.add_term(lex_blades(n, k)[0], q(1, 1));
    }
    m
}

pub fn symtensor<R: Rng>(rng: &mut R, n: usize, s: usize) -> SymTensor<Q> {
    SymTensor::from_factors(n, (0..s).map(|_| (0..n).map(|_| rat(rng, 2, 2)).collect()).collect())
}

/// Dirac chain with `terms` terms of dipole order ≤ `order`.
pub fn dirac<R: Rng>(rng: &mut R, n: usize, k: usize, terms: usize, order: usize) -> DipoleChain<Q> {
    let mut d = DipoleChain::zero(n, k);
    for _ in 0..terms {
        let s = rng.gen_range(0..=order);
        d.push(point(rng, n), symtensor(rng, n, s), multivector(rng, n, k));
    }
    d
}

/// Polynomial of total degree ≤ deg in n variables with a few monomials.
pub fn poly<R: Rng>(rng: &mut R, n: usize, deg: u32) -> Expr {
    let mut e = Expr::c(rat(rng, 2, 2));
    for _ in 0..3 {
        let mut m = Expr::c(rat(rng, 2, 3));
        let mut left = rng.gen_range(0..=deg);
        while left > 0 {
            let v = rng.gen_range(0..n);
            let p = rng.gen_range(1..=left);
            m = m.mul(&Expr::var(v).pow(p));
            left -= p;
        }
        e = e.add(&m);
    }
    e
}

pub fn poly_form<R: Rng>(rng: &mut R, n: usize, k: usize, deg: u32) -> Form {
    let mut w = Form::zero(n, k);
    for b in lex_blades(n, k) {
        let idx = crate::algebra::indices(b);
        w = w.add(&Form::term(n, &idx, poly(rng, n, deg)));
    }
    w
}

pub fn const_field<R: Rng>(rng: &mut R, n: usize) -> VectorField<Q> {
    VectorField::Constant((0..n).map(|_| rat(rng, 2, 3)).collect())
}

/// Polynomial vector field of degree ≤ deg.
pub fn poly_field<R: Rng>(rng: &mut R, n: usize, deg: u32) -> VectorField<Q> {
    VectorField::Expr((0..n).map(|_| poly(rng, n, deg)).collect())
}

/// Plain simplicial k-chain with nondegenerate random cells.
pub fn simplicial<R: Rng>(rng: &mut R, n: usize, k: usize, cells: usize) -> SimplicialChain<Q> {
    let mut c = SimplicialChain::zero(n, k);
    while c.cells.len() < cells {
        let verts: Vec<Vec<Q>> = (0..=k).map(|_| point(rng, n)).collect();
        let cell = Cell::plain(verts, rat(rng, 2, 2));
        if !cell.tangent().is_zero() && cell.weight != q(0, 1) {
            c.cells.push(cell);
        }
    }
    c
}

pub fn to_f64_point(p: &[Q]) -> Vec<f64> {
    p.iter().map(|x| x.to_f64()).collect()
}

/// A single order-s dipole term.
pub fn dipole_only<R: Rng>(rng: &mut R, n: usize, s: usize) -> DipoleChain<Q> {
    let k = rng.gen_range(0..n);
    let mut sig = symtensor(rng, n, s);
    while sig.normalized().is_none() {
        sig = symtensor(rng, n, s);
    }
    DipoleChain::dipole(point(rng, n), sig, multivector(rng, n, k))
}
