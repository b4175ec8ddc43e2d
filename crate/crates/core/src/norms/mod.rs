//! Certified brackets for B^r norms of Dirac and dipole chains.
//!
//! Lower bounds come from explicit test forms of bounded B^r norm (an LP
//! over form values at the support for r = 1); upper bounds from explicit
//! decompositions into masses, differences and dipoles.

mod lower;
mod polytope;
mod upper;

pub use lower::{lp_lower, test_form_lower, LowerCert, TestKind};
pub use polytope::{default_facets, DualBall};
pub use upper::{decompose, Decomposition, Piece};

use crate::algebra::{mass, Multivector, SymTensor};
use crate::chains::DipoleChain;
use crate::error::Result;
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct NormOptions {
    /// Half-space count of the dual-ball polytope; default by (n, k).
    pub facets: Option<usize>,
    /// Step used to expand dipole terms into difference chains.
    pub h: f64,
}

impl Default for NormOptions {
    fn default() -> Self {
        NormOptions { facets: None, h: 1e-3 }
    }
}

#[derive(Clone, Debug)]
pub struct NormBracket {
    pub lb: f64,
    pub ub: f64,
    pub r: u32,
    pub lower: LowerCert,
    pub upper: Decomposition,
    /// Caveats, e.g. dipole terms expanded at a finite step.
    pub flags: Vec<String>,
}

impl NormBracket {
    pub fn gap(&self) -> f64 {
        self.ub - self.lb
    }

    /// Plain-text certificate.
    pub fn certificate(&self) -> String {
        let mut s = format!("bracket r={} lb={:?} ub={:?}\n", self.r, self.lb, self.ub);
        for f in &self.flags {
            s.push_str(&format!("flag {}\n", f));
        }
        s.push_str(&self.lower.to_text());
        s.push_str(&self.upper.to_text());
        s
    }
}

/// (p; u₁∘…∘u_s ⊗ α) ≈ Δ_{hu₁}⋯Δ_{hu_s}(p; α/h^s), a forward difference
/// with O(h) bias.
pub fn expand_dipoles(a: &DipoleChain<f64>, h: f64, max_order: usize) -> (DipoleChain<f64>, bool) {
    let mut out = DipoleChain::zero(a.n, a.k);
    let mut expanded = false;
    for (p, s, al) in a.terms() {
        let deg = s.degree();
        if deg <= max_order {
            out.push(p.to_vec(), s.clone(), al.clone());
            continue;
        }
        expanded = true;
        let scale = h.powi(deg as i32);
        for mask in 0..(1usize << deg) {
            let mut q = p.to_vec();
            for (i, u) in s.factors().iter().enumerate() {
                if mask >> i & 1 == 1 {
                    for (x, ui) in q.iter_mut().zip(u) {
                        *x += h * ui;
                    }
                }
            }
            let sign = if (deg - mask.count_ones() as usize) % 2 == 0 { 1.0 } else { -1.0 };
            out.push(q, SymTensor::one(a.n), al.scale(&(sign / scale)));
        }
    }
    (out, expanded)
}

/// Lower and upper bounds of ‖A‖_{B^r}.
pub fn br_bracket<S: Scalar>(a: &DipoleChain<S>, r: u32, opts: &NormOptions) -> Result<NormBracket> {
    let a = a.to_f64();
    let mut flags = Vec::new();
    if a.is_zero() {
        return Ok(NormBracket { lb: 0.0, ub: 0.0, r, lower: LowerCert::Zero, upper: Decomposition::empty(a.n, a.k), flags });
    }
    if r == 0 {
        let (ex, e) = expand_dipoles(&a, opts.h, 0);
        if e {
            flags.push(format!("dipole terms expanded at h = {:e}", opts.h));
        }
        let lb = ex.terms().map(|(_, _, al)| mass(al).lb).sum();
        let upper = Decomposition::masses(&ex);
        return Ok(NormBracket { lb, ub: upper.cost(), r, lower: LowerCert::Masses { value: lb }, upper, flags });
    }
    let (upper, up_expanded) = decompose(&a, r, opts)?;
    if up_expanded {
        flags.push(format!("terms of order > {} expanded at h = {:e} in the upper bound", r, opts.h));
    }
    let mut lower = test_form_lower(&a, r);
    if r == 1 {
        let (ex, e) = expand_dipoles(&a, opts.h, 0);
        let lp = lp_lower(&ex, opts)?;
        if e {
            flags.push(format!("dipole terms expanded at h = {:e} in the LP lower bound (O(h) bias)", opts.h));
        }
        if lp.value() >= lower.value() {
            lower = lp;
        }
    }
    let ub = upper.cost();
    Ok(NormBracket { lb: lower.value(), ub, r, lower, upper, flags })
}

/// Σ mass(α) over order-zero terms.
pub fn mass_bracket(a: &DipoleChain<f64>) -> (f64, f64) {
    a.terms().fold((0.0, 0.0), |(l, u), (_, _, al)| {
        let m = mass(al);
        (l + m.lb, u + m.ub)
    })
}

pub(crate) fn lex_coords(a: &Multivector<f64>) -> Vec<f64> {
    a.to_lex()
}

#[cfg(test)]
mod tests;
