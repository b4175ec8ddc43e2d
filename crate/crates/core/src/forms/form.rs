use super::expr::{Expr, BOUND_BASE};
use crate::algebra::{blade_of, indices, lex_blades, wedge_sign, Blade, Multivector, SymTensor};
use crate::error::{parse_err, Error, Result};
use crate::scalar::Scalar;
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Declared class for forms with arbitrarily many bounded derivatives on boxes.
pub const SMOOTH: u32 = u32::MAX;

/// A differential k-form on ℝⁿ with expression coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Form {
    pub n: usize,
    pub k: usize,
    pub r: u32,
    coeffs: BTreeMap<Blade, Expr>,
}

fn signed(s: i32, e: Expr) -> Expr {
    if s > 0 {
        e
    } else {
        e.neg()
    }
}

impl Form {
    pub fn zero(n: usize, k: usize) -> Self {
        Form { n, k, r: SMOOTH, coeffs: BTreeMap::new() }
    }

    pub fn with_class(mut self, r: u32) -> Self {
        self.r = r;
        self
    }

    /// f dx_{i1}∧… with 0-based indices in increasing order.
    pub fn term(n: usize, idx: &[usize], f: Expr) -> Self {
        let mut w = Form::zero(n, idx.len());
        w.add_term(blade_of(idx), f);
        w
    }

    pub fn function(n: usize, f: Expr) -> Self {
        Self::term(n, &[], f)
    }

    pub fn volume(n: usize) -> Self {
        Self::term(n, &(0..n).collect::<Vec<_>>(), Expr::one())
    }

    pub fn get(&self, b: Blade) -> Expr {
        self.coeffs.get(&b).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Blade, &Expr)> {
        self.coeffs.iter()
    }

    pub fn add_term(&mut self, b: Blade, f: Expr) {
        let v = self.get(b).add(&f);
        if v.is_zero() {
            self.coeffs.remove(&b);
        } else {
            self.coeffs.insert(b, v);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, o: &Form) -> Form {
        let mut w = self.clone();
        w.r = self.r.min(o.r);
        for (b, f) in &o.coeffs {
            w.add_term(*b, f.clone());
        }
        w
    }

    pub fn sub(&self, o: &Form) -> Form {
        self.add(&o.scale(&Expr::int(-1)))
    }

    pub fn scale(&self, c: &Expr) -> Form {
        let mut w = Form::zero(self.n, self.k).with_class(self.r);
        for (b, f) in &self.coeffs {
            w.add_term(*b, f.mul(c));
        }
        w
    }

    pub fn map_coeffs(&self, f: impl Fn(&Expr) -> Expr) -> Form {
        let mut w = Form::zero(self.n, self.k).with_class(self.r);
        for (b, e) in &self.coeffs {
            w.add_term(*b, f(e));
        }
        w
    }

    fn need(&self, r: u32) -> Result<()> {
        if self.r < r {
            Err(Error::Class { need: r, have: self.r })
        } else {
            Ok(())
        }
    }

    /// The covector ω(p).
    pub fn at<S: Scalar>(&self, p: &[S]) -> Multivector<S> {
        let mut m = Multivector::zero(self.n, self.k);
        for (b, f) in &self.coeffs {
            m.add_term(*b, f.eval(p));
        }
        m
    }

    /// ω(p;α) = Σ_I ω_I(p) α_I.
    pub fn eval<S: Scalar>(&self, p: &[S], a: &Multivector<S>) -> Result<S> {
        if a.k != self.k || a.n != self.n {
            return Err(Error::Grade(format!(
                "{}-form on ℝ^{} paired with {}-vector in ℝ^{}",
                self.k, self.n, a.k, a.n
            )));
        }
        let mut s = S::zero();
        for (b, x) in a.terms() {
            if let Some(f) = self.coeffs.get(b) {
                s = s + f.eval(p) * x.clone();
            }
        }
        Ok(s)
    }

    /// Coefficientwise D_u.
    pub fn directional<S: Scalar>(&self, u: &[S]) -> Form {
        let ue: Vec<Expr> = u.iter().map(Expr::from_scalar).collect();
        self.map_coeffs(|f| {
            ue.iter().enumerate().fold(Expr::zero(), |acc, (j, c)| if c.is_zero() { acc } else { acc.add(&c.mul(&f.diff(j))) })
        })
        .with_class(self.r.saturating_sub(1))
    }

    /// (L_{u_s}⋯L_{u_1} ω)(p;α) for constant directions.
    pub fn eval_dipole<S: Scalar>(&self, p: &[S], sigma: &SymTensor<S>, a: &Multivector<S>) -> Result<S> {
        self.need(sigma.degree() as u32)?;
        let mut w = self.clone();
        for u in sigma.factors() {
            w = w.directional(u);
        }
        w.eval(p, a)
    }

    /// Exterior derivative: (dω)_J = Σ_{j∈J} sign · ∂_j ω_{J∖j}.
    pub fn d(&self) -> Result<Form> {
        self.need(1)?;
        let mut w = Form::zero(self.n, self.k + 1).with_class(self.r.saturating_sub(1));
        if self.k >= self.n {
            return Ok(w);
        }
        for (b, f) in &self.coeffs {
            for j in 0..self.n {
                if b >> j & 1 == 1 {
                    continue;
                }
                let s = wedge_sign(1 << j, *b);
                w.add_term(b | 1 << j, signed(s, f.diff(j)));
            }
        }
        Ok(w)
    }

    /// i_X ω with X given by n component expressions.
    pub fn interior(&self, x: &[Expr]) -> Result<Form> {
        if self.k == 0 {
            return Ok(Form::zero(self.n, 0).with_class(self.r));
        }
        let mut w = Form::zero(self.n, self.k - 1).with_class(self.r);
        for (b, f) in &self.coeffs {
            for i in indices(*b) {
                if x[i].is_zero() {
                    continue;
                }
                let rest = b & !(1 << i);
                let s = wedge_sign(1 << i, rest);
                w.add_term(rest, signed(s, x[i].mul(f)));
            }
        }
        Ok(w)
    }

    /// X♭ ∧ ω.
    pub fn flat_wedge(&self, x: &[Expr]) -> Form {
        let mut w = Form::zero(self.n, self.k + 1).with_class(self.r);
        for (b, f) in &self.coeffs {
            for (i, xi) in x.iter().enumerate() {
                if b >> i & 1 == 1 || xi.is_zero() {
                    continue;
                }
                let s = wedge_sign(1 << i, *b);
                w.add_term(b | 1 << i, signed(s, xi.mul(f)));
            }
        }
        w
    }

    /// Cartan's formula L_X = i_X d + d i_X.
    pub fn lie(&self, x: &[Expr]) -> Result<Form> {
        self.need(1)?;
        let a = self.d()?.interior(x)?;
        let b = self.interior(x)?.with_class(self.r).d()?;
        Ok(a.add(&b).with_class(self.r.saturating_sub(1)))
    }

    pub fn wedge(&self, o: &Form) -> Form {
        let mut w = Form::zero(self.n, self.k + o.k).with_class(self.r.min(o.r));
        for (a, f) in &self.coeffs {
            for (b, g) in &o.coeffs {
                let s = wedge_sign(*a, *b);
                if s != 0 {
                    w.add_term(a | b, signed(s, f.mul(g)));
                }
            }
        }
        w
    }

    /// F^*ω for F: ℝᵐ → ℝⁿ given by n expressions in m variables.
    pub fn pullback(&self, f: &[Expr], m: usize) -> Form {
        let jac: Vec<Vec<Expr>> = f.iter().map(|fi| (0..m).map(|j| fi.diff(j)).collect()).collect();
        let mut w = Form::zero(m, self.k).with_class(self.r);
        for (b, g) in &self.coeffs {
            let gi = g.subst(f);
            let rows = indices(*b);
            for cols in lex_blades(m, self.k) {
                let c = indices(cols);
                let det = minor(&jac, &rows, &c);
                if !det.is_zero() {
                    w.add_term(cols, gi.mul(&det));
                }
            }
        }
        w
    }

    /// Straight-line homotopy operator toward q:
    /// (H ω)_I(x) = ∫₀¹ t^{k−1} Σ_j ± (x_j − q_j) ω_{j∪I}(q + t(x − q)) dt.
    /// It is dual to the cone operator: ∫_{κ(J)} ω = ∫_J H ω.
    pub fn homotopy<S: Scalar>(&self, q: &[S]) -> Form {
        if self.k == 0 {
            return Form::zero(self.n, 0);
        }
        let tv = self.coeffs.values().map(|e| e.fresh_bound()).max().unwrap_or(BOUND_BASE);
        let t = Expr::var(tv);
        let qe: Vec<Expr> = q.iter().map(Expr::from_scalar).collect();
        let dx: Vec<Expr> = (0..self.n).map(|j| Expr::var(j).sub(&qe[j])).collect();
        let path: Vec<Expr> = (0..self.n).map(|j| qe[j].add(&t.mul(&dx[j]))).collect();
        let tk = t.pow(self.k as u32 - 1);
        let mut acc: BTreeMap<Blade, Expr> = BTreeMap::new();
        for (b, f) in &self.coeffs {
            let fp = f.subst(&path);
            for j in indices(*b) {
                let rest = b & !(1 << j);
                let s = wedge_sign(1 << j, rest);
                let term = signed(s, dx[j].mul(&fp));
                let e = acc.entry(rest).or_insert_with(Expr::zero);
                *e = e.add(&term);
            }
        }
        let mut w = Form::zero(self.n, self.k - 1).with_class(self.r);
        for (b, body) in acc {
            w.add_term(b, Expr::integral(tv, tk.mul(&body)));
        }
        w
    }

    /// Largest total polynomial degree among coefficients.
    pub fn degree(&self) -> Option<u32> {
        self.coeffs.values().try_fold(0, |m, e| Some(m.max(e.degree()?)))
    }

    /// Upper estimate of ‖ω‖_{B^r} over a box: for each derivative order
    /// j ≤ r, the supremum of the Frobenius norm of D^j ω, which dominates
    /// the comass of every directional derivative.
    pub fn br_upper(&self, r: u32, bx: &[(f64, f64)], depth: u32) -> f64 {
        let per_axis = 1usize << depth;
        let cells = per_axis.pow(self.n as u32);
        let mut best = 0.0f64;
        for j in 0..=r.min(16) {
            let layer = self.derivative_tuples(j as usize);
            if layer.is_empty() {
                break;
            }
            for c in 0..cells {
                let mut sub = Vec::with_capacity(self.n);
                let mut rem = c;
                for &(lo, hi) in bx.iter().take(self.n) {
                    let i = rem % per_axis;
                    rem /= per_axis;
                    let h = (hi - lo) / per_axis as f64;
                    sub.push((lo + h * i as f64, lo + h * (i + 1) as f64));
                }
                let s: f64 = layer
                    .iter()
                    .map(|(_, _, e, mult)| {
                        let (lo, hi) = e.eval_interval(&sub);
                        *mult as f64 * lo.abs().max(hi.abs()).powi(2)
                    })
                    .sum();
                best = best.max(s.sqrt());
            }
        }
        best
    }

    fn derivative_tuples(&self, j: usize) -> Vec<(Blade, Vec<usize>, Expr, u64)> {
        let mut cur: Vec<(Blade, Vec<usize>, Expr, u64)> = self.coeffs.iter().map(|(b, e)| (*b, vec![], e.clone(), 1)).collect();
        for _ in 0..j {
            let mut nx = Vec::new();
            for (b, idx, e, _) in cur {
                let start = idx.last().copied().unwrap_or(0);
                for v in start..self.n {
                    let mut ni = idx.clone();
                    ni.push(v);
                    let de = e.diff(v);
                    if !de.is_zero() {
                        let m = multinomial(&ni);
                        nx.push((b, ni, de, m));
                    }
                }
            }
            cur = nx;
        }
        cur
    }

    /// `form n= k= r=` followed by `F <i,j,..|-> <expr>` lines.
    pub fn to_text(&self) -> String {
        let r = if self.r == SMOOTH { "inf".to_string() } else { self.r.to_string() };
        let mut s = format!("form n={} k={} r={}\n", self.n, self.k, r);
        for (b, e) in &self.coeffs {
            let idx = indices(*b);
            let tag = if idx.is_empty() {
                "-".to_string()
            } else {
                idx.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
            };
            let _ = writeln!(s, "F {} {}", tag, e);
        }
        s
    }

    pub fn parse(text: &str) -> Result<Form> {
        let mut form: Option<Form> = None;
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            let ln = ln + 1;
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("form") {
                let (mut n, mut k, mut r) = (None, None, SMOOTH);
                for kv in rest.split_whitespace() {
                    let (key, val) = kv.split_once('=').ok_or_else(|| parse_err(ln, format!("expected key=value, got `{}`", kv)))?;
                    let bad = || parse_err(ln, format!("bad value for {}", key));
                    match key {
                        "n" => n = Some(val.parse::<usize>().map_err(|_| bad())?),
                        "k" => k = Some(val.parse::<usize>().map_err(|_| bad())?),
                        "r" => r = if val == "inf" { SMOOTH } else { val.parse().map_err(|_| bad())? },
                        _ => return Err(parse_err(ln, format!("unknown header key `{}`", key))),
                    }
                }
                let n = n.ok_or_else(|| parse_err(ln, "missing n"))?;
                let k = k.ok_or_else(|| parse_err(ln, "missing k"))?;
                if k > n || n > BOUND_BASE {
                    return Err(parse_err(ln, "need k <= n <= 64"));
                }
                form = Some(Form::zero(n, k).with_class(r));
                continue;
            }
            let f = form.as_mut().ok_or_else(|| parse_err(ln, "missing `form` header"))?;
            let rest = line.strip_prefix("F ").ok_or_else(|| parse_err(ln, "expected `F <index> <expr>`"))?.trim_start();
            let (tag, ex) = rest.split_once(char::is_whitespace).ok_or_else(|| parse_err(ln, "missing expression"))?;
            let idx: Vec<usize> = if tag == "-" {
                vec![]
            } else {
                tag.split(',')
                    .map(|t| t.parse::<usize>().ok().filter(|&i| i >= 1 && i <= f.n).map(|i| i - 1))
                    .collect::<Option<_>>()
                    .ok_or_else(|| parse_err(ln, format!("bad index `{}`", tag)))?
            };
            if idx.len() != f.k || idx.windows(2).any(|w| w[0] >= w[1]) {
                return Err(parse_err(ln, "index must be k strictly increasing entries"));
            }
            let e = Expr::parse(ex).map_err(|e| match e {
                Error::Parse { msg, .. } => parse_err(ln, msg),
                other => other,
            })?;
            if let Some(v) = max_var(&e) {
                if v >= f.n {
                    return Err(parse_err(ln, format!("variable x{} exceeds n = {}", v + 1, f.n)));
                }
            }
            f.add_term(blade_of(&idx), e);
        }
        form.ok_or_else(|| parse_err(0, "empty form file"))
    }
}

fn max_var(e: &Expr) -> Option<usize> {
    use super::expr::Node;
    match e.node() {
        Node::Const(..) => None,
        Node::Var(i) => Some(*i),
        Node::Add(a, b) | Node::Mul(a, b) => max_var(a).max(max_var(b)),
        Node::Pow(a, _) | Node::Neg(a) | Node::Sin(a) | Node::Cos(a) | Node::Exp(a) => max_var(a),
        Node::Integral { body, .. } => max_var(body),
    }
}

/// Number of ordered tuples with the multiset of entries of a sorted tuple.
fn multinomial(sorted: &[usize]) -> u64 {
    let fact = |n: usize| (1..=n as u64).product::<u64>();
    let mut m = fact(sorted.len());
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        m /= fact(j - i);
        i = j;
    }
    m
}

/// Determinant of the submatrix with given rows and columns (Laplace).
fn minor(m: &[Vec<Expr>], rows: &[usize], cols: &[usize]) -> Expr {
    match rows.len() {
        0 => Expr::one(),
        1 => m[rows[0]][cols[0]].clone(),
        _ => {
            let mut acc = Expr::zero();
            for (c, &col) in cols.iter().enumerate() {
                let e = &m[rows[0]][col];
                if e.is_zero() {
                    continue;
                }
                let rest: Vec<usize> = cols.iter().enumerate().filter(|(i, _)| *i != c).map(|(_, &x)| x).collect();
                let t = e.mul(&minor(m, &rows[1..], &rest));
                acc = if c % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
            }
            acc
        }
    }
}
