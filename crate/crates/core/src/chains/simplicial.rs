use super::dipole::DipoleChain;
use crate::algebra::{Multivector, SymTensor};
use crate::error::{Error, Result};
use crate::scalar::{add_vec, cmp_slices, norm_f64, q, scale_vec, sub_vec, Pt, Scalar, Q};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CellKind {
    /// τ̃ itself.
    Plain,
    /// E_X τ̃, one grade above τ.
    Monopole,
    /// P_X τ̃, same grade as τ.
    Dipole,
}

impl CellKind {
    pub fn tag(&self) -> &'static str {
        match self {
            CellKind::Plain => "plain",
            CellKind::Monopole => "monopole",
            CellKind::Dipole => "dipole",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        match s {
            "plain" => Some(CellKind::Plain),
            "monopole" => Some(CellKind::Monopole),
            "dipole" => Some(CellKind::Dipole),
            _ => None,
        }
    }
}

/// An oriented affine simplex with per-vertex field samples and a weight.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell<S> {
    pub kind: CellKind,
    pub verts: Vec<Vec<S>>,
    /// One sample per vertex; empty for plain cells.
    pub field: Vec<Vec<S>>,
    pub weight: S,
}

/// (v1−v0)∧…∧(vk−v0)/k!, the oriented k-volume element of a simplex.
pub fn tangent<S: Scalar>(verts: &[Vec<S>]) -> Multivector<S> {
    let n = verts[0].len();
    let mut t = Multivector::scalar(n, S::one());
    for (i, v) in verts.iter().enumerate().skip(1) {
        t = t.wedge(&Multivector::vector(&sub_vec(v, &verts[0]))).unwrap();
        t = t.scale(&(S::one() / S::from_i64(i as i64)));
    }
    t
}

pub fn diameter<S: Scalar>(verts: &[Vec<S>]) -> f64 {
    let mut d = 0.0f64;
    for i in 0..verts.len() {
        for j in i + 1..verts.len() {
            d = d.max(norm_f64(&sub_vec(&verts[i], &verts[j])));
        }
    }
    d
}

/// Σ λᵢ vᵢ.
pub fn affine_combo<S: Scalar>(verts: &[Vec<S>], bary: &[S]) -> Vec<S> {
    let mut p = vec![S::zero(); verts[0].len()];
    for (v, l) in verts.iter().zip(bary) {
        if !l.is_zero() {
            p = add_vec(&p, &scale_vec(l, v));
        }
    }
    p
}

impl<S: Scalar> Cell<S> {
    pub fn plain(verts: Vec<Vec<S>>, weight: S) -> Self {
        Cell { kind: CellKind::Plain, verts, field: vec![], weight }
    }

    pub fn with_field(kind: CellKind, verts: Vec<Vec<S>>, field: Vec<Vec<S>>, weight: S) -> Self {
        Cell { kind, verts, field, weight }
    }

    pub fn dim(&self) -> usize {
        self.verts.len() - 1
    }

    pub fn grade(&self) -> usize {
        match self.kind {
            CellKind::Monopole => self.dim() + 1,
            _ => self.dim(),
        }
    }

    pub fn n(&self) -> usize {
        self.verts[0].len()
    }

    pub fn tangent(&self) -> Multivector<S> {
        tangent(&self.verts)
    }

    /// k-dimensional Hausdorff measure of the underlying simplex.
    pub fn volume(&self) -> f64 {
        self.tangent().norm()
    }

    pub fn field_at(&self, bary: &[S]) -> Vec<S> {
        affine_combo(&self.field, bary)
    }

    pub fn barycenter(&self) -> Vec<S> {
        let c = S::one() / S::from_i64(self.verts.len() as i64);
        let b = vec![c; self.verts.len()];
        affine_combo(&self.verts, &b)
    }

    /// Same cell on a sub-simplex given by barycentric vertex coordinates.
    pub fn sub_cell(&self, bary_verts: &[Vec<S>], weight: S) -> Cell<S> {
        Cell {
            kind: self.kind,
            verts: bary_verts.iter().map(|b| affine_combo(&self.verts, b)).collect(),
            field: if self.field.is_empty() {
                vec![]
            } else {
                bary_verts.iter().map(|b| affine_combo(&self.field, b)).collect()
            },
            weight,
        }
    }

    /// The face opposite vertex i (no sign applied).
    pub fn facet(&self, i: usize) -> Cell<S> {
        let drop = |v: &Vec<Vec<S>>| v.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| x.clone()).collect();
        Cell {
            kind: self.kind,
            verts: drop(&self.verts),
            field: if self.field.is_empty() { vec![] } else { drop(&self.field) },
            weight: self.weight.clone(),
        }
    }

    /// Sorts vertices into lexicographic order, absorbing the parity in the weight.
    pub fn canonical(mut self) -> Self {
        let m = self.verts.len();
        let mut perm: Vec<usize> = (0..m).collect();
        let mut odd = false;
        for i in 0..m {
            let mut best = i;
            for j in i + 1..m {
                if cmp_slices(&self.verts[perm[j]], &self.verts[perm[best]]) == Ordering::Less {
                    best = j;
                }
            }
            if best != i {
                perm.swap(i, best);
                odd = !odd;
            }
        }
        self.verts = perm.iter().map(|&i| self.verts[i].clone()).collect();
        if !self.field.is_empty() {
            self.field = perm.iter().map(|&i| self.field[i].clone()).collect();
        }
        if odd {
            self.weight = -self.weight;
        }
        self
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> Cell<T> {
        let mv = |v: &Vec<Vec<S>>| v.iter().map(|x| x.iter().map(f).collect()).collect();
        Cell { kind: self.kind, verts: mv(&self.verts), field: mv(&self.field), weight: f(&self.weight) }
    }

    /// Whether mass(X(v)∧α̂) = 1 with positive orientation at every vertex,
    /// α̂ the unit tangent of τ; the positivity check applies in codimension one.
    pub fn unit_orthogonal(&self, tol: f64) -> bool {
        if self.field.is_empty() {
            return false;
        }
        let t = self.tangent();
        let norm = t.norm();
        if norm == 0.0 {
            return false;
        }
        let codim1 = self.n() == self.dim() + 1;
        self.field.iter().all(|x| {
            let w = Multivector::vector(x).wedge(&t).unwrap();
            let m = crate::algebra::mass(&w).lb / norm;
            let pos = !codim1 || w.terms().next().is_some_and(|(_, c)| c.to_f64() > 0.0);
            (m - 1.0).abs() <= tol && pos
        })
    }
}

type CellKey<S> = (CellKind, Vec<Pt<S>>, Vec<Pt<S>>);

/// A finite sum of weighted oriented cells of one grade.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplicialChain<S> {
    pub n: usize,
    pub k: usize,
    pub cells: Vec<Cell<S>>,
}

impl<S: Scalar> SimplicialChain<S> {
    pub fn zero(n: usize, k: usize) -> Self {
        SimplicialChain { n, k, cells: vec![] }
    }

    /// The chain τ̃ of an oriented affine cell; zero when degenerate.
    pub fn representative(verts: Vec<Vec<S>>) -> Self {
        let n = verts[0].len();
        let k = verts.len() - 1;
        let mut c = Self::zero(n, k);
        if !tangent(&verts).is_zero() {
            c.cells.push(Cell::plain(verts, S::one()));
        }
        c
    }

    pub fn push(&mut self, cell: Cell<S>) -> Result<()> {
        if cell.grade() != self.k || cell.n() != self.n {
            return Err(Error::Grade(format!(
                "{} cell of grade {} in ℝ^{} added to a grade-{} chain in ℝ^{}",
                cell.kind.tag(),
                cell.grade(),
                cell.n(),
                self.k,
                self.n
            )));
        }
        if cell.kind != CellKind::Plain && cell.field.len() != cell.verts.len() {
            return Err(Error::Dimension("field needs one sample per vertex".into()));
        }
        if !cell.weight.is_zero() {
            self.cells.push(cell);
        }
        Ok(())
    }

    pub fn from_cells(n: usize, k: usize, cells: Vec<Cell<S>>) -> Result<Self> {
        let mut c = Self::zero(n, k);
        for x in cells {
            c.push(x)?;
        }
        Ok(c)
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        if self.n != o.n || self.k != o.k {
            return Err(Error::Grade("simplicial chains of different shape".into()));
        }
        let mut c = self.clone();
        c.cells.extend(o.cells.iter().cloned());
        Ok(c)
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut c = Self::zero(self.n, self.k);
        if s.is_zero() {
            return c;
        }
        c.cells = self.cells.iter().map(|x| Cell { weight: x.weight.clone() * s.clone(), ..x.clone() }).collect();
        c
    }

    /// Merges equal cells after sorting vertices; drops zero weights.
    pub fn canonicalize(&self) -> Self {
        let mut m: BTreeMap<CellKey<S>, Cell<S>> = BTreeMap::new();
        for c in &self.cells {
            let c = c.clone().canonical();
            let key: CellKey<S> =
                (c.kind, c.verts.iter().cloned().map(Pt).collect(), c.field.iter().cloned().map(Pt).collect());
            match m.get_mut(&key) {
                Some(x) => x.weight = x.weight.clone() + c.weight,
                None => {
                    m.insert(key, c);
                }
            }
        }
        SimplicialChain { n: self.n, k: self.k, cells: m.into_values().filter(|c| !c.weight.is_zero()).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.canonicalize().cells.is_empty()
    }

    /// Closed cells with nonzero weight; their union is the support.
    pub fn support(&self) -> Vec<Cell<S>> {
        self.canonicalize().cells
    }

    /// Σ |aᵢ|·H^dim(τᵢ).
    pub fn hausdorff(&self) -> f64 {
        self.cells.iter().map(|c| c.weight.to_f64().abs() * c.volume()).sum()
    }

    /// Classical facets for plain cells, ∂P_X τ̃ = P_X ∂τ̃ for dipole cells,
    /// and ∂E_X τ̃ = P_X τ̃ − E_X ∂τ̃ for monopole cells.
    pub fn boundary(&self) -> Result<Self> {
        if self.k == 0 {
            return Err(Error::Grade("boundary of a 0-chain".into()));
        }
        let mut out = Self::zero(self.n, self.k - 1);
        for c in &self.cells {
            if c.kind == CellKind::Monopole {
                out.cells.push(Cell { kind: CellKind::Dipole, ..c.clone() });
                if c.dim() == 0 {
                    continue;
                }
                for i in 0..c.verts.len() {
                    let mut f = c.facet(i);
                    if i % 2 == 0 {
                        f.weight = -f.weight;
                    }
                    out.cells.push(f);
                }
                continue;
            }
            for i in 0..c.verts.len() {
                let mut f = c.facet(i);
                if i % 2 == 1 {
                    f.weight = -f.weight;
                }
                out.cells.push(f);
            }
        }
        Ok(out.canonicalize())
    }

    /// One edgewise refinement of every cell into 2^dim halves.
    pub fn refine(&self) -> Self {
        let mut out = Self::zero(self.n, self.k);
        for c in &self.cells {
            let pieces = edgewise_pieces(c.dim());
            for bv in pieces.iter() {
                let bv: Vec<Vec<S>> = bv.iter().map(|b| b.iter().map(S::from_q).collect()).collect();
                out.cells.push(c.sub_cell(&bv, c.weight.clone()));
            }
        }
        out
    }

    /// Barycentric Riemann sum: cells refined to diameter ≤ 2^-depth, each
    /// piece replaced by its barycenter carrying the piece's volume element.
    pub fn pointize(&self, depth: u32) -> DipoleChain<S> {
        let mut out = DipoleChain::zero(self.n, self.k);
        for c in &self.cells {
            let target = 0.5f64.powi(depth as i32);
            let mut rounds = 0;
            let mut d = diameter(&c.verts);
            while d > target * (1.0 + 1e-12) && rounds < 40 {
                d /= 2.0;
                rounds += 1;
            }
            let mut cur = SimplicialChain { n: self.n, k: self.k, cells: vec![c.clone()] };
            for _ in 0..rounds {
                cur = cur.refine();
            }
            for piece in &cur.cells {
                let b = piece.barycenter();
                let t = piece.tangent().scale(&piece.weight);
                let m = S::one() / S::from_i64(piece.verts.len() as i64);
                let xb = if piece.field.is_empty() { vec![] } else { piece.field_at(&vec![m; piece.verts.len()]) };
                match piece.kind {
                    CellKind::Plain => out.push(b, SymTensor::one(self.n), t),
                    CellKind::Dipole => out.push(b, SymTensor::vector(xb), t),
                    CellKind::Monopole => {
                        let a = Multivector::vector(&xb).wedge(&t).unwrap();
                        out.push(b, SymTensor::one(self.n), a)
                    }
                }
            }
        }
        out
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> SimplicialChain<T> {
        SimplicialChain { n: self.n, k: self.k, cells: self.cells.iter().map(|c| c.map_scalar(f)).collect() }
    }

    pub fn to_f64(&self) -> SimplicialChain<f64> {
        self.map_scalar(|x| x.to_f64())
    }
}

/// Barycentric vertex lists of the 2^m pieces of the edgewise subdivision
/// of an m-simplex, each oriented like the parent.
pub fn edgewise_pieces(m: usize) -> Arc<Vec<Vec<Vec<Q>>>> {
    static CACHE: OnceLock<Mutex<BTreeMap<usize, Arc<Vec<Vec<Vec<Q>>>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    if let Some(r) = cache.lock().unwrap().get(&m) {
        return r.clone();
    }
    // Kuhn simplices of [0,2]^m inside 2 ≥ y1 ≥ … ≥ ym ≥ 0
    let mut out = Vec::new();
    let perms = permutations(m);
    for cube in 0..(1usize << m) {
        let c: Vec<i64> = (0..m).map(|i| (cube >> i & 1) as i64).collect();
        for (perm, sign) in &perms {
            let mut path = vec![c.clone()];
            let mut y = c.clone();
            for &ax in perm {
                y[ax] += 1;
                path.push(y.clone());
            }
            let ok = path.iter().all(|p| p.windows(2).all(|w| w[0] >= w[1]) && p.first().map_or(true, |&a| a <= 2) && p.last().map_or(true, |&a| a >= 0));
            if !ok {
                continue;
            }
            let mut bary: Vec<Vec<Q>> = path
                .iter()
                .map(|yv| {
                    let z = |j: usize| -> Q {
                        if j == 0 {
                            q(1, 1)
                        } else if j > m {
                            q(0, 1)
                        } else {
                            q(yv[j - 1], 2)
                        }
                    };
                    (0..=m).map(|j| z(j) - z(j + 1)).collect()
                })
                .collect();
            if *sign < 0 {
                bary.swap(0, 1);
            }
            out.push(bary);
        }
    }
    let r = Arc::new(out);
    cache.lock().unwrap().insert(m, r.clone());
    r
}

fn permutations(m: usize) -> Vec<(Vec<usize>, i32)> {
    if m == 0 {
        return vec![(vec![], 1)];
    }
    let mut out = Vec::new();
    for (p, s) in permutations(m - 1) {
        for pos in 0..=p.len() {
            let mut np = p.clone();
            np.insert(pos, m - 1);
            // inserting the largest element at pos creates len-pos inversions
            let inv = (p.len() - pos) as i32;
            out.push((np, if inv % 2 == 0 { s } else { -s }));
        }
    }
    out
}
