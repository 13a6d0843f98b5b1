//! Hochschild cochains, the bar differential and cohomology.
//!
//! Cohomology is computed on the cochains that vanish as soon as one
//! argument is a vertex idempotent and are balanced over the idempotents:
//! maps `r_1 ⊗ ... ⊗ r_n -> e_{s(r_1)} M e_{t(r_n)}` on composable tuples of
//! non-idempotent basis elements. These form a subcomplex of the bar
//! complex (extend by zero) with the same cohomology, and every cochain
//! produced by this crate is reported in full bar coordinates. The full
//! complex is used when Peirce data is missing and as a cross-check.

use crate::algebra::Algebra;
use crate::bimodule::Bimodule;
use crate::error::{Error, Result};
use crate::exactlin::{Accum, Echelon, Field, Mat, Quotient, Scalar, SparseVec};
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock};

/// Default bound on `(dim A)^(n+1) * dim M`.
pub const DEFAULT_BAR_CAP: u128 = 2_000_000;

/// A multilinear map `A^{⊗n} -> M`, stored by the nonzero columns of its
/// `(dim M) x (dim A)^n` matrix. Column index of `(i_1, ..., i_n)` is mixed
/// radix with `i_1` most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    pub degree: usize,
    pub a_dim: usize,
    pub m_dim: usize,
    pub field: Field,
    cols: BTreeMap<usize, SparseVec>,
}

impl Cochain {
    pub fn zero(degree: usize, a_dim: usize, m_dim: usize, field: Field) -> Cochain {
        Cochain { degree, a_dim, m_dim, field, cols: BTreeMap::new() }
    }

    /// The 0-cochain given by an element of `M`.
    pub fn from_element(a_dim: usize, m_dim: usize, field: Field, v: SparseVec) -> Cochain {
        let mut c = Cochain::zero(0, a_dim, m_dim, field);
        c.set_col(0, v);
        c
    }

    /// From a `dim M x dim A` matrix.
    pub fn from_linear_map(m: &Mat) -> Cochain {
        let mut c = Cochain::zero(1, m.ncols(), m.nrows(), m.field());
        for j in 0..m.ncols() {
            c.set_col(j, m.col(j).clone());
        }
        c
    }

    pub fn encode(&self, tuple: &[usize]) -> usize {
        tuple.iter().fold(0, |acc, i| acc * self.a_dim + i)
    }

    pub fn decode(&self, mut col: usize) -> Vec<usize> {
        let mut t = vec![0; self.degree];
        for k in (0..self.degree).rev() {
            t[k] = col % self.a_dim;
            col /= self.a_dim;
        }
        t
    }

    pub fn num_cols(&self) -> usize {
        self.a_dim.pow(self.degree as u32)
    }

    pub fn col(&self, c: usize) -> Option<&SparseVec> {
        self.cols.get(&c)
    }

    pub fn at(&self, tuple: &[usize]) -> Option<&SparseVec> {
        self.cols.get(&self.encode(tuple))
    }

    pub fn set_col(&mut self, c: usize, v: SparseVec) {
        if v.is_zero() {
            self.cols.remove(&c);
        } else {
            self.cols.insert(c, v);
        }
    }

    pub fn add_to_col(&mut self, c: usize, coeff: &Scalar, v: &SparseVec) {
        let cur = self.cols.remove(&c).unwrap_or_default();
        self.set_col(c, cur.add_scaled(coeff, v));
    }

    pub fn columns(&self) -> impl Iterator<Item = (&usize, &SparseVec)> {
        self.cols.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.is_empty()
    }

    pub fn element(&self) -> SparseVec {
        self.cols.get(&0).cloned().unwrap_or_default()
    }

    pub fn scale(&self, c: &Scalar) -> Cochain {
        let mut out = Cochain::zero(self.degree, self.a_dim, self.m_dim, self.field);
        for (k, v) in &self.cols {
            out.set_col(*k, v.scale(c));
        }
        out
    }

    pub fn add_scaled(&self, c: &Scalar, o: &Cochain) -> Cochain {
        assert_eq!((self.degree, self.a_dim, self.m_dim), (o.degree, o.a_dim, o.m_dim));
        let mut out = self.clone();
        for (k, v) in &o.cols {
            out.add_to_col(*k, c, v);
        }
        out
    }

    pub fn add(&self, o: &Cochain) -> Cochain {
        self.add_scaled(&self.field.one(), o)
    }

    pub fn sub(&self, o: &Cochain) -> Cochain {
        self.add_scaled(&-self.field.one(), o)
    }

    /// Dense-shaped matrix view `(dim M) x (dim A)^n`.
    pub fn to_mat(&self) -> Mat {
        let mut cols = vec![SparseVec::new(); self.num_cols()];
        for (k, v) in &self.cols {
            cols[*k] = v.clone();
        }
        Mat::from_columns(self.m_dim, self.field, cols)
    }

    /// Flattened coordinates, index `col * dim M + row`.
    pub fn to_vector(&self) -> SparseVec {
        let mut pairs = Vec::new();
        for (k, v) in &self.cols {
            for (r, x) in v.iter() {
                pairs.push((k * self.m_dim + r, x.clone()));
            }
        }
        SparseVec::from_pairs(pairs)
    }

    pub fn from_vector(degree: usize, a_dim: usize, m_dim: usize, field: Field, v: &SparseVec) -> Cochain {
        let mut grouped: BTreeMap<usize, Vec<(usize, Scalar)>> = BTreeMap::new();
        for (i, x) in v.iter() {
            grouped.entry(i / m_dim).or_default().push((i % m_dim, x.clone()));
        }
        let mut c = Cochain::zero(degree, a_dim, m_dim, field);
        for (k, p) in grouped {
            c.set_col(k, SparseVec::from_pairs(p));
        }
        c
    }

    /// Evaluates on arbitrary elements by multilinear expansion.
    pub fn eval(&self, args: &[SparseVec]) -> SparseVec {
        assert_eq!(args.len(), self.degree);
        let mut acc = Accum::new();
        let mut idx = vec![0usize; self.degree];
        self.eval_rec(args, 0, &self.field.one(), &mut idx, &mut acc);
        acc.finish()
    }

    fn eval_rec(&self, args: &[SparseVec], k: usize, coeff: &Scalar, idx: &mut Vec<usize>, acc: &mut Accum) {
        if k == args.len() {
            if let Some(v) = self.at(idx) {
                acc.add_scaled(coeff, v);
            }
            return;
        }
        for (i, x) in args[k].iter() {
            idx[k] = *i;
            self.eval_rec(args, k + 1, &(coeff * x), idx, acc);
        }
    }

    /// `post ∘ f ∘ pre^{⊗n}`, where `pre` is `dim A x dim A'` and `post` is
    /// `dim M' x dim M`.
    pub fn compose(&self, pre: &Mat, post: &Mat) -> Cochain {
        let a2 = pre.ncols();
        let mut out = Cochain::zero(self.degree, a2, post.nrows(), self.field);
        let n = self.degree;
        let total = a2.pow(n as u32);
        for col in 0..total {
            let tuple = out.decode(col);
            let args: Vec<SparseVec> = tuple.iter().map(|i| pre.col(*i).clone()).collect();
            if args.iter().any(|a| a.is_zero()) {
                continue;
            }
            let v = self.eval(&args);
            if !v.is_zero() {
                out.set_col(col, post.mul_vec(&v));
            }
        }
        out
    }
}

fn check_cap(what: &str, a_dim: usize, m_dim: usize, n: usize, cap: u128) -> Result<()> {
    let size = (a_dim as u128).checked_pow(n as u32 + 1).and_then(|x| x.checked_mul(m_dim as u128));
    match size {
        Some(s) if s <= cap => Ok(()),
        Some(s) => Err(Error::CapExceeded { what: what.into(), size: s, cap }),
        None => Err(Error::CapExceeded { what: what.into(), size: u128::MAX, cap }),
    }
}

/// `fact[k]` lists `(u, v, c)` with `c` the coefficient of `b_k` in `b_u b_v`.
fn factorizations(alg: &Algebra, keep: impl Fn(usize) -> bool) -> Vec<Vec<(usize, usize, Scalar)>> {
    let mut fact = vec![Vec::new(); alg.dim()];
    for u in (0..alg.dim()).filter(|u| keep(*u)) {
        for v in (0..alg.dim()).filter(|v| keep(*v)) {
            for (k, c) in alg.mul_basis(u, v).iter() {
                fact[*k].push((u, v, c.clone()));
            }
        }
    }
    fact
}

fn sign(field: Field, k: usize) -> Scalar {
    if k % 2 == 0 {
        field.one()
    } else {
        -field.one()
    }
}

/// The bar differential applied to a cochain of degree `n`.
pub fn bar_apply(alg: &Algebra, m: &Bimodule, f: &Cochain) -> Cochain {
    let fact = factorizations(alg, |_| true);
    bar_apply_with(alg, m, f, &fact)
}

fn bar_apply_with(alg: &Algebra, m: &Bimodule, f: &Cochain, fact: &[Vec<(usize, usize, Scalar)>]) -> Cochain {
    let n = f.degree;
    let d = alg.dim();
    let field = alg.field();
    let mut out = Cochain::zero(n + 1, d, m.dim(), field);
    let one = field.one();
    let last = sign(field, n + 1);
    for (col, v) in f.columns() {
        let tau = f.decode(*col);
        for a in 0..d {
            let mut t0 = vec![a];
            t0.extend_from_slice(&tau);
            let c0 = out.encode(&t0);
            out.add_to_col(c0, &one, &m.left_matrix(a).mul_vec(v));
            let mut t1 = tau.clone();
            t1.push(a);
            let c1 = out.encode(&t1);
            out.add_to_col(c1, &last, &m.right_matrix(a).mul_vec(v));
        }
        for j in 1..=n {
            let s = sign(field, j);
            for (u, w, c) in &fact[tau[j - 1]] {
                let mut t = tau[..j - 1].to_vec();
                t.push(*u);
                t.push(*w);
                t.extend_from_slice(&tau[j..]);
                let k = out.encode(&t);
                out.add_to_col(k, &(&s * c), v);
            }
        }
    }
    out
}

/// Evaluates `(b f)(x_0, ..., x_n)` straight from the defining formula on
/// arbitrary elements.
pub fn bar_formula_eval(alg: &Algebra, m: &Bimodule, f: &Cochain, xs: &[SparseVec]) -> SparseVec {
    let n = f.degree;
    assert_eq!(xs.len(), n + 1);
    let field = alg.field();
    let mut acc = Accum::new();
    acc.add_vec(&m.act_left(&xs[0], &f.eval(&xs[1..])));
    for j in 1..=n {
        let mut args: Vec<SparseVec> = xs[..j - 1].to_vec();
        args.push(alg.mul(&xs[j - 1], &xs[j]));
        args.extend_from_slice(&xs[j + 1..]);
        acc.add_scaled(&sign(field, j), &f.eval(&args));
    }
    acc.add_scaled(&sign(field, n + 1), &m.act_right(&f.eval(&xs[..n]), &xs[n]));
    acc.finish()
}

/// Matrix of the bar differential from degree `n` to degree `n + 1` in
/// flattened coordinates.
pub fn bar_differential(alg: &Algebra, m: &Bimodule, n: usize, cap: u128) -> Result<Mat> {
    check_cap("bar complex", alg.dim(), m.dim(), n, cap)?;
    let fact = factorizations(alg, |_| true);
    let (d, md, field) = (alg.dim(), m.dim(), alg.field());
    let ncols = d.pow(n as u32) * md;
    let nrows = d.pow(n as u32 + 1) * md;
    let cols = (0..ncols)
        .map(|i| {
            let f = Cochain::from_vector(n, d, md, field, &SparseVec::unit(i, field));
            bar_apply_with(alg, m, &f, &fact).to_vector()
        })
        .collect();
    Ok(Mat::from_columns(nrows, field, cols))
}

#[derive(Clone, Debug)]
struct Key {
    tuple: Vec<usize>,
    src: usize,
    dst: usize,
}

#[derive(Clone, Debug)]
struct Level {
    keys: Vec<Key>,
    index: HashMap<(Vec<usize>, usize), usize>,
    offsets: Vec<usize>,
    dim: usize,
}

/// Index data for the subcomplex of normalized, idempotent-balanced cochains.
#[derive(Clone, Debug)]
struct Reduced {
    n_vertices: usize,
    a_dim: usize,
    m_dim: usize,
    field: Field,
    rad: Vec<usize>,
    is_rad: Vec<bool>,
    tags_a: Vec<(usize, usize)>,
    tags_m: Vec<(usize, usize)>,
    blocks: HashMap<(usize, usize), Vec<usize>>,
    block_pos: Vec<usize>,
}

impl Reduced {
    fn new(alg: &Algebra, m: &Bimodule) -> Option<Reduced> {
        let p = alg.peirce()?;
        let tags_m = m.tags()?.to_vec();
        let mut blocks: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        let mut block_pos = vec![0; m.dim()];
        for (i, t) in tags_m.iter().enumerate() {
            let b = blocks.entry(*t).or_default();
            block_pos[i] = b.len();
            b.push(i);
        }
        let rad = alg.radical_indices();
        let mut is_rad = vec![false; alg.dim()];
        for r in &rad {
            is_rad[*r] = true;
        }
        Some(Reduced {
            n_vertices: p.num_vertices(),
            a_dim: alg.dim(),
            m_dim: m.dim(),
            field: alg.field(),
            rad,
            is_rad,
            tags_a: p.tags.clone(),
            tags_m,
            blocks,
            block_pos,
        })
    }

    fn block(&self, x: usize, y: usize) -> &[usize] {
        self.blocks.get(&(x, y)).map(|v| v.as_slice()).unwrap_or(&[])
    }

    fn level(&self, n: usize) -> Level {
        let mut keys = Vec::new();
        if n == 0 {
            for x in 0..self.n_vertices {
                keys.push(Key { tuple: Vec::new(), src: x, dst: x });
            }
        } else {
            let mut stack: Vec<Vec<usize>> = self.rad.iter().map(|r| vec![*r]).collect();
            stack.reverse();
            while let Some(t) = stack.pop() {
                if t.len() == n {
                    let (src, dst) = (self.tags_a[t[0]].0, self.tags_a[*t.last().unwrap()].1);
                    keys.push(Key { tuple: t, src, dst });
                    continue;
                }
                let end = self.tags_a[*t.last().unwrap()].1;
                for r in self.rad.iter().rev() {
                    if self.tags_a[*r].0 == end {
                        let mut u = t.clone();
                        u.push(*r);
                        stack.push(u);
                    }
                }
            }
        }
        keys.retain(|k| !self.block(k.src, k.dst).is_empty());
        let mut offsets = Vec::with_capacity(keys.len());
        let mut dim = 0;
        let mut index = HashMap::new();
        for (i, k) in keys.iter().enumerate() {
            offsets.push(dim);
            dim += self.block(k.src, k.dst).len();
            index.insert((k.tuple.clone(), k.src), i);
        }
        Level { keys, index, offsets, dim }
    }

    fn position(&self, lv: &Level, tuple: &[usize], src: usize, mi: usize) -> Option<usize> {
        let &k = lv.index.get(&(tuple.to_vec(), src))?;
        let key = &lv.keys[k];
        if self.tags_m[mi] != (key.src, key.dst) {
            return None;
        }
        Some(lv.offsets[k] + self.block_pos[mi])
    }

    fn add_value(&self, lv: &Level, acc: &mut Accum, tuple: &[usize], src: usize, coeff: &Scalar, v: &SparseVec) {
        for (mi, x) in v.iter() {
            let pos = self
                .position(lv, tuple, src, *mi)
                .expect("differential stays inside the normalized subcomplex");
            acc.add_entry(pos, coeff * x);
        }
    }

    /// Differential from level `n` to level `n + 1`.
    fn differential(&self, alg: &Algebra, m: &Bimodule, n: usize, src_lv: &Level, dst_lv: &Level) -> Mat {
        let fact = factorizations(alg, |u| self.is_rad[u]);
        let field = self.field;
        let one = field.one();
        let last = sign(field, n + 1);
        let mut cols = Vec::with_capacity(src_lv.dim);
        for key in &src_lv.keys {
            for &mi in self.block(key.src, key.dst) {
                let v = SparseVec::unit(mi, field);
                let mut acc = Accum::new();
                for &r in &self.rad {
                    let (rs, rt) = self.tags_a[r];
                    if rt == key.src {
                        let mut t = vec![r];
                        t.extend_from_slice(&key.tuple);
                        self.add_value(dst_lv, &mut acc, &t, rs, &one, &m.left_matrix(r).mul_vec(&v));
                    }
                    if rs == key.dst {
                        let mut t = key.tuple.clone();
                        t.push(r);
                        self.add_value(dst_lv, &mut acc, &t, key.src, &last, &m.right_matrix(r).mul_vec(&v));
                    }
                }
                for j in 1..=n {
                    let s = sign(field, j);
                    for (u, w, c) in &fact[key.tuple[j - 1]] {
                        let mut t = key.tuple[..j - 1].to_vec();
                        t.push(*u);
                        t.push(*w);
                        t.extend_from_slice(&key.tuple[j..]);
                        self.add_value(dst_lv, &mut acc, &t, key.src, &(&s * c), &v);
                    }
                }
                cols.push(acc.finish());
            }
        }
        Mat::from_columns(dst_lv.dim, field, cols)
    }

    fn to_full(&self, lv: &Level, n: usize, v: &SparseVec) -> Cochain {
        let mut out = Cochain::zero(n, self.a_dim, self.m_dim, self.field);
        for (i, x) in v.iter() {
            let k = match lv.offsets.binary_search(i) {
                Ok(mut k) => {
                    // skip keys with empty blocks sharing an offset
                    while k + 1 < lv.offsets.len() && lv.offsets[k + 1] == *i {
                        k += 1;
                    }
                    k
                }
                Err(k) => k - 1,
            };
            let key = &lv.keys[k];
            let mi = self.block(key.src, key.dst)[i - lv.offsets[k]];
            let c = out.encode(&key.tuple);
            out.add_to_col(c, x, &SparseVec::unit(mi, self.field));
        }
        out
    }

    fn from_full(&self, lv: &Level, f: &Cochain) -> Option<SparseVec> {
        let mut pairs = Vec::new();
        for (col, v) in f.columns() {
            let tuple = f.decode(*col);
            if tuple.is_empty() {
                for (mi, x) in v.iter() {
                    let (a, b) = self.tags_m[*mi];
                    if a != b {
                        return None;
                    }
                    pairs.push((self.position(lv, &[], a, *mi)?, x.clone()));
                }
                continue;
            }
            if tuple.iter().any(|t| !self.is_rad[*t]) {
                return None;
            }
            let src = self.tags_a[tuple[0]].0;
            for (mi, x) in v.iter() {
                pairs.push((self.position(lv, &tuple, src, *mi)?, x.clone()));
            }
        }
        Some(SparseVec::from_pairs(pairs))
    }
}

#[derive(Debug)]
enum Backend {
    Reduced { index: Reduced, level: Level, quotient: Quotient },
    Flat { quotient: Quotient },
}

/// `HH^n(A, M)` with chosen representatives and a class-coordinate map.
#[derive(Debug)]
pub struct CohomologySpace {
    pub degree: usize,
    pub reps: Vec<Cochain>,
    alg: Arc<Algebra>,
    module: Arc<Bimodule>,
    backend: Backend,
    cap: u128,
    full: OnceLock<std::result::Result<Quotient, Error>>,
}

impl CohomologySpace {
    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn algebra(&self) -> &Algebra {
        &self.alg
    }

    pub fn module(&self) -> &Bimodule {
        &self.module
    }

    /// Coordinates of the class of a cocycle on the representatives.
    pub fn class_coords(&self, f: &Cochain) -> Result<Vec<Scalar>> {
        if f.degree != self.degree || f.a_dim != self.alg.dim() || f.m_dim != self.module.dim() {
            return Err(Error::Dimension("cochain shape does not match the cohomology space".into()));
        }
        match &self.backend {
            Backend::Reduced { index, level, quotient } => {
                if let Some(v) = index.from_full(level, f) {
                    return quotient.coords(&v);
                }
                self.full_quotient()?.coords(&f.to_vector())
            }
            Backend::Flat { quotient } => quotient.coords(&f.to_vector()),
        }
    }

    pub fn is_coboundary(&self, f: &Cochain) -> Result<bool> {
        Ok(self.class_coords(f)?.iter().all(|c| c.is_zero()))
    }

    fn full_quotient(&self) -> Result<&Quotient> {
        let q = self.full.get_or_init(|| {
            let (alg, m, n) = (&*self.alg, &*self.module, self.degree);
            check_cap("bar complex (class membership fallback)", alg.dim(), m.dim(), n, self.cap)?;
            let field = alg.field();
            let im = if n == 0 {
                Vec::new()
            } else {
                bar_differential(alg, m, n - 1, self.cap)?.image_basis()
            };
            let sub = Echelon::from_vectors(alg.dim().pow(n as u32) * m.dim(), field, &im);
            let reps: Vec<SparseVec> = self.reps.iter().map(|r| r.to_vector()).collect();
            Ok(Quotient::with_sub(sub, &reps))
        });
        q.as_ref().map_err(|e| e.clone())
    }
}

/// `HH^n(A, M)` on the normalized subcomplex when Peirce data is available.
pub fn hh(alg: &Algebra, m: &Bimodule, n: usize) -> Result<CohomologySpace> {
    hh_with_cap(alg, m, n, DEFAULT_BAR_CAP)
}

pub fn hh_with_cap(alg: &Algebra, m: &Bimodule, n: usize, cap: u128) -> Result<CohomologySpace> {
    check_cap("bar complex", alg.dim(), m.dim(), n, cap)?;
    let Some(index) = Reduced::new(alg, m) else {
        return hh_full(alg, m, n, cap);
    };
    let lv = index.level(n);
    let next = index.level(n + 1);
    let d_n = index.differential(alg, m, n, &lv, &next);
    let ker = Echelon::from_vectors(lv.dim, alg.field(), &d_n.row_vectors()).null_space();
    let im = if n == 0 {
        Vec::new()
    } else {
        let prev = index.level(n - 1);
        index.differential(alg, m, n - 1, &prev, &lv).image_basis()
    };
    let quotient = Quotient::new(lv.dim, alg.field(), &im, &ker);
    let reps = quotient.reps().iter().map(|r| index.to_full(&lv, n, r)).collect();
    Ok(CohomologySpace {
        degree: n,
        reps,
        alg: Arc::new(alg.clone()),
        module: Arc::new(m.clone()),
        backend: Backend::Reduced { index, level: lv, quotient },
        cap,
        full: OnceLock::new(),
    })
}

/// `HH^n(A, M)` on the full bar complex.
pub fn hh_full(alg: &Algebra, m: &Bimodule, n: usize, cap: u128) -> Result<CohomologySpace> {
    let field = alg.field();
    let d_n = bar_differential(alg, m, n, cap)?;
    let dim = d_n.ncols();
    let ker = Echelon::from_vectors(dim, field, &d_n.row_vectors()).null_space();
    let im = if n == 0 { Vec::new() } else { bar_differential(alg, m, n - 1, cap)?.image_basis() };
    let quotient = Quotient::new(dim, field, &im, &ker);
    let reps = quotient
        .reps()
        .iter()
        .map(|r| Cochain::from_vector(n, alg.dim(), m.dim(), field, r))
        .collect();
    Ok(CohomologySpace {
        degree: n,
        reps,
        alg: Arc::new(alg.clone()),
        module: Arc::new(m.clone()),
        backend: Backend::Flat { quotient },
        cap,
        full: OnceLock::new(),
    })
}

/// Dimensions of `HH^0..=max` of `A` with coefficients in `M`.
pub fn hh_dims(alg: &Algebra, m: &Bimodule, max: usize) -> Result<Vec<usize>> {
    (0..=max).map(|n| hh(alg, m, n).map(|h| h.dim())).collect()
}

/// Dimension of the normalized cochain space in degree `n`, for reporting.
pub fn normalized_cochain_dim(alg: &Algebra, m: &Bimodule, n: usize) -> Option<usize> {
    Reduced::new(alg, m).map(|r| r.level(n).dim)
}

/// Whether `d: A -> M` satisfies the Leibniz rule on all basis pairs.
pub fn is_derivation(alg: &Algebra, m: &Bimodule, d: &Cochain) -> bool {
    if d.degree != 1 {
        return false;
    }
    let field = alg.field();
    let zero = SparseVec::new();
    for i in 0..alg.dim() {
        for j in 0..alg.dim() {
            let (di, dj) = (d.at(&[i]).unwrap_or(&zero), d.at(&[j]).unwrap_or(&zero));
            let lhs = d.eval(&[alg.mul_basis(i, j).clone()]);
            let rhs = m.left_matrix(i).mul_vec(dj).add(&m.right_matrix(j).mul_vec(di));
            if lhs != rhs {
                return false;
            }
        }
    }
    let _ = field;
    true
}

/// Basis of derivations `A -> M` vanishing on the vertex idempotents.
pub fn der0_basis(alg: &Algebra, m: &Bimodule) -> Vec<Cochain> {
    let (d, md, field) = (alg.dim(), m.dim(), alg.field());
    let var = |row: usize, col: usize| col * md + row;
    let mut rows = Vec::new();
    if let Some(p) = alg.peirce() {
        for &e in &p.idempotents {
            for r in 0..md {
                rows.push(SparseVec::unit(var(r, e), field));
            }
        }
    }
    let lrows: Vec<Vec<SparseVec>> = (0..d).map(|i| m.left_matrix(i).row_vectors()).collect();
    let rrows: Vec<Vec<SparseVec>> = (0..d).map(|i| m.right_matrix(i).row_vectors()).collect();
    for i in 0..d {
        for j in 0..d {
            for r in 0..md {
                let mut acc = Accum::new();
                for (k, c) in alg.mul_basis(i, j).iter() {
                    acc.add_entry(var(r, *k), c.clone());
                }
                for (s, x) in lrows[i][r].iter() {
                    acc.add_entry(var(*s, j), -x);
                }
                for (s, x) in rrows[j][r].iter() {
                    acc.add_entry(var(*s, i), -x);
                }
                let v = acc.finish();
                if !v.is_zero() {
                    rows.push(v);
                }
            }
        }
    }
    Echelon::from_vectors(d * md, field, &rows)
        .null_space()
        .iter()
        .map(|v| Cochain::from_vector(1, d, md, field, v))
        .collect()
}

/// Inner derivations `c -> c x - x c` that vanish on the idempotents.
pub fn normalized_inner_derivations(alg: &Algebra, m: &Bimodule) -> Vec<Cochain> {
    let (d, md, field) = (alg.dim(), m.dim(), alg.field());
    let ad = |x: &SparseVec| -> Cochain {
        let f = Cochain::from_element(d, md, field, x.clone());
        bar_apply(alg, m, &f)
    };
    let elems: Vec<SparseVec> = match alg.peirce() {
        Some(p) => {
            // x with e x = x e for every vertex idempotent
            let mut rows = Vec::new();
            for &e in &p.idempotents {
                let diff = m.left_matrix(e).sub(m.right_matrix(e)).unwrap();
                rows.extend(diff.row_vectors());
            }
            Echelon::from_vectors(md, field, &rows).null_space()
        }
        None => (0..md).map(|i| SparseVec::unit(i, field)).collect(),
    };
    elems.iter().map(ad).collect()
}

/// `HH^1(A, M)` as normalized derivations modulo normalized inner ones.
pub fn hh1_via_derivations(alg: &Algebra, m: &Bimodule) -> Result<CohomologySpace> {
    let field = alg.field();
    let der: Vec<SparseVec> = der0_basis(alg, m).iter().map(|c| c.to_vector()).collect();
    let inn: Vec<SparseVec> = normalized_inner_derivations(alg, m).iter().map(|c| c.to_vector()).collect();
    let dim = alg.dim() * m.dim();
    let quotient = Quotient::new(dim, field, &inn, &der);
    let reps = quotient
        .reps()
        .iter()
        .map(|r| Cochain::from_vector(1, alg.dim(), m.dim(), field, r))
        .collect();
    Ok(CohomologySpace {
        degree: 1,
        reps,
        alg: Arc::new(alg.clone()),
        module: Arc::new(m.clone()),
        backend: Backend::Flat { quotient },
        cap: DEFAULT_BAR_CAP,
        full: OnceLock::new(),
    })
}

/// The derivation `A -> M` determined by images of the arrows, extended by
/// the Leibniz rule along basis paths. Fails if the result is not a
/// derivation (the images are incompatible with the relations).
pub fn derivation_from_arrows(alg: &Algebra, m: &Bimodule, images: &[(usize, SparseVec)]) -> Result<Cochain> {
    let pd = alg
        .path_data()
        .ok_or_else(|| Error::Precondition("derivation from arrow images needs a presented algebra".into()))?;
    let q = pd.quiver();
    let field = alg.field();
    let img: HashMap<usize, &SparseVec> = images.iter().map(|(a, v)| (*a, v)).collect();
    for (a, v) in images {
        let p = q.arrow_path(*a);
        let (s, t) = (pd.normal_form(&q.trivial_path(p.start)), pd.normal_form(&q.trivial_path(p.end)));
        if m.act_right(&m.act_left(&s, v), &t) != *v {
            return Err(Error::Invalid(format!("image of arrow {} is not parallel to it", q.arrow(*a).name)));
        }
    }
    let mut f = Cochain::zero(1, alg.dim(), m.dim(), field);
    for (b, p) in pd.basis_paths.iter().enumerate() {
        let mut acc = Accum::new();
        for k in 0..p.len() {
            let Some(v) = img.get(&p.arrows[k]) else { continue };
            let left = pd.normal_form(&p.slice(q, 0, k));
            let right = pd.normal_form(&p.slice(q, k + 1, p.len()));
            acc.add_vec(&m.act_right(&m.act_left(&left, v), &right));
        }
        f.set_col(b, acc.finish());
    }
    if !is_derivation(alg, m, &f) {
        return Err(Error::Invalid("arrow images do not define a derivation".into()));
    }
    Ok(f)
}

/// `(f ⌣ g)(a_1..a_{s+t}) = f(a_1..a_s) g(a_{s+1}..a_{s+t})` for cochains
/// with values in the algebra.
pub fn cup(alg: &Algebra, f: &Cochain, g: &Cochain) -> Result<Cochain> {
    if f.m_dim != alg.dim() || g.m_dim != alg.dim() {
        return Err(Error::Precondition("cup product needs coefficients in the algebra itself".into()));
    }
    let mut out = Cochain::zero(f.degree + g.degree, alg.dim(), alg.dim(), alg.field());
    let shift = alg.dim().pow(g.degree as u32);
    for (cf, vf) in f.columns() {
        for (cg, vg) in g.columns() {
            out.set_col(cf * shift + cg, alg.mul(vf, vg));
        }
    }
    Ok(out)
}

/// Bracket `d ∘ d' - d' ∘ d` of two derivations `A -> A`.
pub fn bracket1(alg: &Algebra, d: &Cochain, e: &Cochain) -> Result<Cochain> {
    let reg = Bimodule::regular(alg);
    if !is_derivation(alg, &reg, d) || !is_derivation(alg, &reg, e) {
        return Err(Error::Precondition("bracket inputs must be derivations of the algebra".into()));
    }
    let (dm, em) = (d.to_mat(), e.to_mat());
    let c = dm.mul(&em)?.sub(&em.mul(&dm)?)?;
    Ok(Cochain::from_linear_map(&c))
}

/// A pseudorandom cochain. Dense when the cochain space has at most
/// `max_entries` coordinates, otherwise supported on a random sample of
/// columns.
pub fn random_cochain(
    rng: &mut impl rand::Rng,
    degree: usize,
    a_dim: usize,
    m_dim: usize,
    field: Field,
    max_entries: usize,
) -> Cochain {
    let mut f = Cochain::zero(degree, a_dim, m_dim, field);
    let ncols = f.num_cols();
    let dense = ncols.saturating_mul(m_dim) <= max_entries;
    let picks: Vec<usize> = if dense {
        (0..ncols).collect()
    } else {
        (0..(max_entries / m_dim.max(1)).max(1)).map(|_| rng.gen_range(0..ncols)).collect()
    };
    for c in picks {
        let v: Vec<Scalar> = (0..m_dim).map(|_| crate::exactlin::random_scalar(rng, field, 3)).collect();
        f.set_col(c, SparseVec::from_dense(&v));
    }
    f
}
