//! Exact scalars, sparse vectors and sparse matrices over Q or F_p.
//!
//! Every elimination goes through [`Echelon`], which keeps a basis in
//! reduced row echelon form. The reduced form of a subspace is unique, so
//! kernel bases, image bases and quotient representatives are canonical.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A rational number. Small values stay in machine integers and spill
/// into big integers on overflow.
#[derive(Clone, Debug)]
pub enum Q {
    Small(i64, i64),
    Big(BigRational),
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Q {
    pub fn zero() -> Q {
        Q::Small(0, 1)
    }

    pub fn one() -> Q {
        Q::Small(1, 1)
    }

    pub fn from_int(n: i64) -> Q {
        Q::Small(n, 1)
    }

    /// `num/den`; panics on a zero denominator.
    pub fn new(num: i64, den: i64) -> Q {
        assert!(den != 0, "zero denominator");
        Q::from_i128(num as i128, den as i128)
    }

    fn from_i128(num: i128, den: i128) -> Q {
        let (mut n, mut d) = (num, den);
        if d < 0 {
            n = -n;
            d = -d;
        }
        let g = gcd_i128(n, d);
        if g > 1 {
            n /= g;
            d /= g;
        }
        if n == 0 {
            return Q::Small(0, 1);
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(a), Ok(b)) => Q::Small(a, b),
            _ => Q::Big(BigRational::new(BigInt::from(n), BigInt::from(d))),
        }
    }

    fn from_big(r: BigRational) -> Q {
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            return Q::Small(n, d);
        }
        Q::Big(r)
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Q::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Q::Big(r) => r.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Q::Small(n, _) => *n == 0,
            Q::Big(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Q::Small(1, 1))
    }

    pub fn neg(&self) -> Q {
        match self {
            Q::Small(n, d) => Q::from_i128(-(*n as i128), *d as i128),
            Q::Big(r) => Q::from_big(-r.clone()),
        }
    }

    pub fn add(&self, o: &Q) -> Q {
        match (self, o) {
            (Q::Small(a, b), Q::Small(c, d)) => {
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                if b == d {
                    Q::from_i128(a + c, b)
                } else {
                    Q::from_i128(a * d + c * b, b * d)
                }
            }
            _ => Q::from_big(self.to_big() + o.to_big()),
        }
    }

    pub fn sub(&self, o: &Q) -> Q {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Q) -> Q {
        match (self, o) {
            (Q::Small(a, b), Q::Small(c, d)) => {
                Q::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => Q::from_big(self.to_big() * o.to_big()),
        }
    }

    pub fn inv(&self) -> Option<Q> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Q::Small(n, d) => Q::from_i128(*d as i128, *n as i128),
            Q::Big(r) => Q::from_big(r.recip()),
        })
    }

    /// Numerator and denominator as big integers, denominator positive.
    pub fn parts(&self) -> (BigInt, BigInt) {
        let r = self.to_big();
        (r.numer().clone(), r.denom().clone())
    }
}

impl PartialEq for Q {
    fn eq(&self, o: &Q) -> bool {
        match (self, o) {
            (Q::Small(a, b), Q::Small(c, d)) => a == c && b == d,
            _ => self.to_big() == o.to_big(),
        }
    }
}
impl Eq for Q {}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, d) = self.parts();
        if d.is_one() {
            write!(f, "{n}")
        } else {
            write!(f, "{n}/{d}")
        }
    }
}

/// The ground field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Rational,
    Prime(u64),
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut i = 2u64;
    while i * i <= p {
        if p % i == 0 {
            return false;
        }
        i += 1;
    }
    true
}

impl Field {
    /// `F_p`; rejects non-primes and primes above 2^32 (products must fit u64).
    pub fn prime(p: u64) -> Result<Field> {
        if !is_prime(p) || p > u32::MAX as u64 {
            return Err(Error::Invalid(format!("{p} is not a supported prime")));
        }
        Ok(Field::Prime(p))
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match *self {
            Field::Rational => Scalar::Q(Q::from_int(n)),
            Field::Prime(p) => Scalar::Fp(n.rem_euclid(p as i64) as u64, p),
        }
    }

    pub fn from_ratio(&self, n: i64, d: i64) -> Result<Scalar> {
        if d == 0 {
            return Err(Error::Parse("zero denominator".into()));
        }
        let den = self.from_i64(d);
        let inv = den
            .inv()
            .ok_or_else(|| Error::Parse(format!("denominator {d} vanishes in {self}")))?;
        Ok(&self.from_i64(n) * &inv)
    }

    /// Parses `int` or `int/int`, with an optional sign.
    pub fn parse_scalar(&self, s: &str) -> Result<Scalar> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad coefficient '{s}'"));
        match s.split_once('/') {
            Some((a, b)) => {
                let a: i64 = a.trim().parse().map_err(|_| bad())?;
                let b: i64 = b.trim().parse().map_err(|_| bad())?;
                self.from_ratio(a, b)
            }
            None => Ok(self.from_i64(s.parse().map_err(|_| bad())?)),
        }
    }

    /// Parses the file notation `Q` or `Fp:<p>`.
    pub fn parse(s: &str) -> Result<Field> {
        let s = s.trim();
        if s == "Q" {
            return Ok(Field::Rational);
        }
        if let Some(p) = s.strip_prefix("Fp:") {
            let p: u64 = p
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad prime in '{s}'")))?;
            return Field::prime(p);
        }
        Err(Error::Parse(format!("unknown field '{s}'")))
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Prime(p) => write!(f, "Fp:{p}"),
        }
    }
}

/// A field element tagged with its field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scalar {
    Q(Q),
    Fp(u64, u64),
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Q(_) => Field::Rational,
            Scalar::Fp(_, p) => Field::Prime(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_zero(),
            Scalar::Fp(v, _) => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_one(),
            Scalar::Fp(v, _) => *v == 1,
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        match self {
            Scalar::Q(q) => q.inv().map(Scalar::Q),
            Scalar::Fp(v, p) => {
                if *v == 0 {
                    None
                } else {
                    Some(Scalar::Fp(pow_mod(*v, p - 2, *p), *p))
                }
            }
        }
    }

    pub fn div(&self, o: &Scalar) -> Option<Scalar> {
        o.inv().map(|i| self * &i)
    }

    /// The rational value, if this lives in Q.
    pub fn as_q(&self) -> Option<&Q> {
        match self {
            Scalar::Q(q) => Some(q),
            Scalar::Fp(..) => None,
        }
    }
}

fn mismatch(a: &Scalar, b: &Scalar) -> ! {
    panic!("scalar field mismatch: {} vs {}", a.field(), b.field())
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a.add(b)),
            (Scalar::Fp(a, p), Scalar::Fp(b, q)) if p == q => Scalar::Fp((a + b) % p, *p),
            _ => mismatch(self, o),
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        self + &(-o)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a.mul(b)),
            (Scalar::Fp(a, p), Scalar::Fp(b, q)) if p == q => Scalar::Fp(a * b % p, *p),
            _ => mismatch(self, o),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Q(a) => Scalar::Q(a.neg()),
            Scalar::Fp(a, p) => Scalar::Fp((p - a) % p, *p),
        }
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, o: Scalar) -> Scalar {
        &self + &o
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, o: Scalar) -> Scalar {
        &self - &o
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, o: Scalar) -> Scalar {
        &self * &o
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(q) => write!(f, "{q}"),
            Scalar::Fp(v, _) => write!(f, "{v}"),
        }
    }
}

/// Sparse vector: sorted `(index, value)` pairs, no stored zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SparseVec {
    entries: Vec<(usize, Scalar)>,
}

impl SparseVec {
    pub fn new() -> SparseVec {
        SparseVec { entries: Vec::new() }
    }

    pub fn unit(i: usize, field: Field) -> SparseVec {
        SparseVec { entries: vec![(i, field.one())] }
    }

    /// Builds from unsorted pairs, summing repeats and dropping zeros.
    pub fn from_pairs(mut pairs: Vec<(usize, Scalar)>) -> SparseVec {
        pairs.sort_by_key(|p| p.0);
        let mut entries: Vec<(usize, Scalar)> = Vec::with_capacity(pairs.len());
        for (i, v) in pairs {
            match entries.last_mut() {
                Some((j, w)) if *j == i => *w = &*w + &v,
                _ => entries.push((i, v)),
            }
        }
        entries.retain(|(_, v)| !v.is_zero());
        SparseVec { entries }
    }

    pub fn from_dense(values: &[Scalar]) -> SparseVec {
        SparseVec {
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i, v.clone()))
                .collect(),
        }
    }

    pub fn to_dense(&self, n: usize, field: Field) -> Vec<Scalar> {
        let mut out = vec![field.zero(); n];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    pub fn entries(&self) -> &[(usize, Scalar)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, Scalar)> {
        self.entries.iter()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&Scalar> {
        self.entries
            .binary_search_by_key(&i, |e| e.0)
            .ok()
            .map(|k| &self.entries[k].1)
    }

    pub fn leading(&self) -> Option<&(usize, Scalar)> {
        self.entries.first()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|e| e.0)
    }

    pub fn scale(&self, c: &Scalar) -> SparseVec {
        if c.is_zero() {
            return SparseVec::new();
        }
        SparseVec { entries: self.entries.iter().map(|(i, v)| (*i, v * c)).collect() }
    }

    pub fn neg(&self) -> SparseVec {
        SparseVec { entries: self.entries.iter().map(|(i, v)| (*i, -v)).collect() }
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: &Scalar, other: &SparseVec) -> SparseVec {
        if c.is_zero() || other.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (0, 0);
        let (x, y) = (&self.entries, &other.entries);
        while a < x.len() || b < y.len() {
            if b >= y.len() || (a < x.len() && x[a].0 < y[b].0) {
                out.push(x[a].clone());
                a += 1;
            } else if a >= x.len() || y[b].0 < x[a].0 {
                out.push((y[b].0, c * &y[b].1));
                b += 1;
            } else {
                let v = &x[a].1 + &(c * &y[b].1);
                if !v.is_zero() {
                    out.push((x[a].0, v));
                }
                a += 1;
                b += 1;
            }
        }
        SparseVec { entries: out }
    }

    pub fn add(&self, other: &SparseVec) -> SparseVec {
        match other.entries.first() {
            None => self.clone(),
            Some((_, v)) => self.add_scaled(&v.field().one(), other),
        }
    }

    pub fn sub(&self, other: &SparseVec) -> SparseVec {
        match other.entries.first() {
            None => self.clone(),
            Some((_, v)) => self.add_scaled(&-v.field().one(), other),
        }
    }

    /// Relabels indices through `f`; the map must be injective on the support.
    pub fn map_indices(&self, f: impl Fn(usize) -> usize) -> SparseVec {
        SparseVec::from_pairs(self.entries.iter().map(|(i, v)| (f(*i), v.clone())).collect())
    }
}

/// Accumulates a linear combination of sparse vectors.
#[derive(Default)]
pub struct Accum {
    map: HashMap<usize, Scalar>,
}

impl Accum {
    pub fn new() -> Accum {
        Accum { map: HashMap::new() }
    }

    pub fn add_entry(&mut self, i: usize, v: Scalar) {
        if v.is_zero() {
            return;
        }
        match self.map.get_mut(&i) {
            Some(w) => *w = &*w + &v,
            None => {
                self.map.insert(i, v);
            }
        }
    }

    pub fn add_scaled(&mut self, c: &Scalar, v: &SparseVec) {
        if c.is_zero() {
            return;
        }
        for (i, x) in v.iter() {
            self.add_entry(*i, c * x);
        }
    }

    pub fn add_vec(&mut self, v: &SparseVec) {
        for (i, x) in v.iter() {
            self.add_entry(*i, x.clone());
        }
    }

    pub fn finish(self) -> SparseVec {
        let mut entries: Vec<(usize, Scalar)> =
            self.map.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        entries.sort_by_key(|e| e.0);
        SparseVec { entries }
    }
}

/// A basis of a subspace of `F^dim`, kept in echelon form.
///
/// Rows are normalized to leading coefficient 1. After [`Echelon::rref`]
/// each pivot column is zero in every other row.
#[derive(Clone, Debug)]
pub struct Echelon {
    dim: usize,
    field: Field,
    rows: Vec<SparseVec>,
    row_of_pivot: HashMap<usize, usize>,
    reduced: bool,
}

impl Echelon {
    pub fn new(dim: usize, field: Field) -> Echelon {
        Echelon { dim, field, rows: Vec::new(), row_of_pivot: HashMap::new(), reduced: true }
    }

    pub fn from_vectors<'a>(
        dim: usize,
        field: Field,
        vs: impl IntoIterator<Item = &'a SparseVec>,
    ) -> Echelon {
        let mut e = Echelon::new(dim, field);
        for v in vs {
            e.insert(v);
        }
        e.rref();
        e
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.leading().unwrap().0).collect()
    }

    pub fn is_pivot(&self, c: usize) -> bool {
        self.row_of_pivot.contains_key(&c)
    }

    /// Reduces `v` modulo the span of the rows. The result is zero at every
    /// pivot column.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        self.reduce_tracking(v).0
    }

    /// Like [`Echelon::reduce`], also returning the multiple of each row
    /// that was subtracted, so that `v = remainder + sum coeff_i row_i`.
    pub fn reduce_tracking(&self, v: &SparseVec) -> (SparseVec, Vec<(usize, Scalar)>) {
        let mut coeffs = Vec::new();
        if self.reduced {
            let mut acc = Accum::new();
            acc.add_vec(v);
            for (c, x) in v.iter() {
                if let Some(&r) = self.row_of_pivot.get(c) {
                    acc.add_scaled(&-x, &self.rows[r]);
                    coeffs.push((r, x.clone()));
                }
            }
            return (acc.finish(), coeffs);
        }
        let mut cur = v.clone();
        let mut cursor = 0usize;
        loop {
            let next = cur
                .iter()
                .find(|(c, _)| *c >= cursor && self.row_of_pivot.contains_key(c))
                .map(|(c, x)| (*c, x.clone()));
            match next {
                None => break,
                Some((c, x)) => {
                    let r = self.row_of_pivot[&c];
                    cur = cur.add_scaled(&-&x, &self.rows[r]);
                    coeffs.push((r, x));
                    cursor = c + 1;
                }
            }
        }
        (cur, coeffs)
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v` to the span. Returns whether the rank grew.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let r = self.reduce(v);
        let Some((p, lead)) = r.leading().cloned() else {
            return false;
        };
        let r = r.scale(&lead.inv().unwrap());
        self.row_of_pivot.insert(p, self.rows.len());
        self.rows.push(r);
        if self.rows.len() > 1 {
            self.reduced = false;
        }
        true
    }

    /// Brings the rows into reduced row echelon form, sorted by pivot.
    pub fn rref(&mut self) {
        if self.reduced && self.rows.windows(2).all(|w| w[0].leading().unwrap().0 < w[1].leading().unwrap().0) {
            return;
        }
        let mut rows = std::mem::take(&mut self.rows);
        rows.sort_by_key(|r| r.leading().unwrap().0);
        let pivots: HashMap<usize, usize> =
            rows.iter().enumerate().map(|(i, r)| (r.leading().unwrap().0, i)).collect();
        for i in (0..rows.len()).rev() {
            let p = rows[i].leading().unwrap().0;
            let mut acc = Accum::new();
            acc.add_vec(&rows[i]);
            for (c, x) in rows[i].iter() {
                if *c == p {
                    continue;
                }
                if let Some(&k) = pivots.get(c) {
                    acc.add_scaled(&-x, &rows[k]);
                }
            }
            rows[i] = acc.finish();
        }
        self.rows = rows;
        self.row_of_pivot = pivots;
        self.reduced = true;
    }

    /// Coordinates of `v` on the rows, or `None` if `v` is outside the span.
    /// Requires reduced form.
    pub fn coordinates(&self, v: &SparseVec) -> Option<Vec<Scalar>> {
        assert!(self.reduced, "coordinates need reduced form");
        let (rem, coeffs) = self.reduce_tracking(v);
        if !rem.is_zero() {
            return None;
        }
        let mut out = vec![self.field.zero(); self.rows.len()];
        for (r, c) in coeffs {
            out[r] = c;
        }
        Some(out)
    }

    /// Same span test; both sides are brought to reduced form first.
    pub fn same_span(&self, other: &Echelon) -> bool {
        let mut a = self.clone();
        let mut b = other.clone();
        a.rref();
        b.rref();
        a.dim == b.dim && a.rows == b.rows
    }

    /// Canonical basis of the null space of the row system.
    pub fn null_space(&self) -> Vec<SparseVec> {
        let mut e = self.clone();
        e.rref();
        let mut columns: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); self.dim];
        let mut is_free = vec![true; self.dim];
        for r in &e.rows {
            is_free[r.leading().unwrap().0] = false;
        }
        for r in &e.rows {
            let p = r.leading().unwrap().0;
            for (j, x) in r.iter() {
                if *j != p {
                    columns[*j].push((p, -x));
                }
            }
        }
        let one = self.field.one();
        let mut out = Vec::new();
        for j in 0..self.dim {
            if is_free[j] {
                let mut pairs = std::mem::take(&mut columns[j]);
                pairs.push((j, one.clone()));
                out.push(SparseVec::from_pairs(pairs));
            }
        }
        out
    }
}

/// Sparse matrix stored by columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    field: Field,
    data: Vec<SparseVec>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize, field: Field) -> Mat {
        Mat { rows, cols, field, data: vec![SparseVec::new(); cols] }
    }

    pub fn identity(n: usize, field: Field) -> Mat {
        Mat { rows: n, cols: n, field, data: (0..n).map(|i| SparseVec::unit(i, field)).collect() }
    }

    pub fn from_columns(rows: usize, field: Field, cols: Vec<SparseVec>) -> Mat {
        debug_assert!(cols.iter().all(|c| c.max_index().map_or(true, |m| m < rows)));
        Mat { rows, cols: cols.len(), field, data: cols }
    }

    pub fn from_rows(cols: usize, field: Field, rows: &[SparseVec]) -> Mat {
        let mut pairs: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); cols];
        for (i, r) in rows.iter().enumerate() {
            for (j, x) in r.iter() {
                pairs[*j].push((i, x.clone()));
            }
        }
        Mat {
            rows: rows.len(),
            cols,
            field,
            data: pairs.into_iter().map(|p| SparseVec { entries: p }).collect(),
        }
    }

    pub fn from_i64(field: Field, rows: &[Vec<i64>]) -> Mat {
        let ncols = rows.first().map_or(0, |r| r.len());
        let rs: Vec<SparseVec> = rows
            .iter()
            .map(|r| SparseVec::from_dense(&r.iter().map(|x| field.from_i64(*x)).collect::<Vec<_>>()))
            .collect();
        Mat::from_rows(ncols, field, &rs)
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn col(&self, j: usize) -> &SparseVec {
        &self.data[j]
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.data
    }

    pub fn set_col(&mut self, j: usize, v: SparseVec) {
        self.data[j] = v;
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.data[j].get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn row_vectors(&self) -> Vec<SparseVec> {
        let mut rows: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); self.rows];
        for (j, c) in self.data.iter().enumerate() {
            for (i, x) in c.iter() {
                rows[*i].push((j, x.clone()));
            }
        }
        rows.into_iter().map(|p| SparseVec { entries: p }).collect()
    }

    pub fn transpose(&self) -> Mat {
        Mat { rows: self.cols, cols: self.rows, field: self.field, data: self.row_vectors() }
    }

    pub fn mul_vec(&self, v: &SparseVec) -> SparseVec {
        let mut acc = Accum::new();
        for (j, x) in v.iter() {
            acc.add_scaled(x, &self.data[*j]);
        }
        acc.finish()
    }

    pub fn mul(&self, o: &Mat) -> Result<Mat> {
        if self.cols != o.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        Ok(Mat {
            rows: self.rows,
            cols: o.cols,
            field: self.field,
            data: o.data.iter().map(|c| self.mul_vec(c)).collect(),
        })
    }

    pub fn add(&self, o: &Mat) -> Result<Mat> {
        self.combine(o, &self.field.one())
    }

    pub fn sub(&self, o: &Mat) -> Result<Mat> {
        self.combine(o, &-self.field.one())
    }

    fn combine(&self, o: &Mat, c: &Scalar) -> Result<Mat> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(Error::Dimension("matrix sum shapes differ".into()));
        }
        Ok(Mat {
            rows: self.rows,
            cols: self.cols,
            field: self.field,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.add_scaled(c, b)).collect(),
        })
    }

    pub fn scale(&self, c: &Scalar) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            field: self.field,
            data: self.data.iter().map(|v| v.scale(c)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.is_zero())
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|c| c.nnz()).sum()
    }

    fn row_echelon(&self) -> Echelon {
        let rows = self.row_vectors();
        Echelon::from_vectors(self.cols, self.field, &rows)
    }

    pub fn rank(&self) -> usize {
        if self.rows < self.cols {
            self.row_echelon().rank()
        } else {
            Echelon::from_vectors(self.rows, self.field, &self.data).rank()
        }
    }

    /// Canonical kernel basis: one vector per free column `j` of the reduced
    /// row echelon form, with `x_j = 1`.
    pub fn kernel_basis(&self) -> Vec<SparseVec> {
        self.row_echelon().null_space()
    }

    /// Reduced echelon basis of the column space.
    pub fn image_basis(&self) -> Vec<SparseVec> {
        Echelon::from_vectors(self.rows, self.field, &self.data).rows().to_vec()
    }

    /// Some `x` with `self * x = b` (free variables set to zero), or `None`.
    pub fn solve(&self, b: &SparseVec) -> Option<SparseVec> {
        let n = self.cols;
        let mut rows = self.row_vectors();
        for (i, x) in b.iter() {
            if *i >= rows.len() {
                return None;
            }
            rows[*i] = rows[*i].add(&SparseVec { entries: vec![(n, x.clone())] });
        }
        let e = Echelon::from_vectors(n + 1, self.field, &rows);
        let mut out = Vec::new();
        for r in e.rows() {
            let p = r.leading().unwrap().0;
            if p == n {
                return None;
            }
            if let Some(x) = r.get(n) {
                out.push((p, x.clone()));
            }
        }
        Some(SparseVec::from_pairs(out))
    }

    pub fn to_dense(&self) -> Vec<Vec<Scalar>> {
        let mut out = vec![vec![self.field.zero(); self.cols]; self.rows];
        for (j, c) in self.data.iter().enumerate() {
            for (i, x) in c.iter() {
                out[*i][j] = x.clone();
            }
        }
        out
    }

    /// Is this square matrix invertible.
    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }
}

/// A quotient `W / S` for subspaces `S ⊆ W ⊆ F^dim`.
///
/// Representatives are the reduced echelon basis of `W` modulo `S`, so
/// they are canonical once `S` and `W` are fixed.
#[derive(Clone, Debug)]
pub struct Quotient {
    sub: Echelon,
    reps: Echelon,
}

impl Quotient {
    pub fn new<'a>(
        dim: usize,
        field: Field,
        sub: impl IntoIterator<Item = &'a SparseVec>,
        whole: impl IntoIterator<Item = &'a SparseVec>,
    ) -> Quotient {
        let sub = Echelon::from_vectors(dim, field, sub);
        Quotient::with_sub(sub, whole)
    }

    pub fn with_sub<'a>(mut sub: Echelon, whole: impl IntoIterator<Item = &'a SparseVec>) -> Quotient {
        sub.rref();
        let mut reps = Echelon::new(sub.dim(), sub.field());
        for w in whole {
            reps.insert(&sub.reduce(w));
        }
        reps.rref();
        Quotient { sub, reps }
    }

    /// Quotient of the full space `F^dim` by `sub`.
    pub fn of_space<'a>(dim: usize, field: Field, sub: impl IntoIterator<Item = &'a SparseVec>) -> Quotient {
        let units: Vec<SparseVec> = (0..dim).map(|i| SparseVec::unit(i, field)).collect();
        let sub = Echelon::from_vectors(dim, field, sub);
        Quotient::with_sub(sub, units.iter())
    }

    pub fn dim(&self) -> usize {
        self.reps.rank()
    }

    pub fn reps(&self) -> &[SparseVec] {
        self.reps.rows()
    }

    pub fn sub(&self) -> &Echelon {
        &self.sub
    }

    /// Coordinates of the class of `v`, or an error if `v` is not in `W`.
    pub fn coords(&self, v: &SparseVec) -> Result<Vec<Scalar>> {
        let r = self.sub.reduce(v);
        self.reps.coordinates(&r).ok_or(Error::NotInSubspace)
    }

    pub fn is_trivial_class(&self, v: &SparseVec) -> bool {
        self.sub.contains(v)
    }
}

/// Result of [`quotient_data`].
pub struct QuotientData {
    pub reps: Vec<SparseVec>,
    pub quotient: Quotient,
}

/// Complement representatives for `sub` inside `F^dim` with a coordinate map.
pub fn quotient_data(sub: &[SparseVec], dim: usize, field: Field) -> QuotientData {
    let quotient = Quotient::of_space(dim, field, sub);
    QuotientData { reps: quotient.reps().to_vec(), quotient }
}

/// Small deterministic generator for pseudorandom test data.
pub fn seeded_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

/// Pseudorandom scalar with numerator in `[-bound, bound]`.
pub fn random_scalar(rng: &mut impl rand::Rng, field: Field, bound: i64) -> Scalar {
    field.from_i64(rng.gen_range(-bound..=bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const QF: Field = Field::Rational;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::Q(Q::new(n, d))
    }

    #[test]
    fn rank_of_dependent_rows() {
        let m = Mat::from_i64(QF, &[vec![1, 2], vec![2, 4]]);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn kernel_is_canonical() {
        let m = Mat::from_i64(QF, &[vec![1, 1, 0]]);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 2);
        assert_eq!(k[0].to_dense(3, QF), vec![q(-1, 1), q(1, 1), q(0, 1)]);
        assert_eq!(k[1].to_dense(3, QF), vec![q(0, 1), q(0, 1), q(1, 1)]);
    }

    #[test]
    fn quotient_of_line() {
        let sub = vec![SparseVec::unit(0, QF)];
        let qd = quotient_data(&sub, 2, QF);
        assert_eq!(qd.reps, vec![SparseVec::unit(1, QF)]);
        let v = SparseVec::from_dense(&[q(3, 1), q(5, 1)]);
        assert_eq!(qd.quotient.coords(&v).unwrap(), vec![q(5, 1)]);
    }

    #[test]
    fn solve_scalar() {
        let m = Mat::from_i64(QF, &[vec![2]]);
        let x = m.solve(&SparseVec::unit(0, QF)).unwrap();
        assert_eq!(x.to_dense(1, QF), vec![q(1, 2)]);
        let z = Mat::from_i64(QF, &[vec![0]]);
        assert!(z.solve(&SparseVec::unit(0, QF)).is_none());
    }

    #[test]
    fn small_rationals_spill_into_bigints() {
        let big = Q::new(i64::MAX, 1);
        let s = big.mul(&big);
        assert!(matches!(s, Q::Big(_)));
        let back = s.mul(&big.inv().unwrap()).mul(&big.inv().unwrap());
        assert_eq!(back, Q::one());
        assert!(matches!(back, Q::Small(1, 1)));
    }

    #[test]
    fn display_of_rationals() {
        assert_eq!(q(-3, 2).to_string(), "-3/2");
        assert_eq!(q(4, 2).to_string(), "2");
        assert_eq!(QF.parse_scalar("-6/4").unwrap(), q(-3, 2));
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = Field::prime(7).unwrap();
        let a = f.from_i64(3);
        assert_eq!(&a * &a.inv().unwrap(), f.one());
        assert_eq!(f.from_ratio(1, 2).unwrap(), f.from_i64(4));
        assert!(f.from_ratio(1, 7).is_err());
        assert!(Field::prime(8).is_err());
        assert_eq!(Field::parse("Fp:5").unwrap(), Field::Prime(5));
    }

    fn arb_mat(max: usize) -> impl Strategy<Value = Mat> {
        (1..=max, 1..=max).prop_flat_map(|(r, c)| {
            prop::collection::vec(prop::collection::vec(-2i64..=2, c), r)
                .prop_map(|rows| Mat::from_i64(QF, &rows))
        })
    }

    proptest! {
        #[test]
        fn rank_plus_nullity(m in arb_mat(6)) {
            prop_assert_eq!(m.rank() + m.kernel_basis().len(), m.ncols());
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }

        #[test]
        fn kernel_vectors_are_killed(m in arb_mat(6)) {
            for k in m.kernel_basis() {
                prop_assert!(m.mul_vec(&k).is_zero());
            }
        }

        #[test]
        fn solve_recovers_image(m in arb_mat(5), x in prop::collection::vec(-3i64..=3, 5)) {
            let x: Vec<Scalar> = x.iter().take(m.ncols()).map(|v| QF.from_i64(*v)).collect();
            let b = m.mul_vec(&SparseVec::from_dense(&x));
            let y = m.solve(&b).unwrap();
            prop_assert_eq!(m.mul_vec(&y), b);
        }

        #[test]
        fn rational_ops_match_bigrational(a in -1000i64..1000, b in 1i64..1000, c in -1000i64..1000, d in 1i64..1000) {
            let (x, y) = (Q::new(a, b), Q::new(c, d));
            let (bx, by) = (x.to_big(), y.to_big());
            prop_assert_eq!(x.add(&y).to_big(), &bx + &by);
            prop_assert_eq!(x.mul(&y).to_big(), &bx * &by);
            prop_assert_eq!(x.sub(&y).to_big(), &bx - &by);
        }

        #[test]
        fn quotient_coords_reconstruct(m in arb_mat(5), v in prop::collection::vec(-3i64..=3, 5)) {
            let n = m.nrows();
            let sub = m.columns().to_vec();
            let qd = quotient_data(&sub, n, QF);
            prop_assert_eq!(qd.reps.len() + m.rank(), n);
            let v = SparseVec::from_dense(&v.iter().take(n).map(|x| QF.from_i64(*x)).collect::<Vec<_>>());
            let c = qd.quotient.coords(&v).unwrap();
            let mut w = v.clone();
            for (ci, r) in c.iter().zip(&qd.reps) {
                w = w.add_scaled(&-ci, r);
            }
            prop_assert!(qd.quotient.is_trivial_class(&w));
        }
    }
}
