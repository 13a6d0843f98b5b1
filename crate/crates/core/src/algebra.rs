//! Finite dimensional algebras given by structure constants, and their
//! construction from a presentation `kQ/I`.

use crate::error::{Error, Result};
use crate::exactlin::{Accum, Echelon, Field, Mat, Scalar, SparseVec};
use crate::quiver::{Path, Presentation, Quiver, Relation};
use std::collections::HashMap;
use std::sync::Arc;

/// Default bound on path length when certifying admissibility.
pub const DEFAULT_LENGTH_CAP: usize = 30;
/// Refuse to enumerate more paths than this while certifying.
const PATH_LIMIT: usize = 200_000;

/// Complete set of primitive orthogonal idempotents among the basis, and
/// the idempotent pair `(x, y)` with `e_x b e_y = b` for every basis element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Peirce {
    pub vertex_names: Vec<String>,
    pub idempotents: Vec<usize>,
    pub tags: Vec<(usize, usize)>,
}

impl Peirce {
    pub fn num_vertices(&self) -> usize {
        self.idempotents.len()
    }

    pub fn is_idempotent(&self, i: usize) -> bool {
        self.idempotents.contains(&i)
    }
}

/// Basis paths and normal forms for an algebra built from a presentation.
#[derive(Clone, Debug)]
pub struct PathData {
    pub presentation: Presentation,
    pub basis_paths: Vec<Path>,
    /// Every path of this length or longer lies in the ideal.
    pub truncation: usize,
    /// Least `L` with `rad^L = 0`.
    pub nilpotency: usize,
    coord: HashMap<Path, usize>,
    reducer: Echelon,
    basis_of_coord: HashMap<usize, usize>,
    ncoords: usize,
}

impl PathData {
    /// Normal form of a path in the algebra basis.
    pub fn normal_form(&self, p: &Path) -> SparseVec {
        if p.len() >= self.truncation {
            return SparseVec::new();
        }
        let field = self.presentation.field;
        let c = self.coord[p];
        let r = self.reducer.reduce(&SparseVec::unit(c, field));
        r.map_indices(|i| self.basis_of_coord[&i])
    }

    pub fn quiver(&self) -> &Quiver {
        &self.presentation.quiver
    }

    fn dims(&self) -> usize {
        self.ncoords
    }
}

/// A finite dimensional unital algebra with a fixed basis.
#[derive(Clone, Debug)]
pub struct Algebra {
    field: Field,
    labels: Vec<String>,
    mult: Vec<Vec<SparseVec>>,
    unit: SparseVec,
    peirce: Option<Peirce>,
    paths: Option<Arc<PathData>>,
}

impl Algebra {
    /// Builds from structure constants `mult[i][j] = b_i b_j`; checks
    /// associativity and the unit.
    pub fn new(
        field: Field,
        labels: Vec<String>,
        mult: Vec<Vec<SparseVec>>,
        unit: SparseVec,
        peirce: Option<Peirce>,
    ) -> Result<Algebra> {
        let a = Algebra { field, labels, mult, unit, peirce, paths: None };
        a.validate()?;
        Ok(a)
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim();
        if self.mult.len() != n || self.mult.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("structure constant table has wrong shape".into()));
        }
        for i in 0..n {
            let b = SparseVec::unit(i, self.field);
            if self.mul(&self.unit, &b) != b || self.mul(&b, &self.unit) != b {
                return Err(Error::Invalid("unit element does not act as identity".into()));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let ij = &self.mult[i][j];
                for k in 0..n {
                    let left = self.mul(ij, &SparseVec::unit(k, self.field));
                    let right = self.mul(&SparseVec::unit(i, self.field), &self.mult[j][k]);
                    if left != right {
                        return Err(Error::Invalid(format!(
                            "multiplication is not associative at ({}, {}, {})",
                            self.labels[i], self.labels[j], self.labels[k]
                        )));
                    }
                }
            }
        }
        if let Some(p) = &self.peirce {
            let mut sum = SparseVec::new();
            for &e in &p.idempotents {
                sum = sum.add(&SparseVec::unit(e, self.field));
            }
            if sum != self.unit {
                return Err(Error::Invalid("idempotents do not sum to the unit".into()));
            }
            for (b, &(x, y)) in p.tags.iter().enumerate() {
                let bv = SparseVec::unit(b, self.field);
                let ex = SparseVec::unit(p.idempotents[x], self.field);
                let ey = SparseVec::unit(p.idempotents[y], self.field);
                if self.mul(&self.mul(&ex, &bv), &ey) != bv {
                    return Err(Error::NotHomogeneous(format!("basis element {}", self.labels[b])));
                }
            }
        }
        Ok(())
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn unit(&self) -> &SparseVec {
        &self.unit
    }

    pub fn peirce(&self) -> Option<&Peirce> {
        self.peirce.as_ref()
    }

    pub fn path_data(&self) -> Option<&PathData> {
        self.paths.as_deref()
    }

    pub fn basis(&self, i: usize) -> SparseVec {
        SparseVec::unit(i, self.field)
    }

    pub fn mul_basis(&self, i: usize, j: usize) -> &SparseVec {
        &self.mult[i][j]
    }

    pub fn mul(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        let mut acc = Accum::new();
        for (i, a) in x.iter() {
            for (j, b) in y.iter() {
                let ab = a * b;
                acc.add_scaled(&ab, &self.mult[*i][*j]);
            }
        }
        acc.finish()
    }

    /// Matrix of `y -> x y`.
    pub fn left_matrix(&self, x: &SparseVec) -> Mat {
        let cols = (0..self.dim()).map(|j| self.mul(x, &self.basis(j))).collect();
        Mat::from_columns(self.dim(), self.field, cols)
    }

    /// Matrix of `y -> y x`.
    pub fn right_matrix(&self, x: &SparseVec) -> Mat {
        let cols = (0..self.dim()).map(|j| self.mul(&self.basis(j), x)).collect();
        Mat::from_columns(self.dim(), self.field, cols)
    }

    /// Indices of basis elements that are not among the Peirce idempotents.
    pub fn radical_indices(&self) -> Vec<usize> {
        match &self.peirce {
            Some(p) => (0..self.dim()).filter(|i| !p.is_idempotent(*i)).collect(),
            None => (0..self.dim()).collect(),
        }
    }

    /// Basis of the center.
    pub fn center_basis(&self) -> Vec<SparseVec> {
        let n = self.dim();
        let mut rows = Vec::new();
        for j in 0..n {
            // coefficient rows of x -> x b_j - b_j x
            let mut cols: Vec<Accum> = (0..n).map(|_| Accum::new()).collect();
            for (i, col) in cols.iter_mut().enumerate() {
                col.add_vec(&self.mult[i][j]);
                col.add_scaled(&-self.field.one(), &self.mult[j][i]);
            }
            let m = Mat::from_columns(n, self.field, cols.into_iter().map(|c| c.finish()).collect());
            rows.extend(m.row_vectors());
        }
        Echelon::from_vectors(n, self.field, &rows).null_space()
    }

    /// Element for a path, through the presentation.
    pub fn path_element(&self, p: &Path) -> Result<SparseVec> {
        let pd = self.path_data().ok_or_else(|| Error::Precondition("algebra has no presentation".into()))?;
        Ok(pd.normal_form(p))
    }

    /// Element for a linear combination of paths.
    pub fn combination_element(&self, terms: &[(Scalar, Path)]) -> Result<SparseVec> {
        let mut acc = Accum::new();
        for (c, p) in terms {
            acc.add_scaled(c, &self.path_element(p)?);
        }
        Ok(acc.finish())
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| self.mult[i][j] == self.mult[j][i]))
    }

    pub fn format_element(&self, x: &SparseVec) -> String {
        if x.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (i, c)) in x.iter().enumerate() {
            let cs = c.to_string();
            let (neg, mag) = match cs.strip_prefix('-') {
                Some(m) => (true, m.to_string()),
                None => (false, cs),
            };
            if k > 0 {
                s.push_str(if neg { " - " } else { " + " });
            } else if neg {
                s.push('-');
            }
            if mag != "1" {
                s.push_str(&mag);
                s.push('*');
            }
            s.push_str(&self.labels[*i]);
        }
        s
    }
}

fn paths_by_length(q: &Quiver, max: usize) -> Result<Vec<Vec<Path>>> {
    let mut out = vec![q.paths_of_length(0)];
    let mut total = out[0].len();
    for l in 1..=max {
        let prev = &out[l - 1];
        let mut next = Vec::new();
        for p in prev {
            for (i, a) in q.arrows().iter().enumerate() {
                if a.from == p.end {
                    let mut arrows = p.arrows.clone();
                    arrows.push(i);
                    next.push(Path { start: p.start, end: a.to, arrows });
                }
            }
        }
        next.sort();
        total += next.len();
        if total > PATH_LIMIT {
            return Err(Error::NotAdmissible(format!(
                "more than {PATH_LIMIT} paths of length at most {l}; could not certify admissibility"
            )));
        }
        out.push(next);
    }
    Ok(out)
}

/// All `u r v` with path lengths satisfying `keep(|u|+|v|, r)`, with terms
/// of length at least `drop_from` removed.
fn ideal_spanning_set(
    rels: &[Relation],
    paths: &[Vec<Path>],
    max_extra: impl Fn(&Relation) -> Option<usize>,
    drop_from: usize,
) -> Vec<Vec<(Scalar, Path)>> {
    let mut out = Vec::new();
    for r in rels {
        let Some(extra) = max_extra(r) else { continue };
        for lu in 0..=extra {
            for u in paths[lu].iter().filter(|u| u.end == r.from()) {
                for lv in 0..=(extra - lu) {
                    for v in paths[lv].iter().filter(|v| v.start == r.to()) {
                        let mut terms = Vec::new();
                        for (c, p) in &r.terms {
                            let w = u.concat(p).unwrap().concat(v).unwrap();
                            if w.len() < drop_from {
                                terms.push((c.clone(), w));
                            }
                        }
                        if !terms.is_empty() {
                            out.push(terms);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Least `L` such that every path of length `L` lies in the ideal, found by
/// writing each such path exactly as a combination of `u r v`.
fn certify_truncation(pres: &Presentation, cap: usize) -> Result<usize> {
    let q = &pres.quiver;
    for m in 1..=cap {
        let paths = paths_by_length(q, m)?;
        let all: Vec<&Path> = paths.iter().flatten().collect();
        let index: HashMap<&Path, usize> = all.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        let gens = ideal_spanning_set(
            &pres.relations,
            &paths,
            |r| m.checked_sub(r.max_len()),
            usize::MAX,
        );
        let vecs: Vec<SparseVec> = gens
            .iter()
            .map(|t| SparseVec::from_pairs(t.iter().map(|(c, p)| (index[p], c.clone())).collect()))
            .collect();
        let ech = Echelon::from_vectors(all.len(), pres.field, &vecs);
        for l in 1..=m {
            if paths[l].iter().all(|p| ech.contains(&SparseVec::unit(index[p], pres.field))) {
                return Ok(l);
            }
        }
    }
    Err(Error::NotAdmissible(format!(
        "no power of the arrow ideal up to length {cap} lies in the ideal"
    )))
}

/// Builds `kQ/I`. The basis consists of the earliest paths in path order
/// that are independent modulo the ideal.
pub fn build_algebra(pres: &Presentation) -> Result<Algebra> {
    build_algebra_with_cap(pres, DEFAULT_LENGTH_CAP)
}

pub fn build_algebra_with_cap(pres: &Presentation, cap: usize) -> Result<Algebra> {
    let field = pres.field;
    for r in &pres.relations {
        if r.terms.iter().any(|(c, _)| c.field() != field) {
            return Err(Error::FieldMismatch("relation coefficient outside the algebra field".into()));
        }
    }
    let q = &pres.quiver;
    let trunc = certify_truncation(pres, cap)?;
    let paths = paths_by_length(q, trunc.saturating_sub(1))?;
    let ascending: Vec<Path> = paths.iter().flatten().cloned().collect();
    let n = ascending.len();
    // Descending coordinates put pivots on the latest paths.
    let coord: HashMap<Path, usize> =
        ascending.iter().enumerate().map(|(i, p)| (p.clone(), n - 1 - i)).collect();
    let gens = ideal_spanning_set(
        &pres.relations,
        &paths,
        |r| (trunc - 1).checked_sub(r.min_len()),
        trunc,
    );
    let vecs: Vec<SparseVec> = gens
        .iter()
        .map(|t| SparseVec::from_pairs(t.iter().map(|(c, p)| (coord[p], c.clone())).collect()))
        .collect();
    let reducer = Echelon::from_vectors(n, field, &vecs);
    let basis_paths: Vec<Path> =
        ascending.iter().filter(|p| !reducer.is_pivot(coord[*p])).cloned().collect();
    let basis_of_coord: HashMap<usize, usize> =
        basis_paths.iter().enumerate().map(|(i, p)| (coord[p], i)).collect();
    let mut pd = PathData {
        presentation: pres.clone(),
        basis_paths: basis_paths.clone(),
        truncation: trunc,
        nilpotency: trunc,
        coord,
        reducer,
        basis_of_coord,
        ncoords: n,
    };
    debug_assert_eq!(pd.dims(), n);
    pd.nilpotency = (1..=trunc)
        .find(|l| paths.get(*l).map_or(true, |ps| ps.iter().all(|p| pd.normal_form(p).is_zero())))
        .unwrap_or(trunc);
    let dim = basis_paths.len();
    let mult: Vec<Vec<SparseVec>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| match basis_paths[i].concat(&basis_paths[j]) {
                    Some(p) => pd.normal_form(&p),
                    None => SparseVec::new(),
                })
                .collect()
        })
        .collect();
    let nv = q.num_vertices();
    let idempotents: Vec<usize> = (0..nv).collect();
    debug_assert!(basis_paths[..nv].iter().all(|p| p.is_trivial()));
    let tags = basis_paths.iter().map(|p| (p.start, p.end)).collect();
    let mut unit = SparseVec::new();
    for e in &idempotents {
        unit = unit.add(&SparseVec::unit(*e, field));
    }
    let peirce = Peirce { vertex_names: q.vertices().to_vec(), idempotents, tags };
    let labels = basis_paths.iter().map(|p| q.path_name(p)).collect();
    let mut a = Algebra::new(field, labels, mult, unit, Some(peirce))?;
    a.paths = Some(Arc::new(pd));
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::Quiver;

    pub(crate) fn ex35_c() -> Presentation {
        let q = Quiver::new(&["0", "1"], &[("alpha0", "0", "1"), ("alpha1", "1", "0")]).unwrap();
        Presentation::parse(Field::Rational, q, &["alpha0*alpha1", "alpha1*alpha0"]).unwrap()
    }

    fn ex35_b() -> Presentation {
        let q = Quiver::new(
            &["0", "1"],
            &[("a0", "0", "1"), ("a1", "1", "0"), ("abar0", "1", "0"), ("abar1", "0", "1")],
        )
        .unwrap();
        Presentation::parse(
            Field::Rational,
            q,
            &[
                "a0*a1",
                "a1*a0",
                "abar0*abar1",
                "abar1*abar0",
                "a0*abar0 - abar1*a1",
                "a1*abar1 - abar0*a0",
            ],
        )
        .unwrap()
    }

    #[test]
    fn radical_square_zero_cycle() {
        let a = build_algebra(&ex35_c()).unwrap();
        assert_eq!(a.dim(), 4);
        assert_eq!(a.labels(), &["e_0", "e_1", "alpha0", "alpha1"]);
        assert_eq!(a.path_data().unwrap().nilpotency, 2);
    }

    #[test]
    fn binomial_relations_basis() {
        let a = build_algebra(&ex35_b()).unwrap();
        assert_eq!(a.dim(), 8);
        // the earlier path of each binomial survives
        assert!(a.index_of("a0*abar0").is_some());
        assert!(a.index_of("a1*abar1").is_some());
        let pd = a.path_data().unwrap();
        let q = pd.quiver();
        let lhs = pd.normal_form(&q.parse_path("abar1*a1").unwrap());
        assert_eq!(lhs, a.basis(a.index_of("a0*abar0").unwrap()));
        assert_eq!(pd.nilpotency, 3);
    }

    #[test]
    fn mixed_length_relation() {
        let q = Quiver::new(
            &["1", "2", "3"],
            &[("alpha", "1", "2"), ("beta", "1", "3"), ("gamma", "3", "2"), ("eps", "2", "2")],
        )
        .unwrap();
        let p = Presentation::parse(Field::Rational, q, &["eps*eps", "alpha*eps - beta*gamma*eps"]).unwrap();
        let a = build_algebra(&p).unwrap();
        assert_eq!(a.dim(), 10);
        assert_eq!(a.path_data().unwrap().nilpotency, 4);
        let c = a.center_basis();
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn path_algebra_without_relations() {
        let q = Quiver::new(&["1", "2", "3"], &[("alpha", "1", "2"), ("beta", "1", "3"), ("gamma", "3", "2")]).unwrap();
        let a = build_algebra(&Presentation::new(Field::Rational, q, vec![])).unwrap();
        assert_eq!(a.dim(), 7);
    }

    #[test]
    fn rejects_non_admissible() {
        let q = Quiver::new(&["1"], &[("x", "1", "1")]).unwrap();
        let p = Presentation::new(Field::Prime(2), q.clone(), vec![]);
        assert!(matches!(build_algebra_with_cap(&p, 8), Err(Error::NotAdmissible(_))));
        // x^2 = x^3 only forces rad^2 = rad^3, never rad^L = 0
        let p = Presentation::parse(Field::Rational, q, &["x*x - x*x*x"]).unwrap();
        assert!(matches!(build_algebra_with_cap(&p, 8), Err(Error::NotAdmissible(_))));
    }

    #[test]
    fn center_of_commutative_algebra_is_everything() {
        let q = Quiver::new(&["1"], &[("x", "1", "1")]).unwrap();
        let p = Presentation::parse(Field::Rational, q, &["x*x*x"]).unwrap();
        let a = build_algebra(&p).unwrap();
        assert_eq!(a.dim(), 3);
        assert!(a.is_commutative());
        assert_eq!(a.center_basis().len(), 3);
    }
}
