//! Finite dimensional bimodules over an [`Algebra`], given by action
//! matrices on a fixed basis.

use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::exactlin::{random_scalar, seeded_rng, Accum, Echelon, Field, Mat, Quotient, Scalar, SparseVec};

#[derive(Clone, Debug)]
pub struct Bimodule {
    field: Field,
    labels: Vec<String>,
    left: Vec<Mat>,
    right: Vec<Mat>,
    tags: Option<Vec<(usize, usize)>>,
}

impl Bimodule {
    /// Builds from `left[i]` (action of `b_i` on the left) and `right[i]`;
    /// checks the bimodule axioms.
    pub fn new(alg: &Algebra, labels: Vec<String>, left: Vec<Mat>, right: Vec<Mat>) -> Result<Bimodule> {
        let n = labels.len();
        if left.len() != alg.dim() || right.len() != alg.dim() {
            return Err(Error::Dimension("one action matrix per algebra basis element".into()));
        }
        if left.iter().chain(&right).any(|m| m.nrows() != n || m.ncols() != n) {
            return Err(Error::Dimension("action matrices must be square of module dimension".into()));
        }
        let mut m = Bimodule { field: alg.field(), labels, left, right, tags: None };
        m.validate(alg)?;
        m.tags = m.detect_tags(alg);
        Ok(m)
    }

    fn validate(&self, alg: &Algebra) -> Result<()> {
        let id = Mat::identity(self.dim(), self.field);
        if self.left_by(alg.unit()) != id || self.right_by(alg.unit()) != id {
            return Err(Error::Invalid("unit does not act as identity".into()));
        }
        let d = alg.dim();
        for i in 0..d {
            for j in 0..d {
                let ij = alg.mul_basis(i, j);
                if self.left_by(ij) != self.left[i].mul(&self.left[j])? {
                    return Err(Error::Invalid(format!("left action fails at ({}, {})", alg.label(i), alg.label(j))));
                }
                if self.right_by(ij) != self.right[j].mul(&self.right[i])? {
                    return Err(Error::Invalid(format!("right action fails at ({}, {})", alg.label(i), alg.label(j))));
                }
                if self.left[i].mul(&self.right[j])? != self.right[j].mul(&self.left[i])? {
                    return Err(Error::Invalid("left and right actions do not commute".into()));
                }
            }
        }
        Ok(())
    }

    fn detect_tags(&self, alg: &Algebra) -> Option<Vec<(usize, usize)>> {
        let p = alg.peirce()?;
        let mut tags = Vec::with_capacity(self.dim());
        for v in 0..self.dim() {
            let vv = SparseVec::unit(v, self.field);
            let x = (0..p.num_vertices()).find(|x| self.left[p.idempotents[*x]].mul_vec(&vv) == vv)?;
            let y = (0..p.num_vertices()).find(|y| self.right[p.idempotents[*y]].mul_vec(&vv) == vv)?;
            tags.push((x, y));
        }
        Some(tags)
    }

    /// The regular bimodule `A`.
    pub fn regular(alg: &Algebra) -> Bimodule {
        let left = (0..alg.dim()).map(|i| alg.left_matrix(&alg.basis(i))).collect();
        let right = (0..alg.dim()).map(|i| alg.right_matrix(&alg.basis(i))).collect();
        let mut m = Bimodule { field: alg.field(), labels: alg.labels().to_vec(), left, right, tags: None };
        m.tags = m.detect_tags(alg);
        m
    }

    /// The dual `DA = Hom_k(A, k)` with `(c f)(x) = f(x c)` and `(f c)(x) = f(c x)`.
    pub fn dual(alg: &Algebra) -> Bimodule {
        let left = (0..alg.dim()).map(|i| alg.right_matrix(&alg.basis(i)).transpose()).collect();
        let right = (0..alg.dim()).map(|i| alg.left_matrix(&alg.basis(i)).transpose()).collect();
        let labels = alg.labels().iter().map(|l| format!("{l}*")).collect();
        let mut m = Bimodule { field: alg.field(), labels, left, right, tags: None };
        m.tags = m.detect_tags(alg);
        m
    }

    /// Sub-bimodule spanned by `basis` (vectors in `self`), which must be
    /// stable under both actions.
    pub fn sub(&self, alg: &Algebra, basis: &[SparseVec], labels: Vec<String>) -> Result<Bimodule> {
        let ech = Echelon::from_vectors(self.dim(), self.field, basis);
        if ech.rank() != basis.len() {
            return Err(Error::Invalid("sub-bimodule basis is dependent".into()));
        }
        let span = Mat::from_columns(self.dim(), self.field, basis.to_vec());
        let coords = |v: &SparseVec| -> Result<SparseVec> {
            span.solve(v).ok_or_else(|| Error::Invalid("subspace is not stable under the actions".into()))
        };
        let act = |mats: &[Mat]| -> Result<Vec<Mat>> {
            mats.iter()
                .map(|a| {
                    let cols = basis.iter().map(|b| coords(&a.mul_vec(b))).collect::<Result<Vec<_>>>()?;
                    Ok(Mat::from_columns(basis.len(), self.field, cols))
                })
                .collect()
        };
        let left = act(&self.left)?;
        let right = act(&self.right)?;
        Bimodule::new(alg, labels, left, right)
    }

    /// Restriction of scalars along an algebra map `f: A -> B`, given as a
    /// `dim B x dim A` matrix. `self` is a `B`-bimodule.
    pub fn restrict(&self, a: &Algebra, f: &Mat) -> Result<Bimodule> {
        let by = |mats: &[Mat], x: &SparseVec| -> Mat {
            let mut out = Mat::zeros(self.dim(), self.dim(), self.field);
            for (i, c) in x.iter() {
                out = out.add(&mats[*i].scale(c)).unwrap();
            }
            out
        };
        let left = (0..a.dim()).map(|i| by(&self.left, f.col(i))).collect();
        let right = (0..a.dim()).map(|i| by(&self.right, f.col(i))).collect();
        Bimodule::new(a, self.labels.clone(), left, right)
    }

    pub fn direct_sum(&self, alg: &Algebra, o: &Bimodule) -> Result<Bimodule> {
        let n = self.dim();
        let blk = |a: &Mat, b: &Mat| -> Mat {
            let mut cols = a.columns().to_vec();
            cols.extend(b.columns().iter().map(|c| c.map_indices(|i| i + n)));
            Mat::from_columns(n + o.dim(), self.field, cols)
        };
        let left = self.left.iter().zip(&o.left).map(|(a, b)| blk(a, b)).collect();
        let right = self.right.iter().zip(&o.right).map(|(a, b)| blk(a, b)).collect();
        let mut labels = self.labels.clone();
        labels.extend(o.labels.iter().cloned());
        Bimodule::new(alg, labels, left, right)
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

    pub fn tags(&self) -> Option<&[(usize, usize)]> {
        self.tags.as_deref()
    }

    pub fn left_matrix(&self, i: usize) -> &Mat {
        &self.left[i]
    }

    pub fn right_matrix(&self, i: usize) -> &Mat {
        &self.right[i]
    }

    pub fn left_by(&self, x: &SparseVec) -> Mat {
        let mut out = Mat::zeros(self.dim(), self.dim(), self.field);
        for (i, c) in x.iter() {
            out = out.add(&self.left[*i].scale(c)).unwrap();
        }
        out
    }

    pub fn right_by(&self, x: &SparseVec) -> Mat {
        let mut out = Mat::zeros(self.dim(), self.dim(), self.field);
        for (i, c) in x.iter() {
            out = out.add(&self.right[*i].scale(c)).unwrap();
        }
        out
    }

    /// `x . v` for an algebra element `x`.
    pub fn act_left(&self, x: &SparseVec, v: &SparseVec) -> SparseVec {
        let mut acc = Accum::new();
        for (i, c) in x.iter() {
            acc.add_scaled(c, &self.left[*i].mul_vec(v));
        }
        acc.finish()
    }

    /// `v . x` for an algebra element `x`.
    pub fn act_right(&self, v: &SparseVec, x: &SparseVec) -> SparseVec {
        let mut acc = Accum::new();
        for (i, c) in x.iter() {
            acc.add_scaled(c, &self.right[*i].mul_vec(v));
        }
        acc.finish()
    }
}

/// Basis indices that generate the algebra: vertices and arrows for a
/// presented algebra, every basis element otherwise.
pub fn generators(alg: &Algebra) -> Vec<usize> {
    match alg.path_data() {
        Some(pd) => (0..alg.dim()).filter(|i| pd.basis_paths[*i].len() <= 1).collect(),
        None => (0..alg.dim()).collect(),
    }
}

/// Basis of `Hom_{A-A}(E, F)` as `dim F x dim E` matrices.
pub fn hom_bimodule(alg: &Algebra, e: &Bimodule, f: &Bimodule) -> Vec<Mat> {
    let (de, df) = (e.dim(), f.dim());
    let field = alg.field();
    let var = |r: usize, c: usize| c * df + r;
    let mut rows = Vec::new();
    for g in generators(alg) {
        for (ae, af) in [(&e.left[g], &f.left[g]), (&e.right[g], &f.right[g])] {
            // (X ae - af X)[r][j] = 0
            let af_rows = af.row_vectors();
            for r in 0..df {
                for j in 0..de {
                    let mut acc = Accum::new();
                    for (k, x) in ae.col(j).iter() {
                        acc.add_entry(var(r, *k), x.clone());
                    }
                    for (k, x) in af_rows[r].iter() {
                        acc.add_entry(var(*k, j), -x);
                    }
                    let v = acc.finish();
                    if !v.is_zero() {
                        rows.push(v);
                    }
                }
            }
        }
    }
    let ech = Echelon::from_vectors(de * df, field, &rows);
    ech.null_space()
        .into_iter()
        .map(|v| {
            let mut cols = vec![Vec::new(); de];
            for (i, x) in v.iter() {
                cols[i / df].push((i % df, x.clone()));
            }
            Mat::from_columns(df, field, cols.into_iter().map(SparseVec::from_pairs).collect())
        })
        .collect()
}

/// `E ⊗_A F` with the canonical quotient of `E ⊗_k F`.
pub struct Tensor {
    pub module: Bimodule,
    pub quotient: Quotient,
    pub dim_e: usize,
    pub dim_f: usize,
}

impl Tensor {
    /// Coordinates of the class of `x ⊗ y`.
    pub fn class_of(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        let mut acc = Accum::new();
        for (i, a) in x.iter() {
            for (j, b) in y.iter() {
                acc.add_entry(i * self.dim_f + j, a * b);
            }
        }
        SparseVec::from_dense(&self.quotient.coords(&acc.finish()).expect("tensor is the whole space"))
    }

    /// The pure tensor `(x, y)` basis pair behind each representative.
    pub fn rep_pairs(&self) -> Vec<(usize, usize)> {
        self.quotient
            .reps()
            .iter()
            .map(|r| {
                let i = r.leading().unwrap().0;
                (i / self.dim_f, i % self.dim_f)
            })
            .collect()
    }
}

pub fn tensor_over(alg: &Algebra, e: &Bimodule, f: &Bimodule) -> Result<Tensor> {
    let (de, df) = (e.dim(), f.dim());
    let field = alg.field();
    let mut rels = Vec::new();
    for g in generators(alg) {
        for x in 0..de {
            let xc = e.right[g].col(x);
            for y in 0..df {
                let cy = f.left[g].col(y);
                let mut acc = Accum::new();
                for (i, a) in xc.iter() {
                    acc.add_entry(i * df + y, a.clone());
                }
                for (j, b) in cy.iter() {
                    acc.add_entry(x * df + j, -b);
                }
                let v = acc.finish();
                if !v.is_zero() {
                    rels.push(v);
                }
            }
        }
    }
    let quotient = Quotient::of_space(de * df, field, &rels);
    let mut t = Tensor {
        module: Bimodule { field, labels: Vec::new(), left: Vec::new(), right: Vec::new(), tags: None },
        quotient,
        dim_e: de,
        dim_f: df,
    };
    let pairs = t.rep_pairs();
    let labels: Vec<String> =
        pairs.iter().map(|(x, y)| format!("{}⊗{}", e.labels[*x], f.labels[*y])).collect();
    let n = pairs.len();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for g in 0..alg.dim() {
        let lc = pairs
            .iter()
            .map(|(x, y)| t.class_of(e.left[g].col(*x), &SparseVec::unit(*y, field)))
            .collect();
        let rc = pairs
            .iter()
            .map(|(x, y)| t.class_of(&SparseVec::unit(*x, field), f.right[g].col(*y)))
            .collect();
        left.push(Mat::from_columns(n, field, lc));
        right.push(Mat::from_columns(n, field, rc));
    }
    t.module = Bimodule::new(alg, labels, left, right)?;
    Ok(t)
}

/// Whether `z m = m z` for every central `z` and every `m`.
pub fn is_symmetric_over_center(alg: &Algebra, m: &Bimodule) -> bool {
    alg.center_basis().iter().all(|z| m.left_by(z) == m.right_by(z))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsoVerdict {
    /// An explicit isomorphism `E -> F`.
    Yes(Mat),
    No(String),
    /// The search found no invertible map; isomorphism is not excluded.
    Undecided,
}

/// Searches `Hom(E, F)` for an invertible map: small integer combinations
/// first, then pseudorandom draws.
pub fn bimodules_isomorphic(alg: &Algebra, e: &Bimodule, f: &Bimodule) -> IsoVerdict {
    if e.dim() != f.dim() {
        return IsoVerdict::No(format!("dimensions differ ({} vs {})", e.dim(), f.dim()));
    }
    let hom = hom_bimodule(alg, e, f);
    if hom.is_empty() {
        return IsoVerdict::No("no nonzero bimodule maps".into());
    }
    let field = alg.field();
    let combine = |coeffs: &[Scalar]| -> Mat {
        let mut m = Mat::zeros(f.dim(), e.dim(), field);
        for (c, h) in coeffs.iter().zip(&hom) {
            m = m.add(&h.scale(c)).unwrap();
        }
        m
    };
    const BOUND: i64 = 3;
    const BUDGET: usize = 20_000;
    let h = hom.len();
    let mut digits = vec![-BOUND; h];
    for _ in 0..BUDGET {
        let coeffs: Vec<Scalar> = digits.iter().map(|d| field.from_i64(*d)).collect();
        let m = combine(&coeffs);
        if m.is_invertible() {
            return IsoVerdict::Yes(m);
        }
        let mut k = 0;
        loop {
            if k == h {
                break;
            }
            digits[k] += 1;
            if digits[k] <= BOUND {
                break;
            }
            digits[k] = -BOUND;
            k += 1;
        }
        if k == h {
            break;
        }
    }
    let mut rng = seeded_rng(0x1503);
    for _ in 0..50 {
        let coeffs: Vec<Scalar> = (0..h).map(|_| random_scalar(&mut rng, field, 1000)).collect();
        let m = combine(&coeffs);
        if m.is_invertible() {
            return IsoVerdict::Yes(m);
        }
    }
    IsoVerdict::Undecided
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_algebra;
    use crate::quiver::{Presentation, Quiver};

    fn ex35_c() -> Algebra {
        let q = Quiver::new(&["0", "1"], &[("alpha0", "0", "1"), ("alpha1", "1", "0")]).unwrap();
        build_algebra(&Presentation::parse(Field::Rational, q, &["alpha0*alpha1", "alpha1*alpha0"]).unwrap()).unwrap()
    }

    fn a2() -> Algebra {
        let q = Quiver::new(&["1", "2"], &[("a", "1", "2")]).unwrap();
        build_algebra(&Presentation::new(Field::Rational, q, vec![])).unwrap()
    }

    #[test]
    fn regular_and_dual_are_bimodules() {
        let a = ex35_c();
        let r = Bimodule::regular(&a);
        let d = Bimodule::dual(&a);
        assert!(r.validate(&a).is_ok());
        assert!(d.validate(&a).is_ok());
        assert!(r.tags().is_some());
        // alpha0 in e_0 C e_1, its dual in e_1 DC e_0
        let i = a.index_of("alpha0").unwrap();
        assert_eq!(r.tags().unwrap()[i], (0, 1));
        assert_eq!(d.tags().unwrap()[i], (1, 0));
    }

    #[test]
    fn dual_versus_regular() {
        // k[x]/x^3 is symmetric; the 2-cycle with radical square zero is not
        let q = Quiver::new(&["1"], &[("x", "1", "1")]).unwrap();
        let t = build_algebra(&Presentation::parse(Field::Rational, q, &["x*x*x"]).unwrap()).unwrap();
        let v = bimodules_isomorphic(&t, &Bimodule::regular(&t), &Bimodule::dual(&t));
        assert!(matches!(v, IsoVerdict::Yes(_)));
        let a = ex35_c();
        let v = bimodules_isomorphic(&a, &Bimodule::regular(&a), &Bimodule::dual(&a));
        assert!(!matches!(v, IsoVerdict::Yes(_)));
    }

    #[test]
    fn hom_from_regular_is_centralizer() {
        for a in [ex35_c(), a2()] {
            let r = Bimodule::regular(&a);
            assert_eq!(hom_bimodule(&a, &r, &r).len(), a.center_basis().len());
        }
    }

    #[test]
    fn hereditary_algebra_dual_not_regular() {
        let a = a2();
        let v = bimodules_isomorphic(&a, &Bimodule::regular(&a), &Bimodule::dual(&a));
        assert!(!matches!(v, IsoVerdict::Yes(_)));
    }

    #[test]
    fn tensor_with_regular_is_identity() {
        for a in [ex35_c(), a2()] {
            let d = Bimodule::dual(&a);
            let t = tensor_over(&a, &Bimodule::regular(&a), &d).unwrap();
            assert_eq!(t.module.dim(), d.dim());
            assert!(matches!(bimodules_isomorphic(&a, &t.module, &d), IsoVerdict::Yes(_)));
        }
    }

    #[test]
    fn symmetric_over_center() {
        let a = ex35_c();
        assert!(is_symmetric_over_center(&a, &Bimodule::regular(&a)));
        assert!(is_symmetric_over_center(&a, &Bimodule::dual(&a)));
    }

    #[test]
    fn direct_sum_and_restriction() {
        let a = ex35_c();
        let r = Bimodule::regular(&a);
        let s = r.direct_sum(&a, &Bimodule::dual(&a)).unwrap();
        assert_eq!(s.dim(), 8);
        let id = Mat::identity(a.dim(), Field::Rational);
        let back = r.restrict(&a, &id).unwrap();
        assert_eq!(back.left_matrix(2), r.left_matrix(2));
        let hom = hom_bimodule(&a, &s, &s);
        assert!(hom.len() >= 2);
    }
}
