//! Relation extensions: the quiver with one reversed arrow per minimal
//! relation, the potential `W = Σ ρ_i α_i`, its cyclic derivatives, and the
//! presentation of `B` by those derivatives plus the paths through two new
//! arrows.

use crate::algebra::{build_algebra, Algebra};
use crate::bimodule::Bimodule;
use crate::error::{Error, Result};
use crate::exactlin::{Echelon, Field, Scalar, SparseVec};
use crate::extcohom::ext_dc_c;
use crate::extension::{cale, lower_bound_check, trivial_extension, verify_ses, LowerBoundReport, SesReport};
use crate::hochschild::hh_dims;
use crate::quiver::{normalize_terms, Path, Presentation, Quiver, Relation};
use std::collections::{BTreeMap, HashMap};

/// Paths of length at most `max_len`, as coordinates of `kQ/J^(max_len+1)`.
struct Truncated {
    field: Field,
    paths: Vec<Vec<Path>>,
    all: Vec<Path>,
    index: HashMap<Path, usize>,
    dim: usize,
}

impl Truncated {
    fn new(q: &Quiver, field: Field, max_len: usize) -> Truncated {
        let paths: Vec<Vec<Path>> = (0..=max_len).map(|l| q.paths_of_length(l)).collect();
        let all: Vec<Path> = paths.iter().flatten().cloned().collect();
        let index: HashMap<Path, usize> = all.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let dim = all.len();
        Truncated { field, paths, all, index, dim }
    }

    fn max_len(&self) -> usize {
        self.paths.len() - 1
    }

    fn vector(&self, terms: &[(Scalar, Path)]) -> SparseVec {
        SparseVec::from_pairs(
            terms
                .iter()
                .filter(|(_, p)| p.len() <= self.max_len())
                .map(|(c, p)| (self.index[p], c.clone()))
                .collect(),
        )
    }

    /// All `u r v` with `|u| + |v| >= min_extra`.
    fn multiples(&self, r: &Relation, min_extra: usize) -> Vec<SparseVec> {
        let mut out = Vec::new();
        let Some(extra) = self.max_len().checked_sub(r.min_len()) else {
            return out;
        };
        for lu in 0..=extra {
            for u in self.paths[lu].iter().filter(|u| u.end == r.from()) {
                for lv in 0..=(extra - lu) {
                    if lu + lv < min_extra {
                        continue;
                    }
                    for v in self.paths[lv].iter().filter(|v| v.start == r.to()) {
                        let terms: Vec<(Scalar, Path)> = r
                            .terms
                            .iter()
                            .map(|(c, p)| (c.clone(), u.concat(p).unwrap().concat(v).unwrap()))
                            .collect();
                        let vec = self.vector(&terms);
                        if !vec.is_zero() {
                            out.push(vec);
                        }
                    }
                }
            }
        }
        out
    }

    fn ideal(&self, rels: &[&Relation]) -> Echelon {
        let vs: Vec<SparseVec> = rels.iter().flat_map(|r| self.multiples(r, 0)).collect();
        Echelon::from_vectors(self.dim, self.field, &vs)
    }
}

fn truncation(pres: &Presentation) -> Result<usize> {
    let c = build_algebra(pres)?;
    Ok(c.path_data().expect("built from a presentation").truncation)
}

/// A minimal system of relations: indices of the given relations whose
/// classes form a basis of `I/(JI + IJ)`, chosen greedily in order.
pub fn system_of_relations(pres: &Presentation) -> Result<Vec<usize>> {
    let t = Truncated::new(&pres.quiver, pres.field, truncation(pres)?);
    let mut span = Echelon::new(t.dim, pres.field);
    for r in &pres.relations {
        for v in t.multiples(r, 1) {
            span.insert(&v);
        }
    }
    Ok((0..pres.relations.len()).filter(|i| span.insert(&t.vector(&pres.relations[*i].terms))).collect())
}

/// `dim e_x (I/(JI+IJ)) e_y` for every pair `(x, y)` where it is nonzero.
pub fn minimal_relation_counts(pres: &Presentation) -> Result<BTreeMap<(usize, usize), usize>> {
    let t = Truncated::new(&pres.quiver, pres.field, truncation(pres)?);
    let mut out = BTreeMap::new();
    let nv = pres.quiver.num_vertices();
    for x in 0..nv {
        for y in 0..nv {
            let piece: Vec<&Relation> = pres.relations.iter().filter(|r| (r.from(), r.to()) == (x, y)).collect();
            if piece.is_empty() {
                continue;
            }
            // multiples of every relation landing in e_x kQ e_y
            let mut lower = Echelon::new(t.dim, pres.field);
            for r in &pres.relations {
                for v in t.multiples(r, 1) {
                    let p = &t.all[v.leading().unwrap().0];
                    if (p.start, p.end) == (x, y) {
                        lower.insert(&v);
                    }
                }
            }
            let base = lower.rank();
            for r in &piece {
                lower.insert(&t.vector(&r.terms));
            }
            if lower.rank() > base {
                out.insert((x, y), lower.rank() - base);
            }
        }
    }
    Ok(out)
}

/// A linear combination of cycles, each stored in its least rotation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Potential {
    pub terms: Vec<(Scalar, Vec<usize>)>,
}

pub fn least_rotation(cycle: &[usize]) -> Vec<usize> {
    (0..cycle.len()).map(|i| [&cycle[i..], &cycle[..i]].concat()).min().unwrap_or_default()
}

impl Potential {
    /// Rotates every cycle to canonical form and merges equal terms.
    pub fn new(q: &Quiver, terms: Vec<(Scalar, Vec<usize>)>) -> Result<Potential> {
        let mut acc: BTreeMap<Vec<usize>, Scalar> = BTreeMap::new();
        for (c, cyc) in terms {
            if cyc.is_empty() {
                return Err(Error::Invalid("empty cycle in potential".into()));
            }
            let closed = cyc.windows(2).all(|w| q.arrow(w[0]).to == q.arrow(w[1]).from)
                && q.arrow(*cyc.last().unwrap()).to == q.arrow(cyc[0]).from;
            if !closed {
                return Err(Error::Invalid("potential term is not a cycle".into()));
            }
            let key = least_rotation(&cyc);
            let e = acc.entry(key).or_insert_with(|| c.field().zero());
            *e = &*e + &c;
        }
        let mut terms: Vec<(Scalar, Vec<usize>)> =
            acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (c, k)).collect();
        terms.sort_by(|a, b| (a.1.len(), &a.1).cmp(&(b.1.len(), &b.1)));
        Ok(Potential { terms })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn display(&self, q: &Quiver) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let rel = Relation {
            terms: self
                .terms
                .iter()
                .map(|(c, cyc)| {
                    let a = q.arrow(cyc[0]);
                    (c.clone(), Path { start: a.from, end: a.from, arrows: cyc.clone() })
                })
                .collect(),
        };
        rel.display(q)
    }
}

/// `∂_a W`: for each occurrence of `a` in a cycle, the rest of the cycle
/// read from just after that occurrence.
pub fn cyclic_derivative(q: &Quiver, w: &Potential, a: usize) -> Vec<(Scalar, Path)> {
    let ar = q.arrow(a);
    let mut out = Vec::new();
    for (c, cyc) in &w.terms {
        let s = cyc.len();
        for i in (0..s).filter(|i| cyc[*i] == a) {
            let arrows: Vec<usize> = (1..s).map(|k| cyc[(i + k) % s]).collect();
            out.push((c.clone(), Path { start: ar.to, end: ar.from, arrows }));
        }
    }
    normalize_terms(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewArrow {
    /// Index of the arrow in the extended quiver.
    pub arrow: usize,
    /// Index of the reversed relation in the presentation of `C`.
    pub relation: usize,
}

#[derive(Clone, Debug)]
pub struct RelationExtensionQuiver {
    pub quiver: Quiver,
    pub new_arrows: Vec<NewArrow>,
}

/// The quiver of `C` with an arrow `y -> x` for each relation `x -> y` of a
/// minimal system. New arrows are named `rel1, rel2, …` unless `names` is
/// given.
pub fn relation_extension_quiver(pres: &Presentation, names: Option<&[String]>) -> Result<RelationExtensionQuiver> {
    if !pres.quiver.is_acyclic() {
        return Err(Error::Precondition("relation extensions need a triangular algebra".into()));
    }
    let system = system_of_relations(pres)?;
    if let Some(ns) = names {
        if ns.len() != system.len() {
            return Err(Error::Invalid(format!("{} names given for {} new arrows", ns.len(), system.len())));
        }
    }
    let mut extra = Vec::new();
    let mut k = 0;
    for (j, &r) in system.iter().enumerate() {
        let rel = &pres.relations[r];
        let name = match names {
            Some(ns) => ns[j].clone(),
            None => loop {
                k += 1;
                let n = format!("rel{k}");
                if pres.quiver.arrow_by_name(&n).is_none() {
                    break n;
                }
            },
        };
        extra.push((name, rel.to(), rel.from()));
    }
    let quiver = pres.quiver.with_arrows(&extra)?;
    let n0 = pres.quiver.num_arrows();
    let new_arrows = system.iter().enumerate().map(|(j, &r)| NewArrow { arrow: n0 + j, relation: r }).collect();
    Ok(RelationExtensionQuiver { quiver, new_arrows })
}

/// `W = Σ ρ_i α_i`.
pub fn keller_potential(pres: &Presentation, rq: &RelationExtensionQuiver) -> Result<Potential> {
    let mut terms = Vec::new();
    for na in &rq.new_arrows {
        for (c, p) in &pres.relations[na.relation].terms {
            let mut cyc = p.arrows.clone();
            cyc.push(na.arrow);
            terms.push((c.clone(), cyc));
        }
    }
    Potential::new(&rq.quiver, terms)
}

/// Relation extension with its presentation and algebra.
#[derive(Clone, Debug)]
pub struct RelationExtension {
    pub quiver: RelationExtensionQuiver,
    pub potential: Potential,
    /// Nonzero cyclic derivatives, by arrow.
    pub derivatives: Vec<Relation>,
    /// Paths `α p β` through two new arrows not implied by the other relations.
    pub j_relations: Vec<Relation>,
    /// Such paths already in the ideal of the other relations.
    pub implied_j: Vec<Relation>,
    pub presentation: Presentation,
    pub algebra: Algebra,
}

/// Old paths (possibly trivial) between every pair of vertices.
fn old_paths(q: &Quiver, n_old: usize, from: usize, to: usize) -> Vec<Path> {
    let mut out = Vec::new();
    let mut stack = vec![q.trivial_path(from)];
    while let Some(p) = stack.pop() {
        if p.end == to {
            out.push(p.clone());
        }
        for a in 0..n_old {
            if q.arrow(a).from == p.end {
                stack.push(p.concat(&q.arrow_path(a)).unwrap());
            }
        }
    }
    out.sort();
    out
}

pub fn relation_extension(pres: &Presentation, names: Option<&[String]>) -> Result<RelationExtension> {
    let rq = relation_extension_quiver(pres, names)?;
    let q = &rq.quiver;
    let field = pres.field;
    let potential = keller_potential(pres, &rq)?;
    let mut derivatives = Vec::new();
    for a in 0..q.num_arrows() {
        let d = cyclic_derivative(q, &potential, a);
        if d.is_empty() {
            continue;
        }
        if d.iter().any(|(_, p)| p.len() < 2) {
            return Err(Error::NotAdmissible(format!("cyclic derivative by '{}' has a term of length below 2", q.arrow(a).name)));
        }
        derivatives.push(Relation { terms: d });
    }
    let n_old = pres.quiver.num_arrows();
    let mut j_all = Vec::new();
    for a in &rq.new_arrows {
        for b in &rq.new_arrows {
            let (x, y) = (q.arrow(a.arrow).to, q.arrow(b.arrow).from);
            for p in old_paths(q, n_old, x, y) {
                let path = q.arrow_path(a.arrow).concat(&p).unwrap().concat(&q.arrow_path(b.arrow)).unwrap();
                j_all.push(Relation { terms: vec![(field.one(), path)] });
            }
        }
    }
    let mut all = derivatives.clone();
    all.extend(j_all.iter().cloned());
    let full = build_algebra(&Presentation::new(field, q.clone(), all.clone()))?;
    let trunc = full.path_data().unwrap().truncation;
    let t = Truncated::new(q, field, trunc);
    let mut kept: Vec<Relation> = Vec::new();
    let mut implied = Vec::new();
    for (i, g) in j_all.iter().enumerate() {
        let mut others: Vec<&Relation> = derivatives.iter().chain(kept.iter()).collect();
        others.extend(j_all[i + 1..].iter().filter(|r| r.max_len() < g.max_len()));
        if t.ideal(&others).contains(&t.vector(&g.terms)) {
            implied.push(g.clone());
        } else {
            kept.push(g.clone());
        }
    }
    let mut rels = derivatives.clone();
    rels.extend(kept.iter().cloned());
    let presentation = Presentation::new(field, q.clone(), rels);
    let (presentation, algebra, j_relations, implied_j) = match build_algebra(&presentation) {
        Ok(b) if b.dim() == full.dim() && relations_agree(&b, &full) => (presentation, b, kept, implied),
        _ => (Presentation::new(field, q.clone(), all), full.clone(), j_all, Vec::new()),
    };
    Ok(RelationExtension { quiver: rq, potential, derivatives, j_relations, implied_j, presentation, algebra })
}

/// Same basis paths: the smaller relation set defines the same ideal.
fn relations_agree(a: &Algebra, b: &Algebra) -> bool {
    a.path_data().unwrap().basis_paths == b.path_data().unwrap().basis_paths
        && (0..a.dim()).all(|i| (0..a.dim()).all(|j| a.mul_basis(i, j) == b.mul_basis(i, j)))
}

impl RelationExtension {
    pub fn relations(&self) -> &[Relation] {
        &self.presentation.relations
    }

    pub fn relation_strings(&self) -> Vec<String> {
        self.relations().iter().map(|r| r.display(&self.quiver.quiver)).collect()
    }

    /// Number of new arrows per `(from, to)` in the extended quiver.
    pub fn new_arrow_counts(&self) -> BTreeMap<(usize, usize), usize> {
        let mut out = BTreeMap::new();
        for na in &self.quiver.new_arrows {
            let a = self.quiver.quiver.arrow(na.arrow);
            *out.entry((a.from, a.to)).or_insert(0) += 1;
        }
        out
    }
}

/// Comparison of the relation extension with `C ⋉ E₂`.
#[derive(Clone, Debug)]
pub struct CrosscheckReport {
    pub dim_c: usize,
    pub dim_b: usize,
    pub dim_e2: usize,
    pub arrow_counts_match: bool,
    /// `HH^0..=2` of the presented `B`.
    pub hh_b: Vec<usize>,
    /// `HH^0..=2` of `C ⋉ E₂`.
    pub hh_trivial: Vec<usize>,
    pub cale: usize,
    pub ses: SesReport,
    pub lower_bound: Option<LowerBoundReport>,
}

impl CrosscheckReport {
    pub fn dims_match(&self) -> bool {
        self.dim_b == self.dim_c + self.dim_e2
    }

    pub fn passed(&self) -> bool {
        self.dims_match()
            && self.arrow_counts_match
            && self.hh_b == self.hh_trivial
            && self.ses.holds().unwrap_or(false)
            && self.lower_bound.as_ref().map_or(true, |l| l.bound_holds())
    }
}

pub fn crosscheck_with_trivial_extension(pres: &Presentation, relext: &RelationExtension) -> Result<CrosscheckReport> {
    let c = build_algebra(pres)?;
    let e2 = ext_dc_c(&c, 2)?;
    let ext = trivial_extension(&c, &e2.module)?;
    let b = &relext.algebra;
    let expected: BTreeMap<(usize, usize), usize> =
        minimal_relation_counts(pres)?.into_iter().map(|((x, y), n)| ((y, x), n)).collect();
    let lower_bound = if e2.dim() > 0 { Some(lower_bound_check(&ext)?) } else { None };
    Ok(CrosscheckReport {
        dim_c: c.dim(),
        dim_b: b.dim(),
        dim_e2: e2.dim(),
        arrow_counts_match: expected == relext.new_arrow_counts(),
        hh_b: hh_dims(b, &Bimodule::regular(b), 2)?,
        hh_trivial: hh_dims(&ext.b, &Bimodule::regular(&ext.b), 2)?,
        cale: cale(&ext).basis.len(),
        ses: verify_ses(&ext)?,
        lower_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex59() -> Presentation {
        let q = Quiver::new(&["1", "2", "3"], &[("alpha", "1", "2"), ("beta", "2", "3"), ("gamma", "1", "3")]).unwrap();
        Presentation::parse(Field::Rational, q, &["alpha*beta"]).unwrap()
    }

    #[test]
    fn one_relation_gives_reversed_arrow() {
        let rq = relation_extension_quiver(&ex59(), None).unwrap();
        assert_eq!(rq.new_arrows.len(), 1);
        let a = rq.quiver.arrow(3);
        assert_eq!((a.name.as_str(), a.from, a.to), ("rel1", 2, 0));
    }

    #[test]
    fn potential_and_relations() {
        let names = vec!["delta".to_string()];
        let r = relation_extension(&ex59(), Some(&names)).unwrap();
        let q = &r.quiver.quiver;
        assert_eq!(r.potential.display(q), "alpha*beta*delta");
        let mut rels = r.relation_strings();
        rels.sort();
        assert_eq!(rels, vec!["alpha*beta", "beta*delta", "delta*alpha", "delta*gamma*delta"]);
        assert_eq!(r.implied_j.len(), 1);
        assert_eq!(r.algebra.dim(), 10);
    }

    #[test]
    fn derivative_counts_occurrences() {
        let q = Quiver::new(&["1"], &[("a", "1", "1")]).unwrap();
        let w = Potential::new(&q, vec![(Field::Rational.one(), vec![0, 0, 0])]).unwrap();
        let d = cyclic_derivative(&q, &w, 0);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].0.to_string(), "3");
    }

    #[test]
    fn rotation_invariance() {
        let names = vec!["delta".to_string()];
        let rq = relation_extension_quiver(&ex59(), Some(&names)).unwrap();
        let q = &rq.quiver;
        let w1 = Potential::new(q, vec![(Field::Rational.one(), vec![0, 1, 3])]).unwrap();
        let w2 = Potential::new(q, vec![(Field::Rational.one(), vec![3, 0, 1])]).unwrap();
        assert_eq!(w1, w2);
        for a in 0..4 {
            assert_eq!(cyclic_derivative(q, &w1, a), cyclic_derivative(q, &w2, a));
        }
        assert!(cyclic_derivative(q, &w1, 2).is_empty());
    }

    #[test]
    fn hereditary_is_unchanged() {
        let q = Quiver::new(&["1", "2"], &[("a", "1", "2")]).unwrap();
        let p = Presentation::new(Field::Rational, q, vec![]);
        let r = relation_extension(&p, None).unwrap();
        assert!(r.potential.is_zero());
        assert_eq!(r.algebra.dim(), 3);
    }

    #[test]
    fn redundant_relation_is_dropped() {
        let q = Quiver::new(&["1", "2", "3", "4"], &[("a", "1", "2"), ("b", "2", "3"), ("c", "3", "4")]).unwrap();
        let p = Presentation::parse(Field::Rational, q, &["a*b", "a*b*c", "b*c"]).unwrap();
        assert_eq!(system_of_relations(&p).unwrap(), vec![0, 2]);
        let counts = minimal_relation_counts(&p).unwrap();
        assert_eq!(counts.into_iter().collect::<Vec<_>>(), vec![((0, 2), 1), ((1, 3), 1)]);
    }

    #[test]
    fn crosscheck_on_one_relation() {
        let p = ex59();
        let r = relation_extension(&p, None).unwrap();
        let x = crosscheck_with_trivial_extension(&p, &r).unwrap();
        assert_eq!((x.dim_c, x.dim_e2, x.dim_b), (6, 4, 10));
        assert_eq!(x.hh_b, vec![2, 2, 2]);
        assert_eq!(x.cale, 0);
        assert!(x.passed(), "{x:?}");
    }
}
