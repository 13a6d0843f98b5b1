//! Quivers, paths and relations.
//!
//! Paths compose left to right: `a*b` is `a` followed by `b`, so it starts
//! at the source of `a` and ends at the target of `b`.

use crate::error::{Error, Result};
use crate::exactlin::{Field, Scalar};
use std::cmp::Ordering;
use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub from: usize,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
    vertex_index: HashMap<String, usize>,
    arrow_index: HashMap<String, usize>,
}

fn valid_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Quiver {
    /// Arrows are `(name, from, to)` with vertex names.
    pub fn new(vertices: &[&str], arrows: &[(&str, &str, &str)]) -> Result<Quiver> {
        let vs: Vec<String> = vertices.iter().map(|s| s.to_string()).collect();
        let mut vertex_index = HashMap::new();
        for (i, v) in vs.iter().enumerate() {
            if vertex_index.insert(v.clone(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate vertex '{v}'")));
            }
        }
        let mut out = Vec::new();
        let mut arrow_index = HashMap::new();
        for (name, from, to) in arrows {
            if !valid_ident(name) {
                return Err(Error::Invalid(format!("bad arrow name '{name}'")));
            }
            let f = *vertex_index
                .get(*from)
                .ok_or_else(|| Error::Invalid(format!("arrow '{name}': unknown vertex '{from}'")))?;
            let t = *vertex_index
                .get(*to)
                .ok_or_else(|| Error::Invalid(format!("arrow '{name}': unknown vertex '{to}'")))?;
            if arrow_index.insert(name.to_string(), out.len()).is_some() {
                return Err(Error::Invalid(format!("duplicate arrow '{name}'")));
            }
            out.push(Arrow { name: name.to_string(), from: f, to: t });
        }
        Ok(Quiver { vertices: vs, arrows: out, vertex_index, arrow_index })
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow(&self, i: usize) -> &Arrow {
        &self.arrows[i]
    }

    pub fn vertex(&self, name: &str) -> Option<usize> {
        self.vertex_index.get(name).copied()
    }

    pub fn arrow_by_name(&self, name: &str) -> Option<usize> {
        self.arrow_index.get(name).copied()
    }

    /// A copy with extra arrows appended.
    pub fn with_arrows(&self, extra: &[(String, usize, usize)]) -> Result<Quiver> {
        let vs: Vec<&str> = self.vertices.iter().map(|s| s.as_str()).collect();
        let mut arrows: Vec<(String, String, String)> = self
            .arrows
            .iter()
            .map(|a| (a.name.clone(), self.vertices[a.from].clone(), self.vertices[a.to].clone()))
            .collect();
        for (n, f, t) in extra {
            arrows.push((n.clone(), self.vertices[*f].clone(), self.vertices[*t].clone()));
        }
        let refs: Vec<(&str, &str, &str)> =
            arrows.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())).collect();
        Quiver::new(&vs, &refs)
    }

    /// True when the quiver has no oriented cycle.
    pub fn is_acyclic(&self) -> bool {
        let n = self.num_vertices();
        let mut indeg = vec![0usize; n];
        for a in &self.arrows {
            indeg[a.to] += 1;
        }
        let mut stack: Vec<usize> = (0..n).filter(|v| indeg[*v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = stack.pop() {
            seen += 1;
            for a in self.arrows.iter().filter(|a| a.from == v) {
                indeg[a.to] -= 1;
                if indeg[a.to] == 0 {
                    stack.push(a.to);
                }
            }
        }
        seen == n
    }

    pub fn trivial_path(&self, v: usize) -> Path {
        Path { start: v, end: v, arrows: Vec::new() }
    }

    pub fn arrow_path(&self, a: usize) -> Path {
        let ar = &self.arrows[a];
        Path { start: ar.from, end: ar.to, arrows: vec![a] }
    }

    /// All paths of exactly length `len`, in path order.
    pub fn paths_of_length(&self, len: usize) -> Vec<Path> {
        let mut cur: Vec<Path> = (0..self.num_vertices()).map(|v| self.trivial_path(v)).collect();
        for _ in 0..len {
            let mut next = Vec::new();
            for p in &cur {
                for (i, a) in self.arrows.iter().enumerate() {
                    if a.from == p.end {
                        let mut arrows = p.arrows.clone();
                        arrows.push(i);
                        next.push(Path { start: p.start, end: a.to, arrows });
                    }
                }
            }
            cur = next;
        }
        cur.sort();
        cur.dedup();
        cur
    }

    pub fn path_name(&self, p: &Path) -> String {
        if p.arrows.is_empty() {
            return format!("e_{}", self.vertices[p.start]);
        }
        p.arrows.iter().map(|a| self.arrows[*a].name.as_str()).collect::<Vec<_>>().join("*")
    }

    /// Parses `a*b*c`, a single arrow, or `e_<vertex>`.
    pub fn parse_path(&self, s: &str) -> Result<Path> {
        let s = s.trim();
        if let Some(v) = s.strip_prefix("e_") {
            if let Some(i) = self.vertex(v) {
                return Ok(self.trivial_path(i));
            }
        }
        let mut path: Option<Path> = None;
        for tok in s.split('*') {
            let tok = tok.trim();
            let a = self
                .arrow_by_name(tok)
                .ok_or_else(|| Error::Parse(format!("unknown arrow '{tok}' in '{s}'")))?;
            path = Some(match path {
                None => self.arrow_path(a),
                Some(p) => p
                    .concat(&self.arrow_path(a))
                    .ok_or_else(|| Error::Parse(format!("path '{s}' is not composable")))?,
            });
        }
        path.ok_or_else(|| Error::Parse(format!("empty path '{s}'")))
    }
}

/// A path, stored as its arrow indices. Trivial paths have no arrows.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    pub start: usize,
    pub end: usize,
    pub arrows: Vec<usize>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.arrows.is_empty()
    }

    /// `self` followed by `o`, if composable.
    pub fn concat(&self, o: &Path) -> Option<Path> {
        if self.end != o.start {
            return None;
        }
        let mut arrows = self.arrows.clone();
        arrows.extend_from_slice(&o.arrows);
        Some(Path { start: self.start, end: o.end, arrows })
    }

    /// Subpath of arrows `[i, j)`; needs the quiver to recover trivial endpoints.
    pub fn slice(&self, q: &Quiver, i: usize, j: usize) -> Path {
        if i == j {
            let v = if i == 0 {
                self.start
            } else {
                q.arrow(self.arrows[i - 1]).to
            };
            return q.trivial_path(v);
        }
        Path {
            start: q.arrow(self.arrows[i]).from,
            end: q.arrow(self.arrows[j - 1]).to,
            arrows: self.arrows[i..j].to_vec(),
        }
    }
}

/// Path order: by length, then trivial paths by vertex, then arrow indices
/// lexicographically.
impl Ord for Path {
    fn cmp(&self, o: &Path) -> Ordering {
        self.len()
            .cmp(&o.len())
            .then_with(|| {
                if self.is_trivial() {
                    self.start.cmp(&o.start)
                } else {
                    Ordering::Equal
                }
            })
            .then_with(|| self.arrows.cmp(&o.arrows))
    }
}

impl PartialOrd for Path {
    fn partial_cmp(&self, o: &Path) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// A linear combination of parallel paths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub terms: Vec<(Scalar, Path)>,
}

impl Relation {
    pub fn from(&self) -> usize {
        self.terms[0].1.start
    }

    pub fn to(&self) -> usize {
        self.terms[0].1.end
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn min_len(&self) -> usize {
        self.terms.iter().map(|t| t.1.len()).min().unwrap_or(0)
    }

    pub fn max_len(&self) -> usize {
        self.terms.iter().map(|t| t.1.len()).max().unwrap_or(0)
    }

    pub fn display(&self, q: &Quiver) -> String {
        let mut s = String::new();
        for (i, (c, p)) in self.terms.iter().enumerate() {
            let neg = matches!(c, Scalar::Q(x) if x.to_string().starts_with('-'));
            let mag = if neg { -c } else { c.clone() };
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if !mag.is_one() {
                s.push_str(&format!("{mag}*"));
            }
            s.push_str(&q.path_name(p));
        }
        s
    }
}

/// Combines repeated paths, drops zero terms and sorts by path order.
pub fn normalize_terms(terms: Vec<(Scalar, Path)>) -> Vec<(Scalar, Path)> {
    let mut out: Vec<(Scalar, Path)> = Vec::new();
    let mut terms = terms;
    terms.sort_by(|a, b| a.1.cmp(&b.1));
    for (c, p) in terms {
        match out.last_mut() {
            Some((d, q)) if *q == p => *d = &*d + &c,
            _ => out.push((c, p)),
        }
    }
    out.retain(|(c, _)| !c.is_zero());
    out
}

fn is_coefficient(s: &str) -> bool {
    let s = s.trim();
    !s.is_empty() && s.chars().all(|c| c.is_ascii_digit() || c == '/' || c.is_whitespace())
}

/// Splits `t1 + t2 - t3` into signed terms.
fn split_terms(s: &str) -> Result<Vec<(bool, String)>> {
    let mut out = Vec::new();
    let mut neg = false;
    let mut leading = true;
    let mut cur = String::new();
    for ch in s.chars() {
        if ch == '+' || ch == '-' {
            if cur.trim().is_empty() {
                if !leading {
                    return Err(Error::Parse(format!("dangling sign in '{s}'")));
                }
                leading = false;
                neg = ch == '-';
                continue;
            }
            out.push((neg, cur.trim().to_string()));
            cur.clear();
            neg = ch == '-';
            leading = false;
        } else {
            cur.push(ch);
        }
    }
    if cur.trim().is_empty() {
        return Err(Error::Parse(format!("empty term in '{s}'")));
    }
    out.push((neg, cur.trim().to_string()));
    Ok(out)
}

/// Parses a linear combination of paths. `min_len` is the least allowed
/// path length; `"0"` parses as the empty combination.
pub fn parse_combination(q: &Quiver, field: Field, s: &str, min_len: usize) -> Result<Vec<(Scalar, Path)>> {
    if s.trim() == "0" {
        return Ok(Vec::new());
    }
    let mut terms = Vec::new();
    for (neg, t) in split_terms(s)? {
        let (coeff, path_str) = match t.split_once('*') {
            Some((head, rest)) if is_coefficient(head) => (field.parse_scalar(head)?, rest.to_string()),
            _ => (field.one(), t.clone()),
        };
        let coeff = if neg { -coeff } else { coeff };
        let p = q.parse_path(&path_str)?;
        if p.len() < min_len {
            return Err(Error::Parse(format!("term '{t}' has length {} below {min_len}", p.len())));
        }
        terms.push((coeff, p));
    }
    let first = &terms[0].1;
    let (x, y) = (first.start, first.end);
    if terms.iter().any(|(_, p)| p.start != x || p.end != y) {
        return Err(Error::Parse(format!("terms of '{s}' are not parallel")));
    }
    Ok(normalize_terms(terms))
}

/// Parses a relation: parallel paths of length at least two.
pub fn parse_relation(q: &Quiver, field: Field, s: &str) -> Result<Relation> {
    let terms = parse_combination(q, field, s, 2)?;
    if terms.is_empty() {
        return Err(Error::Parse(format!("relation '{s}' is zero")));
    }
    Ok(Relation { terms })
}

/// A quiver with relations over a field.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub field: Field,
    pub quiver: Quiver,
    pub relations: Vec<Relation>,
}

impl Presentation {
    pub fn new(field: Field, quiver: Quiver, relations: Vec<Relation>) -> Presentation {
        Presentation { field, quiver, relations }
    }

    /// Parses every relation string against the quiver.
    pub fn parse(field: Field, quiver: Quiver, relations: &[&str]) -> Result<Presentation> {
        let rels = relations
            .iter()
            .map(|r| parse_relation(&quiver, field, r))
            .collect::<Result<Vec<_>>>()?;
        Ok(Presentation { field, quiver, relations: rels })
    }

    pub fn is_monomial(&self) -> bool {
        self.relations.iter().all(|r| r.is_monomial())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex_quiver() -> Quiver {
        Quiver::new(
            &["0", "1"],
            &[("a0", "0", "1"), ("a1", "1", "0"), ("abar0", "1", "0"), ("abar1", "0", "1")],
        )
        .unwrap()
    }

    #[test]
    fn parses_binomial_relation() {
        let q = ex_quiver();
        let r = parse_relation(&q, Field::Rational, "a0*abar0 - abar1*a1").unwrap();
        assert_eq!(r.terms.len(), 2);
        assert_eq!(r.from(), 0);
        assert_eq!(r.to(), 0);
        let coeffs: Vec<String> = r.terms.iter().map(|t| t.0.to_string()).collect();
        assert_eq!(coeffs, vec!["1", "-1"]);
        assert_eq!(r.display(&q), "a0*abar0 - abar1*a1");
    }

    #[test]
    fn parses_coefficients() {
        let q = ex_quiver();
        let r = parse_relation(&q, Field::Rational, "3/2*a0*a1 + 2*abar1*abar0").unwrap();
        assert_eq!(r.terms[0].0.to_string(), "3/2");
        assert_eq!(r.terms[1].0.to_string(), "2");
    }

    #[test]
    fn rejects_bad_relations() {
        let q = ex_quiver();
        assert!(parse_relation(&q, Field::Rational, "a0").is_err());
        assert!(parse_relation(&q, Field::Rational, "a0*abar0 - a1*a0").is_err());
        assert!(parse_relation(&q, Field::Rational, "a0*a0").is_err());
        assert!(parse_relation(&q, Field::Rational, "a0*x").is_err());
        assert!(parse_relation(&q, Field::Rational, "a0*a1 - a0*a1").is_err());
    }

    #[test]
    fn path_enumeration_and_order() {
        let q = ex_quiver();
        assert_eq!(q.paths_of_length(0).len(), 2);
        assert_eq!(q.paths_of_length(1).len(), 4);
        assert_eq!(q.paths_of_length(2).len(), 8);
        let p = q.parse_path("a0*a1").unwrap();
        assert_eq!((p.start, p.end), (0, 0));
        assert!(q.trivial_path(1) < q.arrow_path(0));
        assert_eq!(p.slice(&q, 1, 1), q.trivial_path(1));
        assert_eq!(q.path_name(&p.slice(&q, 1, 2)), "a1");
    }

    #[test]
    fn acyclicity() {
        assert!(!ex_quiver().is_acyclic());
        let q = Quiver::new(&["1", "2", "3"], &[("a", "1", "2"), ("b", "2", "3"), ("c", "1", "3")]).unwrap();
        assert!(q.is_acyclic());
    }
}
