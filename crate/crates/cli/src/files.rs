//! JSON input files.

use hhcalc::algebra::{build_algebra_with_cap, Algebra, DEFAULT_LENGTH_CAP};
use hhcalc::bimodule::Bimodule;
use hhcalc::extension::{from_presentation, Extension};
use hhcalc::quiver::{parse_combination, Presentation, Quiver};
use hhcalc::{Error, Field, Mat, Result, SparseVec};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowSpec {
    pub name: String,
    pub from: String,
    pub to: String,
}

/// Algebra morphisms `p: B -> C` and `q: C -> B` given on arrows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionSpec {
    /// Name of the example the projection lands in.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub onto: Option<String>,
    pub p: BTreeMap<String, String>,
    pub q: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub field: String,
    pub vertices: Vec<String>,
    pub arrows: Vec<ArrowSpec>,
    pub relations: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projection: Option<ProjectionSpec>,
}

impl AlgebraFile {
    pub fn parse(text: &str) -> Result<AlgebraFile> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("algebra file: {e}")))
    }

    pub fn load(path: &Path) -> Result<AlgebraFile> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        AlgebraFile::parse(&text)
    }

    pub fn field(&self) -> Result<Field> {
        Field::parse(&self.field)
    }

    pub fn presentation(&self) -> Result<Presentation> {
        let vs: Vec<&str> = self.vertices.iter().map(|s| s.as_str()).collect();
        let arrows: Vec<(&str, &str, &str)> =
            self.arrows.iter().map(|a| (a.name.as_str(), a.from.as_str(), a.to.as_str())).collect();
        let q = Quiver::new(&vs, &arrows)?;
        let rels: Vec<&str> = self.relations.iter().map(|s| s.as_str()).collect();
        Presentation::parse(self.field()?, q, &rels)
    }

    pub fn algebra(&self) -> Result<Algebra> {
        build_algebra_with_cap(&self.presentation()?, DEFAULT_LENGTH_CAP)
    }

    pub fn from_presentation(p: &Presentation) -> AlgebraFile {
        let q = &p.quiver;
        AlgebraFile {
            field: p.field.to_string(),
            vertices: q.vertices().to_vec(),
            arrows: q
                .arrows()
                .iter()
                .map(|a| ArrowSpec {
                    name: a.name.clone(),
                    from: q.vertices()[a.from].clone(),
                    to: q.vertices()[a.to].clone(),
                })
                .collect(),
            relations: p.relations.iter().map(|r| r.display(q)).collect(),
            projection: None,
        }
    }
}

/// Images of the arrows of `src` as elements of `dst`, from a name map.
fn arrow_images(src: &Algebra, dst: &Algebra, map: &BTreeMap<String, String>, what: &str) -> Result<Vec<SparseVec>> {
    let sq = src.path_data().unwrap().quiver();
    let dq = dst.path_data().unwrap().quiver();
    if let Some(extra) = map.keys().find(|k| sq.arrow_by_name(k).is_none()) {
        return Err(Error::Invalid(format!("{what}: unknown arrow '{extra}'")));
    }
    sq.arrows()
        .iter()
        .map(|a| {
            let s = map
                .get(&a.name)
                .ok_or_else(|| Error::Invalid(format!("{what}: no image for arrow '{}'", a.name)))?;
            let terms = parse_combination(dq, dst.field(), s, 0)?;
            dst.combination_element(&terms)
        })
        .collect()
}

/// The split extension `B -> C` described by the projection of a `B` file.
pub fn extension_from_files(c: &Algebra, b_file: &AlgebraFile) -> Result<Extension> {
    let spec = b_file
        .projection
        .as_ref()
        .ok_or_else(|| Error::Invalid("the extension file has no projection".into()))?;
    let b = b_file.algebra()?;
    if b.field() != c.field() {
        return Err(Error::FieldMismatch(format!("{} vs {}", b.field(), c.field())));
    }
    let p = arrow_images(&b, c, &spec.p, "projection p")?;
    let q = arrow_images(c, &b, &spec.q, "section q")?;
    from_presentation(c, &b, &p, &q)
}

/// A bimodule over a presented algebra, given by the actions of the
/// vertices and arrows as dense matrices of rational strings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BimoduleFile {
    pub labels: Vec<String>,
    pub left: BTreeMap<String, Vec<Vec<String>>>,
    pub right: BTreeMap<String, Vec<Vec<String>>>,
}

fn dense(field: Field, n: usize, rows: &[Vec<String>]) -> Result<Mat> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension(format!("action matrices must be {n} x {n}")));
    }
    let cols = (0..n)
        .map(|j| {
            let vals = rows.iter().map(|r| field.parse_scalar(&r[j])).collect::<Result<Vec<_>>>()?;
            Ok(SparseVec::from_dense(&vals))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Mat::from_columns(n, field, cols))
}

impl BimoduleFile {
    pub fn load(path: &Path) -> Result<BimoduleFile> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("bimodule file: {e}")))
    }

    /// Extends the generator actions multiplicatively to the whole basis.
    pub fn bimodule(&self, alg: &Algebra) -> Result<Bimodule> {
        let pd = alg
            .path_data()
            .ok_or_else(|| Error::Precondition("bimodule files need a presented algebra".into()))?;
        let q = pd.quiver();
        let field = alg.field();
        let n = self.labels.len();
        let gen = |side: &BTreeMap<String, Vec<Vec<String>>>, name: &str| -> Result<Mat> {
            match side.get(name) {
                Some(rows) => dense(field, n, rows),
                None => Err(Error::Invalid(format!("bimodule file: no action for '{name}'"))),
            }
        };
        let vertex_name = |v: usize| format!("e_{}", q.vertices()[v]);
        let mut left = Vec::with_capacity(alg.dim());
        let mut right = Vec::with_capacity(alg.dim());
        for p in &pd.basis_paths {
            if p.is_trivial() {
                left.push(gen(&self.left, &vertex_name(p.start))?);
                right.push(gen(&self.right, &vertex_name(p.start))?);
                continue;
            }
            let mut l = Mat::identity(n, field);
            let mut r = Mat::identity(n, field);
            for a in &p.arrows {
                let name = &q.arrow(*a).name;
                // (xy)·m = x·(y·m) and m·(xy) = (m·x)·y
                l = l.mul(&gen(&self.left, name)?)?;
                r = gen(&self.right, name)?.mul(&r)?;
            }
            left.push(l);
            right.push(r);
        }
        Bimodule::new(alg, self.labels.clone(), left, right)
    }
}

/// The bundled example files.
pub const BUNDLED: &[(&str, &str)] = &[
    ("ex3_5_C", include_str!("../examples_data/ex3_5_C.json")),
    ("ex3_5_B", include_str!("../examples_data/ex3_5_B.json")),
    ("ex3_8_C", include_str!("../examples_data/ex3_8_C.json")),
    ("ex3_8_B", include_str!("../examples_data/ex3_8_B.json")),
    ("ex5_9_C", include_str!("../examples_data/ex5_9_C.json")),
    ("comm_square", include_str!("../examples_data/comm_square.json")),
];

/// Example files by name, bundled or read from a directory of `<name>.json`.
#[derive(Clone, Debug)]
pub struct Corpus {
    pub files: BTreeMap<String, AlgebraFile>,
}

impl Corpus {
    pub fn bundled() -> Corpus {
        let files = BUNDLED
            .iter()
            .map(|(n, t)| (n.to_string(), AlgebraFile::parse(t).expect("bundled example parses")))
            .collect();
        Corpus { files }
    }

    /// Files found in `dir` replace the bundled ones of the same name.
    pub fn with_overrides(dir: &Path) -> Result<Corpus> {
        let mut c = Corpus::bundled();
        for (name, _) in BUNDLED {
            let p = dir.join(format!("{name}.json"));
            if p.exists() {
                c.files.insert(name.to_string(), AlgebraFile::load(&p)?);
            }
        }
        Ok(c)
    }

    pub fn get(&self, name: &str) -> Result<&AlgebraFile> {
        self.files.get(name).ok_or_else(|| Error::Invalid(format!("no example named '{name}'")))
    }

    pub fn algebra(&self, name: &str) -> Result<Algebra> {
        self.get(name)?.algebra().map_err(|e| in_example(name, e))
    }

    /// The extension described by the `B` file `name`.
    pub fn extension(&self, name: &str) -> Result<Extension> {
        let b = self.get(name)?;
        let onto = b
            .projection
            .as_ref()
            .and_then(|p| p.onto.clone())
            .ok_or_else(|| Error::Invalid(format!("'{name}' names no target algebra")))?;
        extension_from_files(&self.algebra(&onto)?, b).map_err(|e| in_example(name, e))
    }
}

fn in_example(name: &str, e: Error) -> Error {
    Error::Invalid(format!("example {name}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use hhcalc::bimodule::bimodules_isomorphic;
    use hhcalc::bimodule::IsoVerdict;

    #[test]
    fn bundled_corpus_loads() {
        let c = Corpus::bundled();
        assert_eq!(c.files.len(), 6);
        for name in c.files.keys() {
            c.algebra(name).unwrap();
        }
        assert_eq!(c.extension("ex3_5_B").unwrap().e.dim(), 4);
    }

    #[test]
    fn emitted_file_reparses() {
        let f = Corpus::bundled().get("ex5_9_C").unwrap().clone();
        let again = AlgebraFile::from_presentation(&f.presentation().unwrap());
        assert_eq!(again, f);
    }

    #[test]
    fn bimodule_file_for_the_regular_bimodule() {
        // A_2: basis e_1, e_2, a with a = e_1 a e_2
        let text = r#"{"field":"Q","vertices":["1","2"],"arrows":[{"name":"a","from":"1","to":"2"}],"relations":[]}"#;
        let alg = AlgebraFile::parse(text).unwrap().algebra().unwrap();
        let m = |rows: &[[&str; 3]]| rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect();
        let file = BimoduleFile {
            labels: alg.labels().to_vec(),
            left: [
                ("e_1".to_string(), m(&[["1", "0", "0"], ["0", "0", "0"], ["0", "0", "1"]])),
                ("e_2".to_string(), m(&[["0", "0", "0"], ["0", "1", "0"], ["0", "0", "0"]])),
                ("a".to_string(), m(&[["0", "0", "0"], ["0", "0", "0"], ["0", "1", "0"]])),
            ]
            .into_iter()
            .collect(),
            right: [
                ("e_1".to_string(), m(&[["1", "0", "0"], ["0", "0", "0"], ["0", "0", "0"]])),
                ("e_2".to_string(), m(&[["0", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]])),
                ("a".to_string(), m(&[["0", "0", "0"], ["0", "0", "0"], ["1", "0", "0"]])),
            ]
            .into_iter()
            .collect(),
        };
        let b = file.bimodule(&alg).unwrap();
        assert!(matches!(bimodules_isomorphic(&alg, &b, &Bimodule::regular(&alg)), IsoVerdict::Yes(_)));
    }
}
