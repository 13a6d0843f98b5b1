//! The `hh`, `phi` and `relext` commands. Each returns the `results` part
//! of a report.

use crate::files::{extension_from_files, AlgebraFile, BimoduleFile};
use crate::report::{format_vector, matrix_json};
use hhcalc::algebra::Algebra;
use hhcalc::bimodule::Bimodule;
use hhcalc::extcohom::ext_dc_c;
use hhcalc::extension::{phi, trivial_extension, Extension};
use hhcalc::hochschild::{hh_with_cap, normalized_cochain_dim, Cochain, DEFAULT_BAR_CAP};
use hhcalc::relext::{crosscheck_with_trivial_extension, relation_extension};
use hhcalc::{Error, Field, Result};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

/// Coefficients for `hh`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuleSpec {
    Regular,
    Dual,
    Ext(usize),
    File(PathBuf),
}

impl ModuleSpec {
    pub fn parse(s: &str) -> Result<ModuleSpec> {
        match s {
            "regular" => return Ok(ModuleSpec::Regular),
            "dual" => return Ok(ModuleSpec::Dual),
            _ => {}
        }
        if let Some(m) = s.strip_prefix("ext:") {
            return m.parse().map(ModuleSpec::Ext).map_err(|_| Error::Parse(format!("bad Ext degree in '{s}'")));
        }
        if let Some(p) = s.strip_prefix("file:") {
            return Ok(ModuleSpec::File(PathBuf::from(p)));
        }
        Err(Error::Parse(format!("unknown module '{s}'; expected regular, dual, ext:<m> or file:<path>")))
    }

    pub fn build(&self, alg: &Algebra) -> Result<Bimodule> {
        match self {
            ModuleSpec::Regular => Ok(Bimodule::regular(alg)),
            ModuleSpec::Dual => Ok(Bimodule::dual(alg)),
            ModuleSpec::Ext(m) => Ok(ext_dc_c(alg, *m)?.module),
            ModuleSpec::File(p) => BimoduleFile::load(p)?.bimodule(alg),
        }
    }

    /// Files read by this spec, for the input hash.
    pub fn inputs(&self) -> Vec<PathBuf> {
        match self {
            ModuleSpec::File(p) => vec![p.clone()],
            _ => Vec::new(),
        }
    }
}

/// How `B` is obtained from `C` for `phi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BimoduleSpec {
    Trivial(ModuleSpec),
    Split(PathBuf),
}

impl BimoduleSpec {
    pub fn parse(s: &str) -> Result<BimoduleSpec> {
        match s.strip_prefix("split:") {
            Some(p) => Ok(BimoduleSpec::Split(PathBuf::from(p))),
            None => ModuleSpec::parse(s).map(BimoduleSpec::Trivial),
        }
    }

    pub fn build(&self, c: &Algebra) -> Result<Extension> {
        match self {
            BimoduleSpec::Trivial(m) => trivial_extension(c, &m.build(c)?),
            BimoduleSpec::Split(p) => extension_from_files(c, &AlgebraFile::load(p)?),
        }
    }

    pub fn inputs(&self) -> Vec<PathBuf> {
        match self {
            BimoduleSpec::Trivial(m) => m.inputs(),
            BimoduleSpec::Split(p) => vec![p.clone()],
        }
    }
}

/// Loads an algebra file, rejecting a field other than `expect`.
pub fn load_algebra(path: &Path, expect: Option<Field>) -> Result<(AlgebraFile, Algebra)> {
    let file = AlgebraFile::load(path)?;
    if let Some(f) = expect {
        let got = file.field()?;
        if got != f {
            return Err(Error::FieldMismatch(format!("file is over {got}, --field asks for {f}")));
        }
    }
    let alg = file.algebra()?;
    Ok((file, alg))
}

fn algebra_json(a: &Algebra) -> Value {
    json!({ "dim": a.dim(), "basis": a.labels() })
}

fn cochain_json(alg: &Algebra, module: &Bimodule, f: &Cochain) -> Value {
    let entries: Vec<Value> = f
        .columns()
        .map(|(col, v)| {
            let args: Vec<&str> = f.decode(*col).iter().map(|i| alg.label(*i)).collect();
            json!({ "args": args, "value": format_vector(module.labels(), v) })
        })
        .collect();
    Value::Array(entries)
}

pub struct HhOptions {
    pub max_degree: usize,
    pub reps: bool,
    pub cap: u128,
}

impl Default for HhOptions {
    fn default() -> HhOptions {
        HhOptions { max_degree: 1, reps: false, cap: DEFAULT_BAR_CAP }
    }
}

pub fn cmd_hh(alg: &Algebra, module: &ModuleSpec, opts: &HhOptions) -> Result<Value> {
    let m = module.build(alg)?;
    let mut dims = Vec::new();
    let mut cochain_dims = Vec::new();
    let mut reps = Vec::new();
    for n in 0..=opts.max_degree {
        let h = hh_with_cap(alg, &m, n, opts.cap)?;
        dims.push(h.dim());
        cochain_dims.push(normalized_cochain_dim(alg, &m, n));
        if opts.reps {
            reps.push(Value::Array(h.reps.iter().map(|r| cochain_json(alg, &m, r)).collect()));
        }
    }
    let mut out = json!({
        "algebra": algebra_json(alg),
        "module": { "dim": m.dim(), "basis": m.labels() },
        "dims": dims,
        "normalized_cochain_dims": cochain_dims,
    });
    if opts.reps {
        out["reps"] = Value::Array(reps);
    }
    Ok(out)
}

pub fn cmd_phi(c: &Algebra, spec: &BimoduleSpec, degree: usize) -> Result<Value> {
    let ext = spec.build(c)?;
    let f = phi(&ext, degree)?;
    Ok(json!({
        "extension": {
            "dim_c": ext.c.dim(),
            "dim_e": ext.e.dim(),
            "dim_b": ext.b.dim(),
            "square_zero": ext.square_zero,
        },
        "degree": degree,
        "dim_hh_b": f.source.dim(),
        "dim_hh_c": f.target.dim(),
        "matrix": matrix_json(&f.matrix),
        "rank": f.rank(),
        "surjective": f.is_surjective(),
        "kernel_dim": f.kernel_dim(),
    }))
}

/// Returns the results and the emitted file for `B`, and whether every
/// cross-check passed.
pub fn cmd_relext(file: &AlgebraFile, names: Option<&[String]>) -> Result<(Value, AlgebraFile, bool)> {
    let pres = file.presentation()?;
    let r = relation_extension(&pres, names)?;
    let q = &r.quiver.quiver;
    let x = crosscheck_with_trivial_extension(&pres, &r)?;
    let new_arrows: Vec<Value> = r
        .quiver
        .new_arrows
        .iter()
        .map(|na| {
            let a = q.arrow(na.arrow);
            json!({
                "name": a.name,
                "from": q.vertices()[a.from],
                "to": q.vertices()[a.to],
                "reverses": pres.relations[na.relation].display(&pres.quiver),
            })
        })
        .collect();
    let b_file = AlgebraFile::from_presentation(&r.presentation);
    let passed = x.passed();
    let results = json!({
        "new_arrows": new_arrows,
        "potential": r.potential.display(q),
        "derivatives": r.derivatives.iter().map(|d| d.display(q)).collect::<Vec<_>>(),
        "j_relations": r.j_relations.iter().map(|d| d.display(q)).collect::<Vec<_>>(),
        "implied_j": r.implied_j.iter().map(|d| d.display(q)).collect::<Vec<_>>(),
        "relations": r.relation_strings(),
        "assumptions": ["global dimension of C at most 2 (not checked)"],
        "checks": {
            "dim_c": x.dim_c,
            "dim_e2": x.dim_e2,
            "dim_b": x.dim_b,
            "dim_b_is_dim_c_plus_dim_e2": x.dims_match(),
            "new_arrow_counts_match_minimal_relations": x.arrow_counts_match,
            "hh_b": x.hh_b,
            "hh_trivial_extension": x.hh_trivial,
            "cale_e2": x.cale,
            "ses_holds": x.ses.holds(),
            "lower_bound_holds": x.lower_bound.as_ref().map(|l| l.bound_holds()),
            "passed": passed,
        },
        "algebra_file": serde_json::to_value(&b_file).expect("serializable"),
    });
    Ok((results, b_file, passed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn module_specs_parse() {
        assert_eq!(ModuleSpec::parse("regular").unwrap(), ModuleSpec::Regular);
        assert_eq!(ModuleSpec::parse("ext:2").unwrap(), ModuleSpec::Ext(2));
        assert_eq!(ModuleSpec::parse("file:m.json").unwrap(), ModuleSpec::File("m.json".into()));
        assert!(ModuleSpec::parse("ext:x").is_err());
        assert!(ModuleSpec::parse("left").is_err());
        assert_eq!(BimoduleSpec::parse("split:b.json").unwrap(), BimoduleSpec::Split("b.json".into()));
        assert_eq!(BimoduleSpec::parse("dual").unwrap(), BimoduleSpec::Trivial(ModuleSpec::Dual));
    }

    #[test]
    fn hh_report_for_the_cycle() {
        let alg = crate::files::Corpus::bundled().algebra("ex3_5_C").unwrap();
        let r = cmd_hh(&alg, &ModuleSpec::Regular, &HhOptions { reps: true, ..HhOptions::default() }).unwrap();
        assert_eq!(r["dims"], json!([1, 1]));
        assert_eq!(r["reps"][1].as_array().unwrap().len(), 1);
    }
}
