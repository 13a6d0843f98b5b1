use hhcalc::algebra::build_algebra;
use hhcalc::bimodule::Bimodule;
use hhcalc::extcohom::ext_dc_c;
use hhcalc::extension::{cale, from_presentation, phi, trivial_extension, verify_ses};
use hhcalc::hochschild::{hh, hh_dims};
use hhcalc::quiver::{parse_combination, Presentation, Quiver};
use hhcalc::relext::relation_extension;
use hhcalc::Field;

fn three_arrows() -> Quiver {
    Quiver::new(&["1", "2", "3"], &[("alpha", "1", "2"), ("beta", "1", "3"), ("gamma", "3", "2")]).unwrap()
}

#[test]
fn loop_at_the_sink_gives_a_non_surjective_projection() {
    let c = build_algebra(&Presentation::parse(Field::Rational, three_arrows(), &[]).unwrap()).unwrap();
    let qb = Quiver::new(
        &["1", "2", "3"],
        &[("alpha", "1", "2"), ("beta", "1", "3"), ("gamma", "3", "2"), ("eps", "2", "2")],
    )
    .unwrap();
    let b = build_algebra(&Presentation::parse(Field::Rational, qb, &["eps*eps", "alpha*eps - beta*gamma*eps"]).unwrap())
        .unwrap();
    let elt = |alg: &hhcalc::algebra::Algebra, s: &str| {
        let q = alg.path_data().unwrap().quiver();
        alg.combination_element(&parse_combination(q, alg.field(), s, 0).unwrap()).unwrap()
    };
    let p: Vec<_> = ["alpha", "beta", "gamma", "0"].iter().map(|s| elt(&c, s)).collect();
    let q: Vec<_> = ["alpha", "beta", "gamma"].iter().map(|s| elt(&b, s)).collect();
    let ext = from_presentation(&c, &b, &p, &q).unwrap();
    assert_eq!(ext.e.dim(), b.dim() - c.dim());
    let f = phi(&ext, 1).unwrap();
    assert_eq!((f.source.dim(), f.target.dim(), f.rank()), (3, 2, 1));
    assert!(!f.is_surjective());
}

#[test]
fn one_relation_algebra_and_its_relation_extension() {
    let q = Quiver::new(&["1", "2", "3"], &[("alpha", "1", "2"), ("beta", "2", "3"), ("gamma", "1", "3")]).unwrap();
    let pres = Presentation::parse(Field::Rational, q, &["alpha*beta"]).unwrap();
    let c = build_algebra(&pres).unwrap();
    assert_eq!(hh_dims(&c, &Bimodule::regular(&c), 3).unwrap(), vec![1, 1, 1, 0]);

    let e2 = ext_dc_c(&c, 2).unwrap();
    assert_eq!(e2.dim(), 4);
    let ext = trivial_extension(&c, &e2.module).unwrap();
    assert!(cale(&ext).basis.is_empty());
    assert_eq!(hh(&c, &e2.module, 1).unwrap().dim(), 0);
    let s = verify_ses(&ext).unwrap();
    assert_eq!((s.hh1_b, s.hh1_b_e, s.hh1_c), (2, 1, 1));
    assert!(s.phi1_surjective);
    assert_eq!(phi(&ext, 2).unwrap().rank(), 0);

    let r = relation_extension(&pres, None).unwrap();
    assert_eq!(r.algebra.dim(), 10);
    let mut rels = r.relation_strings();
    rels.sort();
    assert_eq!(rels, ["alpha*beta", "beta*rel1", "rel1*alpha", "rel1*gamma*rel1"]);
    let b = &r.algebra;
    assert_eq!(hh_dims(b, &Bimodule::regular(b), 2).unwrap(), vec![2, 2, 2]);
    assert_eq!(hh_dims(&ext.b, &Bimodule::regular(&ext.b), 2).unwrap(), vec![2, 2, 2]);
}
