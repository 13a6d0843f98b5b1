//! Hochschild dimensions against closed-form answers known independently of
//! the bar complex code.

use hhcalc::algebra::{build_algebra, Algebra};
use hhcalc::bimodule::Bimodule;
use hhcalc::hochschild::{hh1_via_derivations, hh_dims};
use hhcalc::minres::hh_via_minres;
use hhcalc::quiver::{Presentation, Quiver};
use hhcalc::Field;

fn algebra(vertices: &[&str], arrows: &[(&str, &str, &str)], relations: &[&str]) -> Algebra {
    let q = Quiver::new(vertices, arrows).unwrap();
    build_algebra(&Presentation::parse(Field::Rational, q, relations).unwrap()).unwrap()
}

fn regular_dims(a: &Algebra, max: usize) -> Vec<usize> {
    hh_dims(a, &Bimodule::regular(a), max).unwrap()
}

#[test]
fn truncated_polynomial_rings() {
    // k[x]/(x^n) in characteristic 0: HH^0 = n, HH^i = n - 1 for i > 0
    for n in 2..=4 {
        let rel = vec!["x"; n].join("*");
        let a = algebra(&["1"], &[("x", "1", "1")], &[&rel]);
        assert_eq!(a.dim(), n);
        assert_eq!(regular_dims(&a, 2), vec![n, n - 1, n - 1], "n = {n}");
    }
}

#[test]
fn truncated_polynomial_in_positive_characteristic() {
    // over F_2, k[x]/(x^2) has HH^i = 2 in every degree
    let q = Quiver::new(&["1"], &[("x", "1", "1")]).unwrap();
    let a = build_algebra(&Presentation::parse(Field::prime(2).unwrap(), q, &["x*x"]).unwrap()).unwrap();
    assert_eq!(regular_dims(&a, 3), vec![2, 2, 2, 2]);
}

#[test]
fn kronecker_algebra() {
    let a = algebra(&["1", "2"], &[("x", "1", "2"), ("y", "1", "2")], &[]);
    assert_eq!(regular_dims(&a, 2), vec![1, 3, 0]);
}

#[test]
fn incidence_algebras_see_the_order_complex() {
    // the commutative square has a cone as order complex
    let square = algebra(
        &["1", "2", "3", "4"],
        &[("a", "1", "2"), ("b", "2", "4"), ("c", "1", "3"), ("d", "3", "4")],
        &["a*b - c*d"],
    );
    assert_eq!(regular_dims(&square, 2), vec![1, 0, 0]);

    // the crown: order complex is a circle
    let crown = algebra(
        &["1", "2", "3", "4"],
        &[("a", "1", "3"), ("b", "1", "4"), ("c", "2", "3"), ("d", "2", "4")],
        &[],
    );
    assert_eq!(regular_dims(&crown, 2), vec![1, 1, 0]);

    // two stacked crowns: the order complex is a 2-sphere
    let arrows = [
        ("a11", "a1", "b1"),
        ("a12", "a1", "b2"),
        ("a21", "a2", "b1"),
        ("a22", "a2", "b2"),
        ("b11", "b1", "c1"),
        ("b12", "b1", "c2"),
        ("b21", "b2", "c1"),
        ("b22", "b2", "c2"),
    ];
    let rels = ["a11*b11 - a12*b21", "a11*b12 - a12*b22", "a21*b11 - a22*b21", "a21*b12 - a22*b22"];
    let sphere = algebra(&["a1", "a2", "b1", "b2", "c1", "c2"], &arrows, &rels);
    assert_eq!(sphere.dim(), 18);
    assert_eq!(regular_dims(&sphere, 2), vec![1, 0, 1]);
}

#[test]
fn radical_square_zero_cycles() {
    // the oriented n-cycle with all paths of length 2 zero
    for n in 2..=3 {
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let vs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let arrow_names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        let arrows: Vec<(&str, &str, &str)> =
            (0..n).map(|i| (arrow_names[i].as_str(), vs[i], vs[(i + 1) % n])).collect();
        let rels: Vec<String> = (0..n).map(|i| format!("x{i}*x{}", (i + 1) % n)).collect();
        let rels: Vec<&str> = rels.iter().map(|s| s.as_str()).collect();
        let a = algebra(&vs, &arrows, &rels);
        let dims = regular_dims(&a, 2);
        assert_eq!(dims[0], 1);
        assert_eq!(dims[1], 1);
        let m = hh_via_minres(&a, &Bimodule::regular(&a)).unwrap();
        assert_eq!(m.dims, dims);
        assert_eq!(hh1_via_derivations(&a, &Bimodule::regular(&a)).unwrap().dim(), 1);
    }
}
