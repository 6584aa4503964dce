//! Two equations with f = 1, k = u linked by a member of the generalized
//! equivalence group: g = 1/(t cosh²(ν ln t)) and g̃ = t^(2ν−1).

use std::collections::BTreeMap;

use kolsym::classify::invariance_residual;
use kolsym::classpde::family;
use kolsym::fields::pushforward;
use kolsym::{apply_equivalence, ClassEquation, VectorField};
use symcore::{parse, Expr, ParameterContext};

fn ctx() -> ParameterContext {
    ParameterContext::new()
        .with("nu", &["!=0".parse().unwrap()])
        .unwrap()
}

fn source() -> ClassEquation {
    let c = ctx();
    let p = |s: &str| parse(s, &c).unwrap();
    let mut e = ClassEquation::new(p("1"), p("1/(t*cosh(nu*ln(t))^2)"), p("u"), c.clone()).unwrap();
    e.big_g = Some(p("2*t^(2*nu)/(nu*(t^(2*nu) + 1))"));
    e
}

fn link() -> kolsym::PointTransformation {
    let c = ctx();
    let values: BTreeMap<String, Expr> = [
        ("d1", "1"),
        ("d2", "0"),
        ("d3", "0"),
        ("d4", "0"),
        ("d5", "0"),
        ("d6", "1/4"),
        ("g1", "-2*nu"),
        ("g2", "4"),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), parse(v, &c).unwrap()))
    .collect();
    let mut t = family(6).unwrap().member(&values).unwrap();
    t.ctx.merge(&c).unwrap();
    t
}

#[test]
fn coefficient_forms_agree() {
    let c = ctx();
    let a = parse("1/(t*cosh(nu*ln(t))^2)", &c).unwrap();
    let b = parse("4/(t*(t^nu + t^(-nu))^2)", &c).unwrap();
    assert!((&a - &b).is_zero());
    assert_eq!(
        source()
            .big_g
            .unwrap()
            .diff(&symcore::Symbol::Base(symcore::BaseVar::T)),
        a
    );
}

#[test]
fn maps_to_power_coefficient() {
    let e = source();
    let t = link().instantiate(&e).unwrap();
    let c = ctx();
    let expect = ["t", "x*(t^(2*nu) + 1)/4", "y", "u/(t^(2*nu) + 1) + nu*x/2"];
    for (got, want) in t.forward.iter().zip(expect) {
        assert!(
            (got - &parse(want, &c).unwrap()).is_zero(),
            "{got} vs {want}"
        );
    }
    let out = apply_equivalence(&e, &link()).unwrap();
    assert_eq!(out.f, Expr::one());
    assert_eq!(out.k, Expr::u());
    assert!(
        (&out.g - &parse("t^(2*nu - 1)", &c).unwrap()).is_zero(),
        "{}",
        out.g
    );
}

#[test]
fn symmetries_are_carried_over() {
    let e = source();
    let out = apply_equivalence(&e, &link()).unwrap();
    let t = link().instantiate(&e).unwrap();
    let c = ctx();
    let basis = [
        ["0", "1", "0", "0"],
        ["0", "0", "1", "0"],
        ["0", "tanh(nu*ln(t))", "0", "nu"],
        ["0", "x", "0", "u"],
        [
            "t",
            "-nu*x*tanh(nu*ln(t))",
            "y/2",
            "-nu*(nu*x - tanh(nu*ln(t))*u)",
        ],
    ];
    for b in basis {
        let q = VectorField::parse(&b, &c).unwrap();
        assert!(invariance_residual(&q, &e).unwrap().is_zero(), "{b:?}");
        let pushed = pushforward(&q, &t).unwrap();
        let r = invariance_residual(&pushed, &out).unwrap();
        assert!(r.is_zero(), "{b:?} -> {pushed:?}: {r}");
    }
}
