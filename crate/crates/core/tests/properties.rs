//! Seeded randomized laws for total derivatives, brackets and transformations.

use std::collections::BTreeMap;

use kolsym::classify::bundled_tables;
use kolsym::classpde::{families, normalize, solve_quadruple, CanonicalForm, Quadruple};
use kolsym::jetspace::total_derivative;
use kolsym::{lie_bracket, VectorField};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use symcore::{parse, BaseVar, Expr, ParameterContext, Q};

struct NoSymbols;

impl symcore::Valuation for NoSymbols {
    fn symbol(&self, _: &symcore::Symbol) -> Option<f64> {
        None
    }
}

fn config() -> Config {
    Config {
        cases: 1000,
        rng_seed: RngSeed::Fixed(0x6b6f_6c73),
        failure_persistence: None,
        ..Config::default()
    }
}

fn ctx() -> ParameterContext {
    ParameterContext::new().with("a", &[]).unwrap()
}

/// Expressions of jet order at most one, so that two total derivatives stay
/// within the jet space.
fn source() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (1i64..4).prop_map(|n| n.to_string()),
        Just("t".to_string()),
        Just("x".to_string()),
        Just("y".to_string()),
        Just("u".to_string()),
        Just("u_x".to_string()),
        Just("u_y".to_string()),
        Just("a".to_string()),
    ];
    leaf.prop_recursive(3, 10, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(p, q)| format!("({p} + {q})")),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| format!("({p})*({q})")),
            inner.clone().prop_map(|p| format!("k({p})")),
            inner.clone().prop_map(|p| format!("exp({p})")),
            inner.clone().prop_map(|p| format!("({p})/(x^2 + 1)")),
        ]
    })
}

/// Components without jet variables or class elements.
fn point_source() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (1i64..4).prop_map(|n| n.to_string()),
        Just("t".to_string()),
        Just("x".to_string()),
        Just("y".to_string()),
        Just("u".to_string()),
        Just("a".to_string()),
    ];
    leaf.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(p, q)| format!("({p} + {q})")),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| format!("({p})*({q})")),
            inner.clone().prop_map(|p| format!("sin({p})")),
            inner.clone().prop_map(|p| format!("exp({p})")),
        ]
    })
}

fn field() -> impl Strategy<Value = VectorField> {
    [
        point_source(),
        point_source(),
        point_source(),
        point_source(),
    ]
    .prop_map(|s| VectorField::parse(&[&s[0], &s[1], &s[2], &s[3]], &ctx()).unwrap())
}

fn family_values() -> impl Strategy<Value = (usize, Vec<(i64, i64)>)> {
    (0usize..6, prop::collection::vec((-4i64..=4, 1i64..=3), 12))
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn total_derivatives_commute(src in source()) {
        let e = parse(&src, &ctx()).unwrap();
        let xy = total_derivative(&total_derivative(&e, BaseVar::X).unwrap(), BaseVar::Y).unwrap();
        let yx = total_derivative(&total_derivative(&e, BaseVar::Y).unwrap(), BaseVar::X).unwrap();
        prop_assert_eq!(xy, yx);
    }

    #[test]
    fn bracket_antisymmetry_and_jacobi(a in field(), b in field(), c in field()) {
        prop_assert!(lie_bracket(&a, &b).add(&lie_bracket(&b, &a)).is_zero());
        let jac = lie_bracket(&a, &lie_bracket(&b, &c))
            .add(&lie_bracket(&b, &lie_bracket(&c, &a)))
            .add(&lie_bracket(&c, &lie_bracket(&a, &b)));
        prop_assert!(jac.is_zero());
    }

    #[test]
    fn transformation_then_inverse(fv in family_values()) {
        let (i, raw) = fv;
        let fam = &families()[i];
        let mut values = BTreeMap::new();
        for ((p, _), (n, d)) in fam.generic.ctx.params().zip(raw) {
            let q = Q::new(n.into(), d.into());
            prop_assume!(fam.generic.ctx.admits(p, &q));
            values.insert(p.to_string(), Expr::rational(q));
        }
        let t = match fam.member(&values) {
            Ok(t) => t,
            Err(kolsym::Error::Constraint(_)) => return Err(TestCaseError::reject("degenerate member")),
            Err(e) => panic!("{e}"),
        };
        prop_assume!(t.check_nonzero().is_ok());
        prop_assert!(t.check_inverse().is_ok(), "{:?}", t.check_inverse());
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn normalization_reaches_a_canonical_form(q in [-6i64..=6, -6i64..=6, -6i64..=6, -6i64..=6]) {
        let quad = Quadruple::ints(q[0], q[1], q[2], q[3]);
        prop_assume!(q[..3].iter().any(|v| *v != 0));
        let n = normalize(&quad).unwrap();
        prop_assert!(n.verify(&quad).is_ok(), "{:?}", n.verify(&quad));
        let canon = n.form.quadruple();
        let f = solve_quadruple(&canon).unwrap();
        prop_assert!(canon.residual(&f).is_zero());
        if let CanonicalForm::Power { rho } = &n.form {
            prop_assert!(rho.eval(&NoSymbols).unwrap() <= -1.0 + 1e-12, "rho = {}", rho);
        }
    }
}

#[test]
fn table_bases_obey_bracket_laws() {
    let mut triples = 0;
    for table in bundled_tables() {
        for case in &table.file.cases {
            let basis = table.basis(case).unwrap();
            for a in &basis {
                for b in &basis {
                    assert!(lie_bracket(a, b).add(&lie_bracket(b, a)).is_zero());
                    for c in &basis {
                        let jac = lie_bracket(a, &lie_bracket(b, c))
                            .add(&lie_bracket(b, &lie_bracket(c, a)))
                            .add(&lie_bracket(c, &lie_bracket(a, b)));
                        assert!(
                            jac.is_zero(),
                            "table {} case {}",
                            table.number(),
                            case.label
                        );
                        triples += 1;
                    }
                }
            }
        }
    }
    assert!(triples > 1000);
}
