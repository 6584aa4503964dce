//! Algebraic invariants of the normal form on a randomly generated corpus.

use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use symcore::{
    collect, parse, parse_ast, reconstruct, BaseVar, Expr, Opaque, ParameterContext, Symbol,
    Valuation,
};

const SEED: u64 = 0x5eed_2024;

fn config() -> Config {
    Config {
        cases: 1000,
        rng_seed: RngSeed::Fixed(SEED),
        failure_persistence: None,
        ..Config::default()
    }
}

fn ctx() -> ParameterContext {
    let mut c = ParameterContext::new();
    c.declare("a", &[]).unwrap();
    c.declare("b", &["!=0".parse().unwrap()]).unwrap();
    c
}

/// Source strings over a small vocabulary; all well-formed.
fn source() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (1i64..5).prop_map(|n| n.to_string()),
        Just("t".to_string()),
        Just("x".to_string()),
        Just("y".to_string()),
        Just("u".to_string()),
        Just("u_x".to_string()),
        Just("a".to_string()),
        Just("b".to_string()),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(p, q)| format!("({p} + {q})")),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| format!("({p} - {q})")),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| format!("({p})*({q})")),
            (inner.clone(), 1i64..4).prop_map(|(p, n)| format!("({p} + {n})/(t^2 + {n})")),
            (inner.clone(), 0u32..3).prop_map(|(p, k)| format!("({p})^{k}")),
            inner.clone().prop_map(|p| format!("sin({p})")),
            inner.clone().prop_map(|p| format!("exp({p})")),
            inner.clone().prop_map(|p| format!("arctan({p})")),
            inner.clone().prop_map(|p| format!("k({p})")),
            inner.clone().prop_map(|p| format!("ln(t^2 + 1)*({p})")),
            inner.clone().prop_map(|p| format!("t^a*({p})")),
        ]
    })
}

#[derive(Debug)]
struct Point([f64; 7]);

impl Valuation for Point {
    fn symbol(&self, s: &Symbol) -> Option<f64> {
        Some(match s {
            Symbol::Base(BaseVar::T) => self.0[0],
            Symbol::Base(BaseVar::X) => self.0[1],
            Symbol::Base(BaseVar::Y) => self.0[2],
            Symbol::Base(BaseVar::U) => self.0[3],
            Symbol::Jet(_) => self.0[4],
            Symbol::Param(p) if &**p == "a" => self.0[5],
            Symbol::Param(_) => self.0[6],
        })
    }

    fn opaque(&self, o: &Opaque, z: f64) -> Option<f64> {
        // k(z) = z^3 + z
        match (&*o.name, o.order) {
            ("k", 0) => Some(z * z * z + z),
            ("k", 1) => Some(3.0 * z * z + 1.0),
            _ => None,
        }
    }
}

fn point() -> impl Strategy<Value = Point> {
    (
        0.3f64..1.5,
        -1.0f64..1.0,
        -1.0f64..1.0,
        -1.0f64..1.0,
        -1.0f64..1.0,
        -1.0f64..1.0,
        0.2f64..1.0,
    )
        .prop_map(|(t, x, y, u, j, a, b)| Point([t, x, y, u, j, a, b]))
}

/// Relative agreement at 1e-12, measured against the largest intermediate
/// magnitude of either evaluation (cancellation makes the final value a poor
/// yardstick for rounding error).
fn close(p: f64, q: f64, scale: f64) -> bool {
    (p - q).abs() <= 1e-12 * scale.max(1.0)
}

fn vars() -> [Symbol; 4] {
    [
        Symbol::Base(BaseVar::T),
        Symbol::Base(BaseVar::X),
        Symbol::Base(BaseVar::Y),
        Symbol::Base(BaseVar::U),
    ]
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn print_parse_round_trip(src in source()) {
        let c = ctx();
        let e = parse(&src, &c).unwrap();
        let again = parse(&e.to_string(), &c).unwrap();
        prop_assert_eq!(&again, &e, "printed as {}", e);
        // idempotent: renormalizing the printed form is stable
        prop_assert_eq!(again.to_string(), e.to_string());
    }

    #[test]
    fn normal_form_preserves_value(src in source(), p in point()) {
        let c = ctx();
        let ast = parse_ast(&src).unwrap();
        let e = parse(&src, &c).unwrap();
        let mut scale = 0.0;
        if let (Some(raw), Some(norm)) = (ast.eval_tracked(&c, &p, &mut scale), e.eval_tracked(&p, &mut scale)) {
            prop_assert!(close(raw, norm, scale), "{} vs {} (scale {}) for {}", raw, norm, scale, src);
        }
    }

    #[test]
    fn derivative_is_linear_and_leibniz(s1 in source(), s2 in source(), v in 0usize..4) {
        let c = ctx();
        let (e1, e2) = (parse(&s1, &c).unwrap(), parse(&s2, &c).unwrap());
        let v = &vars()[v];
        let lin = (&e1 + &e2).diff(v) - (e1.diff(v) + e2.diff(v));
        prop_assert!(lin.is_zero());
        let leib = (&e1 * &e2).diff(v) - (&e1.diff(v) * &e2 + &e1 * &e2.diff(v));
        prop_assert!(leib.is_zero());
    }

    #[test]
    fn mixed_partials_commute(src in source(), v in 0usize..4, w in 0usize..4) {
        let c = ctx();
        let e = parse(&src, &c).unwrap();
        let (v, w) = (&vars()[v], &vars()[w]);
        prop_assert_eq!(e.diff(v).diff(w), e.diff(w).diff(v));
    }

    #[test]
    fn collect_reconstructs(src in source()) {
        let c = ctx();
        let e = parse(&src, &c).unwrap();
        let ux = Symbol::jet(0, 1, 0);
        if let Ok(parts) = collect(&e, std::slice::from_ref(&ux)) {
            for coeff in parts.values() {
                prop_assert!(!coeff.contains_symbol(&ux));
            }
            prop_assert!((reconstruct(&parts) - &e).is_zero());
        }
    }
}

#[test]
fn example_derivative_with_arctan_exponent() {
    let c = ctx().with("sigma", &[]).unwrap();
    let f = parse("e^(sigma*arctan(t))/(t^2+1)", &c).unwrap();
    let expect = parse("(sigma - 2*t)*e^(sigma*arctan(t))/(t^2+1)^2", &c).unwrap();
    let df = f.diff(&Symbol::Base(BaseVar::T));
    assert_eq!(df, expect);
    // classifying identity with (c2, c1, c0, c6) = (1, 0, 1, sigma/2)
    let slope = parse("(sigma - 2*t)", &c).unwrap();
    let t2 = parse("t^2+1", &c).unwrap();
    assert!(symcore::is_zero(&(&slope * &f - &t2 * &df), &c));
    assert!(symcore::is_zero(&(&(&slope * &f) / &t2 - &df), &c));
}

#[test]
fn opaque_kernels_are_independent() {
    let c = ctx();
    let e = parse("f(t)*k_d1(u)", &c).unwrap();
    assert!(!symcore::is_zero(&e, &c));
    assert!(symcore::is_zero(&parse("0*u_x", &c).unwrap(), &c));
    let ku = parse("k(u)*u_x", &c).unwrap();
    assert_eq!(ku, &Expr::opaque("k", &Expr::u()) * &Expr::jet(0, 1, 0));
}
