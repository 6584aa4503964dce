//! Symmetry dimensions of concrete instances within the degree-bounded ansatz.

use kolsym::classify::{dimension_probe, ProbeOptions};
use kolsym::ClassEquation;
use symcore::{parse, ParameterContext};

fn equation(f: &str, g: &str, k: &str) -> ClassEquation {
    let ctx = ParameterContext::new();
    let p = |s: &str| parse(s, &ctx).unwrap();
    ClassEquation::new(p(f), p(g), p(k), ctx.clone()).unwrap()
}

fn dim(e: &ClassEquation, degree: u32) -> usize {
    dimension_probe(
        e,
        &ProbeOptions {
            degree,
            ..ProbeOptions::default()
        },
    )
    .unwrap()
    .dimension
}

#[test]
fn linear_nonlinearity_has_six() {
    assert_eq!(dim(&equation("1", "1", "u"), 2), 6);
}

#[test]
fn square_nonlinearity_has_five() {
    assert_eq!(dim(&equation("1", "1", "u^2"), 2), 5);
}

#[test]
fn exponential_instance_has_four() {
    let e = equation("e^t", "1", "e^u");
    let r = dimension_probe(&e, &ProbeOptions::default()).unwrap();
    assert_eq!(r.factors, ["1", "exp(t)"]);
    assert_eq!(r.dimension, 4);
}

#[test]
fn monotone_in_degree() {
    let e = equation("1", "1", "u^2");
    let dims: Vec<usize> = (0..=3).map(|d| dim(&e, d)).collect();
    assert!(dims.windows(2).all(|w| w[0] <= w[1]), "{dims:?}");
}
