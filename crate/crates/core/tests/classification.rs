//! Equivalence families, determining systems, canonical forms of the
//! classifying quadruple and the branches for k.

use kolsym::classify::{certify_k_branches, derive_determining, solve_k_branches, Gauge};
use kolsym::classpde::{
    action, normalize, solve_quadruple, verify_theorem_group, ActionParams, CanonicalForm,
    Quadruple,
};
use kolsym::VectorField;
use symcore::{parse, Expr, ParameterContext};

#[test]
fn every_family_verifies() {
    for id in 1..=6 {
        let r = verify_theorem_group(id).unwrap();
        assert!(r.ok, "{r:#?}");
        assert!(r.checks.len() >= 4);
    }
    assert!(verify_theorem_group(7).is_err());
}

#[test]
fn determining_systems_match_both_gauges() {
    for gauge in [Gauge::G1, Gauge::F1] {
        let sys = derive_determining(gauge).unwrap();
        assert!(sys.matches_reference().unwrap(), "{gauge:?}");
        for e in sys.expressions() {
            assert!(kolsym::jetspace::jets_in(&e).is_empty());
        }
    }
}

#[test]
fn determining_system_rejects_x_dilation() {
    let sys = derive_determining(Gauge::G1).unwrap();
    let q = VectorField::parse(&["0", "x", "0", "0"], &sys.equation.ctx).unwrap();
    assert!(sys.residuals_for(&q).unwrap().iter().any(|r| !r.is_zero()));
    let q = VectorField::parse(&["0", "1", "0", "0"], &sys.equation.ctx).unwrap();
    assert!(sys.residuals_for(&q).unwrap().iter().all(Expr::is_zero));
}

#[test]
fn four_canonical_forms() {
    let c = ParameterContext::new().with("sigma", &[]).unwrap();
    let sigma = parse("sigma", &c).unwrap();
    let arctan = Quadruple::new(Expr::one(), Expr::zero(), Expr::one(), sigma).unwrap();
    assert_eq!(
        solve_quadruple(&arctan).unwrap(),
        parse("e^(sigma*arctan(t))/(t^2+1)", &c).unwrap()
    );
    assert_eq!(
        solve_quadruple(&Quadruple::ints(0, 1, 0, -3)).unwrap(),
        Expr::t().powi(-3)
    );
    assert_eq!(
        solve_quadruple(&Quadruple::ints(0, 0, 1, 1)).unwrap(),
        Expr::t().exp()
    );
    assert_eq!(
        solve_quadruple(&Quadruple::ints(0, 0, 1, 0)).unwrap(),
        Expr::one()
    );
    for q in [
        Quadruple::ints(2, 1, 3, 5),
        Quadruple::ints(1, -3, 2, 1),
        Quadruple::ints(0, 2, 3, 1),
    ] {
        let n = normalize(&q).unwrap();
        n.verify(&q).unwrap();
        let f = solve_quadruple(&n.form.quadruple()).unwrap();
        assert!(n.form.quadruple().residual(&f).is_zero());
    }
    assert!(matches!(
        normalize(&Quadruple::ints(1, 0, 1, 2)).unwrap().form,
        CanonicalForm::Arctan { .. }
    ));
}

#[test]
fn inversion_reflects_the_power_exponent() {
    let c = ParameterContext::new().with("rho", &[]).unwrap();
    let rho = parse("rho", &c).unwrap();
    let q = Quadruple::new(Expr::zero(), Expr::one(), Expr::zero(), rho.clone()).unwrap();
    let inv = ActionParams::new(
        Expr::zero(),
        Expr::one(),
        Expr::one(),
        Expr::zero(),
        Expr::one(),
    );
    let out = action(&inv, &q).unwrap();
    let reflected = Quadruple::new(
        Expr::zero(),
        Expr::one(),
        Expr::zero(),
        &(-&rho) - &Expr::int(2),
    )
    .unwrap();
    assert!(out.is_proportional_to(&reflected), "{out:?}");
}

#[test]
fn k_branches() {
    for s in 0..=2 {
        let b = solve_k_branches(s).unwrap();
        certify_k_branches(&b).unwrap();
    }
    assert_eq!(solve_k_branches(1).unwrap().len(), 3);
    assert_eq!(solve_k_branches(2).unwrap()[0].k, Some(Expr::u()));
    assert!(solve_k_branches(3).is_err());
}
