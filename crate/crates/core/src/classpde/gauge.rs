//! The gauge `t̃ = ∫g dt` mapping any member of the class to one with `g = 1`.

use std::collections::BTreeMap;

use symcore::{Expr, ParameterContext};

use super::equation::{opaque_element, ClassEquation};
use super::integrate::inverse_in_t;
use super::transform::{apply_equivalence, ElementMap, PointTransformation};
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct GaugeResult {
    /// The gauged equation; when `parametric`, its `f` is still written in the
    /// old `t` because `∫g` could not be inverted.
    pub equation: ClassEquation,
    /// The certified gauge, absent in the parametric case.
    pub transformation: Option<PointTransformation>,
    pub parametric: bool,
}

fn gauge_transformation(big_g: Expr, big_g_inv: Expr, e: &ClassEquation) -> PointTransformation {
    let mut elements = BTreeMap::from([
        (
            "f".to_string(),
            ElementMap::Template(&opaque_element("f") / &opaque_element("g")),
        ),
        ("g".to_string(), ElementMap::Fixed(Expr::one())),
        ("k".to_string(), ElementMap::Template(opaque_element("k"))),
        ("G".to_string(), ElementMap::Template(opaque_element("G"))),
    ]);
    if e.big_k.is_some() {
        elements.insert("K".into(), ElementMap::Template(opaque_element("K")));
    }
    PointTransformation {
        ctx: ParameterContext::new(),
        forward: [big_g, Expr::x(), Expr::y(), Expr::u()],
        inverse: [big_g_inv, Expr::x(), Expr::y(), Expr::u()],
        elements,
        class: BTreeMap::new(),
        nonzero: vec![opaque_element("g")],
    }
}

/// Maps `e` to the member with `g = 1` by `t̃ = ∫g dt`.
pub fn gauge_to_g1(e: &ClassEquation) -> Result<GaugeResult> {
    let big_g = e.antiderivative_g()?;
    let inv = if big_g == opaque_element("G") {
        Some(Expr::opaque("Ginv", &Expr::t()))
    } else {
        inverse_in_t(&big_g)
    };
    let Some(inv) = inv else {
        let f = e.f.try_div(&e.g)?;
        let equation = ClassEquation {
            f,
            g: Expr::one(),
            k: e.k.clone(),
            big_k: e.big_k.clone(),
            big_g: None,
            ctx: e.ctx.clone(),
        };
        return Ok(GaugeResult {
            equation,
            transformation: None,
            parametric: true,
        });
    };
    let t = gauge_transformation(big_g, inv, e);
    t.check_inverse()?;
    let mut equation = apply_equivalence(e, &t)?;
    if equation
        .big_g
        .as_ref()
        .is_some_and(|g| (g - &Expr::t()).is_zero())
    {
        equation.big_g = None;
    }
    Ok(GaugeResult {
        equation,
        transformation: Some(t),
        parametric: false,
    })
}

/// The inverse gauge from the gauged member back to `original`, certified.
pub fn ungauge(gauged: &GaugeResult, original: &ClassEquation) -> Result<ClassEquation> {
    let t = gauged.transformation.as_ref().ok_or_else(|| {
        crate::error::Error::Unsupported("parametric gauge has no inverse".into())
    })?;
    let mut elements = BTreeMap::from([
        ("f".to_string(), ElementMap::Fixed(original.f.clone())),
        ("g".to_string(), ElementMap::Fixed(original.g.clone())),
        ("k".to_string(), ElementMap::Fixed(original.k.clone())),
    ]);
    if let Some(big_k) = &original.big_k {
        elements.insert("K".into(), ElementMap::Fixed(big_k.clone()));
    }
    let back = PointTransformation {
        ctx: ParameterContext::new(),
        forward: t.inverse.clone(),
        inverse: t.forward.clone(),
        elements,
        class: BTreeMap::new(),
        nonzero: vec![],
    };
    back.check_inverse()?;
    apply_equivalence(&gauged.equation, &back)
}

#[cfg(test)]
mod tests {
    use super::*;
    use symcore::parse;

    #[test]
    fn gauges_concrete_members() {
        let ctx = ParameterContext::new();
        for (f, g, expect_f) in [("1", "e^t", "1/t"), ("t", "2", "t/4"), ("1", "1/t", "e^t")] {
            let e = ClassEquation::new(
                parse(f, &ctx).unwrap(),
                parse(g, &ctx).unwrap(),
                Expr::u(),
                ctx.clone(),
            )
            .unwrap();
            let r = gauge_to_g1(&e).unwrap();
            assert!(!r.parametric);
            assert_eq!(r.equation.g, Expr::one());
            assert_eq!(
                r.equation.f,
                parse(expect_f, &ctx).unwrap(),
                "f = {f}, g = {g}"
            );
            let back = ungauge(&r, &e).unwrap();
            assert_eq!(back.f, e.f);
        }
    }

    #[test]
    fn gauges_arbitrary_member() {
        let e = ClassEquation::generic();
        let r = gauge_to_g1(&e).unwrap();
        let ginv = Expr::opaque("Ginv", &Expr::t());
        let expect = &Expr::opaque("f", &ginv) / &Expr::opaque("g", &ginv);
        assert_eq!(r.equation.f, expect);
    }

    #[test]
    fn parametric_fallback() {
        let ctx = ParameterContext::new();
        let e = ClassEquation::new(Expr::one(), parse("1 + e^t", &ctx).unwrap(), Expr::u(), ctx)
            .unwrap();
        let r = gauge_to_g1(&e).unwrap();
        assert!(r.parametric && r.transformation.is_none());
    }
}
