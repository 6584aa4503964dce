//! Classifying conditions: the equations a symmetry imposes on the varying
//! element once the determining equations independent of it are solved.

use serde::{Deserialize, Serialize};
use symcore::{BaseVar, Expr, Symbol};

use crate::error::{Error, Result};
use crate::fields::VectorField;

/// Which classifying condition a table uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifyingKind {
    /// `g = 1`, arbitrary `k`: `(c1 t + c2) f_t = (2c4 − c1) f`.
    GeneralK,
    /// `g = 1`, `k = u`: `(c2 t² + c1 t + c0) f_t = (2c6 − c1 − 2c2 t) f`.
    LinearK,
    /// `f = 1`, `k = u`: `(c1 t + c0) g_t + (c1 − c4 + c7 − 2c2 G) g = 0`.
    F1Linear,
    /// No single classifying equation is checked.
    None,
}

/// Name of the `f = 1`, `k = u` kind, used by table files.
pub const F1_LINEAR: &str = "f1_linear";

fn d(e: &Expr, v: BaseVar) -> Expr {
    e.diff(&Symbol::Base(v))
}

fn constant(name: &str, c: &Expr) -> Result<Expr> {
    if !c.is_constant() {
        return Err(Error::Invalid(format!(
            "classifying constant {name} = {c} is not constant"
        )));
    }
    Ok(c.clone())
}

/// `(c1 t + c2) f_t − (2c4 − c1) f`.
pub fn general_k_residual(c1: &Expr, c2: &Expr, c4: &Expr, f: &Expr) -> Expr {
    let t = Expr::t();
    &(&(&(c1 * &t) + c2) * &d(f, BaseVar::T)) - &(&(&(&Expr::int(2) * c4) - c1) * f)
}

/// `(c2 t² + c1 t + c0) f_t − (2c6 − c1 − 2c2 t) f`.
pub fn linear_k_residual(c0: &Expr, c1: &Expr, c2: &Expr, c6: &Expr, f: &Expr) -> Expr {
    let t = Expr::t();
    let p = &(&(c2 * &t.powi(2)) + &(c1 * &t)) + c0;
    let s = &(&(&Expr::int(2) * c6) - c1) - &(&Expr::int(2) * &(c2 * &t));
    &(&p * &d(f, BaseVar::T)) - &(&s * f)
}

/// `(c1 t + c0) g_t + (c1 − c4 + c7 − 2c2 G) g`.
pub fn f1_linear_residual(c: &[Expr; 5], g: &Expr, big_g: &Expr) -> Expr {
    let [c0, c1, c2, c4, c7] = c;
    let t = Expr::t();
    let a = &(&(c1 * &t) + c0) * &d(g, BaseVar::T);
    let b = &(&(&(c1 - c4) + c7) - &(&Expr::int(2) * &(c2 * big_g))) * g;
    &a + &b
}

/// Extracts the constants of the classifying condition from a symmetry and
/// returns the condition evaluated on the element. `big_g` is needed only for
/// [`ClassifyingKind::F1Linear`].
pub fn classifying_residual(
    kind: ClassifyingKind,
    q: &VectorField,
    element: &Expr,
    big_g: Option<&Expr>,
) -> Result<Option<Expr>> {
    let t = Expr::t();
    match kind {
        ClassifyingKind::None => Ok(None),
        ClassifyingKind::GeneralK => {
            let c1 = constant("c1", &d(&q.tau, BaseVar::T))?;
            let c2 = constant("c2", &(&q.tau - &(&c1 * &t)))?;
            let c4 = constant("c4", &d(&q.eta, BaseVar::Y))?;
            Ok(Some(general_k_residual(&c1, &c2, &c4, element)))
        }
        ClassifyingKind::LinearK => {
            let c2 = constant(
                "c2",
                &(&d(&d(&q.tau, BaseVar::T), BaseVar::T) / &Expr::int(2)),
            )?;
            let c1 = constant(
                "c1",
                &(&d(&q.tau, BaseVar::T) - &(&Expr::int(2) * &(&c2 * &t))),
            )?;
            let c0 = constant("c0", &(&(&q.tau - &(&c2 * &t.powi(2))) - &(&c1 * &t)))?;
            let c6 = constant("c6", &d(&q.eta, BaseVar::Y))?;
            Ok(Some(linear_k_residual(&c0, &c1, &c2, &c6, element)))
        }
        ClassifyingKind::F1Linear => {
            let big_g =
                big_g.ok_or_else(|| Error::Invalid("classifying condition needs G".into()))?;
            let u = Expr::u();
            let x = Expr::x();
            let c2 = constant("c2", &d(&q.theta, BaseVar::X))?;
            let theta_u = d(&q.theta, BaseVar::U);
            let c7 = constant("c7", &(&theta_u + &(&c2 * big_g)))?;
            // c3 is the remaining free constant of θ; it does not enter the condition
            constant("c3", &(&(&q.theta - &(&theta_u * &u)) - &(&c2 * &x)))?;
            let c4 = constant("c4", &(&d(&q.xi, BaseVar::X) - &(&c2 * big_g)))?;
            let c1 = constant("c1", &d(&q.tau, BaseVar::T))?;
            let c0 = constant("c0", &(&q.tau - &(&c1 * &t)))?;
            Ok(Some(f1_linear_residual(
                &[c0, c1, c2, c4, c7],
                element,
                big_g,
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use symcore::{parse, ParameterContext};

    #[test]
    fn arctan_case_satisfies_linear_condition() {
        let ctx = ParameterContext::new().with("sigma", &[]).unwrap();
        let f = parse("e^(sigma*arctan(t))/(t^2+1)", &ctx).unwrap();
        let q = VectorField::parse(&["t^2+1", "t*x", "sigma*y/2", "x - t*u"], &ctx).unwrap();
        let r = classifying_residual(ClassifyingKind::LinearK, &q, &f, None)
            .unwrap()
            .unwrap();
        assert!(r.is_zero());
        let f = parse("t^2", &ctx).unwrap();
        let r = classifying_residual(ClassifyingKind::LinearK, &q, &f, None)
            .unwrap()
            .unwrap();
        assert!(!r.is_zero());
    }

    #[test]
    fn tangent_case_satisfies_f1_condition() {
        let ctx = ParameterContext::new();
        let g = parse("1 + tan(t)^2", &ctx).unwrap();
        let big_g = parse("tan(t)", &ctx).unwrap();
        let q = VectorField::parse(&["1", "x*tan(t)", "0", "x - u*tan(t)"], &ctx).unwrap();
        let r = classifying_residual(ClassifyingKind::F1Linear, &q, &g, Some(&big_g))
            .unwrap()
            .unwrap();
        assert!(r.is_zero());
    }
}
