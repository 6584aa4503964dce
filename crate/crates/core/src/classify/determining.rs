//! Determining equations of Lie symmetries for the two gauges of the class.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use symcore::{parse, BaseVar, Expr, ParameterContext, Substitution, SymMonomial, Symbol};

use super::invariance_residual;
use crate::classpde::ClassEquation;
use crate::error::{Error, Result};
use crate::fields::VectorField;
use crate::jetspace::split_by_jet;
use crate::linalg::rational_span_equal;

/// `G1`: `g = 1` with `f`, `k` arbitrary. `F1`: `f = 1` with `g`, `k` arbitrary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gauge {
    G1,
    F1,
}

impl std::str::FromStr for Gauge {
    type Err = Error;

    fn from_str(s: &str) -> Result<Gauge> {
        match s {
            "g1" | "g=1" => Ok(Gauge::G1),
            "f1" | "f=1" => Ok(Gauge::F1),
            other => Err(Error::Invalid(format!(
                "unknown gauge `{other}`, expected g1 or f1"
            ))),
        }
    }
}

use BaseVar::{T, X, Y};

/// Unknown functions of the ansatz and their variables.
fn ansatz_functions(gauge: Gauge) -> Vec<(&'static str, Vec<BaseVar>)> {
    let mut v = vec![("tau", vec![T]), ("xi", vec![T, X])];
    match gauge {
        Gauge::G1 => {
            v.push(("eta1", vec![T]));
            v.push(("eta0", vec![T]));
        }
        Gauge::F1 => v.push(("eta", vec![T, Y])),
    }
    v.push(("phi", vec![T, X, Y]));
    v.push(("psi", vec![T, X, Y]));
    v
}

pub fn ansatz_context(gauge: Gauge) -> ParameterContext {
    let mut ctx = ParameterContext::new();
    for (name, vars) in ansatz_functions(gauge) {
        ctx.declare_func(name, &vars).expect("fresh function names");
    }
    ctx
}

/// The reduced ansatz: `τ(t)`, `ξ(t,x)`, `η` affine in `y` (gauge `g = 1`) or
/// `η(t,y)` (gauge `f = 1`), `θ = φ(t,x,y)u + ψ(t,x,y)`.
pub fn ansatz(gauge: Gauge) -> VectorField {
    let f = |name: &str, vars: &[BaseVar]| Expr::func(name, vars);
    let eta = match gauge {
        Gauge::G1 => &(&f("eta1", &[T]) * &Expr::y()) + &f("eta0", &[T]),
        Gauge::F1 => f("eta", &[T, Y]),
    };
    VectorField::new(
        f("tau", &[T]),
        f("xi", &[T, X]),
        eta,
        &(&f("phi", &[T, X, Y]) * &Expr::u()) + &f("psi", &[T, X, Y]),
    )
}

pub fn gauge_equation(gauge: Gauge) -> ClassEquation {
    let mut e = ClassEquation::generic();
    match gauge {
        Gauge::G1 => e.g = Expr::one(),
        Gauge::F1 => e.f = Expr::one(),
    }
    e
}

/// The determining equations in the standard presentation.
pub fn reference_system(gauge: Gauge) -> Vec<Expr> {
    let src: &[&str] = match gauge {
        Gauge::G1 => &[
            "tau(t)*f_d1(t) - (2*eta1(t) - tau_t(t))*f(t)",
            "2*f(t)*phi_y(t,x,y) + eta1_t(t)*y + eta0_t(t)",
            "(phi(t,x,y)*u + psi(t,x,y))*k_d1(u) + (tau_t(t) - xi_x(t,x))*k(u) - xi_t(t,x)",
            "(phi_x(t,x,y)*u + psi_x(t,x,y))*k(u) + (phi_t(t,x,y) - f(t)*phi_yy(t,x,y))*u + psi_t(t,x,y) - f(t)*psi_yy(t,x,y)",
        ],
        Gauge::F1 => &[
            "2*eta_y(t,y) - tau_t(t)",
            "eta_yy(t,y) - eta_t(t,y) - 2*phi_y(t,x,y)",
            "(phi(t,x,y)*u + psi(t,x,y))*g(t)*k_d1(u) + (tau(t)*g_d1(t) + (tau_t(t) - xi_x(t,x))*g(t))*k(u) - xi_t(t,x)",
            "(phi_x(t,x,y)*u + psi_x(t,x,y))*g(t)*k(u) + (phi_t(t,x,y) - phi_yy(t,x,y))*u + psi_t(t,x,y) - psi_yy(t,x,y)",
        ],
    };
    let ctx = ansatz_context(gauge);
    src.iter()
        .map(|s| parse(s, &ctx).expect("reference system parses"))
        .collect()
}

/// Coefficients of the invariance condition at the independent jet monomials.
#[derive(Debug, Clone)]
pub struct DeterminingSystem {
    pub gauge: Gauge,
    pub equation: ClassEquation,
    pub ansatz: VectorField,
    pub equations: BTreeMap<SymMonomial, Expr>,
}

impl DeterminingSystem {
    pub fn expressions(&self) -> Vec<Expr> {
        self.equations.values().cloned().collect()
    }

    /// True when the system spans the same space over Q as the reference one.
    pub fn matches_reference(&self) -> Result<bool> {
        rational_span_equal(&self.expressions(), &reference_system(self.gauge))
    }

    /// Evaluates the system on a concrete generator of the ansatz shape.
    pub fn residuals_for(&self, q: &VectorField) -> Result<Vec<Expr>> {
        let u = Symbol::Base(BaseVar::U);
        let y = Symbol::Base(BaseVar::Y);
        let theta_u = q.theta.diff(&u);
        let psi = &q.theta - &(&theta_u * &Expr::u());
        if !theta_u.diff(&u).is_zero()
            || !q
                .tau
                .free_symbols()
                .iter()
                .all(|s| s.is_param() || *s == Symbol::Base(T))
        {
            return Err(Error::Invalid(format!("{q} does not fit the ansatz")));
        }
        let mut s = Substitution::new()
            .bind_func("tau", q.tau.clone())
            .bind_func("xi", q.xi.clone())
            .bind_func("phi", theta_u)
            .bind_func("psi", psi);
        match self.gauge {
            Gauge::G1 => {
                let eta1 = q.eta.diff(&y);
                if !eta1.diff(&y).is_zero() {
                    return Err(Error::Invalid(format!("{q}: η must be affine in y")));
                }
                let eta0 = &q.eta - &(&eta1 * &Expr::y());
                s.set_func("eta1", eta1);
                s.set_func("eta0", eta0);
            }
            Gauge::F1 => s.set_func("eta", q.eta.clone()),
        }
        self.expressions()
            .iter()
            .map(|e| Ok(e.substitute(&s)?))
            .collect()
    }
}

/// Splits the invariance condition of the ansatz by jet monomials.
pub fn derive_determining(gauge: Gauge) -> Result<DeterminingSystem> {
    let e = gauge_equation(gauge);
    let q = ansatz(gauge);
    let r = invariance_residual(&q, &e)?;
    let equations = split_by_jet(&r)?;
    Ok(DeterminingSystem {
        gauge,
        equation: e,
        ansatz: q,
        equations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_gauges_match_the_reference() {
        for gauge in [Gauge::G1, Gauge::F1] {
            let sys = derive_determining(gauge).unwrap();
            assert_eq!(sys.equations.len(), 4, "{gauge:?}");
            assert!(sys.matches_reference().unwrap(), "{gauge:?}");
        }
    }

    #[test]
    fn dilation_in_x_is_rejected() {
        let sys = derive_determining(Gauge::G1).unwrap();
        let q = VectorField::parse(&["0", "x", "0", "0"], &ParameterContext::new()).unwrap();
        let r = sys.residuals_for(&q).unwrap();
        assert!(r.iter().any(|e| !e.is_zero()));
        let q = VectorField::parse(&["0", "1", "0", "0"], &ParameterContext::new()).unwrap();
        assert!(sys.residuals_for(&q).unwrap().iter().all(Expr::is_zero));
    }
}
