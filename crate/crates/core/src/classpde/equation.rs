//! Members of the class `u_t = f(t)u_yy − g(t)k(u)u_x`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use symcore::{parse, BaseVar, Constraint, Expr, ParameterContext, Symbol};

use super::integrate::antiderivative;
use crate::error::{Error, Result};

/// One equation of the class. Arbitrary elements are the opaque kernels
/// `f(t)`, `g(t)`, `k(u)`; concrete elements are expressions that may still
/// contain those kernels (for instance after a change of variables).
#[derive(Debug, Clone, PartialEq)]
pub struct ClassEquation {
    pub f: Expr,
    pub g: Expr,
    pub k: Expr,
    /// Potential form `K` with `K_u = k`.
    pub big_k: Option<Expr>,
    /// A fixed antiderivative of `g`; defaults to the kernel `G` or an integral.
    pub big_g: Option<Expr>,
    pub ctx: ParameterContext,
}

/// Element names and the variable each depends on.
pub const ELEMENTS: [(&str, BaseVar); 5] = [
    ("f", BaseVar::T),
    ("g", BaseVar::T),
    ("k", BaseVar::U),
    ("K", BaseVar::U),
    ("G", BaseVar::T),
];

pub fn opaque_element(name: &str) -> Expr {
    let v = ELEMENTS
        .iter()
        .find(|(n, _)| *n == name)
        .map_or(BaseVar::T, |(_, v)| *v);
    Expr::opaque(name, &Expr::base(v))
}

impl ClassEquation {
    /// The fully arbitrary member: `f, g, k` opaque, no potential.
    pub fn generic() -> ClassEquation {
        ClassEquation {
            f: opaque_element("f"),
            g: opaque_element("g"),
            k: opaque_element("k"),
            big_k: None,
            big_g: None,
            ctx: ParameterContext::new(),
        }
    }

    pub fn new(f: Expr, g: Expr, k: Expr, ctx: ParameterContext) -> Result<ClassEquation> {
        let e = ClassEquation {
            f,
            g,
            k,
            big_k: None,
            big_g: None,
            ctx,
        };
        e.validate()?;
        Ok(e)
    }

    pub fn element(&self, name: &str) -> Option<Expr> {
        match name {
            "f" => Some(self.f.clone()),
            "g" => Some(self.g.clone()),
            "k" => Some(self.k.clone()),
            "K" => self.big_k.clone(),
            "G" => self.antiderivative_g().ok(),
            _ => None,
        }
    }

    pub fn is_arbitrary(&self, name: &str) -> bool {
        self.element(name)
            .is_some_and(|e| e == opaque_element(name))
    }

    /// `∫g dt`: the stored antiderivative, the kernel `G` for arbitrary `g`,
    /// or a closed-form integral.
    pub fn antiderivative_g(&self) -> Result<Expr> {
        if let Some(big_g) = &self.big_g {
            return Ok(big_g.clone());
        }
        if self.g == opaque_element("g") {
            return Ok(opaque_element("G"));
        }
        antiderivative(&self.g, BaseVar::T).ok_or_else(|| {
            Error::Unsupported(format!("no closed-form antiderivative of g = {}", self.g))
        })
    }

    /// `f u_yy − g k u_x`.
    pub fn rhs(&self) -> Expr {
        let uyy = Expr::jet(0, 0, 2);
        let ux = Expr::jet(0, 1, 0);
        &(&self.f * &uyy) - &(&(&self.g * &self.k) * &ux)
    }

    /// `u_t − f u_yy + g k u_x`.
    pub fn defining_expr(&self) -> Expr {
        &Expr::jet(1, 0, 0) - &self.rhs()
    }

    /// Nondegeneracy and variable dependence of the elements.
    pub fn validate(&self) -> Result<()> {
        let check = |name: &str, e: &Expr, var: BaseVar| -> Result<()> {
            if e.is_zero() {
                return Err(Error::Invalid(format!("{name} must not vanish")));
            }
            for s in e.free_symbols() {
                match s {
                    Symbol::Param(_) => {}
                    Symbol::Base(v) if *v == var => {}
                    other => {
                        return Err(Error::Invalid(format!(
                            "{name} = {e} depends on `{other}`, expected only {}",
                            var.name()
                        )))
                    }
                }
            }
            self.ctx.check_declared(e)?;
            Ok(())
        };
        check("f", &self.f, BaseVar::T)?;
        check("g", &self.g, BaseVar::T)?;
        check("k", &self.k, BaseVar::U)?;
        if self.k.diff(&Symbol::Base(BaseVar::U)).is_zero() {
            return Err(Error::Invalid(format!(
                "k = {} must not be constant",
                self.k
            )));
        }
        if let Some(big_k) = &self.big_k {
            check("K", big_k, BaseVar::U)?;
            let r = &big_k.diff(&Symbol::Base(BaseVar::U)) - &self.k;
            if !r.is_zero() {
                return Err(Error::certification("K_u = k", &r));
            }
        }
        if let Some(big_g) = &self.big_g {
            let r = &big_g.diff(&Symbol::Base(BaseVar::T)) - &self.g;
            if !r.is_zero() {
                return Err(Error::certification("G_t = g", &r));
            }
        }
        Ok(())
    }

    /// Replaces parameters by values, checking declared constraints.
    pub fn bind_params(&self, values: &BTreeMap<String, symcore::Q>) -> Result<ClassEquation> {
        let mut s = symcore::Substitution::new();
        let mut ctx = ParameterContext::new();
        for (name, cons) in self.ctx.params() {
            match values.get(name) {
                Some(v) => {
                    if !self.ctx.admits(name, v) {
                        return Err(Error::Constraint(format!(
                            "{name} = {v} violates its constraints"
                        )));
                    }
                    s.set(Symbol::param(name), Expr::rational(v.clone()));
                }
                None => ctx.declare(name, cons)?,
            }
        }
        for name in values.keys() {
            if !self.ctx.is_declared(name) {
                return Err(Error::Invalid(format!("unknown parameter `{name}`")));
            }
        }
        let sub = |e: &Expr| e.substitute(&s);
        let out = ClassEquation {
            f: sub(&self.f)?,
            g: sub(&self.g)?,
            k: sub(&self.k)?,
            big_k: self.big_k.as_ref().map(sub).transpose()?,
            big_g: self.big_g.as_ref().map(sub).transpose()?,
            ctx,
        };
        out.validate()?;
        Ok(out)
    }

    pub fn to_file(&self) -> EquationFile {
        let show = |name: &str, e: &Expr| {
            if *e == opaque_element(name) {
                "arbitrary".to_string()
            } else {
                e.to_string()
            }
        };
        EquationFile {
            schema: Some(1),
            params: params_to_file(&self.ctx),
            f: show("f", &self.f),
            g: show("g", &self.g),
            k: show("k", &self.k),
            big_k: self.big_k.as_ref().map(|e| show("K", e)),
            big_g: self.big_g.as_ref().map(|e| show("G", e)),
        }
    }
}

impl fmt::Display for ClassEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gk = &self.g * &self.k;
        write!(f, "u_t = {}u_yy - {}u_x", factor(&self.f), factor(&gk))
    }
}

/// `e*` for a coefficient, parenthesized unless it is a single monomial.
fn factor(e: &Expr) -> String {
    if e.is_one() {
        return String::new();
    }
    let s = e.to_string();
    if e.is_polynomial() && e.numer_terms().len() == 1 && !s.starts_with('-') {
        format!("{s}*")
    } else {
        format!("({s})*")
    }
}

/// Parameter block: name → constraint strings such as `"!=0"` or `"<=-1"`.
pub type ParamsFile = BTreeMap<String, Vec<String>>;

pub fn params_from_file(p: &ParamsFile) -> Result<ParameterContext> {
    let mut ctx = ParameterContext::new();
    for (name, cons) in p {
        let cons: Vec<Constraint> = cons
            .iter()
            .map(|c| c.parse::<Constraint>())
            .collect::<symcore::Result<_>>()?;
        ctx.declare(name, &cons)?;
    }
    Ok(ctx)
}

pub fn params_to_file(ctx: &ParameterContext) -> ParamsFile {
    ctx.params()
        .map(|(n, c)| (n.to_string(), c.iter().map(|c| c.to_string()).collect()))
        .collect()
}

/// On-disk equation: expression strings, or `"arbitrary"` for an opaque element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquationFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<u32>,
    #[serde(default)]
    pub params: ParamsFile,
    #[serde(default = "arbitrary")]
    pub f: String,
    #[serde(default = "arbitrary")]
    pub g: String,
    #[serde(default = "arbitrary")]
    pub k: String,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub big_k: Option<String>,
    #[serde(rename = "G", default, skip_serializing_if = "Option::is_none")]
    pub big_g: Option<String>,
}

fn arbitrary() -> String {
    "arbitrary".into()
}

pub fn parse_element(name: &str, src: &str, ctx: &ParameterContext) -> Result<Expr> {
    if src.trim() == "arbitrary" {
        return Ok(opaque_element(name));
    }
    Ok(parse(src, ctx)?)
}

impl EquationFile {
    pub fn to_equation(&self) -> Result<ClassEquation> {
        if let Some(v) = self.schema {
            if v != 1 {
                return Err(Error::Schema(format!("unsupported equation schema {v}")));
            }
        }
        let ctx = params_from_file(&self.params)?;
        let e = ClassEquation {
            f: parse_element("f", &self.f, &ctx)?,
            g: parse_element("g", &self.g, &ctx)?,
            k: parse_element("k", &self.k, &ctx)?,
            big_k: self
                .big_k
                .as_deref()
                .map(|s| parse_element("K", s, &ctx))
                .transpose()?,
            big_g: self
                .big_g
                .as_deref()
                .map(|s| parse_element("G", s, &ctx))
                .transpose()?,
            ctx,
        };
        e.validate()?;
        Ok(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generic_member() {
        let e = ClassEquation::generic();
        assert!(e.is_arbitrary("f") && e.is_arbitrary("k"));
        assert_eq!(e.antiderivative_g().unwrap(), opaque_element("G"));
        assert_eq!(e.to_string(), "u_t = f(t)*u_yy - g(t)*k(u)*u_x");
    }

    #[test]
    fn validation() {
        let ctx = ParameterContext::new();
        assert!(ClassEquation::new(Expr::one(), Expr::one(), Expr::one(), ctx.clone()).is_err());
        assert!(ClassEquation::new(Expr::x(), Expr::one(), Expr::u(), ctx.clone()).is_err());
        let file = EquationFile {
            schema: None,
            params: ParamsFile::new(),
            f: "1".into(),
            g: "e^t".into(),
            k: "u^2".into(),
            big_k: Some("u^3/3".into()),
            big_g: None,
        };
        let e = file.to_equation().unwrap();
        assert_eq!(e.antiderivative_g().unwrap(), Expr::t().exp());
        let mut bad = file.clone();
        bad.big_k = Some("u^3".into());
        assert!(bad.to_equation().is_err());
    }
}
