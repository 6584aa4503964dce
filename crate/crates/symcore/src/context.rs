//! Declared parameters, their side conditions, and the unknown functions a
//! session may mention.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;

use crate::error::{Result, SymError};
use crate::expr::Expr;
use crate::symbol::{BaseVar, Symbol};
use crate::Q;

/// A side condition on a single parameter.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Constraint {
    Nonzero,
    NotEqual(Q),
    /// `p ≤ bound`, or `p < bound` when strict.
    AtMost {
        bound: Q,
        strict: bool,
    },
    /// `p ≥ bound`, or `p > bound` when strict.
    AtLeast {
        bound: Q,
        strict: bool,
    },
    /// The parameter must be zero (used for degenerate branches).
    Zero,
}

impl Constraint {
    pub fn admits(&self, v: &Q) -> bool {
        match self {
            Constraint::Nonzero => !v.is_zero(),
            Constraint::NotEqual(q) => v != q,
            Constraint::AtMost { bound, strict } => {
                if *strict {
                    v < bound
                } else {
                    v <= bound
                }
            }
            Constraint::AtLeast { bound, strict } => {
                if *strict {
                    v > bound
                } else {
                    v >= bound
                }
            }
            Constraint::Zero => v.is_zero(),
        }
    }

    /// Same as [`Constraint::admits`] for floating-point samples.
    pub fn admits_f64(&self, v: f64) -> bool {
        let f = |q: &Q| crate::eval::q_to_f64(q);
        match self {
            Constraint::Nonzero => v != 0.0,
            Constraint::NotEqual(q) => (v - f(q)).abs() > 1e-9,
            Constraint::AtMost { bound, strict } => {
                if *strict {
                    v < f(bound)
                } else {
                    v <= f(bound)
                }
            }
            Constraint::AtLeast { bound, strict } => {
                if *strict {
                    v > f(bound)
                } else {
                    v >= f(bound)
                }
            }
            Constraint::Zero => v == 0.0,
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Nonzero => f.write_str("!= 0"),
            Constraint::NotEqual(q) => write!(f, "!= {q}"),
            Constraint::AtMost { bound, strict } => {
                write!(f, "{} {bound}", if *strict { "<" } else { "<=" })
            }
            Constraint::AtLeast { bound, strict } => {
                write!(f, "{} {bound}", if *strict { ">" } else { ">=" })
            }
            Constraint::Zero => f.write_str("= 0"),
        }
    }
}

/// Parses `!=0`, `!=1`, `<=-1`, `<-1`, `>0`, `=0`.
impl FromStr for Constraint {
    type Err = SymError;

    fn from_str(s: &str) -> Result<Constraint> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || SymError::Parameter(s.clone(), "unrecognized constraint".into());
        let num = |r: &str| parse_rational(r).ok_or_else(bad);
        if let Some(r) = s.strip_prefix("!=") {
            let q = num(r)?;
            return Ok(if q.is_zero() {
                Constraint::Nonzero
            } else {
                Constraint::NotEqual(q)
            });
        }
        if let Some(r) = s.strip_prefix("<=") {
            return Ok(Constraint::AtMost {
                bound: num(r)?,
                strict: false,
            });
        }
        if let Some(r) = s.strip_prefix(">=") {
            return Ok(Constraint::AtLeast {
                bound: num(r)?,
                strict: false,
            });
        }
        if let Some(r) = s.strip_prefix('<') {
            return Ok(Constraint::AtMost {
                bound: num(r)?,
                strict: true,
            });
        }
        if let Some(r) = s.strip_prefix('>') {
            return Ok(Constraint::AtLeast {
                bound: num(r)?,
                strict: true,
            });
        }
        if let Some(r) = s.strip_prefix('=') {
            if num(r)?.is_zero() {
                return Ok(Constraint::Zero);
            }
        }
        Err(bad())
    }
}

/// `3`, `-1`, `2/3`.
pub fn parse_rational(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n = n.trim().parse().ok()?;
            let d: num_bigint::BigInt = d.trim().parse().ok()?;
            (!d.is_zero()).then(|| Q::new(n, d))
        }
        None => Some(Q::from_integer(s.parse().ok()?)),
    }
}

/// Declared names of a session: parameters with constraints, and unknown
/// functions `name(vars...)` used in ansatz generators.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParameterContext {
    params: BTreeMap<String, Vec<Constraint>>,
    funcs: BTreeMap<String, Vec<BaseVar>>,
}

impl ParameterContext {
    pub fn new() -> ParameterContext {
        ParameterContext::default()
    }

    /// Declares a parameter. Fails when the name is reserved or already declared.
    pub fn declare(&mut self, name: &str, constraints: &[Constraint]) -> Result<()> {
        check_identifier(name)?;
        if Symbol::variable_from_name(name).is_some() || is_reserved(name) {
            return Err(SymError::Parameter(name.into(), "name is reserved".into()));
        }
        if self.params.contains_key(name) || self.funcs.contains_key(name) {
            return Err(SymError::Parameter(name.into(), "declared twice".into()));
        }
        let mut cs = constraints.to_vec();
        cs.sort();
        cs.dedup();
        let has_zero = cs.contains(&Constraint::Zero);
        if has_zero && cs.iter().any(|c| !c.admits(&Q::zero())) {
            return Err(SymError::Parameter(
                name.into(),
                "inconsistent constraints (zero and nonzero)".into(),
            ));
        }
        if let Some(msg) = bounds_conflict(&cs) {
            return Err(SymError::Parameter(name.into(), msg));
        }
        self.params.insert(name.to_string(), cs);
        Ok(())
    }

    /// Declares a parameter unless it already is; constraints are merged.
    pub fn ensure(&mut self, name: &str, constraints: &[Constraint]) -> Result<()> {
        if let Some(cs) = self.params.get(name).cloned() {
            let mut all = cs;
            all.extend_from_slice(constraints);
            self.params.remove(name);
            return self.declare(name, &all);
        }
        self.declare(name, constraints)
    }

    pub fn with(mut self, name: &str, constraints: &[Constraint]) -> Result<ParameterContext> {
        self.declare(name, constraints)?;
        Ok(self)
    }

    /// Declares an unknown function of the listed base variables.
    pub fn declare_func(&mut self, name: &str, vars: &[BaseVar]) -> Result<()> {
        check_identifier(name)?;
        if self.params.contains_key(name) || is_reserved(name) {
            return Err(SymError::Parameter(name.into(), "name is reserved".into()));
        }
        self.funcs.insert(name.to_string(), vars.to_vec());
        Ok(())
    }

    pub fn is_declared(&self, name: &str) -> bool {
        self.params.contains_key(name)
    }

    pub fn constraints(&self, name: &str) -> &[Constraint] {
        self.params.get(name).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn params(&self) -> impl Iterator<Item = (&str, &[Constraint])> {
        self.params.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn func(&self, name: &str) -> Option<&[BaseVar]> {
        self.funcs.get(name).map(Vec::as_slice)
    }

    pub fn funcs(&self) -> impl Iterator<Item = (&str, &[BaseVar])> {
        self.funcs.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// Whether a rational assignment satisfies every declared constraint.
    pub fn admits(&self, name: &str, v: &Q) -> bool {
        self.constraints(name).iter().all(|c| c.admits(v))
    }

    pub fn admits_f64(&self, name: &str, v: f64) -> bool {
        self.constraints(name).iter().all(|c| c.admits_f64(v))
    }

    /// Every parameter occurring in `e` must be declared.
    pub fn check_declared(&self, e: &Expr) -> Result<()> {
        for s in e.params() {
            if let Symbol::Param(name) = s {
                if !self.params.contains_key(&**name) {
                    return Err(SymError::Undeclared {
                        name: name.to_string(),
                        pos: 0,
                    });
                }
            }
        }
        Ok(())
    }

    /// Merges another context; shared names must agree.
    pub fn merge(&mut self, other: &ParameterContext) -> Result<()> {
        for (name, cs) in &other.params {
            self.ensure(name, cs)?;
        }
        for (name, vars) in &other.funcs {
            match self.funcs.get(name) {
                Some(v) if v != vars => {
                    return Err(SymError::Parameter(
                        name.clone(),
                        "conflicting arity".into(),
                    ))
                }
                _ => {
                    self.funcs.insert(name.clone(), vars.clone());
                }
            }
        }
        Ok(())
    }
}

/// Zero test. Parameters are independent indeterminates, so a `true` answer is
/// sound for every admissible parameter value.
pub fn is_zero(e: &Expr, _ctx: &ParameterContext) -> bool {
    e.is_zero()
}

fn check_identifier(name: &str) -> Result<()> {
    let mut chars = name.chars();
    let ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
    if ok {
        Ok(())
    } else {
        Err(SymError::Parameter(name.into(), "not an identifier".into()))
    }
}

fn is_reserved(name: &str) -> bool {
    name == "e"
        || crate::kernel::Builtin::from_name(name).is_some()
        || crate::kernel::KernelRegistry::standard().is_standard_opaque(name)
}

fn bounds_conflict(cs: &[Constraint]) -> Option<String> {
    let mut lo: Option<(&Q, bool)> = None;
    let mut hi: Option<(&Q, bool)> = None;
    for c in cs {
        match c {
            Constraint::AtLeast { bound, strict } => {
                if lo.is_none_or(|(b, _)| bound > b) {
                    lo = Some((bound, *strict));
                }
            }
            Constraint::AtMost { bound, strict } if hi.is_none_or(|(b, _)| bound < b) => {
                hi = Some((bound, *strict));
            }
            _ => {}
        }
    }
    if let (Some((l, ls)), Some((h, hs))) = (lo, hi) {
        if l > h || (l == h && (ls || hs)) {
            return Some("empty range".into());
        }
        if l == h && cs.iter().any(|c| !c.admits(l)) {
            return Some("empty range".into());
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_constraints() {
        assert_eq!("!=0".parse::<Constraint>().unwrap(), Constraint::Nonzero);
        assert_eq!(
            "<= -1".parse::<Constraint>().unwrap(),
            Constraint::AtMost {
                bound: Q::from_integer((-1).into()),
                strict: false
            }
        );
        assert!("~3".parse::<Constraint>().is_err());
    }

    #[test]
    fn rejects_inconsistent() {
        let mut ctx = ParameterContext::new();
        assert!(ctx
            .declare("n", &[Constraint::Zero, Constraint::Nonzero])
            .is_err());
        assert!(ctx.declare("n", &[Constraint::Nonzero]).is_ok());
        assert!(ctx.declare("n", &[]).is_err());
        assert!(ctx.declare("t", &[]).is_err());
        assert!(ctx.declare("k", &[]).is_err());
    }

    #[test]
    fn admits_values() {
        let mut ctx = ParameterContext::new();
        ctx.declare("rho", &["<=-1".parse().unwrap()]).unwrap();
        assert!(ctx.admits("rho", &Q::from_integer((-2).into())));
        assert!(!ctx.admits("rho", &Q::from_integer(0.into())));
    }
}
