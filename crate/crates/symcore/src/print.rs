//! Deterministic printer emitting the input grammar.

use std::fmt::{self, Write};

use num_traits::{One, Signed};

use crate::atom::{Atom, FuncApp};
use crate::expr::Expr;
use crate::kernel::Kernel;
use crate::poly::{Mono, Poly};
use crate::Q;

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Sym(s) => write!(f, "{s}"),
            Atom::Kernel(k, arg) => write!(f, "{k}({})", render(arg)),
            Atom::Func(fa) => write_func(f, fa),
        }
    }
}

fn write_func(f: &mut impl Write, fa: &FuncApp) -> fmt::Result {
    write!(f, "{}(", fa.display_name())?;
    for (i, v) in fa.vars.iter().enumerate() {
        if i > 0 {
            f.write_char(',')?;
        }
        f.write_str(v.name())?;
    }
    f.write_char(')')
}

/// Renders an expression.
pub fn render(e: &Expr) -> String {
    let num = render_poly(e.numer_poly());
    if e.is_polynomial() {
        return num;
    }
    let den = e.denom_poly();
    let num = if needs_parens_as_factor(e.numer_poly()) {
        format!("({num})")
    } else {
        num
    };
    let den_s = render_poly(den);
    if is_simple_factor(den) {
        format!("{num}/{den_s}")
    } else {
        format!("{num}/({den_s})")
    }
}

/// A product that needs no parentheses after `/` (a single atom power with unit coefficient).
fn is_simple_factor(p: &Poly) -> bool {
    match p.terms() {
        [(m, c)] => c.is_one() && m.exp_part().is_none() && m.factors().len() == 1,
        _ => false,
    }
}

fn needs_parens_as_factor(p: &Poly) -> bool {
    match p.terms() {
        [(_, c)] => c.is_negative(),
        _ => true,
    }
}

fn render_poly(p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    // highest term first
    for (i, (m, c)) in p.terms().iter().rev().enumerate() {
        let neg = c.is_negative();
        let body = render_term(m, &c.abs());
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    out
}

fn render_rational(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// `c*m` with `c > 0`.
fn render_term(m: &Mono, c: &Q) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (a, k) in m.factors() {
        let s = a.to_string();
        if *k == 1 {
            parts.push(s);
        } else {
            parts.push(format!("{s}^{k}"));
        }
    }
    if let Some(l) = m.exp_part() {
        parts.extend(render_exp(l));
    }
    if parts.is_empty() {
        return render_rational(c);
    }
    let body = parts.join("*");
    if c.is_one() {
        body
    } else if c.is_integer() {
        format!("{}*{body}", c.numer())
    } else if c.numer().is_one() {
        format!("{body}/{}", c.denom())
    } else {
        format!("{}*{body}/{}", c.numer(), c.denom())
    }
}

/// Splits `exp(L)` into `b^(e)` groups, one per logarithm `ln(b)` whose
/// coefficient in `L` is free of other logarithms, and `exp(rest)`.
fn render_exp(l: &Expr) -> Vec<String> {
    if !l.is_polynomial() {
        return vec![format!("exp({})", render(l))];
    }
    use std::collections::BTreeMap;
    let mut groups: BTreeMap<Expr, Vec<(Mono, Q)>> = BTreeMap::new();
    let mut rest: Vec<(Mono, Q)> = Vec::new();
    'terms: for (m, c) in l.numer_poly().terms() {
        let logs: Vec<&(Atom, u32)> = m
            .factors()
            .iter()
            .filter(|(a, _)| matches!(a, Atom::Kernel(Kernel::Ln, _)))
            .collect();
        if m.exp_part().is_none() {
            if let [(Atom::Kernel(Kernel::Ln, b), 1)] = logs.as_slice() {
                let coeff = Mono {
                    factors: m
                        .factors()
                        .iter()
                        .filter(|(a, _)| !matches!(a, Atom::Kernel(Kernel::Ln, _)))
                        .cloned()
                        .collect(),
                    exp: None,
                };
                groups
                    .entry(b.clone())
                    .or_default()
                    .push((coeff, c.clone()));
                continue 'terms;
            }
        }
        rest.push((m.clone(), c.clone()));
    }
    let mut out = Vec::new();
    for (b, terms) in groups {
        let e = Expr::from_poly(Poly::from_map(terms.into_iter().collect()));
        let base = render(&b);
        let base = if b.as_atom().is_some()
            || (b
                .as_rational()
                .is_some_and(|q| q.is_integer() && !q.is_negative()))
        {
            base
        } else {
            format!("({base})")
        };
        out.push(format!("{base}^({})", render(&e)));
    }
    if !rest.is_empty() {
        let r = Expr::from_poly(Poly::from_map(rest.into_iter().collect()));
        if !r.is_zero() {
            out.push(format!("exp({})", render(&r)));
        }
    }
    out
}
