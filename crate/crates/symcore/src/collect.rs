//! Splitting an expression into coefficients of monomials in chosen symbols.

use std::collections::BTreeMap;
use std::fmt;

use crate::atom::Atom;
use crate::error::{Result, SymError};
use crate::expr::Expr;
use crate::poly::{Mono, Poly};
use crate::symbol::Symbol;
use crate::Q;

/// A power product of the collected symbols, sorted by symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SymMonomial(pub Vec<(Symbol, u32)>);

impl SymMonomial {
    pub fn one() -> SymMonomial {
        SymMonomial(Vec::new())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, k)| k).sum()
    }

    pub fn to_expr(&self) -> Expr {
        self.0
            .iter()
            .map(|(s, k)| Expr::sym(s.clone()).powi(i64::from(*k)))
            .product()
    }
}

impl fmt::Display for SymMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, (s, k)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            if *k == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{k}")?;
            }
        }
        Ok(())
    }
}

/// Coefficients of `e` as a polynomial in `atoms`. Every coefficient is free of
/// the listed symbols and `Σ monomial·coefficient = e`.
pub fn collect(e: &Expr, atoms: &[Symbol]) -> Result<BTreeMap<SymMonomial, Expr>> {
    let listed = |s: &Symbol| atoms.contains(s);
    let not_poly = |s: &Symbol, detail: &str| SymError::NotPolynomial {
        atom: s.to_string(),
        detail: detail.to_string(),
    };
    for s in atoms {
        if e.denom().contains_symbol(s) {
            return Err(not_poly(s, "occurs in a denominator"));
        }
    }
    let mut parts: BTreeMap<SymMonomial, BTreeMap<Mono, Q>> = BTreeMap::new();
    for (m, c) in e.numer_poly().terms() {
        let mut key = Vec::new();
        let mut rest = Vec::new();
        for (a, k) in m.factors() {
            match a {
                Atom::Sym(s) if listed(s) => key.push((s.clone(), *k)),
                other => {
                    if let Some(s) = atoms.iter().find(|s| other.involves(s)) {
                        return Err(not_poly(s, &format!("occurs inside `{other}`")));
                    }
                    rest.push((a.clone(), *k));
                }
            }
        }
        if let Some(l) = m.exp_part() {
            if let Some(s) = atoms.iter().find(|s| l.contains_symbol(s)) {
                return Err(not_poly(s, "occurs in an exponent"));
            }
        }
        key.sort();
        let rest = Mono {
            factors: rest,
            exp: m.exp_part().cloned(),
        };
        *parts
            .entry(SymMonomial(key))
            .or_default()
            .entry(rest)
            .or_default() += c;
    }
    let den = e.denom_poly().clone();
    let mut out = BTreeMap::new();
    for (k, terms) in parts {
        let p = Poly::from_map(terms);
        if p.is_zero() {
            continue;
        }
        out.insert(k, Expr::from_parts(p, den.clone())?);
    }
    Ok(out)
}

fn atom_is_constant(a: &Atom) -> bool {
    match a {
        Atom::Sym(s) => s.is_param(),
        Atom::Kernel(_, arg) => arg.is_constant(),
        Atom::Func(_) => false,
    }
}

fn mono_expr(factors: Vec<(Atom, u32)>, exp: Option<Expr>) -> Expr {
    Expr::from_poly(Poly::from_mono(
        Mono { factors, exp },
        Q::from_integer(1.into()),
    ))
}

/// Splits `exp(L)` into a constant factor and a factor with no constant terms
/// in its exponent. `L` with a non-constant denominator is not split.
fn split_exp(l: &Expr) -> (Expr, Expr) {
    if !l.denom().is_constant() {
        return (Expr::one(), l.exp());
    }
    let den = l.denom();
    let (mut lc, mut ln) = (Expr::zero(), Expr::zero());
    for (m, c) in l.numer_poly().terms() {
        let term = Expr::from_poly(Poly::from_mono(m.clone(), c.clone()));
        let constant = m.factors().iter().all(|(a, _)| atom_is_constant(a))
            && m.exp_part().is_none_or(Expr::is_constant);
        if constant {
            lc = &lc + &term;
        } else {
            ln = &ln + &term;
        }
    }
    ((&lc / &den).exp(), (&ln / &den).exp())
}

/// Coefficients of `e` over the field of constants (rationals and parameters).
///
/// Keys are distinct products of non-constant atoms and exponentials with
/// non-constant exponents, so they are linearly independent over constants and
/// `e = Σ key·coefficient`. The denominator of `e` must be constant.
pub fn split_over_constants(e: &Expr) -> Result<BTreeMap<Expr, Expr>> {
    let den = e.denom();
    if !den.is_constant() {
        return Err(SymError::Unsupported(format!(
            "cannot split over constants: denominator `{den}` is not constant"
        )));
    }
    let mut out: BTreeMap<Expr, Expr> = BTreeMap::new();
    for (m, c) in e.numer_poly().terms() {
        let (mut key, mut coeff) = (Vec::new(), Vec::new());
        for (a, k) in m.factors() {
            if atom_is_constant(a) {
                coeff.push((a.clone(), *k));
            } else {
                key.push((a.clone(), *k));
            }
        }
        let mut cf = Expr::rational(c.clone()) * mono_expr(coeff, None);
        let mut key = mono_expr(key, None);
        if let Some(l) = m.exp_part() {
            let (ec, en) = split_exp(l);
            cf = &cf * &ec;
            key = &key * &en;
        }
        let slot = out.entry(key).or_insert_with(Expr::zero);
        *slot = &*slot + &cf;
    }
    out.retain(|_, v| !v.is_zero());
    for v in out.values_mut() {
        *v = &*v / &den;
    }
    Ok(out)
}

/// The numerator monomials of `e` with rational coefficients. The denominator of
/// `e` must be a rational number.
pub fn rational_terms(e: &Expr) -> Result<Vec<(Expr, Q)>> {
    let Some(d) = e.denom().as_rational() else {
        return Err(SymError::Unsupported(format!(
            "denominator `{}` is not a rational number",
            e.denom()
        )));
    };
    Ok(e.numer_poly()
        .terms()
        .iter()
        .map(|(m, c)| {
            (
                mono_expr(m.factors().to_vec(), m.exp_part().cloned()),
                c / &d,
            )
        })
        .collect())
}

/// Inverse of [`collect`].
pub fn reconstruct(parts: &BTreeMap<SymMonomial, Expr>) -> Expr {
    parts.iter().map(|(m, c)| &m.to_expr() * c).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_by_jet() {
        let ux = Symbol::jet(0, 1, 0);
        let a = Expr::param("a");
        let b = Expr::param("b");
        let e = &(&a * &Expr::sym(ux.clone()).powi(2)) + &(&b * &Expr::sym(ux.clone()));
        let parts = collect(&e, std::slice::from_ref(&ux)).unwrap();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[&SymMonomial(vec![(ux.clone(), 2)])], a);
        assert_eq!(reconstruct(&parts), e);
        let parts = collect(&Expr::t(), std::slice::from_ref(&ux)).unwrap();
        assert_eq!(parts[&SymMonomial::one()], Expr::t());
    }

    #[test]
    fn splits_over_constants() {
        let a = Expr::param("a");
        let e = &(&a * &Expr::t().exp()) + &(&(&a + &Expr::one()) * &(&Expr::t() + &a).exp());
        let parts = split_over_constants(&e).unwrap();
        assert_eq!(parts.len(), 1);
        let c = &parts[&Expr::t().exp()];
        assert_eq!(c, &(&a + &(&(&a + &Expr::one()) * &a.exp())));
        assert!(split_over_constants(&Expr::t().recip()).is_err());
        let terms = rational_terms(&(&Expr::t() * &Expr::frac(1, 2))).unwrap();
        assert_eq!(terms, vec![(Expr::t(), Q::new(1.into(), 2.into()))]);
    }

    #[test]
    fn rejects_non_polynomial() {
        let u = Symbol::Base(crate::symbol::BaseVar::U);
        let e = Expr::opaque("k", &Expr::u());
        assert!(collect(&e, std::slice::from_ref(&u)).is_err());
        assert!(collect(&Expr::u().recip(), &[u]).is_err());
    }
}
