//! Canonical expressions: reduced quotients of [`Poly`]s.
//!
//! An [`Expr`] is always normalized. Numerator and denominator share no
//! polynomial factor detectable over the free polynomial ring of atoms, the
//! denominator's leading coefficient is one, and a rational constant never
//! appears in the denominator. Atoms are independent indeterminates, so an
//! expression is zero exactly when its numerator has no terms.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::atom::{Atom, FuncApp};
use crate::error::{Result, SymError};
use crate::kernel::{Kernel, KernelRegistry, Opaque, OpaqueRule};
use crate::mpoly::{self, MPoly};
use crate::poly::{Mono, Poly};
use crate::symbol::{BaseVar, Symbol};
use crate::Q;

#[derive(Clone)]
pub struct Expr(Arc<Node>);

pub(crate) struct Node {
    num: Poly,
    den: Poly,
    syms: Vec<Symbol>,
    names: Vec<Arc<str>>,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.num == other.0.num && self.0.den == other.0.den)
    }
}

impl Eq for Expr {}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.num.hash(state);
        self.0.den.hash(state);
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0
            .num
            .cmp(&other.0.num)
            .then_with(|| self.0.den.cmp(&other.0.den))
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl Expr {
    // ---- construction ---------------------------------------------------

    fn build(num: Poly, den: Poly) -> Expr {
        let mut syms: Vec<Symbol> = Vec::new();
        let mut names: Vec<Arc<str>> = Vec::new();
        for p in [&num, &den] {
            for (m, _) in p.terms() {
                for (a, _) in m.factors() {
                    match a {
                        Atom::Sym(s) => syms.push(s.clone()),
                        Atom::Kernel(k, arg) => {
                            syms.extend_from_slice(&arg.0.syms);
                            names.extend_from_slice(&arg.0.names);
                            if let Kernel::Opaque(o) = k {
                                names.push(o.name.clone());
                            }
                        }
                        Atom::Func(fa) => {
                            syms.extend(fa.vars.iter().map(|v| Symbol::Base(*v)));
                            names.push(fa.name.clone());
                        }
                    }
                }
                if let Some(l) = m.exp_part() {
                    syms.extend_from_slice(&l.0.syms);
                    names.extend_from_slice(&l.0.names);
                }
            }
        }
        syms.sort();
        syms.dedup();
        names.sort();
        names.dedup();
        Expr(Arc::new(Node {
            num,
            den,
            syms,
            names,
        }))
    }

    pub(crate) fn from_poly(p: Poly) -> Expr {
        Expr::build(p, Poly::one())
    }

    pub fn zero() -> Expr {
        Expr::from_poly(Poly::zero())
    }

    pub fn one() -> Expr {
        Expr::from_poly(Poly::one())
    }

    pub fn int(n: i64) -> Expr {
        Expr::rational(Q::from_integer(n.into()))
    }

    pub fn rational(q: Q) -> Expr {
        Expr::from_poly(Poly::constant(q))
    }

    pub fn frac(n: i64, d: i64) -> Expr {
        Expr::rational(Q::new(n.into(), d.into()))
    }

    pub fn atom(a: Atom) -> Expr {
        Expr::from_poly(Poly::atom(a))
    }

    pub fn sym(s: Symbol) -> Expr {
        Expr::atom(Atom::Sym(s))
    }

    pub fn base(v: BaseVar) -> Expr {
        Expr::sym(Symbol::Base(v))
    }

    pub fn t() -> Expr {
        Expr::base(BaseVar::T)
    }

    pub fn x() -> Expr {
        Expr::base(BaseVar::X)
    }

    pub fn y() -> Expr {
        Expr::base(BaseVar::Y)
    }

    pub fn u() -> Expr {
        Expr::base(BaseVar::U)
    }

    pub fn param(name: &str) -> Expr {
        Expr::sym(Symbol::param(name))
    }

    pub fn jet(t: u8, x: u8, y: u8) -> Expr {
        Expr::sym(Symbol::jet(t, x, y))
    }

    /// Unknown function `name(vars...)`.
    pub fn func(name: &str, vars: &[BaseVar]) -> Expr {
        Expr::atom(Atom::Func(FuncApp::new(name, vars)))
    }

    pub fn func_app(f: FuncApp) -> Expr {
        Expr::atom(Atom::Func(f))
    }

    /// Normalizes `num / den`.
    pub(crate) fn from_parts(num: Poly, den: Poly) -> Result<Expr> {
        if den.is_zero() {
            return Err(SymError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Expr::zero());
        }
        if let Some(c) = den.as_constant() {
            return Ok(Expr::from_poly(num.scale(&c.recip())));
        }
        if num == den {
            return Ok(Expr::one());
        }
        let (num, den) = cancel(num, den);
        Ok(normalize_den(num, den))
    }

    // ---- inspection -----------------------------------------------------

    pub fn numer_poly(&self) -> &Poly {
        &self.0.num
    }

    pub fn denom_poly(&self) -> &Poly {
        &self.0.den
    }

    pub fn numer(&self) -> Expr {
        Expr::from_poly(self.0.num.clone())
    }

    pub fn denom(&self) -> Expr {
        Expr::from_poly(self.0.den.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.0.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.num.is_one() && self.0.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.0.den.is_one()
    }

    pub fn as_rational(&self) -> Option<Q> {
        if self.0.den.is_one() {
            self.0.num.as_constant()
        } else {
            None
        }
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational()
            .filter(|q| q.is_integer())
            .map(|q| q.to_integer())
    }

    /// The single atom this expression consists of, if any.
    pub fn as_atom(&self) -> Option<&Atom> {
        if !self.0.den.is_one() {
            return None;
        }
        match self.0.num.terms() {
            [(m, c)] if c.is_one() && m.exp_part().is_none() => match m.factors() {
                [(a, 1)] => Some(a),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn as_symbol(&self) -> Option<&Symbol> {
        self.as_atom().and_then(Atom::sym)
    }

    /// Every symbol occurring anywhere, kernel arguments included.
    pub fn free_symbols(&self) -> &[Symbol] {
        &self.0.syms
    }

    /// Names of opaque kernels and unknown functions occurring anywhere.
    pub fn kernel_names(&self) -> &[Arc<str>] {
        &self.0.names
    }

    pub fn contains_symbol(&self, s: &Symbol) -> bool {
        self.0.syms.binary_search(s).is_ok()
    }

    pub fn contains_name(&self, name: &str) -> bool {
        self.0.names.iter().any(|n| &**n == name)
    }

    pub fn params(&self) -> impl Iterator<Item = &Symbol> {
        self.0.syms.iter().filter(|s| s.is_param())
    }

    /// True if no base variable or jet coordinate occurs.
    pub fn is_constant(&self) -> bool {
        self.0.syms.iter().all(Symbol::is_param) && !self.contains_any_func()
    }

    fn contains_any_func(&self) -> bool {
        fn poly_has(p: &Poly) -> bool {
            p.terms().iter().any(|(m, _)| {
                m.factors().iter().any(|(a, _)| match a {
                    Atom::Func(_) => true,
                    Atom::Kernel(_, arg) => arg.contains_any_func(),
                    Atom::Sym(_) => false,
                }) || m.exp_part().is_some_and(|l| l.contains_any_func())
            })
        }
        poly_has(&self.0.num) || poly_has(&self.0.den)
    }

    /// Numerator terms, each as a separate polynomial expression.
    pub fn numer_terms(&self) -> Vec<Expr> {
        self.0
            .num
            .terms()
            .iter()
            .map(|(m, c)| Expr::from_poly(Poly::from_mono(m.clone(), c.clone())))
            .collect()
    }

    /// Distinct exponents `L` of the `exp(L)` factors in numerator and denominator.
    pub fn exp_parts(&self) -> Vec<Expr> {
        let mut v = self.0.num.exp_parts();
        v.extend(self.0.den.exp_parts());
        v.sort();
        v.dedup();
        v
    }

    /// All atoms appearing as monomial factors of numerator or denominator.
    pub fn top_atoms(&self) -> Vec<Atom> {
        let mut v = self.0.num.atoms();
        v.extend(self.0.den.atoms());
        v.sort();
        v.dedup();
        v
    }

    // ---- arithmetic -----------------------------------------------------

    fn add_impl(&self, other: &Expr) -> Expr {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let (a, b) = (&*self.0, &*other.0);
        if a.den == b.den {
            let num = a.num.add(&b.num);
            if a.den.is_one() {
                return Expr::from_poly(num);
            }
            return Expr::from_parts(num, a.den.clone()).expect("nonzero denominator");
        }
        if b.den.is_one() {
            let num = a.num.add(&b.num.mul(&a.den));
            return Expr::from_parts(num, a.den.clone()).expect("nonzero denominator");
        }
        if a.den.is_one() {
            let num = b.num.add(&a.num.mul(&b.den));
            return Expr::from_parts(num, b.den.clone()).expect("nonzero denominator");
        }
        let num = a.num.mul(&b.den).add(&b.num.mul(&a.den));
        let den = a.den.mul(&b.den);
        Expr::from_parts(num, den).expect("nonzero denominator")
    }

    fn mul_impl(&self, other: &Expr) -> Expr {
        if self.is_zero() || other.is_zero() {
            return Expr::zero();
        }
        let (a, b) = (&*self.0, &*other.0);
        if let Some(c) = self.as_rational() {
            return Expr::build(b.num.scale(&c), b.den.clone());
        }
        if let Some(c) = other.as_rational() {
            return Expr::build(a.num.scale(&c), a.den.clone());
        }
        let num = a.num.mul(&b.num);
        if a.den.is_one() && b.den.is_one() {
            return Expr::from_poly(num);
        }
        let den = a.den.mul(&b.den);
        Expr::from_parts(num, den).expect("nonzero denominator")
    }

    pub fn try_recip(&self) -> Result<Expr> {
        Expr::from_parts(self.0.den.clone(), self.0.num.clone())
    }

    /// Reciprocal. Panics on zero; use [`Expr::try_recip`] when that is possible.
    pub fn recip(&self) -> Expr {
        self.try_recip().expect("reciprocal of zero")
    }

    pub fn try_div(&self, other: &Expr) -> Result<Expr> {
        Ok(self * &other.try_recip()?)
    }

    pub fn scale(&self, c: &Q) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr::build(self.0.num.scale(c), self.0.den.clone())
    }

    pub fn powi(&self, k: i64) -> Expr {
        self.try_powi(k).expect("negative power of zero")
    }

    pub fn try_powi(&self, k: i64) -> Result<Expr> {
        match k.cmp(&0) {
            Ordering::Equal => Ok(Expr::one()),
            Ordering::Less => self.try_recip().map(|r| r.powi(-k)),
            Ordering::Greater => {
                let k = u32::try_from(k)
                    .map_err(|_| SymError::Unsupported("exponent too large".into()))?;
                if self.0.den.is_one() {
                    Ok(Expr::from_poly(self.0.num.pow(k)))
                } else {
                    // powers of coprime polynomials stay coprime; leading coefficient stays 1
                    Ok(Expr::build(self.0.num.pow(k), self.0.den.pow(k)))
                }
            }
        }
    }

    /// `self^e`. Integer exponents are expanded; anything else becomes `exp(e*ln(self))`.
    pub fn pow(&self, e: &Expr) -> Result<Expr> {
        if let Some(k) = e.as_integer() {
            let k = k
                .to_i64()
                .ok_or_else(|| SymError::Unsupported("exponent too large".into()))?;
            return self.try_powi(k);
        }
        Ok((e * &self.ln()?).exp())
    }

    // ---- kernels --------------------------------------------------------

    /// `exp(self)`; integral multiples of logarithms are pulled out as powers.
    pub fn exp(&self) -> Expr {
        let (extracted, rest) = reduce_exp(self);
        let mut out = match rest {
            None => Expr::one(),
            Some(l) => Expr::from_poly(Poly::from_mono(
                Mono {
                    factors: Vec::new(),
                    exp: Some(l),
                },
                Q::one(),
            )),
        };
        for (b, k) in extracted {
            out = &out * &b.powi(k);
        }
        out
    }

    /// Natural logarithm, expanded over products, powers and exponentials.
    pub fn ln(&self) -> Result<Expr> {
        if self.is_zero() {
            return Err(SymError::LogOfZero);
        }
        Ok(ln_poly(&self.0.num) - ln_poly(&self.0.den))
    }

    pub fn arctan(&self) -> Expr {
        if self.is_zero() {
            return Expr::zero();
        }
        Expr::atom(Atom::Kernel(Kernel::Arctan, self.clone()))
    }

    pub fn sin(&self) -> Expr {
        if self.is_zero() {
            return Expr::zero();
        }
        Expr::atom(Atom::Kernel(Kernel::Sin, self.clone()))
    }

    pub fn cos(&self) -> Expr {
        if self.is_zero() {
            return Expr::one();
        }
        Expr::atom(Atom::Kernel(Kernel::Cos, self.clone()))
    }

    pub fn tan(&self) -> Expr {
        if self.is_zero() {
            return Expr::zero();
        }
        Expr::atom(Atom::Kernel(Kernel::Tan, self.clone()))
    }

    pub fn sinh(&self) -> Expr {
        (self.exp() - (-self).exp()).scale(&Q::new(1.into(), 2.into()))
    }

    pub fn cosh(&self) -> Expr {
        (self.exp() + (-self).exp()).scale(&Q::new(1.into(), 2.into()))
    }

    pub fn tanh(&self) -> Expr {
        let e2 = self.scale(&Q::from_integer(2.into())).exp();
        (&e2 - &Expr::one()) / (&e2 + &Expr::one())
    }

    /// Opaque kernel `name` applied to `arg`, with `X(Xinv(z)) = Xinv(X(z)) = z`.
    pub fn opaque(name: &str, arg: &Expr) -> Expr {
        if let Some(Atom::Kernel(Kernel::Opaque(inner), z)) = arg.as_atom() {
            if inner.order == 0 {
                let cancels = match KernelRegistry::standard().rule(name) {
                    OpaqueRule::InverseOf(base) => *inner.name == *base,
                    _ => false,
                } || *inner.name == *format!("{name}inv");
                if cancels {
                    return z.clone();
                }
            }
        }
        Expr::atom(Atom::Kernel(
            Kernel::Opaque(Opaque::new(name, 0)),
            arg.clone(),
        ))
    }

    /// The `order`-th derivative kernel of `name` applied to `arg`.
    pub fn opaque_derivative(name: &str, order: u8, arg: &Expr) -> Expr {
        if order == 0 {
            return Expr::opaque(name, arg);
        }
        Expr::atom(Atom::Kernel(
            Kernel::Opaque(Opaque::new(name, order)),
            arg.clone(),
        ))
    }

    /// Re-applies a kernel to a (possibly new) argument, running simplifications.
    pub fn apply_kernel(k: &Kernel, arg: &Expr) -> Result<Expr> {
        Ok(match k {
            Kernel::Ln => arg.ln()?,
            Kernel::Arctan => arg.arctan(),
            Kernel::Sin => arg.sin(),
            Kernel::Cos => arg.cos(),
            Kernel::Tan => arg.tan(),
            Kernel::Opaque(o) => Expr::opaque_derivative(&o.name, o.order, arg),
        })
    }

    // ---- differentiation ------------------------------------------------

    /// Partial derivative; all other symbols, including jet coordinates, are independent.
    pub fn diff(&self, v: &Symbol) -> Expr {
        if !self.contains_symbol(v) {
            return Expr::zero();
        }
        let dn = diff_poly(&self.0.num, v);
        if self.0.den.is_one() {
            return dn;
        }
        let dd = diff_poly(&self.0.den, v);
        let n = self.numer();
        let d = self.denom();
        let top = &(&dn * &d) - &(&n * &dd);
        if top.is_zero() {
            return Expr::zero();
        }
        &top * &d.powi(2).recip()
    }

    pub fn diff_n(&self, v: &Symbol, n: usize) -> Expr {
        let mut e = self.clone();
        for _ in 0..n {
            e = e.diff(v);
        }
        e
    }
}

// ---- exponential and logarithm helpers ---------------------------------

/// Splits `L` into integer multiples of logarithms and the remaining exponent:
/// `exp(L) = Π b^k · exp(rest)`. Every pure `c*ln(b)` term with rational `c` keeps
/// only `c - floor(c)`.
pub(crate) fn reduce_exp(l: &Expr) -> (Vec<(Expr, i64)>, Option<Expr>) {
    if l.is_zero() {
        return (Vec::new(), None);
    }
    if !l.0.den.is_one() {
        return (Vec::new(), Some(l.clone()));
    }
    let mut extracted = Vec::new();
    let mut changed = false;
    let mut rest: Vec<(Mono, Q)> = Vec::with_capacity(l.0.num.terms().len());
    for (m, c) in l.0.num.terms() {
        if let (None, [(Atom::Kernel(Kernel::Ln, b), 1)]) = (m.exp_part(), m.factors()) {
            let k = c.floor();
            if !k.is_zero() {
                changed = true;
                extracted.push((b.clone(), k.to_integer().to_i64().expect("small exponent")));
                let r = c - &k;
                if !r.is_zero() {
                    rest.push((m.clone(), r));
                }
                continue;
            }
        }
        rest.push((m.clone(), c.clone()));
    }
    if !changed {
        return (extracted, Some(l.clone()));
    }
    let rest = Poly { terms: rest };
    if rest.is_zero() {
        (extracted, None)
    } else {
        (extracted, Some(Expr::from_poly(rest)))
    }
}

fn ln_integer(n: &BigInt) -> Expr {
    if n.is_one() {
        Expr::zero()
    } else {
        Expr::atom(Atom::Kernel(
            Kernel::Ln,
            Expr::rational(Q::from_integer(n.clone())),
        ))
    }
}

fn ln_positive_rational(c: &Q) -> Expr {
    ln_integer(c.numer()) - ln_integer(c.denom())
}

fn ln_atom(a: &Atom) -> Expr {
    Expr::atom(Atom::Kernel(Kernel::Ln, Expr::atom(a.clone())))
}

fn ln_poly(p: &Poly) -> Expr {
    if p.is_one() {
        return Expr::zero();
    }
    if let [(m, c)] = p.terms() {
        if c.is_negative() {
            return Expr::atom(Atom::Kernel(Kernel::Ln, Expr::from_poly(p.clone())));
        }
        let mut out = ln_positive_rational(c);
        for (a, k) in m.factors() {
            out = &out + &ln_atom(a).scale(&Q::from_integer((*k).into()));
        }
        if let Some(l) = m.exp_part() {
            out = &out + l;
        }
        return out;
    }
    // rational content (positive), common atom powers, and a shared exp part
    let mut num_gcd = BigInt::zero();
    let mut den_lcm = BigInt::one();
    for (_, c) in p.terms() {
        num_gcd = num_gcd.gcd(c.numer());
        den_lcm = den_lcm.lcm(c.denom());
    }
    let content = Q::new(num_gcd, den_lcm);
    let first = &p.terms()[0].0;
    let mut common: Vec<(Atom, u32)> = first.factors().to_vec();
    let mut shared_exp = first.exp_part().cloned();
    for (m, _) in &p.terms()[1..] {
        common.retain_mut(|(a, k)| {
            let j = m.power_of(a);
            *k = (*k).min(j);
            *k > 0
        });
        if shared_exp.as_ref() != m.exp_part() {
            shared_exp = None;
        }
    }
    let strip = Mono {
        factors: common.clone(),
        exp: shared_exp.clone(),
    };
    let inv = content.recip();
    let rest = Poly {
        terms: p
            .terms()
            .iter()
            .map(|(m, c)| {
                (
                    m.div_atoms(&strip).expect("common factor divides"),
                    c * &inv,
                )
            })
            .collect(),
    };
    let rest = Poly::from_map(rest.terms.into_iter().collect());
    let mut out = ln_positive_rational(&content);
    for (a, k) in &common {
        out = &out + &ln_atom(a).scale(&Q::from_integer((*k).into()));
    }
    if let Some(l) = shared_exp {
        out = &out + &l;
    }
    &out + &Expr::atom(Atom::Kernel(Kernel::Ln, Expr::from_poly(rest)))
}

// ---- differentiation helpers -------------------------------------------

fn diff_atom(a: &Atom, v: &Symbol) -> Expr {
    match a {
        Atom::Sym(s) => {
            if s == v {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Atom::Kernel(k, arg) => {
            let inner = arg.diff(v);
            if inner.is_zero() {
                return Expr::zero();
            }
            &KernelRegistry::standard().derivative(k, arg) * &inner
        }
        Atom::Func(f) => match v {
            Symbol::Base(b) => f
                .differentiated(*b)
                .map(Expr::func_app)
                .unwrap_or_else(Expr::zero),
            _ => Expr::zero(),
        },
    }
}

fn diff_poly(p: &Poly, v: &Symbol) -> Expr {
    let mut out = Expr::zero();
    for a in p.atoms() {
        if !a.involves(v) {
            continue;
        }
        let da = diff_atom(&a, v);
        if da.is_zero() {
            continue;
        }
        out = &out + &(&Expr::from_poly(p.partial_atom(&a)) * &da);
    }
    let mut by_exp: BTreeMap<Expr, Vec<(Mono, Q)>> = BTreeMap::new();
    for (m, c) in p.terms() {
        if let Some(l) = m.exp_part() {
            if l.contains_symbol(v) {
                by_exp
                    .entry(l.clone())
                    .or_default()
                    .push((m.clone(), c.clone()));
            }
        }
    }
    for (l, terms) in by_exp {
        let dl = l.diff(v);
        let part = Poly::from_map(terms.into_iter().collect());
        out = &out + &(&Expr::from_poly(part) * &dl);
    }
    out
}

// ---- normalization: cancellation and denominator scaling ---------------

/// Makes the denominator's leading coefficient one and, when that keeps both
/// sides polynomial, removes the exponential part of its leading monomial.
fn normalize_den(num: Poly, den: Poly) -> Expr {
    // Exponential factors shared by numerator and denominator are only defined
    // up to a common unit exp(L). Among the shifts that clear the exponential
    // of one denominator term, pick the one giving the least denominator, so
    // that equal fractions get equal representations.
    let mut shifts: Vec<Option<Expr>> = den
        .terms()
        .iter()
        .map(|(m, _)| m.exp_part().cloned())
        .collect();
    shifts.sort();
    shifts.dedup();
    let mut best: Option<(Poly, Poly)> = None;
    for shift in shifts {
        let (n2, d2) = match &shift {
            None => (num.clone(), den.clone()),
            Some(l) => {
                let unit = (-l).exp();
                if !unit.is_polynomial() {
                    continue;
                }
                let u = unit.numer_poly();
                (num.mul(u), den.mul(u))
            }
        };
        let (_, lc) = d2.leading().cloned().expect("nonzero denominator");
        let inv = lc.recip();
        let (n2, d2) = (n2.scale(&inv), d2.scale(&inv));
        let better = match &best {
            None => true,
            Some((bn, bd)) => (&d2, &n2) < (bd, bn),
        };
        if better {
            best = Some((n2, d2));
        }
    }
    let (num, den) = best.unwrap_or_else(|| {
        let (_, lc) = den.leading().cloned().expect("nonzero denominator");
        let inv = lc.recip();
        (num.scale(&inv), den.scale(&inv))
    });
    if let Some(c) = den.as_constant() {
        return Expr::from_poly(num.scale(&c.recip()));
    }
    Expr::build(num, den)
}

/// An indeterminate of the free polynomial ring used for gcd computation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum FreeVar {
    Atom(Atom),
    /// `exp(step * direction)`; the step is stored alongside.
    Exp(Expr),
}

struct FreeRing {
    index: BTreeMap<FreeVar, usize>,
    /// per exp-direction variable: (direction, step)
    dirs: BTreeMap<usize, (Expr, Q)>,
    n: usize,
}

fn rational_gcd(a: &Q, b: &Q) -> Q {
    Q::new(a.numer().gcd(b.numer()), a.denom().lcm(b.denom()))
}

/// `L = q * direction` with the direction's leading coefficient equal to one.
fn exp_direction(l: &Expr) -> (Q, Expr) {
    let q =
        l.0.num
            .leading()
            .map(|(_, c)| c.clone())
            .expect("nonzero exponent");
    (q.clone(), l.scale(&q.recip()))
}

impl FreeRing {
    fn new(polys: &[&Poly]) -> FreeRing {
        let mut index = BTreeMap::new();
        let mut steps: BTreeMap<Expr, Q> = BTreeMap::new();
        for p in polys {
            for a in p.atoms() {
                index.entry(FreeVar::Atom(a)).or_insert(0);
            }
            for l in p.exp_parts() {
                let (q, dir) = exp_direction(&l);
                let q = q.abs();
                steps
                    .entry(dir)
                    .and_modify(|s| *s = rational_gcd(s, &q))
                    .or_insert(q);
            }
        }
        for dir in steps.keys() {
            index.insert(FreeVar::Exp(dir.clone()), 0);
        }
        let mut dirs = BTreeMap::new();
        for (i, (k, slot)) in index.iter_mut().enumerate() {
            *slot = i;
            if let FreeVar::Exp(dir) = k {
                dirs.insert(i, (dir.clone(), steps[dir].clone()));
            }
        }
        let n = index.len();
        FreeRing { index, dirs, n }
    }

    /// Converts; returns the polynomial and the per-direction shifts (≤ 0) that
    /// were applied to make exponents nonnegative.
    fn to_mpoly(&self, p: &Poly) -> (MPoly, BTreeMap<usize, i64>) {
        let mut raw: Vec<(Vec<i64>, Q)> = Vec::with_capacity(p.terms().len());
        for (m, c) in p.terms() {
            let mut e = vec![0i64; self.n];
            for (a, k) in m.factors() {
                e[self.index[&FreeVar::Atom(a.clone())]] = i64::from(*k);
            }
            if let Some(l) = m.exp_part() {
                let (q, dir) = exp_direction(l);
                let i = self.index[&FreeVar::Exp(dir)];
                let step = &self.dirs[&i].1;
                let k = q / step;
                debug_assert!(k.is_integer());
                e[i] = k.to_integer().to_i64().expect("small exponent");
            }
            raw.push((e, c.clone()));
        }
        let mut shifts = BTreeMap::new();
        for &i in self.dirs.keys() {
            let min = raw.iter().map(|(e, _)| e[i]).min().unwrap_or(0).min(0);
            if min < 0 {
                shifts.insert(i, min);
            }
        }
        let terms = raw.into_iter().map(|(mut e, c)| {
            for (&i, &s) in &shifts {
                e[i] -= s;
            }
            (e.into_iter().map(|x| x as u32).collect::<Vec<u32>>(), c)
        });
        (MPoly::from_terms(self.n, terms), shifts)
    }

    fn lift_mpoly(&self, p: &MPoly, shifts: &BTreeMap<usize, i64>) -> Option<Poly> {
        let atoms: Vec<Option<Atom>> = {
            let mut v = vec![None; self.n];
            for (k, &i) in &self.index {
                if let FreeVar::Atom(a) = k {
                    v[i] = Some(a.clone());
                }
            }
            v
        };
        let mut out = Poly::zero();
        let mut exp_cache: BTreeMap<Vec<i64>, Option<Poly>> = BTreeMap::new();
        let mut acc: BTreeMap<Mono, Q> = BTreeMap::new();
        for (e, c) in p.terms() {
            let mut factors = Vec::new();
            for (i, k) in e.iter().enumerate() {
                if *k > 0 {
                    if let Some(a) = &atoms[i] {
                        factors.push((a.clone(), *k));
                    }
                }
            }
            factors.sort_by(|a, b| a.0.cmp(&b.0));
            let key: Vec<i64> = self
                .dirs
                .keys()
                .map(|&i| i64::from(e[i]) + shifts.get(&i).copied().unwrap_or(0))
                .collect();
            let base = Mono { factors, exp: None };
            if key.iter().all(|&k| k == 0) {
                *acc.entry(base).or_insert_with(Q::zero) += c;
                continue;
            }
            let exp_poly = exp_cache
                .entry(key.clone())
                .or_insert_with(|| {
                    let mut l = Expr::zero();
                    for ((_, (dir, step)), k) in self.dirs.iter().zip(&key) {
                        if *k != 0 {
                            l = &l + &dir.scale(&(step * Q::from_integer((*k).into())));
                        }
                    }
                    let e = l.exp();
                    e.is_polynomial().then(|| e.numer_poly().clone())
                })
                .clone()?;
            out = out.add(&exp_poly.mul_mono(&base, c));
        }
        Some(out.add(&Poly::from_map(acc)))
    }
}

/// Removes the gcd of numerator and denominator. Falls back to the inputs when the
/// free-ring quotient cannot be mapped back to polynomials.
fn cancel(num: Poly, den: Poly) -> (Poly, Poly) {
    // cheap path: monomial denominator without exp part
    if den.is_monomial() && den.terms()[0].0.exp_part().is_none() {
        let (dm, dc) = den.terms()[0].clone();
        let mut common: Vec<(Atom, u32)> = dm.factors().to_vec();
        for (m, _) in num.terms() {
            common.retain_mut(|(a, k)| {
                *k = (*k).min(m.power_of(a));
                *k > 0
            });
            if common.is_empty() {
                break;
            }
        }
        if common.is_empty() {
            return (num, den);
        }
        let strip = Mono {
            factors: common,
            exp: None,
        };
        let n2 = Poly {
            terms: num
                .terms()
                .iter()
                .map(|(m, c)| (m.div_atoms(&strip).expect("divides"), c.clone()))
                .collect(),
        };
        let n2 = Poly::from_map(n2.terms.into_iter().collect());
        let d2 = Poly::from_mono(dm.div_atoms(&strip).expect("divides"), dc);
        return (n2, d2);
    }
    let ring = FreeRing::new(&[&num, &den]);
    let (a, sa) = ring.to_mpoly(&num);
    let (b, sb) = ring.to_mpoly(&den);
    if mpoly::size(&a) > 4000 || mpoly::size(&b) > 4000 {
        return (num, den);
    }
    let g = mpoly::gcd(&a, &b);
    if g.is_constant() {
        if sa.is_empty() && sb.is_empty() {
            return (num, den);
        }
        // shifts alone may still simplify exponential units
        return match (ring.lift_mpoly(&a, &sa), ring.lift_mpoly(&b, &sb)) {
            (Some(n), Some(d)) => (n, d),
            _ => (num, den),
        };
    }
    let qa = a.div_exact(&g).expect("gcd divides");
    let qb = b.div_exact(&g).expect("gcd divides");
    match (ring.lift_mpoly(&qa, &sa), ring.lift_mpoly(&qb, &sb)) {
        (Some(n), Some(d)) if !d.is_zero() => (n, d),
        _ => (num, den),
    }
}

// ---- operator impls -----------------------------------------------------

macro_rules! binop {
    ($tr:ident, $m:ident, $imp:expr) => {
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                $imp(self, rhs)
            }
        }
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                $imp(&self, &rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                $imp(&self, rhs)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                $imp(self, &rhs)
            }
        }
    };
}

binop!(Add, add, |a: &Expr, b: &Expr| a.add_impl(b));
binop!(Sub, sub, |a: &Expr, b: &Expr| a.add_impl(&-b));
binop!(Mul, mul, |a: &Expr, b: &Expr| a.mul_impl(b));
binop!(Div, div, |a: &Expr, b: &Expr| a
    .try_div(b)
    .expect("division by zero expression"));

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::build(self.0.num.neg(), self.0.den.clone())
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<Q> for Expr {
    fn from(q: Q) -> Expr {
        Expr::rational(q)
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        iter.fold(Expr::zero(), |a, b| a + b)
    }
}

impl std::iter::Product for Expr {
    fn product<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        iter.fold(Expr::one(), |a, b| a * b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t() -> Expr {
        Expr::t()
    }

    #[test]
    fn cancels_common_factor() {
        let x = Expr::param("X");
        let s = &t().powi(2) + &Expr::one();
        let e = &(&s * &x) / &s.powi(2) - &x / &s;
        assert!(e.is_zero());
        assert!((&t() * &t() - t().powi(2)).is_zero());
    }

    #[test]
    fn canonical_sum_order() {
        assert_eq!(&Expr::x() + &t(), &t() + &Expr::x());
    }

    #[test]
    fn exp_and_ln_interact() {
        let rho = Expr::param("rho");
        let p = t().pow(&rho).unwrap();
        assert_eq!(p.ln().unwrap(), &rho * &t().ln().unwrap());
        assert_eq!(t().ln().unwrap().exp(), t());
        // t^rho * t = t^(rho+1)
        let q = t().pow(&(&rho + &Expr::one())).unwrap();
        assert_eq!(&p * &t(), q);
        // t^rho * t^(-rho) = 1
        let r = t().pow(&-&rho).unwrap();
        assert!((&p * &r - Expr::one()).is_zero());
        // t^(1/2) * t^(1/2) = t
        let h = t().pow(&Expr::frac(1, 2)).unwrap();
        assert_eq!(&h * &h, t());
    }

    #[test]
    fn cancels_exponential_polynomials() {
        let nu = Expr::param("nu");
        let w = t().pow(&nu.scale(&Q::from_integer(2.into()))).unwrap();
        let s = &w + &Expr::one();
        let e = &s.powi(2) / &(&s * &t());
        assert_eq!(e, &s / &t());
        // exp(t)/exp(2t)
        let a = t().exp();
        let b = t().scale(&Q::from_integer(2.into())).exp();
        assert_eq!(&a / &b, (-t()).exp());
    }

    #[test]
    fn derivatives() {
        let e = &t().powi(2) + &Expr::one();
        assert_eq!(
            e.diff(&Symbol::Base(BaseVar::T)),
            t().scale(&Q::from_integer(2.into()))
        );
        let k = Expr::opaque("k", &Expr::u());
        assert_eq!(
            k.diff(&Symbol::Base(BaseVar::U)),
            Expr::opaque_derivative("k", 1, &Expr::u())
        );
        let g = Expr::opaque("G", &t());
        assert_eq!(g.diff(&Symbol::Base(BaseVar::T)), Expr::opaque("g", &t()));
    }

    #[test]
    fn hyperbolic_rewrites() {
        let z = Expr::param("z");
        let th = z.tanh();
        let ch = z.cosh();
        let sh = z.sinh();
        assert!((&th - &(&sh / &ch)).is_zero());
        assert!((&ch.powi(2) - &sh.powi(2) - Expr::one()).is_zero());
    }

    #[test]
    fn inverse_kernels_cancel() {
        let inner = Expr::opaque("G", &t());
        assert_eq!(Expr::opaque("Ginv", &inner), t());
        let inner = Expr::opaque("Tinv", &t());
        assert_eq!(Expr::opaque("T", &inner), t());
    }
}
