//! Sparse polynomials over Q whose indeterminates are [`Atom`]s, with at most
//! one exponential factor `exp(L)` per monomial.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::atom::Atom;
use crate::expr::{reduce_exp, Expr};
use crate::Q;

/// `Π atom^k · exp(L)`; factors sorted by atom, exponents positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Mono {
    pub(crate) factors: Vec<(Atom, u32)>,
    pub(crate) exp: Option<Expr>,
}

impl Mono {
    pub fn one() -> Mono {
        Mono::default()
    }

    pub fn atom(a: Atom) -> Mono {
        Mono {
            factors: vec![(a, 1)],
            exp: None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty() && self.exp.is_none()
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|(_, k)| *k).sum::<u32>() + u32::from(self.exp.is_some())
    }

    pub fn factors(&self) -> &[(Atom, u32)] {
        &self.factors
    }

    pub fn exp_part(&self) -> Option<&Expr> {
        self.exp.as_ref()
    }

    pub fn power_of(&self, a: &Atom) -> u32 {
        self.factors
            .binary_search_by(|(b, _)| b.cmp(a))
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    /// Product of the atom parts only; exponential parts must be merged by the caller.
    fn mul_factors(&self, other: &Mono) -> Vec<(Atom, u32)> {
        let (a, b) = (&self.factors, &other.factors);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        out
    }

    /// `self / other` when `other`'s atom part divides `self`'s and the exp parts agree
    /// (or `other` has none and `self`'s is kept).
    pub(crate) fn div_atoms(&self, other: &Mono) -> Option<Mono> {
        let mut out = Vec::with_capacity(self.factors.len());
        let mut j = 0;
        for (a, k) in &self.factors {
            if j < other.factors.len() && other.factors[j].0 == *a {
                let kb = other.factors[j].1;
                if kb > *k {
                    return None;
                }
                if kb < *k {
                    out.push((a.clone(), k - kb));
                }
                j += 1;
            } else if j < other.factors.len() && other.factors[j].0 < *a {
                return None;
            } else {
                out.push((a.clone(), *k));
            }
        }
        if j < other.factors.len() {
            return None;
        }
        let exp = match (&self.exp, &other.exp) {
            (e, None) => e.clone(),
            (Some(a), Some(b)) if a == b => None,
            _ => return None,
        };
        Some(Mono { factors: out, exp })
    }

    /// Lowers the power of `a` by one; returns the old power.
    pub(crate) fn lower(&self, a: &Atom) -> Option<(u32, Mono)> {
        let i = self.factors.binary_search_by(|(b, _)| b.cmp(a)).ok()?;
        let k = self.factors[i].1;
        let mut m = self.clone();
        if k == 1 {
            m.factors.remove(i);
        } else {
            m.factors[i].1 -= 1;
        }
        Some((k, m))
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.factors.cmp(&self.factors))
            .then_with(|| self.exp.cmp(&other.exp))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Terms sorted ascending by monomial; no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Poly {
    pub(crate) terms: Vec<(Mono, Q)>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly::constant(Q::one())
    }

    pub fn constant(c: Q) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly {
                terms: vec![(Mono::one(), c)],
            }
        }
    }

    pub fn from_mono(m: Mono, c: Q) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly {
                terms: vec![(m, c)],
            }
        }
    }

    pub fn atom(a: Atom) -> Poly {
        Poly::from_mono(Mono::atom(a), Q::one())
    }

    pub(crate) fn from_map(map: BTreeMap<Mono, Q>) -> Poly {
        Poly {
            terms: map.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn terms(&self) -> &[(Mono, Q)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.as_slice() {
            [] => Some(Q::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn leading(&self) -> Option<&(Mono, Q)> {
        self.terms.last()
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), -k)).collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.combine(other, true)
    }

    fn combine(&self, other: &Poly, negate: bool) -> Poly {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        let sgn = |c: &Q| if negate { -c } else { c.clone() };
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((b[j].0.clone(), sgn(&b[j].1)));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate {
                        &a[i].1 - &b[j].1
                    } else {
                        &a[i].1 + &b[j].1
                    };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|(m, c)| (m.clone(), sgn(c))));
        Poly { terms: out }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        let mut acc: BTreeMap<Mono, Q> = BTreeMap::new();
        let mut extra = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let c = ca * cb;
                match mono_mul(ma, mb) {
                    MonoProduct::Mono(m) => {
                        let e = acc.entry(m).or_insert_with(Q::zero);
                        *e += c;
                    }
                    MonoProduct::Poly(p) => extra = extra.add(&p.scale(&c)),
                }
            }
        }
        let p = Poly::from_map(acc);
        if extra.is_zero() {
            p
        } else {
            p.add(&extra)
        }
    }

    pub fn mul_mono(&self, m: &Mono, c: &Q) -> Poly {
        self.mul(&Poly::from_mono(m.clone(), c.clone()))
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Formal partial derivative with respect to an atom (exp parts untouched).
    pub(crate) fn partial_atom(&self, a: &Atom) -> Poly {
        let mut acc: BTreeMap<Mono, Q> = BTreeMap::new();
        for (m, c) in &self.terms {
            if let Some((k, lowered)) = m.lower(a) {
                *acc.entry(lowered).or_insert_with(Q::zero) += c * Q::from_integer(k.into());
            }
        }
        Poly::from_map(acc)
    }

    /// All distinct atoms that occur as monomial factors.
    pub fn atoms(&self) -> Vec<Atom> {
        let mut v: Vec<Atom> = self
            .terms
            .iter()
            .flat_map(|(m, _)| m.factors.iter().map(|(a, _)| a.clone()))
            .collect();
        v.sort();
        v.dedup();
        v
    }

    /// Distinct exponential parts.
    pub(crate) fn exp_parts(&self) -> Vec<Expr> {
        let mut v: Vec<Expr> = self
            .terms
            .iter()
            .filter_map(|(m, _)| m.exp.clone())
            .collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn max_degree_in(&self, a: &Atom) -> u32 {
        self.terms
            .iter()
            .map(|(m, _)| m.power_of(a))
            .max()
            .unwrap_or(0)
    }
}

pub(crate) enum MonoProduct {
    Mono(Mono),
    Poly(Poly),
}

pub(crate) fn mono_mul(a: &Mono, b: &Mono) -> MonoProduct {
    let factors = a.mul_factors(b);
    match (&a.exp, &b.exp) {
        (None, None) => MonoProduct::Mono(Mono { factors, exp: None }),
        (Some(e), None) | (None, Some(e)) => MonoProduct::Mono(Mono {
            factors,
            exp: Some(e.clone()),
        }),
        (Some(ea), Some(eb)) => {
            let sum = ea + eb;
            let (extracted, rest) = reduce_exp(&sum);
            let base = Mono { factors, exp: rest };
            if extracted.is_empty() {
                return MonoProduct::Mono(base);
            }
            let mut p = Poly::from_mono(base, Q::one());
            for (b, k) in extracted {
                debug_assert!(k > 0, "merged exp parts only extract positive powers");
                p = p.mul(&b.numer_poly().pow(k as u32));
            }
            MonoProduct::Poly(p)
        }
    }
}
