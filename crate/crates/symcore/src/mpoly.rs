//! Dense-exponent multivariate polynomials over Q used for gcd computation.
//!
//! Variables are anonymous indices `0..n`. Terms are kept sorted in descending
//! lexicographic order of exponent vectors, so `terms[0]` is the lex-leading term.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::Q;

type Exps = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct MPoly {
    n: usize,
    terms: Vec<(Exps, Q)>,
}

fn lex_desc(a: &Exps, b: &Exps) -> Ordering {
    b.cmp(a)
}

impl MPoly {
    pub fn zero(n: usize) -> MPoly {
        MPoly {
            n,
            terms: Vec::new(),
        }
    }

    pub fn constant(n: usize, c: Q) -> MPoly {
        if c.is_zero() {
            MPoly::zero(n)
        } else {
            MPoly {
                n,
                terms: vec![(vec![0; n], c)],
            }
        }
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Exps, Q)>) -> MPoly {
        let mut map: BTreeMap<Exps, Q> = BTreeMap::new();
        for (e, c) in terms {
            debug_assert_eq!(e.len(), n);
            *map.entry(e).or_insert_with(Q::zero) += c;
        }
        let mut terms: Vec<(Exps, Q)> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.reverse();
        MPoly { n, terms }
    }

    pub fn terms(&self) -> &[(Exps, Q)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.iter().all(|&e| e == 0))
    }

    fn lc(&self) -> &Q {
        &self.terms[0].1
    }

    pub fn degree(&self, v: usize) -> u32 {
        self.terms.iter().map(|(e, _)| e[v]).max().unwrap_or(0)
    }

    fn scale(&self, c: &Q) -> MPoly {
        MPoly {
            n: self.n,
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    /// Scales so that the lex-leading coefficient is one.
    pub fn monic(&self) -> MPoly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.lc().recip();
        self.scale(&inv)
    }

    fn combine(&self, other: &MPoly, sign: &Q) -> MPoly {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match lex_desc(&a[i].0, &b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((b[j].0.clone(), &b[j].1 * sign));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &a[i].1 + &b[j].1 * sign;
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|(e, c)| (e.clone(), c * sign)));
        MPoly {
            n: self.n,
            terms: out,
        }
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        self.combine(other, &-Q::one())
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        if self.is_zero() || other.is_zero() {
            return MPoly::zero(self.n);
        }
        let mut map: BTreeMap<Exps, Q> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exps = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                *map.entry(e).or_insert_with(Q::zero) += ca * cb;
            }
        }
        let mut terms: Vec<(Exps, Q)> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.reverse();
        MPoly { n: self.n, terms }
    }

    fn mul_term(&self, e: &Exps, c: &Q) -> MPoly {
        MPoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(ea, ca)| (ea.iter().zip(e).map(|(x, y)| x + y).collect(), ca * c))
                .collect(),
        }
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &MPoly) -> Option<MPoly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(MPoly::zero(self.n));
        }
        for v in 0..self.n {
            if d.degree(v) > self.degree(v) {
                return None;
            }
        }
        let (lead_e, lead_c) = &d.terms[0];
        let mut q = Vec::new();
        let mut r = self.clone();
        while !r.is_zero() {
            let (re, rc) = &r.terms[0];
            if re.iter().zip(lead_e).any(|(a, b)| a < b) {
                return None;
            }
            let e: Exps = re.iter().zip(lead_e).map(|(a, b)| a - b).collect();
            let c = rc / lead_c;
            r = r.sub(&d.mul_term(&e, &c));
            q.push((e, c));
        }
        Some(MPoly::from_terms(self.n, q))
    }

    /// Coefficients with respect to variable `v`: `self = Σ c_k v^k`.
    fn coeffs_in(&self, v: usize) -> BTreeMap<u32, MPoly> {
        let mut groups: BTreeMap<u32, Vec<(Exps, Q)>> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = e2[v];
            e2[v] = 0;
            groups.entry(k).or_default().push((e2, c.clone()));
        }
        groups
            .into_iter()
            .map(|(k, ts)| (k, MPoly::from_terms(self.n, ts)))
            .collect()
    }

    fn lc_in(&self, v: usize) -> MPoly {
        let d = self.degree(v);
        self.coeffs_in(v)
            .remove(&d)
            .unwrap_or_else(|| MPoly::zero(self.n))
    }

    fn var_power(&self, v: usize, k: u32) -> Exps {
        let mut e = vec![0; self.n];
        e[v] = k;
        e
    }

    /// Pseudo-remainder of `self` by `d` in variable `v`.
    fn prem(&self, d: &MPoly, v: usize) -> MPoly {
        let dd = d.degree(v);
        let lcd = d.lc_in(v);
        let mut r = self.clone();
        let mut dr = r.degree(v);
        while !r.is_zero() && dr >= dd {
            let lcr = r.lc_in(v);
            let shift = self.var_power(v, dr - dd);
            let t = lcr.mul_term(&shift, &Q::one());
            r = r.mul(&lcd).sub(&d.mul(&t));
            if r.is_zero() {
                break;
            }
            let nd = r.degree(v);
            if nd >= dr {
                // only happens when dr == 0 == dd
                break;
            }
            dr = nd;
        }
        r
    }

    fn content_in(&self, v: usize) -> MPoly {
        let mut g: Option<MPoly> = None;
        for (_, c) in self.coeffs_in(v) {
            g = Some(match g {
                None => c.monic(),
                Some(g) => gcd(&g, &c),
            });
            if g.as_ref().is_some_and(MPoly::is_constant) {
                return MPoly::constant(self.n, Q::one());
            }
        }
        g.unwrap_or_else(|| MPoly::zero(self.n))
    }

    fn primitive_in(&self, v: usize) -> MPoly {
        let c = self.content_in(v);
        if c.is_constant() {
            return self.monic();
        }
        self.div_exact(&c).expect("content divides").monic()
    }

    /// Per-variable minimum exponents over all terms.
    fn monomial_content(&self) -> Exps {
        let mut m = self.terms[0].0.clone();
        for (e, _) in &self.terms[1..] {
            for (a, b) in m.iter_mut().zip(e) {
                *a = (*a).min(*b);
            }
        }
        m
    }

    fn div_monomial(&self, m: &Exps) -> MPoly {
        MPoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(m).map(|(a, b)| a - b).collect(), c.clone()))
                .collect(),
        }
    }

    /// Coefficients with respect to all variables `v` with `keep[v] == false`.
    fn coeffs_outside(&self, keep: &[bool]) -> Vec<MPoly> {
        let mut groups: BTreeMap<Exps, Vec<(Exps, Q)>> = BTreeMap::new();
        for (e, c) in &self.terms {
            let (mut inner, mut outer) = (e.clone(), e.clone());
            for v in 0..self.n {
                if keep[v] {
                    outer[v] = 0;
                } else {
                    inner[v] = 0;
                }
            }
            groups.entry(outer).or_default().push((inner, c.clone()));
        }
        groups
            .into_values()
            .map(|ts| MPoly::from_terms(self.n, ts))
            .collect()
    }
}

/// Monic gcd over Q. `gcd(0, 0) = 0`.
pub(crate) fn gcd(a: &MPoly, b: &MPoly) -> MPoly {
    let n = a.n;
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return MPoly::constant(n, Q::one());
    }
    if a == b {
        return a.monic();
    }
    // strip common monomial content first
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let m: Exps = ma.iter().zip(&mb).map(|(x, y)| *x.min(y)).collect();
    let a1 = a.div_monomial(&ma);
    let b1 = b.div_monomial(&mb);
    let mono = MPoly {
        n,
        terms: vec![(m, Q::one())],
    };
    let core = gcd_no_monomial(&a1, &b1);
    core.mul(&mono).monic()
}

fn gcd_no_monomial(a: &MPoly, b: &MPoly) -> MPoly {
    let n = a.n;
    if a.is_constant() || b.is_constant() {
        return MPoly::constant(n, Q::one());
    }
    if a.div_exact(b).is_some() {
        return b.monic();
    }
    if b.div_exact(a).is_some() {
        return a.monic();
    }
    // a common factor only involves shared variables; reduce each side to its
    // coefficients with respect to the variables the other side lacks
    let shared: Vec<bool> = (0..n).map(|v| a.degree(v) > 0 && b.degree(v) > 0).collect();
    if !shared.iter().any(|&s| s) {
        return MPoly::constant(n, Q::one());
    }
    let a_extra = (0..n).any(|v| !shared[v] && a.degree(v) > 0);
    let b_extra = (0..n).any(|v| !shared[v] && b.degree(v) > 0);
    if a_extra || b_extra {
        let mut g = if b_extra {
            fold_gcd(b.coeffs_outside(&shared))
        } else {
            b.clone()
        };
        if g.is_constant() {
            return MPoly::constant(n, Q::one());
        }
        if a_extra {
            for c in a.coeffs_outside(&shared) {
                g = gcd(&g, &c);
                if g.is_constant() {
                    return g;
                }
            }
            return g.monic();
        }
        return gcd(a, &g);
    }
    let v = (0..n).find(|&v| shared[v]).expect("shared variable");
    let (da, db) = (a.degree(v), b.degree(v));
    let ca = a.content_in(v);
    let cb = b.content_in(v);
    let c = gcd(&ca, &cb);
    let pa = if ca.is_constant() {
        a.monic()
    } else {
        a.div_exact(&ca).expect("content divides")
    };
    let pb = if cb.is_constant() {
        b.monic()
    } else {
        b.div_exact(&cb).expect("content divides")
    };
    let (mut p, mut q) = if da >= db { (pa, pb) } else { (pb, pa) };
    loop {
        let r = p.prem(&q, v);
        if r.is_zero() {
            break;
        }
        if r.degree(v) == 0 {
            q = MPoly::constant(n, Q::one());
            break;
        }
        p = q;
        q = r.primitive_in(v);
    }
    let g = if q.is_constant() {
        q
    } else {
        q.primitive_in(v)
    };
    g.mul(&c).monic()
}

fn fold_gcd(polys: Vec<MPoly>) -> MPoly {
    let mut it = polys.into_iter();
    let mut g = it.next().expect("nonempty").monic();
    for c in it {
        if g.is_constant() {
            break;
        }
        g = gcd(&g, &c);
    }
    g
}

/// Term count, used by callers to skip gcds of very large inputs.
pub(crate) fn size(p: &MPoly) -> usize {
    p.terms.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    fn p(n: usize, ts: &[(&[u32], i64)]) -> MPoly {
        MPoly::from_terms(n, ts.iter().map(|(e, c)| (e.to_vec(), q(*c))))
    }

    #[test]
    fn gcd_of_univariate() {
        // (x+1)(x-1) and (x+1)^2
        let a = p(1, &[(&[2], 1), (&[0], -1)]);
        let b = p(1, &[(&[2], 1), (&[1], 2), (&[0], 1)]);
        assert_eq!(gcd(&a, &b), p(1, &[(&[1], 1), (&[0], 1)]));
    }

    #[test]
    fn gcd_of_bivariate() {
        // a = (x + y)(x - 2y), b = (x + y)(y + 3)
        let xy = p(2, &[(&[1, 0], 1), (&[0, 1], 1)]);
        let a = xy.mul(&p(2, &[(&[1, 0], 1), (&[0, 1], -2)]));
        let b = xy.mul(&p(2, &[(&[0, 1], 1), (&[0, 0], 3)]));
        assert_eq!(gcd(&a, &b), xy);
    }

    #[test]
    fn gcd_with_monomial_content() {
        // x^2 y (x+1) and x y^3 (x+1)^2
        let x1 = p(2, &[(&[1, 0], 1), (&[0, 0], 1)]);
        let a = x1.mul(&p(2, &[(&[2, 1], 1)]));
        let b = x1.mul(&x1).mul(&p(2, &[(&[1, 3], 1)]));
        assert_eq!(gcd(&a, &b), x1.mul(&p(2, &[(&[1, 1], 1)])));
    }

    #[test]
    fn coprime() {
        let a = p(2, &[(&[1, 0], 1), (&[0, 0], 1)]);
        let b = p(2, &[(&[0, 1], 1), (&[0, 0], 1)]);
        assert!(gcd(&a, &b).is_constant());
    }

    #[test]
    fn exact_division() {
        let a = p(2, &[(&[2, 0], 1), (&[0, 2], -1)]);
        let b = p(2, &[(&[1, 0], 1), (&[0, 1], -1)]);
        assert_eq!(a.div_exact(&b), Some(p(2, &[(&[1, 0], 1), (&[0, 1], 1)])));
        assert_eq!(b.div_exact(&a), None);
    }
}
