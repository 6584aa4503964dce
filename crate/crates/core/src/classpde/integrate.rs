//! Closed-form antiderivatives and inverses for the elementary functions that
//! occur as elements of the class. Every result is checked by differentiation
//! or composition before it is returned.

use symcore::{Atom, BaseVar, Expr, Kernel, Symbol};

fn free_of(e: &Expr, v: &Symbol) -> bool {
    !e.contains_symbol(v)
}

/// Candidate antiderivatives built from the structure of `e`.
fn candidates(e: &Expr, v: &Symbol) -> Vec<Expr> {
    let mut out = vec![Expr::sym(v.clone())];
    for a in e.top_atoms() {
        if let Atom::Kernel(k, arg) = &a {
            if !arg.contains_symbol(v) {
                continue;
            }
            out.push(Expr::atom(a.clone()));
            match k {
                Kernel::Tan | Kernel::Sin | Kernel::Cos | Kernel::Arctan => {
                    out.push(arg.clone());
                }
                Kernel::Ln => {
                    out.push(&Expr::atom(a.clone()) * arg);
                    out.push(&(&Expr::atom(a.clone()) * arg) - arg);
                    out.push(arg.clone());
                    if let Ok(l2) = Expr::atom(a.clone()).try_powi(2) {
                        out.push(l2);
                    }
                }
                Kernel::Opaque(_) => {}
            }
        }
    }
    for l in e.exp_parts() {
        if l.contains_symbol(v) {
            out.push(l.exp());
        }
    }
    // 1/P for each non-monomial factor of the denominator
    let den = e.denom();
    if den.contains_symbol(v) {
        out.push(den.recip());
        if let Ok(l) = den.ln() {
            out.push(l);
        }
        out.push(Expr::sym(v.clone()).arctan());
        // the repeated part gcd(D, D') of the denominator
        if let Ok(q) = den.diff(v).try_div(&den) {
            if let Ok(rep) = den.try_div(&q.denom()) {
                if rep.contains_symbol(v) {
                    out.push(rep.recip());
                }
            }
        }
        for t in den.numer_terms() {
            if t.contains_symbol(v) {
                out.push(t.recip());
            }
        }
    }
    out
}

/// Tries `e = c·C'` for a candidate `C` and constant `c`.
fn by_candidates(e: &Expr, v: &Symbol) -> Option<Expr> {
    for c in candidates(e, v) {
        let dc = c.diff(v);
        if dc.is_zero() {
            continue;
        }
        let Ok(ratio) = e.try_div(&dc) else { continue };
        if free_of(&ratio, v) && !ratio.contains_jet_or_func() {
            return Some(&ratio * &c);
        }
    }
    None
}

/// Power-rule integration of a single numerator term over a monomial denominator.
fn power_term(term: &Expr, v: &Symbol) -> Option<Expr> {
    let var = Expr::sym(v.clone());
    // term = c · v^p with p possibly symbolic: p = v·term'/term
    let p = (&var * &term.diff(v)).try_div(term).ok()?;
    if !free_of(&p, v) || !p.is_constant() {
        return None;
    }
    if (&p + &Expr::one()).is_zero() {
        let c = (term * &var).simplified_free_of(v)?;
        return Some(&c * &var.ln().ok()?);
    }
    let r = (term * &var).try_div(&(&p + &Expr::one())).ok()?;
    Some(r)
}

/// `(e^{aL}) `-type terms with `L` linear in `v`: `term' = a·term`.
fn exp_term(term: &Expr, v: &Symbol) -> Option<Expr> {
    let a = term.diff(v).try_div(term).ok()?;
    if free_of(&a, v) && a.is_constant() && !a.is_zero() {
        return term.try_div(&a).ok();
    }
    None
}

/// `∫ e dv`, or `None` outside the supported forms.
pub fn antiderivative(e: &Expr, v: BaseVar) -> Option<Expr> {
    let var = Symbol::Base(v);
    if e.is_zero() {
        return Some(Expr::zero());
    }
    if free_of(e, &var) {
        return Some(e * &Expr::base(v));
    }
    let result = by_candidates(e, &var).or_else(|| termwise(e, &var))?;
    (&result.diff(&var) - e).is_zero().then_some(result)
}

fn termwise(e: &Expr, var: &Symbol) -> Option<Expr> {
    let den = e.denom();
    let den_ok = free_of(&den, var) || den.numer_terms().len() == 1;
    if !den_ok {
        return None;
    }
    let mut sum = Expr::zero();
    for t in e.numer_terms() {
        let term = t.try_div(&den).ok()?;
        let piece = if free_of(&term, var) {
            &term * &Expr::sym(var.clone())
        } else {
            power_term(&term, var)
                .or_else(|| exp_term(&term, var))
                .or_else(|| by_candidates(&term, var))?
        };
        sum = &sum + &piece;
    }
    Some(sum)
}

/// Solves `s = h(t)` for `t` when `h` is affine, exponential, a power or a
/// logarithm up to affine rescaling. `s` is represented by the base variable `t`
/// of the result.
pub fn inverse_in_t(h: &Expr) -> Option<Expr> {
    let t = Symbol::Base(BaseVar::T);
    let s = Expr::t();
    let var = Expr::t();
    let (mut d, mut r) = (Expr::zero(), Expr::zero());
    if h.denom().contains_symbol(&t) {
        r = h.clone();
    } else {
        for term in h.numer_terms() {
            let term = term.try_div(&h.denom()).ok()?;
            if free_of(&term, &t) {
                d = &d + &term;
            } else {
                r = &r + &term;
            }
        }
    }
    let dr = r.diff(&t);
    let target = &s - &d;
    let cand = if free_of(&dr, &t) && !dr.is_zero() {
        // r = a·t + b
        let b = &r - &(&dr * &var);
        Some((&target - &b).try_div(&dr).ok()?)
    } else if let Some(c) = dr
        .try_div(&r)
        .ok()
        .filter(|c| free_of(c, &t) && !c.is_zero())
    {
        // r = a·e^{c t}
        let a = r.try_div(&(&c * &var).exp()).ok()?;
        if !free_of(&a, &t) {
            return None;
        }
        Some(target.try_div(&a).ok()?.ln().ok()?.try_div(&c).ok()?)
    } else if let Some(p) = (&var * &dr)
        .try_div(&r)
        .ok()
        .filter(|p| free_of(p, &t) && !p.is_zero())
    {
        // r = a·t^p
        let a = r.try_div(&var.pow(&p).ok()?).ok()?;
        if !free_of(&a, &t) {
            return None;
        }
        Some(target.try_div(&a).ok()?.pow(&p.recip()).ok()?)
    } else {
        // r = a·ln t + b
        let a = &var * &dr;
        if !free_of(&a, &t) {
            return None;
        }
        let b = &r - &(&a * &var.ln().ok()?);
        if !free_of(&b, &t) {
            return None;
        }
        Some((&target - &b).try_div(&a).ok()?.exp())
    }?;
    // h(cand(s)) = s
    let back = h.subs(&t, &cand).ok()?;
    (&back - &s).is_zero().then_some(cand)
}

trait ExprExt {
    fn contains_jet_or_func(&self) -> bool;
    fn simplified_free_of(&self, v: &Symbol) -> Option<Expr>;
}

impl ExprExt for Expr {
    fn contains_jet_or_func(&self) -> bool {
        self.free_symbols().iter().any(Symbol::is_jet)
    }

    fn simplified_free_of(&self, v: &Symbol) -> Option<Expr> {
        free_of(self, v).then(|| self.clone())
    }
}

/// `K` with `K_u = k`.
pub fn k_to_big_k(k: &Expr) -> Option<Expr> {
    antiderivative(k, BaseVar::U)
}

/// `k = K_u`.
pub fn big_k_to_k(big_k: &Expr) -> Expr {
    big_k.diff(&Symbol::Base(BaseVar::U))
}

#[cfg(test)]
mod tests {
    use super::*;
    use symcore::{parse, ParameterContext};

    fn ctx() -> ParameterContext {
        ParameterContext::new()
            .with("n", &["!=0".parse().unwrap(), "!=-1".parse().unwrap()])
            .unwrap()
            .with("nu", &["!=0".parse().unwrap()])
            .unwrap()
            .with("rho", &["!=-1".parse().unwrap()])
            .unwrap()
    }

    fn p(s: &str) -> Expr {
        parse(s, &ctx()).unwrap()
    }

    #[test]
    fn potentials() {
        assert_eq!(k_to_big_k(&p("u^n")).unwrap(), p("u^(n+1)/(n+1)"));
        assert_eq!(k_to_big_k(&p("1/u")).unwrap(), p("ln(u)"));
        assert_eq!(k_to_big_k(&p("e^u")).unwrap(), p("e^u"));
        assert_eq!(k_to_big_k(&p("ln(u)")).unwrap(), p("u*ln(u) - u"));
        assert_eq!(k_to_big_k(&p("u")).unwrap(), p("u^2/2"));
        assert_eq!(big_k_to_k(&p("u*ln(u) - u")), p("ln(u)"));
    }

    #[test]
    fn antiderivatives_in_t() {
        let cases = [
            ("t^rho", "t^(rho+1)/(rho+1)"),
            ("1/t", "ln(t)"),
            ("e^t", "e^t"),
            ("3", "3*t"),
            ("(1 + tan(nu*ln(t))^2)/t", "tan(nu*ln(t))/nu"),
            ("1 + tan(t)^2", "tan(t)"),
            ("1/(t^2+1)", "arctan(t)"),
            ("4*t^(2*nu)/(t*(t^(2*nu)+1)^2)", "-2/(nu*(t^(2*nu)+1))"),
        ];
        for (g, big_g) in cases {
            let r = &antiderivative(&p(g), BaseVar::T).unwrap() - &p(big_g);
            assert!(r.is_constant(), "{g}: differs by {r}");
        }
        assert!(antiderivative(&p("e^(t^2)"), BaseVar::T).is_none());
    }

    #[test]
    fn inverses() {
        let cases = [
            ("2*t + 3", "(t - 3)/2"),
            ("e^t", "ln(t)"),
            ("3*e^(2*t) + 1", "ln((t - 1)/3)/2"),
            ("t^rho/rho", "(rho*t)^(1/rho)"),
            ("ln(t)", "e^t"),
        ];
        for (h, inv) in cases {
            assert_eq!(inverse_in_t(&p(h)).unwrap(), p(inv), "{h}");
        }
        assert!(inverse_in_t(&p("t + e^t")).is_none());
    }
}
