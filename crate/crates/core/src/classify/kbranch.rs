//! Nonlinearities `k` admitting extra symmetries: solutions of
//! `(au + b)k_u + ck = d` for `s` independent quadruples `(a, b, c, d)`.

use symcore::{parse, BaseVar, Constraint, Expr, ParameterContext, Symbol};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct KBranch {
    /// `None` for the generic branch with `k` arbitrary.
    pub k: Option<Expr>,
    pub ctx: ParameterContext,
    /// Independent quadruples `(a, b, c, d)` satisfied by `k`.
    pub quadruples: Vec<[Expr; 4]>,
}

fn branch(k: &str, params: &[(&str, &[&str])], quads: &[[i64; 4]], sym: &[[&str; 4]]) -> KBranch {
    let mut ctx = ParameterContext::new();
    for (p, cons) in params {
        let cons: Vec<Constraint> = cons
            .iter()
            .map(|c| c.parse().expect("constraint"))
            .collect();
        ctx.declare(p, &cons).expect("fresh parameter");
    }
    let mut quadruples: Vec<[Expr; 4]> = quads.iter().map(|q| q.map(Expr::int)).collect();
    for q in sym {
        quadruples.push(q.map(|s| parse(s, &ctx).expect("quadruple entry")));
    }
    KBranch {
        k: Some(parse(k, &ctx).expect("branch parses")),
        ctx,
        quadruples,
    }
}

/// The branches up to the equivalence `k ↦ (δ1 k + δ2)/ε1`, `u ↦ δ6 u + δ7`,
/// for `s` independent conditions.
pub fn solve_k_branches(s: usize) -> Result<Vec<KBranch>> {
    match s {
        0 => Ok(vec![KBranch {
            k: None,
            ctx: ParameterContext::new(),
            quadruples: vec![],
        }]),
        1 => Ok(vec![
            branch(
                "u^n",
                &[("n", &["!=0", "!=1"])],
                &[],
                &[["1", "0", "-n", "0"]],
            ),
            branch("e^u", &[], &[[0, 1, -1, 0]], &[]),
            branch("ln(u)", &[], &[[1, 0, 0, 1]], &[]),
        ]),
        2 => Ok(vec![branch("u", &[], &[[1, 0, -1, 0], [0, 1, 0, 1]], &[])]),
        _ => Err(Error::Invalid(format!(
            "at most two independent conditions are compatible with a nonconstant k, got {s}"
        ))),
    }
}

fn du(e: &Expr, n: usize) -> Expr {
    e.diff_n(&Symbol::Base(BaseVar::U), n)
}

/// `k''k''''/k'''²`, constant on each branch and invariant under the
/// equivalence transformations.
pub fn affine_invariant(k: &Expr) -> Result<Expr> {
    let d3 = du(k, 3);
    if d3.is_zero() {
        return Err(Error::Invalid(format!("k''' vanishes for k = {k}")));
    }
    Ok((&du(k, 2) * &du(k, 4)).try_div(&d3.powi(2))?)
}

/// True when `e` cannot vanish under the declared constraints: a nonzero
/// rational times a product of parameters declared nonzero, over any
/// denominator.
fn provably_nonzero(e: &Expr, ctx: &ParameterContext) -> bool {
    let n = e.numer();
    if n.is_zero() {
        return false;
    }
    let terms = n.numer_terms();
    if terms.len() != 1 {
        return false;
    }
    n.free_symbols().iter().all(|s| match s {
        Symbol::Param(p) => ctx.constraints(p).contains(&Constraint::Nonzero),
        _ => false,
    })
}

/// Checks each branch: `k` solves its conditions, the conditions are
/// independent, and distinct branches are inequivalent.
pub fn certify_k_branches(branches: &[KBranch]) -> Result<()> {
    for b in branches {
        let Some(k) = &b.k else { continue };
        let u = Expr::u();
        for q in &b.quadruples {
            let [a, bb, c, d] = q;
            let r = &(&(&(&(a * &u) + bb) * &du(k, 1)) + &(c * k)) - d;
            if !r.is_zero() {
                return Err(Error::certification(
                    format!("k = {k} against ({a}, {bb}, {c}, {d})"),
                    &r,
                ));
            }
        }
        if b.quadruples.len() == 2 {
            let (p, q) = (&b.quadruples[0], &b.quadruples[1]);
            let independent = (0..4)
                .any(|i| (i + 1..4).any(|j| !(&(&p[i] * &q[j]) - &(&p[j] * &q[i])).is_zero()));
            if !independent {
                return Err(Error::Invalid(format!(
                    "conditions for k = {k} are dependent"
                )));
            }
        }
    }
    let one: Vec<&KBranch> = branches
        .iter()
        .filter(|b| b.quadruples.len() == 1)
        .collect();
    for (i, a) in one.iter().enumerate() {
        for b in &one[i + 1..] {
            let (ka, kb) = (a.k.as_ref().expect("k"), b.k.as_ref().expect("k"));
            let diff = &affine_invariant(ka)? - &affine_invariant(kb)?;
            let mut ctx = a.ctx.clone();
            ctx.merge(&b.ctx)?;
            if !provably_nonzero(&diff, &ctx) {
                return Err(Error::Invalid(format!(
                    "cannot separate k = {ka} from k = {kb}: invariants differ by {diff}"
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branches_certify() {
        for s in 0..=2 {
            certify_k_branches(&solve_k_branches(s).unwrap()).unwrap();
        }
        assert!(solve_k_branches(3).is_err());
    }

    #[test]
    fn invariant_values() {
        let ctx = ParameterContext::new().with("n", &[]).unwrap();
        let p = |s: &str| parse(s, &ctx).unwrap();
        assert_eq!(affine_invariant(&p("e^u")).unwrap(), Expr::one());
        assert_eq!(affine_invariant(&p("ln(u)")).unwrap(), Expr::frac(3, 2));
        assert_eq!(affine_invariant(&p("u^n")).unwrap(), p("(n-3)/(n-2)"));
        // invariant under the equivalence maps
        let k = p("(3*e^(2*u + 1) - 5)/7");
        assert_eq!(affine_invariant(&k).unwrap(), Expr::one());
    }
}
