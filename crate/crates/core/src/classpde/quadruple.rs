//! Quadruples `(a, b, c, d)` encoding the classifying equation
//! `(at² + bt + c)f_t = (d − 2at)f`, and the projective action on them.

use std::fmt;

use symcore::{BaseVar, Expr, Symbol};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Quadruple {
    pub a: Expr,
    pub b: Expr,
    pub c: Expr,
    pub d: Expr,
}

/// Parameters `(α, β, γ, δ, μ)` of the action; `αδ − βγ ≠ 0`, `μ ≠ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionParams {
    pub alpha: Expr,
    pub beta: Expr,
    pub gamma: Expr,
    pub delta: Expr,
    pub mu: Expr,
}

impl ActionParams {
    pub fn new(alpha: Expr, beta: Expr, gamma: Expr, delta: Expr, mu: Expr) -> ActionParams {
        ActionParams {
            alpha,
            beta,
            gamma,
            delta,
            mu,
        }
    }

    pub fn ints(alpha: i64, beta: i64, gamma: i64, delta: i64, mu: i64) -> ActionParams {
        ActionParams::new(
            Expr::int(alpha),
            Expr::int(beta),
            Expr::int(gamma),
            Expr::int(delta),
            Expr::int(mu),
        )
    }

    pub fn identity() -> ActionParams {
        ActionParams::ints(1, 0, 0, 1, 1)
    }

    pub fn det(&self) -> Expr {
        &(&self.alpha * &self.delta) - &(&self.beta * &self.gamma)
    }

    /// Acting with `self` and then `then` equals acting with the result.
    pub fn then(&self, then: &ActionParams) -> ActionParams {
        let (p, q) = (self, then);
        ActionParams {
            alpha: &(&q.alpha * &p.alpha) + &(&q.beta * &p.gamma),
            beta: &(&q.alpha * &p.beta) + &(&q.beta * &p.delta),
            gamma: &(&q.gamma * &p.alpha) + &(&q.delta * &p.gamma),
            delta: &(&q.gamma * &p.beta) + &(&q.delta * &p.delta),
            mu: &p.mu * &q.mu,
        }
    }
}

impl Quadruple {
    pub fn new(a: Expr, b: Expr, c: Expr, d: Expr) -> Result<Quadruple> {
        if a.is_zero() && b.is_zero() && c.is_zero() {
            return Err(Error::Invalid("quadruple needs (a, b, c) ≠ 0".into()));
        }
        Ok(Quadruple { a, b, c, d })
    }

    pub fn ints(a: i64, b: i64, c: i64, d: i64) -> Quadruple {
        Quadruple::new(Expr::int(a), Expr::int(b), Expr::int(c), Expr::int(d))
            .expect("nonzero quadruple")
    }

    pub fn to_vec(&self) -> Vec<Expr> {
        vec![
            self.a.clone(),
            self.b.clone(),
            self.c.clone(),
            self.d.clone(),
        ]
    }

    /// `(at² + bt + c)f_t − (d − 2at)f`.
    pub fn residual(&self, f: &Expr) -> Expr {
        let t = Expr::t();
        let p = &(&(&self.a * &t.powi(2)) + &(&self.b * &t)) + &self.c;
        let s = &self.d - &(&Expr::int(2) * &(&self.a * &t));
        &(&p * &f.diff(&Symbol::Base(BaseVar::T))) - &(&s * f)
    }

    fn discriminant(&self) -> Expr {
        &self.b.powi(2) - &(&Expr::int(4) * &(&self.a * &self.c))
    }

    pub fn is_proportional_to(&self, other: &Quadruple) -> bool {
        let (u, v) = (self.to_vec(), other.to_vec());
        (0..4).all(|i| (i + 1..4).all(|j| (&(&u[i] * &v[j]) - &(&u[j] * &v[i])).is_zero()))
    }
}

impl fmt::Display for Quadruple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.a, self.b, self.c, self.d)
    }
}

/// The induced action of a linear fractional change of `t` with rescaling.
pub fn action(p: &ActionParams, q: &Quadruple) -> Result<Quadruple> {
    let det = p.det();
    if det.is_zero() {
        return Err(Error::Constraint("αδ − βγ must not vanish".into()));
    }
    if p.mu.is_zero() {
        return Err(Error::Constraint("μ must not vanish".into()));
    }
    let (al, be, ga, de, mu) = (&p.alpha, &p.beta, &p.gamma, &p.delta, &p.mu);
    let two = Expr::int(2);
    let (a, b, c, d) = (&q.a, &q.b, &q.c, &q.d);
    let na = &(&(a * &de.powi(2)) - &(&(b * ga) * de)) + &(c * &ga.powi(2));
    let nb = &(&(b * &(&(al * de) + &(be * ga))) - &(&two * &(&(a * be) * de)))
        - &(&two * &(&(c * al) * ga));
    let nc = &(&(a * &be.powi(2)) - &(&(b * al) * be)) + &(c * &al.powi(2));
    let nd = &(&(&(d * &det) + &(&two * &(&(a * be) * de))) - &(&two * &(&(b * be) * ga)))
        + &(&two * &(&(c * al) * ga));
    Quadruple::new(mu * &na, mu * &nb, mu * &nc, mu * &nd)
}

/// Canonical representatives up to the action.
#[derive(Debug, Clone, PartialEq)]
pub enum CanonicalForm {
    /// `(1, 0, 1, σ)`: `f = e^{σ arctan t}/(t² + 1)`.
    Arctan { sigma: Expr },
    /// `(0, 1, 0, ρ)` with `ρ ≤ −1`: `f = t^ρ`.
    Power { rho: Expr },
    /// `(0, 0, 1, 1)`: `f = e^t`.
    Exponential,
    /// `(0, 0, 1, 0)`: `f = 1`.
    Constant,
}

impl CanonicalForm {
    pub fn quadruple(&self) -> Quadruple {
        match self {
            CanonicalForm::Arctan { sigma } => {
                Quadruple::new(Expr::one(), Expr::zero(), Expr::one(), sigma.clone())
            }
            CanonicalForm::Power { rho } => {
                Quadruple::new(Expr::zero(), Expr::one(), Expr::zero(), rho.clone())
            }
            CanonicalForm::Exponential => Ok(Quadruple::ints(0, 0, 1, 1)),
            CanonicalForm::Constant => Ok(Quadruple::ints(0, 0, 1, 0)),
        }
        .expect("nonzero quadruple")
    }
}

/// Result of [`normalize`]: the canonical form and the action steps reaching it.
#[derive(Debug, Clone)]
pub struct Normalization {
    pub form: CanonicalForm,
    pub steps: Vec<ActionParams>,
}

impl Normalization {
    /// Re-applies the recorded steps and compares with the canonical quadruple.
    pub fn verify(&self, q: &Quadruple) -> Result<()> {
        let mut cur = q.clone();
        for s in &self.steps {
            cur = action(s, &cur)?;
        }
        let target = self.form.quadruple();
        if cur != target {
            return Err(Error::Invalid(format!(
                "normalization reached {cur}, expected {target}"
            )));
        }
        Ok(())
    }
}

fn numeric(e: &Expr) -> Result<f64> {
    struct NoSymbols;
    impl symcore::Valuation for NoSymbols {
        fn symbol(&self, _: &Symbol) -> Option<f64> {
            None
        }
    }
    if !e.free_symbols().is_empty() {
        return Err(Error::Unsupported(format!(
            "normalization needs numeric entries, got {e}"
        )));
    }
    e.eval(&NoSymbols)
        .ok_or_else(|| Error::Unsupported(format!("cannot evaluate {e}")))
}

/// Exact square root; rational when both numerator and denominator are squares.
fn sqrt(e: &Expr) -> Result<Expr> {
    if let Some(q) = e.as_rational() {
        if q >= symcore::Q::from_integer(0.into()) {
            let (n, d) = (q.numer().sqrt(), q.denom().sqrt());
            if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
                return Ok(Expr::rational(symcore::Q::new(n, d)));
            }
        }
    }
    Ok(e.pow(&Expr::frac(1, 2))?)
}

/// Brings a numeric quadruple to canonical form.
pub fn normalize(q: &Quadruple) -> Result<Normalization> {
    for e in q.to_vec() {
        numeric(&e)?;
    }
    let mut steps = Vec::new();
    let mut cur = q.clone();
    let push =
        |p: ActionParams, cur: &mut Quadruple, steps: &mut Vec<ActionParams>| -> Result<()> {
            *cur = action(&p, cur)?;
            steps.push(p);
            Ok(())
        };
    let (one, zero) = (Expr::one(), Expr::zero());
    let disc = numeric(&cur.discriminant())?;
    if !cur.a.is_zero() && disc < 0.0 {
        // t ↦ h + w t̃ completes the square, then rescale
        let h = (&cur.b / &cur.a).neg() / Expr::int(2);
        let w = sqrt(&(&(&Expr::int(4) * &(&cur.a * &cur.c)) - &cur.b.powi(2)))?
            / (&Expr::int(2) * &cur.a);
        push(
            ActionParams::new(one.clone(), h.neg(), zero.clone(), w.clone(), one.clone()),
            &mut cur,
            &mut steps,
        )?;
        let mu = cur.a.recip();
        push(
            ActionParams::new(one.clone(), zero.clone(), zero.clone(), one.clone(), mu),
            &mut cur,
            &mut steps,
        )?;
        return Ok(Normalization {
            form: CanonicalForm::Arctan {
                sigma: cur.d.clone(),
            },
            steps,
        });
    }
    if !cur.a.is_zero() {
        // real roots r1, r2 (equal when the discriminant vanishes)
        let sd = sqrt(&cur.discriminant())?;
        let two_a = &Expr::int(2) * &cur.a;
        let r1 = (&cur.b.neg() + &sd) / two_a.clone();
        let r2 = (&cur.b.neg() - &sd) / two_a;
        if disc == 0.0 || sd.is_zero() {
            // double root sent to infinity: the polynomial becomes constant
            push(
                ActionParams::new(
                    zero.clone(),
                    Expr::int(-1),
                    one.clone(),
                    r1.neg(),
                    one.clone(),
                ),
                &mut cur,
                &mut steps,
            )?;
        } else {
            // r1 ↦ 0, r2 ↦ ∞
            push(
                ActionParams::new(one.clone(), r1.neg(), one.clone(), r2.neg(), one.clone()),
                &mut cur,
                &mut steps,
            )?;
        }
    } else if !cur.b.is_zero() {
        // root −c/b ↦ 0, i.e. t = t̃ − c/b
        let r = &cur.c / &cur.b;
        push(
            ActionParams::new(one.clone(), r, zero.clone(), one.clone(), one.clone()),
            &mut cur,
            &mut steps,
        )?;
    }
    if !cur.b.is_zero() {
        debug_assert!(cur.a.is_zero() && cur.c.is_zero());
        let mu = cur.b.recip();
        push(
            ActionParams::new(one.clone(), zero.clone(), zero.clone(), one.clone(), mu),
            &mut cur,
            &mut steps,
        )?;
        if numeric(&cur.d)? > -1.0 {
            push(ActionParams::ints(0, 1, 1, 0, 1), &mut cur, &mut steps)?;
        }
        return Ok(Normalization {
            form: CanonicalForm::Power { rho: cur.d.clone() },
            steps,
        });
    }
    // a = b = 0
    if cur.d.is_zero() {
        let mu = cur.c.recip();
        push(
            ActionParams::new(one.clone(), zero.clone(), zero.clone(), one.clone(), mu),
            &mut cur,
            &mut steps,
        )?;
        return Ok(Normalization {
            form: CanonicalForm::Constant,
            steps,
        });
    }
    let lambda = &cur.d / &cur.c;
    let mu = (&cur.c * &lambda.powi(2)).recip();
    push(
        ActionParams::new(lambda, zero.clone(), zero.clone(), one.clone(), mu),
        &mut cur,
        &mut steps,
    )?;
    Ok(Normalization {
        form: CanonicalForm::Exponential,
        steps,
    })
}

/// Solves the classifying equation for a canonical quadruple.
pub fn solve(q: &Quadruple) -> Result<Expr> {
    let t = Expr::t();
    let f = if q == &CanonicalForm::Exponential.quadruple() {
        t.exp()
    } else if q == &CanonicalForm::Constant.quadruple() {
        Expr::one()
    } else if q.a.is_one() && q.b.is_zero() && q.c.is_one() {
        (&q.d * &t.arctan()).exp() / (&t.powi(2) + &Expr::one())
    } else if q.a.is_zero() && q.b.is_one() && q.c.is_zero() {
        if q.d.is_zero() {
            return Err(Error::Invalid(
                "(0, 1, 0, 0) is not canonical: its solution is f = 1".into(),
            ));
        }
        t.pow(&q.d)?
    } else {
        return Err(Error::Invalid(format!("{q} is not a canonical quadruple")));
    };
    let r = q.residual(&f);
    if !r.is_zero() {
        return Err(Error::certification("classifying equation", &r));
    }
    Ok(f)
}

trait NegExt {
    fn neg(&self) -> Expr;
}

impl NegExt for Expr {
    fn neg(&self) -> Expr {
        &Expr::zero() - self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use symcore::{parse, ParameterContext};

    fn ctx() -> ParameterContext {
        let mut c = ParameterContext::new();
        for p in [
            "a", "b", "c", "d", "al", "be", "ga", "de", "mu", "al2", "be2", "ga2", "de2", "mu2",
        ] {
            c.declare(p, &[]).unwrap();
        }
        c
    }

    fn sym(s: &str) -> Expr {
        parse(s, &ctx()).unwrap()
    }

    fn generic() -> (Quadruple, ActionParams, ActionParams) {
        let q = Quadruple::new(sym("a"), sym("b"), sym("c"), sym("d")).unwrap();
        let p1 = ActionParams::new(sym("al"), sym("be"), sym("ga"), sym("de"), sym("mu"));
        let p2 = ActionParams::new(sym("al2"), sym("be2"), sym("ga2"), sym("de2"), sym("mu2"));
        (q, p1, p2)
    }

    #[test]
    fn identity_and_composition() {
        let (q, p1, p2) = generic();
        assert_eq!(action(&ActionParams::identity(), &q).unwrap(), q);
        let two_steps = action(&p2, &action(&p1, &q).unwrap()).unwrap();
        assert_eq!(two_steps, action(&p1.then(&p2), &q).unwrap());
    }

    #[test]
    fn inversion_example() {
        let rho = sym("d");
        let q = Quadruple::new(Expr::zero(), Expr::one(), Expr::zero(), rho.clone()).unwrap();
        let mu = sym("mu");
        let out = action(
            &ActionParams::new(
                Expr::zero(),
                Expr::one(),
                Expr::one(),
                Expr::zero(),
                mu.clone(),
            ),
            &q,
        )
        .unwrap();
        let expect = Quadruple::new(
            Expr::zero(),
            mu.clone(),
            Expr::zero(),
            &mu * &(&rho.neg() - &Expr::int(2)),
        )
        .unwrap();
        assert_eq!(out, expect);
        assert!(action(&ActionParams::ints(1, 1, 1, 1, 1), &q).is_err());
    }

    #[test]
    fn normal_forms() {
        let cases: [(Quadruple, CanonicalForm); 7] = [
            (
                Quadruple::ints(1, 0, 1, 3),
                CanonicalForm::Arctan {
                    sigma: Expr::int(3),
                },
            ),
            (
                Quadruple::ints(0, 2, 0, 1),
                CanonicalForm::Power {
                    rho: Expr::frac(-5, 2),
                },
            ),
            (
                Quadruple::ints(0, 1, 0, -4),
                CanonicalForm::Power { rho: Expr::int(-4) },
            ),
            (Quadruple::ints(0, 0, 2, 6), CanonicalForm::Exponential),
            (Quadruple::ints(0, 0, 5, 0), CanonicalForm::Constant),
            (
                Quadruple::ints(0, 2, 3, 1),
                CanonicalForm::Power {
                    rho: Expr::frac(-5, 2),
                },
            ),
            (Quadruple::ints(1, -2, 1, 0), CanonicalForm::Exponential),
        ];
        for (q, form) in cases {
            let n = normalize(&q).unwrap();
            assert_eq!(n.form, form, "{q}");
            n.verify(&q).unwrap();
            let again = normalize(&n.form.quadruple()).unwrap();
            assert_eq!(again.form, n.form, "idempotent on {q}");
        }
        // two rational roots: t(t − 1)
        let q = Quadruple::ints(1, -1, 0, 0);
        let n = normalize(&q).unwrap();
        n.verify(&q).unwrap();
        assert!(matches!(n.form, CanonicalForm::Power { .. }));
        // irrational discriminant
        let q = Quadruple::ints(1, 1, 1, 0);
        let n = normalize(&q).unwrap();
        n.verify(&q).unwrap();
        assert!(matches!(n.form, CanonicalForm::Arctan { .. }));
    }

    #[test]
    fn canonical_solutions() {
        let c = ParameterContext::new().with("s", &[]).unwrap();
        let s = parse("s", &c).unwrap();
        let f = solve(&Quadruple::new(Expr::one(), Expr::zero(), Expr::one(), s).unwrap()).unwrap();
        assert_eq!(f, parse("e^(s*arctan(t))/(t^2+1)", &c).unwrap());
        assert_eq!(
            solve(&Quadruple::ints(0, 1, 0, -3)).unwrap(),
            Expr::t().powi(-3)
        );
        assert_eq!(
            solve(&Quadruple::ints(0, 0, 1, 1)).unwrap(),
            Expr::t().exp()
        );
        assert!(solve(&Quadruple::ints(0, 1, 0, 0)).is_err());
    }
}
