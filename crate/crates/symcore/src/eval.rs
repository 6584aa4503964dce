//! Floating-point evaluation, used only by randomized numeric cross-checks.

use num_traits::ToPrimitive;

use crate::atom::{Atom, FuncApp};
use crate::context::ParameterContext;
use crate::expr::Expr;
use crate::kernel::{Builtin, Kernel, Opaque};
use crate::parse::{resolve_callee, resolve_ident, Ast, Callee};
use crate::poly::Poly;
use crate::symbol::Symbol;
use crate::Q;

pub fn q_to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Numeric values for everything an expression may contain.
pub trait Valuation {
    fn symbol(&self, s: &Symbol) -> Option<f64>;

    /// Value of an opaque kernel (or one of its derivative kernels) at `z`.
    fn opaque(&self, _o: &Opaque, _z: f64) -> Option<f64> {
        None
    }

    fn func(&self, _f: &FuncApp) -> Option<f64> {
        None
    }
}

/// Largest magnitude seen so far; rounding errors scale with it.
fn track(scale: &mut f64, x: f64) -> f64 {
    *scale = scale.max(x.abs());
    x
}

fn eval_kernel(k: &Kernel, z: f64, v: &dyn Valuation) -> Option<f64> {
    let r = match k {
        Kernel::Ln => Builtin::Ln.eval(z),
        Kernel::Arctan => Builtin::Arctan.eval(z),
        Kernel::Sin => Builtin::Sin.eval(z),
        Kernel::Cos => Builtin::Cos.eval(z),
        Kernel::Tan => Builtin::Tan.eval(z),
        Kernel::Opaque(o) => v.opaque(o, z)?,
    };
    r.is_finite().then_some(r)
}

fn eval_poly(p: &Poly, v: &dyn Valuation, scale: &mut f64) -> Option<f64> {
    let mut sum = 0.0;
    for (m, c) in p.terms() {
        let mut term = track(scale, q_to_f64(c));
        for (a, k) in m.factors() {
            let x = match a {
                Atom::Sym(s) => v.symbol(s)?,
                Atom::Kernel(kern, arg) => eval_kernel(kern, arg.eval_tracked(v, scale)?, v)?,
                Atom::Func(f) => v.func(f)?,
            };
            term *= track(scale, x).powi(*k as i32);
            track(scale, term);
        }
        if let Some(l) = m.exp_part() {
            let e = l.eval_tracked(v, scale)?.exp();
            term *= track(scale, e);
        }
        sum += track(scale, term);
    }
    sum.is_finite().then_some(sum)
}

impl Expr {
    /// Evaluates; `None` when a value is missing or a singularity is hit.
    pub fn eval(&self, v: &dyn Valuation) -> Option<f64> {
        self.eval_tracked(v, &mut 0.0)
    }

    /// Evaluates and raises `scale` to the largest intermediate magnitude.
    pub fn eval_tracked(&self, v: &dyn Valuation, scale: &mut f64) -> Option<f64> {
        let n = eval_poly(self.numer_poly(), v, scale)?;
        if self.is_polynomial() {
            return Some(n);
        }
        let d = eval_poly(self.denom_poly(), v, scale)?;
        if d == 0.0 {
            return None;
        }
        let r = track(scale, n / d);
        r.is_finite().then_some(r)
    }
}

impl Ast {
    /// Evaluates the unnormalized tree directly.
    pub fn eval(&self, ctx: &ParameterContext, v: &dyn Valuation) -> Option<f64> {
        self.eval_tracked(ctx, v, &mut 0.0)
    }

    /// Evaluates and raises `scale` to the largest intermediate magnitude.
    pub fn eval_tracked(
        &self,
        ctx: &ParameterContext,
        v: &dyn Valuation,
        scale: &mut f64,
    ) -> Option<f64> {
        let r = match self {
            Ast::Num(n) => n.to_f64()?,
            Ast::Ident(name, pos) => match resolve_ident(name, *pos, ctx).ok()? {
                Some(s) => v.symbol(&s)?,
                None => std::f64::consts::E,
            },
            Ast::Neg(a) => -a.eval_tracked(ctx, v, scale)?,
            Ast::Add(a, b) => a.eval_tracked(ctx, v, scale)? + b.eval_tracked(ctx, v, scale)?,
            Ast::Sub(a, b) => a.eval_tracked(ctx, v, scale)? - b.eval_tracked(ctx, v, scale)?,
            Ast::Mul(a, b) => a.eval_tracked(ctx, v, scale)? * b.eval_tracked(ctx, v, scale)?,
            Ast::Div(a, b) => {
                let d = b.eval_tracked(ctx, v, scale)?;
                if d == 0.0 {
                    return None;
                }
                a.eval_tracked(ctx, v, scale)? / d
            }
            Ast::Pow(a, b) => {
                let base = a.eval_tracked(ctx, v, scale)?;
                let e = b.eval_tracked(ctx, v, scale)?;
                if e.fract() == 0.0 && e.abs() < 64.0 {
                    base.powi(e as i32)
                } else {
                    base.powf(e)
                }
            }
            Ast::Call(name, args, _) => match resolve_callee(name, ctx)? {
                Callee::Builtin(b) => b.eval(args.first()?.eval_tracked(ctx, v, scale)?),
                Callee::Opaque(base, order) => {
                    let z = args.first()?.eval_tracked(ctx, v, scale)?;
                    v.opaque(&Opaque::new(&base, order), z)?
                }
                Callee::Func(f) => v.func(&f)?,
            },
        };
        track(scale, r);
        r.is_finite().then_some(r)
    }
}
