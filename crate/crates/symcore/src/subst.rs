//! Simultaneous substitution of symbols, opaque kernels and unknown functions.

use std::collections::{BTreeMap, HashMap};

use crate::atom::{Atom, FuncApp};
use crate::context::ParameterContext;
use crate::error::{Result, SymError};
use crate::expr::Expr;
use crate::kernel::Kernel;
use crate::poly::{Mono, Poly};
use crate::symbol::{BaseVar, Symbol};
use crate::Q;

/// A set of simultaneous bindings.
///
/// Kernel bindings are templates `λz. body`: every application `name(a)` becomes
/// `body[z := a]`, and a derivative kernel `name_dN(a)` becomes the `N`-th
/// derivative of the body in `z`, evaluated at `a`. Function bindings replace an
/// unknown function by an expression in its variables; its partial derivatives
/// are replaced by the corresponding derivatives.
#[derive(Debug, Clone, Default)]
pub struct Substitution {
    syms: BTreeMap<Symbol, Expr>,
    kernels: BTreeMap<String, (Symbol, Expr)>,
    funcs: BTreeMap<String, Expr>,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn is_empty(&self) -> bool {
        self.syms.is_empty() && self.kernels.is_empty() && self.funcs.is_empty()
    }

    pub fn bind(mut self, s: Symbol, value: Expr) -> Substitution {
        self.syms.insert(s, value);
        self
    }

    pub fn set(&mut self, s: Symbol, value: Expr) {
        self.syms.insert(s, value);
    }

    /// Binds opaque kernel `name` to `λvar. body`.
    pub fn bind_kernel(mut self, name: &str, var: Symbol, body: Expr) -> Substitution {
        self.kernels.insert(name.to_string(), (var, body));
        self
    }

    pub fn set_kernel(&mut self, name: &str, var: Symbol, body: Expr) {
        self.kernels.insert(name.to_string(), (var, body));
    }

    pub fn bind_func(mut self, name: &str, body: Expr) -> Substitution {
        self.funcs.insert(name.to_string(), body);
        self
    }

    pub fn set_func(&mut self, name: &str, body: Expr) {
        self.funcs.insert(name.to_string(), body);
    }

    pub fn get(&self, s: &Symbol) -> Option<&Expr> {
        self.syms.get(s)
    }

    /// Every parameter introduced by a binding must be declared.
    pub fn validate(&self, ctx: &ParameterContext) -> Result<()> {
        let values = self
            .syms
            .values()
            .chain(self.kernels.values().map(|(_, b)| b))
            .chain(self.funcs.values());
        for v in values {
            ctx.check_declared(v).map_err(|e| match e {
                SymError::Undeclared { name, .. } => {
                    SymError::Binding(format!("binding introduces undeclared parameter `{name}`"))
                }
                other => other,
            })?;
        }
        Ok(())
    }

    fn touches(&self, e: &Expr) -> bool {
        e.free_symbols().iter().any(|s| self.syms.contains_key(s))
            || e.kernel_names()
                .iter()
                .any(|n| self.kernels.contains_key(&**n) || self.funcs.contains_key(&**n))
    }

    fn atom_value(&self, a: &Atom, cache: &mut HashMap<Atom, Expr>) -> Result<Expr> {
        if let Some(v) = cache.get(a) {
            return Ok(v.clone());
        }
        let v = match a {
            Atom::Sym(s) => self
                .syms
                .get(s)
                .cloned()
                .unwrap_or_else(|| Expr::sym(s.clone())),
            Atom::Kernel(k, arg) => {
                let new_arg = self.apply(arg)?;
                match k {
                    Kernel::Opaque(o) if self.kernels.contains_key(&*o.name) => {
                        let (var, body) = &self.kernels[&*o.name];
                        let body = body.diff_n(var, o.order as usize);
                        body.substitute(&Substitution::new().bind(var.clone(), new_arg))?
                    }
                    _ => Expr::apply_kernel(k, &new_arg)?,
                }
            }
            Atom::Func(f) => self.func_value(f)?,
        };
        cache.insert(a.clone(), v.clone());
        Ok(v)
    }

    fn func_value(&self, f: &FuncApp) -> Result<Expr> {
        let mut body = match self.funcs.get(&*f.name) {
            Some(b) => {
                let mut b = b.clone();
                for (v, k) in f.vars.iter().zip(&f.derivs) {
                    b = b.diff_n(&Symbol::Base(*v), *k as usize);
                }
                b
            }
            None => Expr::func_app(f.clone()),
        };
        // base variables the function depends on may themselves be bound
        let mut inner = Substitution::new();
        for v in BaseVar::ALL {
            if let Some(val) = self.syms.get(&Symbol::Base(v)) {
                inner.set(Symbol::Base(v), val.clone());
            }
        }
        if !inner.is_empty() {
            if self.funcs.contains_key(&*f.name) {
                body = body.substitute(&inner)?;
            } else if f
                .vars
                .iter()
                .any(|v| inner.syms.contains_key(&Symbol::Base(*v)))
            {
                return Err(SymError::Unsupported(format!(
                    "cannot change the variables of unknown function `{}`",
                    f.name
                )));
            }
        }
        Ok(body)
    }

    fn poly_value(&self, p: &Poly, cache: &mut HashMap<Atom, Expr>) -> Result<Expr> {
        let mut acc_plain: BTreeMap<Mono, Q> = BTreeMap::new();
        let mut sum = Expr::zero();
        for (m, c) in p.terms() {
            let mut kept: Vec<(Atom, u32)> = Vec::new();
            let mut factor = Expr::one();
            for (a, k) in m.factors() {
                let touched = match a {
                    Atom::Sym(s) => self.syms.contains_key(s),
                    Atom::Kernel(Kernel::Opaque(o), arg) => {
                        self.kernels.contains_key(&*o.name) || self.touches(arg)
                    }
                    Atom::Kernel(_, arg) => self.touches(arg),
                    Atom::Func(f) => {
                        self.funcs.contains_key(&*f.name)
                            || f.vars
                                .iter()
                                .any(|v| self.syms.contains_key(&Symbol::Base(*v)))
                    }
                };
                if touched {
                    factor = &factor * &self.atom_value(a, cache)?.powi(i64::from(*k));
                } else {
                    kept.push((a.clone(), *k));
                }
            }
            let exp = match m.exp_part() {
                Some(l) if self.touches(l) => {
                    factor = &factor * &self.apply(l)?.exp();
                    None
                }
                other => other.cloned(),
            };
            let kept = Mono { factors: kept, exp };
            if factor.is_one() {
                *acc_plain.entry(kept).or_default() += c;
            } else {
                let base = Expr::from_poly(Poly::from_mono(kept, c.clone()));
                sum = &sum + &(&base * &factor);
            }
        }
        let plain = Poly::from_map(acc_plain);
        Ok(&sum + &Expr::from_poly(plain))
    }

    /// Applies the substitution and renormalizes.
    pub fn apply(&self, e: &Expr) -> Result<Expr> {
        if self.is_empty() || !self.touches(e) {
            return Ok(e.clone());
        }
        let mut cache = HashMap::new();
        let n = self.poly_value(e.numer_poly(), &mut cache)?;
        if e.is_polynomial() {
            return Ok(n);
        }
        let d = self.poly_value(e.denom_poly(), &mut cache)?;
        n.try_div(&d)
    }
}

impl Expr {
    pub fn substitute(&self, s: &Substitution) -> Result<Expr> {
        s.apply(self)
    }

    /// Replaces a single symbol.
    pub fn subs(&self, s: &Symbol, value: &Expr) -> Result<Expr> {
        Substitution::new()
            .bind(s.clone(), value.clone())
            .apply(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defining_substitution() {
        let f = Expr::opaque("f", &Expr::t());
        let k = Expr::opaque("k", &Expr::u());
        let ut = Expr::jet(1, 0, 0);
        let uyy = Expr::jet(0, 0, 2);
        let ux = Expr::jet(0, 1, 0);
        let rhs = &(&f * &uyy) - &(&k * &ux);
        let e = &(&ut - &(&f * &uyy)) + &(&k * &ux);
        let s = Substitution::new().bind(Symbol::jet(1, 0, 0), rhs);
        assert!(e.substitute(&s).unwrap().is_zero());
    }

    #[test]
    fn kernel_templates() {
        let u = Symbol::Base(BaseVar::U);
        let n = Expr::param("n");
        let s = Substitution::new().bind_kernel("k", u.clone(), Expr::u().pow(&n).unwrap());
        let k = Expr::opaque("k", &Expr::u());
        assert_eq!(k.substitute(&s).unwrap(), Expr::u().pow(&n).unwrap());
        let k1 = Expr::opaque_derivative("k", 1, &Expr::u());
        let expect = &n * &Expr::u().pow(&(&n - &Expr::one())).unwrap();
        assert_eq!(k1.substitute(&s).unwrap(), expect);
        let f = Expr::opaque("f", &Expr::t());
        let s = Substitution::new().bind_kernel("f", Symbol::Base(BaseVar::T), Expr::one());
        assert_eq!(f.substitute(&s).unwrap(), Expr::one());
    }

    #[test]
    fn function_bindings() {
        let phi = Expr::func("phi", &[BaseVar::T, BaseVar::X]);
        let phi_x = phi.diff(&Symbol::Base(BaseVar::X));
        let body = &Expr::t() * &Expr::x().powi(2);
        let s = Substitution::new().bind_func("phi", body);
        assert_eq!(
            phi_x.substitute(&s).unwrap(),
            (&Expr::t() * &Expr::x()).scale(&Q::from_integer(2.into()))
        );
    }
}
