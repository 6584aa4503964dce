use std::sync::Arc;

use crate::expr::Expr;
use crate::kernel::Kernel;
use crate::symbol::{BaseVar, Symbol};

/// An indeterminate of the polynomial layer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Sym(Symbol),
    /// A single-argument kernel applied to a normalized argument.
    Kernel(Kernel, Expr),
    /// An unknown function of some of `t, x, y, u` (used for ansatz coefficients).
    Func(FuncApp),
}

/// `name_{J}(vars...)`: an unknown smooth function and one of its partial derivatives.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FuncApp {
    pub name: Arc<str>,
    pub vars: Vec<BaseVar>,
    /// Derivative counts, parallel to `vars`.
    pub derivs: Vec<u8>,
}

impl FuncApp {
    pub fn new(name: &str, vars: &[BaseVar]) -> FuncApp {
        FuncApp {
            name: Arc::from(name),
            vars: vars.to_vec(),
            derivs: vec![0; vars.len()],
        }
    }

    pub fn depends_on(&self, v: BaseVar) -> bool {
        self.vars.contains(&v)
    }

    pub fn differentiated(&self, v: BaseVar) -> Option<FuncApp> {
        let i = self.vars.iter().position(|w| *w == v)?;
        let mut f = self.clone();
        f.derivs[i] += 1;
        Some(f)
    }

    pub fn display_name(&self) -> String {
        let mut s = self.name.to_string();
        let suffix: String = self
            .vars
            .iter()
            .zip(&self.derivs)
            .flat_map(|(v, k)| std::iter::repeat_n(v.name(), *k as usize))
            .collect();
        if !suffix.is_empty() {
            s.push('_');
            s.push_str(&suffix);
        }
        s
    }
}

impl Atom {
    pub fn sym(&self) -> Option<&Symbol> {
        match self {
            Atom::Sym(s) => Some(s),
            _ => None,
        }
    }

    /// Whether the atom (transitively) involves symbol `s`.
    pub fn involves(&self, s: &Symbol) -> bool {
        match self {
            Atom::Sym(a) => a == s,
            Atom::Kernel(_, arg) => arg.contains_symbol(s),
            Atom::Func(f) => matches!(s, Symbol::Base(b) if f.depends_on(*b)),
        }
    }
}
