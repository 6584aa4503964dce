//! Kernel registry: the named single-argument functions an expression may contain
//! and their differentiation rules.
//!
//! Built-in transcendental kernels are `exp, ln, arctan, tan, sin, cos, sinh, cosh,
//! tanh`; of these only `ln, arctan, tan, sin, cos` survive as atoms. `exp` becomes
//! an exponential monomial factor, powers with non-integer exponents become
//! `exp(e*ln(b))` and the hyperbolic kernels are rewritten through `exp`.
//!
//! Opaque kernels (`f, g, k, K, G, T, ...`) are arbitrary smooth functions. Their
//! derivatives are the kernels `name_d1, name_d2, ...` with two exceptions:
//! the antiderivative kernel `G` differentiates to `g`, and a kernel named
//! `<X>inv` is the compositional inverse of `X`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::expr::Expr;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kernel {
    Ln,
    Arctan,
    Sin,
    Cos,
    Tan,
    Opaque(Opaque),
}

/// `name` differentiated `order` times.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Opaque {
    pub name: Arc<str>,
    pub order: u8,
}

impl Opaque {
    pub fn new(name: &str, order: u8) -> Opaque {
        Opaque {
            name: Arc::from(name),
            order,
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kernel::Ln => f.write_str("ln"),
            Kernel::Arctan => f.write_str("arctan"),
            Kernel::Sin => f.write_str("sin"),
            Kernel::Cos => f.write_str("cos"),
            Kernel::Tan => f.write_str("tan"),
            Kernel::Opaque(o) if o.order == 0 => f.write_str(&o.name),
            Kernel::Opaque(o) => write!(f, "{}_d{}", o.name, o.order),
        }
    }
}

/// How a built-in name behaves when applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Exp,
    Ln,
    Arctan,
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
}

impl Builtin {
    pub fn from_name(name: &str) -> Option<Builtin> {
        Some(match name {
            "exp" => Builtin::Exp,
            "ln" => Builtin::Ln,
            "arctan" => Builtin::Arctan,
            "sin" => Builtin::Sin,
            "cos" => Builtin::Cos,
            "tan" => Builtin::Tan,
            "sinh" => Builtin::Sinh,
            "cosh" => Builtin::Cosh,
            "tanh" => Builtin::Tanh,
            _ => return None,
        })
    }

    pub fn apply(self, arg: &Expr) -> crate::Result<Expr> {
        Ok(match self {
            Builtin::Exp => arg.exp(),
            Builtin::Ln => arg.ln()?,
            Builtin::Arctan => arg.arctan(),
            Builtin::Sin => arg.sin(),
            Builtin::Cos => arg.cos(),
            Builtin::Tan => arg.tan(),
            Builtin::Sinh => arg.sinh(),
            Builtin::Cosh => arg.cosh(),
            Builtin::Tanh => arg.tanh(),
        })
    }

    pub fn eval(self, z: f64) -> f64 {
        match self {
            Builtin::Exp => z.exp(),
            Builtin::Ln => z.ln(),
            Builtin::Arctan => z.atan(),
            Builtin::Sin => z.sin(),
            Builtin::Cos => z.cos(),
            Builtin::Tan => z.tan(),
            Builtin::Sinh => z.sinh(),
            Builtin::Cosh => z.cosh(),
            Builtin::Tanh => z.tanh(),
        }
    }
}

/// Differentiation behaviour of an opaque kernel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OpaqueRule {
    /// `X' = X_d1`, `X_d1' = X_d2`, ...
    Generic,
    /// `X' = base` (order zero only).
    AntiderivativeOf(String),
    /// `Xinv` with `Xinv(X(z)) = X(Xinv(z)) = z`, `Xinv' = 1/X'(Xinv)`.
    InverseOf(String),
}

/// Opaque kernel names and their rules. The standard registry declares the
/// arbitrary elements of the Kolmogorov class together with the antiderivative
/// kernel `G` and the inverse kernels used by gauging transformations.
#[derive(Debug, Clone)]
pub struct KernelRegistry {
    opaque: BTreeMap<String, OpaqueRule>,
}

impl KernelRegistry {
    pub fn standard() -> &'static KernelRegistry {
        static REG: OnceLock<KernelRegistry> = OnceLock::new();
        REG.get_or_init(|| {
            let mut opaque = BTreeMap::new();
            for name in ["f", "g", "k", "K", "T", "S"] {
                opaque.insert(name.to_string(), OpaqueRule::Generic);
            }
            opaque.insert("G".into(), OpaqueRule::AntiderivativeOf("g".into()));
            for name in ["G", "T", "S"] {
                opaque.insert(format!("{name}inv"), OpaqueRule::InverseOf(name.into()));
            }
            KernelRegistry { opaque }
        })
    }

    pub fn opaque_names(&self) -> impl Iterator<Item = &str> {
        self.opaque.keys().map(String::as_str)
    }

    pub fn is_standard_opaque(&self, name: &str) -> bool {
        self.opaque.contains_key(name)
    }

    /// Rule for any opaque name; undeclared names behave generically.
    pub fn rule(&self, name: &str) -> OpaqueRule {
        if let Some(r) = self.opaque.get(name) {
            return r.clone();
        }
        match name.strip_suffix("inv") {
            Some(base) if !base.is_empty() => OpaqueRule::InverseOf(base.to_string()),
            _ => OpaqueRule::Generic,
        }
    }

    /// `d/dz kernel(z)` evaluated at `arg`.
    pub fn derivative(&self, kernel: &Kernel, arg: &Expr) -> Expr {
        match kernel {
            Kernel::Ln => arg.recip(),
            Kernel::Arctan => (Expr::one() + arg.powi(2)).recip(),
            Kernel::Sin => arg.cos(),
            Kernel::Cos => -arg.sin(),
            Kernel::Tan => Expr::one() + arg.tan().powi(2),
            Kernel::Opaque(o) => match self.rule(&o.name) {
                OpaqueRule::AntiderivativeOf(base) if o.order == 0 => Expr::opaque(&base, arg),
                OpaqueRule::InverseOf(base) if o.order == 0 => {
                    let inner = Expr::opaque(&o.name, arg);
                    self.derivative(&Kernel::Opaque(Opaque::new(&base, 0)), &inner)
                        .recip()
                }
                _ => Expr::opaque_derivative(&o.name, o.order + 1, arg),
            },
        }
    }

    /// Splits `f_d2`-style names into the base name and derivative order.
    pub fn split_derivative_name(name: &str) -> (&str, u8) {
        if let Some(pos) = name.rfind("_d") {
            let digits = &name[pos + 2..];
            if !digits.is_empty() && pos > 0 && digits.bytes().all(|b| b.is_ascii_digit()) {
                if let Ok(n) = digits.parse::<u8>() {
                    return (&name[..pos], n);
                }
            }
        }
        (name, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_names() {
        assert_eq!(KernelRegistry::split_derivative_name("f_d2"), ("f", 2));
        assert_eq!(KernelRegistry::split_derivative_name("k"), ("k", 0));
        assert_eq!(KernelRegistry::split_derivative_name("_d1"), ("_d1", 0));
    }

    #[test]
    fn rules() {
        let r = KernelRegistry::standard();
        assert_eq!(r.rule("G"), OpaqueRule::AntiderivativeOf("g".into()));
        assert_eq!(r.rule("Winv"), OpaqueRule::InverseOf("W".into()));
        assert_eq!(r.rule("h"), OpaqueRule::Generic);
    }
}
