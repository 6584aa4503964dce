//! Exact symbolic expressions over a fixed set of transcendental and opaque
//! kernels.
//!
//! Expressions are reduced rational functions over Q in independent atoms
//! (symbols, kernel applications, unknown functions), with exponential
//! monomial factors `exp(L)`. Construction always normalizes, so an
//! expression is identically zero exactly when [`Expr::is_zero`] holds.

mod atom;
mod collect;
mod context;
mod error;
mod eval;
mod expr;
mod kernel;
mod mpoly;
mod parse;
mod poly;
mod print;
mod subst;
mod symbol;

pub use atom::{Atom, FuncApp};
pub use collect::{collect, rational_terms, reconstruct, split_over_constants, SymMonomial};
pub use context::{is_zero, parse_rational, Constraint, ParameterContext};
pub use error::{Result, SymError};
pub use eval::{q_to_f64, Valuation};
pub use expr::Expr;
pub use kernel::{Builtin, Kernel, KernelRegistry, Opaque, OpaqueRule};
pub use parse::{parse, parse_ast, Ast};
pub use poly::{Mono, Poly};
pub use print::render;
pub use subst::Substitution;
pub use symbol::{BaseVar, JetIndex, Symbol};

/// Exact rational numbers.
pub type Q = num_rational::BigRational;
