//! Expression grammar.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' unary)?          right-associative
//! atom   := integer | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Identifiers resolve to `t, x, y, u`, jet coordinates `u_<letters>`, the
//! constant `e`, declared parameters, built-in kernels, opaque kernels (and their
//! derivative kernels `name_dN`), and declared unknown functions together with
//! their partial derivatives (`phi_xy(t,x,y)`).

use num_bigint::BigInt;

use crate::atom::FuncApp;
use crate::context::ParameterContext;
use crate::error::{Result, SymError};
use crate::expr::Expr;
use crate::kernel::{Builtin, KernelRegistry};
use crate::symbol::{BaseVar, JetIndex, Symbol};
use crate::Q;

/// Parse tree; positions are byte offsets into the source.
#[derive(Debug, Clone, PartialEq)]
pub enum Ast {
    Num(BigInt),
    Ident(String, usize),
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, Box<Ast>),
    Call(String, Vec<Ast>, usize),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len()
                && (bytes[i] == b'.' || bytes[i].is_ascii_alphabetic() || bytes[i] == b'_')
            {
                return Err(SymError::Syntax {
                    pos: i,
                    msg: "malformed number".into(),
                });
            }
            let n: BigInt = src[start..i].parse().expect("digits");
            out.push((Tok::Num(n), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
        } else if "+-*/^(),".contains(c) {
            out.push((Tok::Op(c), i));
            i += 1;
        } else {
            // the character may be multi-byte
            let ch = src[i..].chars().next().expect("in bounds");
            return Err(SymError::Syntax {
                pos: i,
                msg: format!("unexpected character `{ch}`"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    i: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(SymError::Syntax {
                pos: self.pos(),
                msg: format!("expected `{c}`"),
            })
        }
    }

    fn expr(&mut self) -> Result<Ast> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Ast> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Ast::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Ast::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Ast> {
        if self.eat('-') {
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast> {
        let base = self.atom()?;
        if self.eat('^') {
            let exp = self.unary()?;
            return Ok(Ast::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Ast> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.i += 1;
                Ok(Ast::Num(n))
            }
            Some(Tok::Ident(name)) => {
                self.i += 1;
                if self.eat('(') {
                    let mut args = vec![self.expr()?];
                    while self.eat(',') {
                        args.push(self.expr()?);
                    }
                    self.expect(')')?;
                    Ok(Ast::Call(name, args, pos))
                } else {
                    Ok(Ast::Ident(name, pos))
                }
            }
            Some(Tok::Op('(')) => {
                self.i += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Op(c)) => Err(SymError::Syntax {
                pos,
                msg: format!("unexpected `{c}`"),
            }),
            None => Err(SymError::Syntax {
                pos,
                msg: "unexpected end of input".into(),
            }),
        }
    }
}

/// Parses source text into a tree without resolving names.
pub fn parse_ast(src: &str) -> Result<Ast> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        i: 0,
        end: src.len(),
    };
    let e = p.expr()?;
    if p.i != p.toks.len() {
        return Err(SymError::Syntax {
            pos: p.pos(),
            msg: "unexpected trailing input".into(),
        });
    }
    Ok(e)
}

/// Parses and normalizes.
pub fn parse(src: &str, ctx: &ParameterContext) -> Result<Expr> {
    lower(&parse_ast(src)?, ctx)
}

/// What a call name refers to.
pub(crate) enum Callee {
    Builtin(Builtin),
    Opaque(String, u8),
    Func(FuncApp),
}

pub(crate) fn resolve_callee(name: &str, ctx: &ParameterContext) -> Option<Callee> {
    if let Some(b) = Builtin::from_name(name) {
        return Some(Callee::Builtin(b));
    }
    if let Some(vars) = ctx.func(name) {
        return Some(Callee::Func(FuncApp::new(name, vars)));
    }
    if let Some((base, suffix)) = name.rsplit_once('_') {
        if let Some(vars) = ctx.func(base) {
            let mut f = FuncApp::new(base, vars);
            for ch in suffix.chars() {
                let v = BaseVar::from_name(&ch.to_string())?;
                f = f.differentiated(v)?;
            }
            return Some(Callee::Func(f));
        }
    }
    let reg = KernelRegistry::standard();
    let (base, order) = KernelRegistry::split_derivative_name(name);
    if reg.is_standard_opaque(base) {
        return Some(Callee::Opaque(base.to_string(), order));
    }
    None
}

/// Resolves a bare identifier to a symbol, `None` for the constant `e`.
pub(crate) fn resolve_ident(
    name: &str,
    pos: usize,
    ctx: &ParameterContext,
) -> Result<Option<Symbol>> {
    if name == "e" {
        return Ok(None);
    }
    if let Some(s) = Symbol::variable_from_name(name) {
        return Ok(Some(s));
    }
    if let Some(letters) = name.strip_prefix("u_") {
        if letters.len() > JetIndex::MAX_ORDER as usize
            && letters.chars().all(|c| "txy".contains(c))
        {
            return Err(SymError::OrderOverflow(name.to_string()));
        }
    }
    if ctx.is_declared(name) {
        return Ok(Some(Symbol::param(name)));
    }
    Err(SymError::Undeclared {
        name: name.to_string(),
        pos,
    })
}

fn lower(ast: &Ast, ctx: &ParameterContext) -> Result<Expr> {
    Ok(match ast {
        Ast::Num(n) => Expr::rational(Q::from_integer(n.clone())),
        Ast::Ident(name, pos) => match resolve_ident(name, *pos, ctx)? {
            Some(s) => Expr::sym(s),
            None => Expr::one().exp(),
        },
        Ast::Neg(a) => -lower(a, ctx)?,
        Ast::Add(a, b) => lower(a, ctx)? + lower(b, ctx)?,
        Ast::Sub(a, b) => lower(a, ctx)? - lower(b, ctx)?,
        Ast::Mul(a, b) => lower(a, ctx)? * lower(b, ctx)?,
        Ast::Div(a, b) => lower(a, ctx)?.try_div(&lower(b, ctx)?)?,
        Ast::Pow(a, b) => {
            let exponent = lower(b, ctx)?;
            if matches!(&**a, Ast::Ident(n, _) if n == "e") {
                exponent.exp()
            } else {
                lower(a, ctx)?.pow(&exponent)?
            }
        }
        Ast::Call(name, args, pos) => {
            let callee = resolve_callee(name, ctx).ok_or_else(|| SymError::Undeclared {
                name: name.clone(),
                pos: *pos,
            })?;
            match callee {
                Callee::Builtin(b) => {
                    let [arg] = args.as_slice() else {
                        return Err(arity(name, 1, args.len()));
                    };
                    b.apply(&lower(arg, ctx)?)?
                }
                Callee::Opaque(base, order) => {
                    let [arg] = args.as_slice() else {
                        return Err(arity(name, 1, args.len()));
                    };
                    Expr::opaque_derivative(&base, order, &lower(arg, ctx)?)
                }
                Callee::Func(f) => {
                    if args.len() != f.vars.len() {
                        return Err(arity(name, f.vars.len(), args.len()));
                    }
                    for (a, v) in args.iter().zip(&f.vars) {
                        let ok = matches!(a, Ast::Ident(n, _) if n == v.name());
                        if !ok {
                            return Err(SymError::Syntax {
                                pos: *pos,
                                msg: format!(
                                    "arguments of `{name}` must be its declared variables"
                                ),
                            });
                        }
                    }
                    Expr::func_app(f)
                }
            }
        }
    })
}

fn arity(name: &str, expected: usize, found: usize) -> SymError {
    SymError::Arity {
        name: name.to_string(),
        expected,
        found,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::ParameterContext;

    fn ctx() -> ParameterContext {
        let mut c = ParameterContext::new();
        c.declare("sigma", &[]).unwrap();
        c.declare("n", &[]).unwrap();
        c.declare_func("phi", &[BaseVar::T, BaseVar::X, BaseVar::Y])
            .unwrap();
        c
    }

    #[test]
    fn precedence_and_associativity() {
        let c = ctx();
        assert_eq!(parse("2^3^2", &c).unwrap(), Expr::int(512));
        assert_eq!(parse("-2^2", &c).unwrap(), Expr::int(-4));
        assert_eq!(parse("1 - 2 - 3", &c).unwrap(), Expr::int(-4));
        assert_eq!(parse("12/3/2", &c).unwrap(), Expr::int(2));
    }

    #[test]
    fn names_resolve() {
        let c = ctx();
        assert_eq!(parse("u_yx", &c).unwrap(), Expr::jet(0, 1, 1));
        assert!(matches!(parse("w", &c), Err(SymError::Undeclared { .. })));
        assert!(matches!(
            parse("sin(t, x)", &c),
            Err(SymError::Arity { .. })
        ));
        assert!(matches!(
            parse("t +", &c),
            Err(SymError::Syntax { pos: 3, .. })
        ));
        assert!(matches!(
            parse("u_tttt", &c),
            Err(SymError::OrderOverflow(_))
        ));
        let e = parse("phi_yx(t,x,y)", &c).unwrap();
        assert_eq!(e.to_string(), "phi_xy(t,x,y)");
        assert_eq!(
            parse("k_d2(u)", &c).unwrap(),
            Expr::opaque_derivative("k", 2, &Expr::u())
        );
    }

    #[test]
    fn euler_constant() {
        let c = ctx();
        assert_eq!(parse("e^t", &c).unwrap(), Expr::t().exp());
        assert_eq!(parse("ln(e)", &c).unwrap(), Expr::one());
    }
}
