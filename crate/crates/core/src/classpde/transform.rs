//! Point transformations between members of the class and their certified
//! action on the arbitrary elements.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use symcore::{parse, BaseVar, Expr, ParameterContext, Substitution, Symbol};

use super::equation::{
    opaque_element, params_from_file, params_to_file, parse_element, ClassEquation, ParamsFile,
    ELEMENTS,
};
use crate::error::{Error, Result};
use crate::jetspace::total_derivative;

/// How a transformation acts on one arbitrary element.
#[derive(Debug, Clone, PartialEq)]
pub enum ElementMap {
    /// The new element at the image point, written in the old variables and the
    /// old elements `f(t)`, `g(t)`, `G(t)`, `k(u)`, `K(u)`.
    Template(Expr),
    /// The new element outright, as a function of the new variable.
    Fixed(Expr),
}

/// `(t, x, y, u) ↦ (T, X, Y, U)` with its inverse and element maps.
#[derive(Debug, Clone, PartialEq)]
pub struct PointTransformation {
    pub ctx: ParameterContext,
    /// Components in the old variables.
    pub forward: [Expr; 4],
    /// Old variables in terms of the new ones (which reuse the names t, x, y, u).
    pub inverse: [Expr; 4],
    pub elements: BTreeMap<String, ElementMap>,
    /// Elements the source equation must have, e.g. `g = 1`.
    pub class: BTreeMap<String, Expr>,
    /// Expressions that must not vanish identically.
    pub nonzero: Vec<Expr>,
}

fn var(v: BaseVar) -> Symbol {
    Symbol::Base(v)
}

fn depends_only_on(e: &Expr, v: BaseVar) -> bool {
    e.free_symbols()
        .iter()
        .all(|s| s.is_param() || *s == Symbol::Base(v))
}

fn depends_on(e: &Expr, v: BaseVar) -> bool {
    e.contains_symbol(&var(v))
}

/// Kernel bindings replacing the element kernels by the elements of `e`.
pub fn element_bindings(e: &ClassEquation) -> Substitution {
    let mut s = Substitution::new();
    for (name, v) in ELEMENTS {
        if let Some(val) = e.element(name) {
            if val != opaque_element(name) {
                s.set_kernel(name, var(v), val);
            }
        }
    }
    s
}

impl PointTransformation {
    pub fn forward(&self) -> &[Expr; 4] {
        &self.forward
    }

    pub fn inverse(&self) -> &[Expr; 4] {
        &self.inverse
    }

    pub fn jacobian(&self) -> [[Expr; 4]; 4] {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| self.forward[i].diff(&var(BaseVar::ALL[j])))
        })
    }

    pub fn jacobian_determinant(&self) -> Expr {
        determinant(self.jacobian().map(|r| r.to_vec()).as_ref())
    }

    /// Substitutes an assignment of the base variables into each forward component.
    pub fn compose_after(&self, first: &[Expr; 4]) -> Result<[Expr; 4]> {
        let s = base_substitution(first);
        let out: Vec<Expr> = self
            .forward
            .iter()
            .map(|c| c.substitute(&s))
            .collect::<symcore::Result<_>>()?;
        Ok(out.try_into().expect("four components"))
    }

    /// Binds the element kernels occurring in the maps (notably `G`) to the
    /// elements of `e`.
    pub fn instantiate(&self, e: &ClassEquation) -> Result<PointTransformation> {
        let s = element_bindings(e);
        let sub = |c: &Expr| c.substitute(&s);
        let forward: Vec<Expr> = self
            .forward
            .iter()
            .map(sub)
            .collect::<symcore::Result<_>>()?;
        let inverse: Vec<Expr> = self
            .inverse
            .iter()
            .map(sub)
            .collect::<symcore::Result<_>>()?;
        let mut out = self.clone();
        out.forward = forward.try_into().expect("four components");
        out.inverse = inverse.try_into().expect("four components");
        out.nonzero = self
            .nonzero
            .iter()
            .map(sub)
            .collect::<symcore::Result<_>>()?;
        Ok(out)
    }

    /// Substitutes values for parameters in every component.
    pub fn substitute(&self, s: &Substitution) -> Result<PointTransformation> {
        let sub = |c: &Expr| c.substitute(s);
        let mut out = self.clone();
        out.forward = self.forward.clone().try_map_arr(sub)?;
        out.inverse = self.inverse.clone().try_map_arr(sub)?;
        for m in out.elements.values_mut() {
            *m = match m {
                ElementMap::Template(e) => ElementMap::Template(sub(e)?),
                ElementMap::Fixed(e) => ElementMap::Fixed(sub(e)?),
            };
        }
        for c in out.class.values_mut() {
            *c = sub(c)?;
        }
        out.nonzero = self
            .nonzero
            .iter()
            .map(sub)
            .collect::<symcore::Result<_>>()?;
        Ok(out)
    }

    /// Inverse-then-forward and forward-then-inverse must both be the identity.
    pub fn check_inverse(&self) -> Result<()> {
        let ids = BaseVar::ALL.map(Expr::base);
        let fwd_inv = base_substitution(&self.inverse);
        let inv_fwd = base_substitution(&self.forward);
        for (i, id) in ids.iter().enumerate() {
            let a = &self.forward[i].substitute(&fwd_inv)? - id;
            if !a.is_zero() {
                return Err(Error::certification(
                    format!("forward∘inverse in {}", BaseVar::ALL[i].name()),
                    &a,
                ));
            }
            let b = &self.inverse[i].substitute(&inv_fwd)? - id;
            if !b.is_zero() {
                return Err(Error::certification(
                    format!("inverse∘forward in {}", BaseVar::ALL[i].name()),
                    &b,
                ));
            }
        }
        Ok(())
    }

    /// Every nondegeneracy condition is a nonzero expression.
    pub fn check_nonzero(&self) -> Result<()> {
        for c in &self.nonzero {
            if c.is_zero() {
                return Err(Error::Constraint(format!(
                    "nondegeneracy condition {c} ≠ 0 fails"
                )));
            }
        }
        if self.jacobian_determinant().is_zero() {
            return Err(Error::Constraint("transformation is not invertible".into()));
        }
        Ok(())
    }

    pub fn to_file(&self) -> TransformationFile {
        let comp = |c: &[Expr; 4]| {
            BaseVar::ALL
                .iter()
                .zip(c)
                .map(|(v, e)| (v.name().to_string(), e.to_string()))
                .collect()
        };
        TransformationFile {
            schema: Some(1),
            params: params_to_file(&self.ctx),
            forward: comp(&self.forward),
            inverse: comp(&self.inverse),
            elements: self
                .elements
                .iter()
                .map(|(n, m)| {
                    let f = match m {
                        ElementMap::Template(e) => ElementMapFile::Template(e.to_string()),
                        ElementMap::Fixed(e) => ElementMapFile::Fixed {
                            fixed: e.to_string(),
                        },
                    };
                    (n.clone(), f)
                })
                .collect(),
            class: self
                .class
                .iter()
                .map(|(n, e)| (n.clone(), e.to_string()))
                .collect(),
            nonzero: self.nonzero.iter().map(Expr::to_string).collect(),
        }
    }
}

trait TryMapArr {
    fn try_map_arr(self, f: impl Fn(&Expr) -> symcore::Result<Expr>) -> Result<[Expr; 4]>;
}

impl TryMapArr for [Expr; 4] {
    fn try_map_arr(self, f: impl Fn(&Expr) -> symcore::Result<Expr>) -> Result<[Expr; 4]> {
        let v: Vec<Expr> = self.iter().map(f).collect::<symcore::Result<_>>()?;
        Ok(v.try_into().expect("four components"))
    }
}

pub fn base_substitution(values: &[Expr; 4]) -> Substitution {
    let mut s = Substitution::new();
    for (v, e) in BaseVar::ALL.iter().zip(values) {
        s.set(var(*v), e.clone());
    }
    s
}

/// Cofactor expansion; the matrices here are at most 4×4 and sparse.
pub fn determinant(m: &[Vec<Expr>]) -> Expr {
    match m.len() {
        0 => Expr::one(),
        1 => m[0][0].clone(),
        n => {
            let mut sum = Expr::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Expr>> = m[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != j)
                            .map(|(_, e)| e.clone())
                            .collect()
                    })
                    .collect();
                let term = &m[0][j] * &determinant(&minor);
                sum = if j % 2 == 0 {
                    &sum + &term
                } else {
                    &sum - &term
                };
            }
            sum
        }
    }
}

/// Evaluates one element map of `t` on the source `e` as a function of the new
/// variable.
fn new_element(
    name: &str,
    map: &ElementMap,
    bindings: &Substitution,
    t: &PointTransformation,
) -> Result<Expr> {
    let v = ELEMENTS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, v)| *v)
        .expect("known element");
    let out = match map {
        ElementMap::Fixed(e) => e.clone(),
        ElementMap::Template(tpl) => {
            let tpl = tpl.substitute(bindings)?;
            let inv = &t.inverse[BaseVar::ALL.iter().position(|b| *b == v).expect("base var")];
            if !depends_only_on(inv, v) {
                return Err(Error::Invalid(format!(
                    "element {name}: inverse map {} = {inv} must depend on {} only",
                    v.name(),
                    v.name()
                )));
            }
            tpl.subs(&var(v), inv)?
        }
    };
    if !depends_only_on(&out, v) {
        return Err(Error::Invalid(format!(
            "element {name} maps to {out}, which depends on more than {}",
            v.name()
        )));
    }
    Ok(out)
}

/// Applies `t` to `e` and certifies the result: the transformed equation, pulled
/// back through `t`, must vanish on solutions of `e`.
pub fn apply_equivalence(e: &ClassEquation, t: &PointTransformation) -> Result<ClassEquation> {
    for (name, required) in &t.class {
        let have = e
            .element(name)
            .ok_or_else(|| Error::ClassMismatch(format!("{name} is undefined")))?;
        if !(&have - required).is_zero() {
            return Err(Error::ClassMismatch(format!(
                "transformation requires {name} = {required}, equation has {name} = {have}"
            )));
        }
    }
    let t = t.instantiate(e)?;
    t.check_nonzero()?;
    let [tt, xx, yy, uu] = &t.forward;
    if !depends_only_on(tt, BaseVar::T)
        || depends_on(xx, BaseVar::Y)
        || depends_on(xx, BaseVar::U)
        || !depends_only_on(yy, BaseVar::Y)
        || depends_on(uu, BaseVar::Y)
    {
        return Err(Error::Unsupported(
            "certification needs T(t), X(t,x), Y(y) and U(t,x,u)".into(),
        ));
    }
    let bindings = element_bindings(e);
    let map = |name: &str| -> Result<Option<Expr>> {
        t.elements
            .get(name)
            .map(|m| new_element(name, m, &bindings, &t))
            .transpose()
    };
    let missing = |n: &str| Error::Invalid(format!("transformation has no map for element {n}"));
    let mut ctx = e.ctx.clone();
    ctx.merge(&t.ctx)?;
    let out = ClassEquation {
        f: map("f")?.ok_or_else(|| missing("f"))?,
        g: map("g")?.ok_or_else(|| missing("g"))?,
        k: map("k")?.ok_or_else(|| missing("k"))?,
        big_k: if e.big_k.is_some() { map("K")? } else { None },
        big_g: map("G")?,
        ctx,
    };
    certify(e, &t, &out)?;
    out.validate()?;
    Ok(out)
}

/// `ũ_t̃ − F̃ ũ_ỹỹ + g̃ k̃ ũ_x̃` in old coordinates, reduced modulo `e`.
pub fn certification_residual(
    e: &ClassEquation,
    t: &PointTransformation,
    out: &ClassEquation,
) -> Result<Expr> {
    let [tt, xx, yy, uu] = &t.forward;
    let x_x = xx.diff(&var(BaseVar::X));
    let t_t = tt.diff(&var(BaseVar::T));
    let x_t = xx.diff(&var(BaseVar::T));
    let y_y = yy.diff(&var(BaseVar::Y));
    let dx = |h: &Expr| -> Result<Expr> { Ok(total_derivative(h, BaseVar::X)?.try_div(&x_x)?) };
    let dy = |h: &Expr| -> Result<Expr> { Ok(total_derivative(h, BaseVar::Y)?.try_div(&y_y)?) };
    let dt = |h: &Expr| -> Result<Expr> {
        let a = &total_derivative(h, BaseVar::T)? - &(&x_t * &dx(h)?);
        Ok(a.try_div(&t_t)?)
    };
    let u_x = dx(uu)?;
    let u_yy = dy(&dy(uu)?)?;
    let u_t = dt(uu)?;
    let at_t = |h: &Expr| h.subs(&var(BaseVar::T), tt);
    let f_t = at_t(&out.f)?;
    let g_t = at_t(&out.g)?;
    let k_u = out.k.subs(&var(BaseVar::U), uu)?;
    let r = &(&u_t - &(&f_t * &u_yy)) + &(&(&g_t * &k_u) * &u_x);
    reduce_mod_equation(&r, e)
}

fn certify(e: &ClassEquation, t: &PointTransformation, out: &ClassEquation) -> Result<()> {
    let r = certification_residual(e, t, out)?;
    if !r.is_zero() {
        return Err(Error::certification("transformed equation", &r));
    }
    if let Some(big_g) = &out.big_g {
        let r = &big_g.diff(&var(BaseVar::T)) - &out.g;
        if !r.is_zero() {
            return Err(Error::certification("G̃_t = g̃", &r));
        }
    }
    if let Some(big_k) = &out.big_k {
        let r = &big_k.diff(&var(BaseVar::U)) - &out.k;
        if !r.is_zero() {
            return Err(Error::certification("K̃_u = k̃", &r));
        }
    }
    Ok(())
}

/// Eliminates `u_t`, `u_tx`, `u_ty` using the equation and its first derivatives.
pub fn reduce_mod_equation(r: &Expr, e: &ClassEquation) -> Result<Expr> {
    let rhs = e.rhs();
    let mut s = Substitution::new();
    s.set(Symbol::jet(1, 0, 0), rhs.clone());
    let mut needs = false;
    for j in crate::jetspace::jets_in(r) {
        if j.count(BaseVar::T) == 0 {
            continue;
        }
        match (
            j.count(BaseVar::T),
            j.count(BaseVar::X),
            j.count(BaseVar::Y),
        ) {
            (1, 0, 0) => {}
            (1, 1, 0) | (1, 0, 1) => needs = true,
            _ => {
                return Err(Error::Unsupported(format!(
                    "cannot reduce u_{} modulo the equation",
                    j.letters()
                )))
            }
        }
    }
    if needs {
        s.set(Symbol::jet(1, 1, 0), total_derivative(&rhs, BaseVar::X)?);
        s.set(Symbol::jet(1, 0, 1), total_derivative(&rhs, BaseVar::Y)?);
    }
    Ok(r.substitute(&s)?)
}

/// On-disk point transformation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformationFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<u32>,
    #[serde(default)]
    pub params: ParamsFile,
    pub forward: BTreeMap<String, String>,
    pub inverse: BTreeMap<String, String>,
    pub elements: BTreeMap<String, ElementMapFile>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub class: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub nonzero: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementMapFile {
    Template(String),
    Fixed { fixed: String },
}

fn components(
    block: &BTreeMap<String, String>,
    what: &str,
    ctx: &ParameterContext,
) -> Result<[Expr; 4]> {
    for k in block.keys() {
        if BaseVar::from_name(k).is_none() {
            return Err(Error::Schema(format!("{what}: unknown variable `{k}`")));
        }
    }
    let v: Vec<Expr> = BaseVar::ALL
        .iter()
        .map(|b| {
            let src = block.get(b.name()).ok_or_else(|| {
                Error::Schema(format!("{what}: missing component `{}`", b.name()))
            })?;
            Ok(parse(src, ctx)?)
        })
        .collect::<Result<_>>()?;
    Ok(v.try_into().expect("four components"))
}

impl TransformationFile {
    pub fn to_transformation(&self) -> Result<PointTransformation> {
        if let Some(v) = self.schema {
            if v != 1 {
                return Err(Error::Schema(format!(
                    "unsupported transformation schema {v}"
                )));
            }
        }
        let ctx = params_from_file(&self.params)?;
        let mut elements = BTreeMap::new();
        for (name, m) in &self.elements {
            if !ELEMENTS.iter().any(|(n, _)| n == name) {
                return Err(Error::Schema(format!("unknown element `{name}`")));
            }
            let m = match m {
                ElementMapFile::Template(s) => ElementMap::Template(parse(s, &ctx)?),
                ElementMapFile::Fixed { fixed } => {
                    ElementMap::Fixed(parse_element(name, fixed, &ctx)?)
                }
            };
            elements.insert(name.clone(), m);
        }
        let t = PointTransformation {
            forward: components(&self.forward, "forward", &ctx)?,
            inverse: components(&self.inverse, "inverse", &ctx)?,
            elements,
            class: self
                .class
                .iter()
                .map(|(n, s)| Ok((n.clone(), parse(s, &ctx)?)))
                .collect::<Result<_>>()?,
            nonzero: self
                .nonzero
                .iter()
                .map(|s| Ok(parse(s, &ctx)?))
                .collect::<Result<_>>()?,
            ctx,
        };
        t.check_inverse()?;
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scaling() -> PointTransformation {
        // t̃ = 4t, x̃ = 2x, ỹ = 3y, ũ = u
        PointTransformation {
            ctx: ParameterContext::new(),
            forward: [
                Expr::int(4) * Expr::t(),
                Expr::int(2) * Expr::x(),
                Expr::int(3) * Expr::y(),
                Expr::u(),
            ],
            inverse: [
                Expr::t() / Expr::int(4),
                Expr::x() / Expr::int(2),
                Expr::y() / Expr::int(3),
                Expr::u(),
            ],
            elements: BTreeMap::from([
                (
                    "f".into(),
                    ElementMap::Template(Expr::frac(9, 4) * opaque_element("f")),
                ),
                (
                    "g".into(),
                    ElementMap::Template(Expr::frac(1, 2) * opaque_element("g")),
                ),
                ("k".into(), ElementMap::Template(opaque_element("k"))),
            ]),
            class: BTreeMap::new(),
            nonzero: vec![],
        }
    }

    #[test]
    fn scaling_is_certified() {
        let t = scaling();
        t.check_inverse().unwrap();
        assert_eq!(t.jacobian_determinant(), Expr::int(24));
        let out = apply_equivalence(&ClassEquation::generic(), &t).unwrap();
        let s = Expr::t() / Expr::int(4);
        assert_eq!(out.f, Expr::frac(9, 4) * Expr::opaque("f", &s));
    }

    #[test]
    fn wrong_element_map_is_rejected() {
        let mut t = scaling();
        t.elements
            .insert("f".into(), ElementMap::Template(opaque_element("f")));
        assert!(matches!(
            apply_equivalence(&ClassEquation::generic(), &t),
            Err(Error::Certification { .. })
        ));
        let mut t = scaling();
        t.inverse[1] = Expr::x();
        assert!(t.check_inverse().is_err());
    }
}
