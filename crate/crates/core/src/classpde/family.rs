//! Parametrized families of point transformations (the equivalence groups of
//! the class and its subclasses) and verification of their group properties.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use symcore::{parse, BaseVar, Expr, ParameterContext, Substitution, Symbol};

use super::equation::{opaque_element, params_from_file, ClassEquation, ParamsFile};
use super::transform::{
    apply_equivalence, ElementMapFile, PointTransformation, TransformationFile,
};
use crate::error::{Error, Result};

const SECOND_SUFFIX: &str = "p";

#[derive(Debug, Clone, Deserialize)]
struct FamiliesFile {
    schema: u32,
    families: Vec<FamilyFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct LawFile {
    params: BTreeMap<String, String>,
    #[serde(default)]
    kernels: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Deserialize)]
struct FamilyFile {
    id: u32,
    title: String,
    #[serde(default)]
    class: BTreeMap<String, String>,
    #[serde(default)]
    potential: bool,
    params: ParamsFile,
    #[serde(default)]
    kernels: Vec<String>,
    #[serde(default)]
    nonzero: Vec<String>,
    forward: BTreeMap<String, String>,
    inverse: BTreeMap<String, String>,
    elements: BTreeMap<String, ElementMapFile>,
    composition: LawFile,
    inversion: LawFile,
    #[serde(default)]
    usual: BTreeMap<String, String>,
}

/// Substitution rules for parameters and family kernels.
#[derive(Debug, Clone)]
pub struct Law {
    pub params: BTreeMap<String, Expr>,
    pub kernels: BTreeMap<String, Expr>,
}

impl Law {
    fn substitution(&self) -> Substitution {
        let mut s = Substitution::new();
        for (p, e) in &self.params {
            s.set(Symbol::param(p), e.clone());
        }
        for (k, e) in &self.kernels {
            s.set_kernel(k, Symbol::Base(BaseVar::T), e.clone());
        }
        s
    }
}

/// A group of point transformations given by a generic member.
#[derive(Debug, Clone)]
pub struct TheoremFamily {
    pub id: u32,
    pub title: String,
    /// The generic member, parameters left symbolic.
    pub generic: PointTransformation,
    /// Parameters of two factors: the plain names and their suffixed copies.
    pub law_ctx: ParameterContext,
    pub potential: bool,
    /// Family kernels such as `T`; each has an inverse kernel `Tinv`.
    pub kernels: Vec<String>,
    pub composition: Law,
    pub inversion: Law,
    /// Parameter values singling out the usual equivalence subgroup.
    pub usual: BTreeMap<String, Expr>,
}

fn second_name(p: &str) -> String {
    format!("{p}{SECOND_SUFFIX}")
}

/// Renaming for the second factor of a product: parameters get the suffix,
/// `T` becomes `S`.
fn second_kernel(k: &str) -> String {
    match k {
        "T" => "S".into(),
        other => format!("{other}2"),
    }
}

impl FamilyFile {
    fn build(&self) -> Result<TheoremFamily> {
        let ctx = params_from_file(&self.params)?;
        let mut law_ctx = ctx.clone();
        for (p, cons) in ctx.params() {
            law_ctx.declare(&second_name(p), cons)?;
        }
        let tf = TransformationFile {
            schema: Some(1),
            params: self.params.clone(),
            forward: self.forward.clone(),
            inverse: self.inverse.clone(),
            elements: self.elements.clone(),
            class: self.class.clone(),
            nonzero: self.nonzero.clone(),
        };
        let generic = tf.to_transformation()?;
        let law = |l: &LawFile| -> Result<Law> {
            for p in l.params.keys() {
                if !ctx.is_declared(p) {
                    return Err(Error::Schema(format!(
                        "family {}: law for unknown `{p}`",
                        self.id
                    )));
                }
            }
            Ok(Law {
                params: l
                    .params
                    .iter()
                    .map(|(p, s)| Ok((p.clone(), parse(s, &law_ctx)?)))
                    .collect::<Result<_>>()?,
                kernels: l
                    .kernels
                    .iter()
                    .map(|(k, s)| Ok((k.clone(), parse(s, &law_ctx)?)))
                    .collect::<Result<_>>()?,
            })
        };
        let composition = law(&self.composition)?;
        let inversion = law(&self.inversion)?;
        for (p, _) in ctx.params() {
            if !composition.params.contains_key(p) || !inversion.params.contains_key(p) {
                return Err(Error::Schema(format!(
                    "family {}: no group law for `{p}`",
                    self.id
                )));
            }
        }
        Ok(TheoremFamily {
            id: self.id,
            title: self.title.clone(),
            generic,
            law_ctx,
            potential: self.potential,
            kernels: self.kernels.clone(),
            composition,
            inversion,
            usual: self
                .usual
                .iter()
                .map(|(p, s)| Ok((p.clone(), parse(s, &ctx)?)))
                .collect::<Result<_>>()?,
        })
    }
}

/// The bundled families, parsed once.
pub fn families() -> &'static [TheoremFamily] {
    static CELL: OnceLock<Vec<TheoremFamily>> = OnceLock::new();
    CELL.get_or_init(|| {
        let file: FamiliesFile = serde_json::from_str(include_str!("../../data/families.json"))
            .expect("bundled families parse");
        assert_eq!(file.schema, 1);
        file.families
            .iter()
            .map(|f| f.build().expect("bundled family is well formed"))
            .collect()
    })
}

pub fn family(id: u32) -> Result<&'static TheoremFamily> {
    families()
        .iter()
        .find(|f| f.id == id)
        .ok_or_else(|| Error::Invalid(format!("no transformation family {id}")))
}

impl TheoremFamily {
    /// The member with parameters and kernels replaced according to `law`.
    pub fn member_with(&self, law: &Law) -> Result<PointTransformation> {
        let mut t = self
            .generic
            .substitute(&law.substitution())
            .map_err(|e| match e {
                Error::Sym(symcore::SymError::DivisionByZero) => Error::Constraint(format!(
                    "parameter values make a member of family {} degenerate",
                    self.id
                )),
                other => other,
            })?;
        t.ctx = self.law_ctx.clone();
        Ok(t)
    }

    /// Member with parameter values; unspecified parameters stay symbolic.
    pub fn member(&self, values: &BTreeMap<String, Expr>) -> Result<PointTransformation> {
        for p in values.keys() {
            if !self.generic.ctx.is_declared(p) {
                return Err(Error::Invalid(format!(
                    "family {} has no parameter `{p}`",
                    self.id
                )));
            }
        }
        let mut t = self.member_with(&Law {
            params: values.clone(),
            kernels: BTreeMap::new(),
        })?;
        let mut ctx = ParameterContext::new();
        for (p, cons) in self.generic.ctx.params() {
            if !values.contains_key(p) {
                ctx.declare(p, cons)?;
            }
        }
        t.ctx = ctx;
        Ok(t)
    }

    /// The second factor of a product, with primed parameters and kernels.
    fn second_member(&self) -> Result<PointTransformation> {
        let mut law = Law {
            params: BTreeMap::new(),
            kernels: BTreeMap::new(),
        };
        for (p, _) in self.generic.ctx.params() {
            law.params
                .insert(p.to_string(), Expr::param(&second_name(p)));
        }
        for k in &self.kernels {
            let k2 = second_kernel(k);
            law.kernels.insert(k.clone(), Expr::opaque(&k2, &Expr::t()));
            law.kernels.insert(
                format!("{k}inv"),
                Expr::opaque(&format!("{k2}inv"), &Expr::t()),
            );
        }
        self.member_with(&law)
    }

    /// A member of the class the family acts on, with every free element arbitrary.
    pub fn generic_equation(&self) -> ClassEquation {
        let mut e = ClassEquation::generic();
        for (name, value) in &self.generic.class {
            match name.as_str() {
                "f" => e.f = value.clone(),
                "g" => e.g = value.clone(),
                "k" => e.k = value.clone(),
                _ => {}
            }
        }
        if self.potential && e.is_arbitrary("k") {
            e.k = Expr::opaque_derivative("K", 1, &Expr::u());
            e.big_k = Some(opaque_element("K"));
        }
        e
    }

    /// Checks closure of the family under composition and inversion, the
    /// certified action on the elements, and the usual subgroup.
    pub fn verify(&self) -> FamilyReport {
        let e = self.generic_equation();
        let mut checks = Vec::new();
        let mut record = |name: &str, r: Result<()>| {
            checks.push(CheckOutcome {
                check: name.to_string(),
                ok: r.is_ok(),
                detail: r.err().map(|e| e.to_string()),
            });
        };
        let tp = self.generic.clone();
        record("inverse maps", tp.check_inverse());
        let e1 = apply_equivalence(&e, &tp);
        record(
            "element maps certified",
            e1.as_ref().map(|_| ()).map_err(Clone::clone),
        );
        if let Ok(e1) = &e1 {
            record("composition", self.check_composition(&e, e1));
            record("inversion", self.check_inversion(&e, e1));
        }
        if !self.usual.is_empty() {
            record("usual subgroup", self.check_usual());
        }
        FamilyReport {
            id: self.id,
            title: self.title.clone(),
            ok: checks.iter().all(|c| c.ok),
            checks,
        }
    }

    fn check_composition(&self, e: &ClassEquation, e1: &ClassEquation) -> Result<()> {
        let tp = self.generic.instantiate(e)?;
        let tq = self.second_member()?;
        let e2 = apply_equivalence(e1, &tq)?;
        let tq = tq.instantiate(e1)?;
        let tc = self.member_with(&self.composition)?;
        let e3 = apply_equivalence(e, &tc)?;
        let tc = tc.instantiate(e)?;
        let composed = tq.compose_after(&tp.forward)?;
        for (i, (a, b)) in composed.iter().zip(&tc.forward).enumerate() {
            let r = a - b;
            if !r.is_zero() {
                return Err(Error::certification(
                    format!("composition, component {}", BaseVar::ALL[i].name()),
                    &r,
                ));
            }
        }
        same_elements(&e2, &e3, "composition")
    }

    fn check_inversion(&self, e: &ClassEquation, e1: &ClassEquation) -> Result<()> {
        let tp = self.generic.instantiate(e)?;
        let ti = self.member_with(&self.inversion)?;
        let back = apply_equivalence(e1, &ti)?;
        let ti = ti.instantiate(e1)?;
        for (i, (a, b)) in ti.forward.iter().zip(&tp.inverse).enumerate() {
            let r = a - b;
            if !r.is_zero() {
                return Err(Error::certification(
                    format!("inversion, component {}", BaseVar::ALL[i].name()),
                    &r,
                ));
            }
        }
        same_elements(&back, e, "inversion")
    }

    fn check_usual(&self) -> Result<()> {
        let mut s = Substitution::new();
        for (p, v) in &self.usual {
            s.set(Symbol::param(p), v.clone());
            s.set(Symbol::param(&second_name(p)), v.clone());
        }
        for (which, law) in [
            ("composition", &self.composition),
            ("inversion", &self.inversion),
        ] {
            for (p, v) in &self.usual {
                let r = &law.params[p].substitute(&s)? - v;
                if !r.is_zero() {
                    return Err(Error::certification(
                        format!("usual subgroup not closed under {which} in {p}"),
                        &r,
                    ));
                }
            }
        }
        let usual = self.generic.substitute(&s)?;
        for c in &usual.forward {
            for el in ["f", "g", "k", "K", "G"] {
                if c.kernel_names().iter().any(|n| &**n == el) {
                    return Err(Error::Invalid(format!(
                        "usual member depends on the element {el}: {c}"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn same_elements(a: &ClassEquation, b: &ClassEquation, what: &str) -> Result<()> {
    for name in ["f", "g", "k", "K", "G"] {
        let (x, y) = (a.element(name), b.element(name));
        if let (Some(x), Some(y)) = (&x, &y) {
            let r = x - y;
            if !r.is_zero() {
                return Err(Error::certification(format!("{what}: element {name}"), &r));
            }
        } else if name != "G" && x.is_some() != y.is_some() {
            return Err(Error::Invalid(format!(
                "{what}: element {name} defined on one side only"
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub check: String,
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub id: u32,
    pub title: String,
    pub ok: bool,
    pub checks: Vec<CheckOutcome>,
}

/// Verifies one bundled family.
pub fn verify_theorem_group(id: u32) -> Result<FamilyReport> {
    Ok(family(id)?.verify())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_families_load() {
        assert_eq!(families().len(), 6);
        for f in families() {
            f.generic.check_inverse().unwrap();
        }
    }

    #[test]
    fn gauged_class_group() {
        let r = verify_theorem_group(3).unwrap();
        assert!(r.ok, "{r:?}");
    }

    #[test]
    fn member_respects_nondegeneracy() {
        let f = family(3).unwrap();
        let t = f.member(&BTreeMap::from([("e1".to_string(), Expr::zero())]));
        assert!(matches!(t, Err(Error::Constraint(_))));
        let t = f
            .member(&BTreeMap::from([("d2".to_string(), Expr::int(2))]))
            .unwrap();
        assert!(apply_equivalence(&f.generic_equation(), &t).is_ok());
    }
}
