//! Reading equations, generators and transformations from files or from
//! inline `expr:` strings.

use std::collections::BTreeMap;
use std::path::Path;

use kolsym::classpde::{family, EquationFile, TransformationFile};
use kolsym::{ClassEquation, Error, PointTransformation, Result, VectorField};
use symcore::{parse_rational, ParameterContext, SymError, Q};

const INLINE: &str = "expr:";
const FAMILY: &str = "family:";

fn read(path: &str) -> Result<String> {
    std::fs::read_to_string(Path::new(path))
        .map_err(|e| Error::Invalid(format!("cannot read {path}: {e}")))
}

fn json<T: serde::de::DeserializeOwned>(src: &str, what: &str) -> Result<T> {
    serde_json::from_str(src).map_err(|e| Error::Schema(format!("{what}: {e}")))
}

/// `name=value` bindings with rational values.
pub fn bindings(items: &[String]) -> Result<BTreeMap<String, Q>> {
    let mut out = BTreeMap::new();
    for item in items {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| Error::Invalid(format!("expected name=value, got `{item}`")))?;
        let q = parse_rational(value.trim())
            .ok_or_else(|| Error::Invalid(format!("`{value}` is not a rational number")))?;
        out.insert(name.trim().to_string(), q);
    }
    Ok(out)
}

/// Retries `build` while it fails on undeclared identifiers, declaring each as
/// an unconstrained parameter. Inline input has no other way to declare them.
fn auto_declare<T>(
    ctx: &mut ParameterContext,
    mut build: impl FnMut(&ParameterContext) -> Result<T>,
) -> Result<T> {
    loop {
        match build(ctx) {
            Err(Error::Sym(SymError::Undeclared { name, .. })) if !ctx.is_declared(&name) => {
                ctx.declare(&name, &[])?;
            }
            other => return other,
        }
    }
}

/// An equation file, or `expr:f=...;g=...;k=...` with omitted elements arbitrary.
pub fn equation(src: &str) -> Result<ClassEquation> {
    let Some(body) = src.strip_prefix(INLINE) else {
        return json::<EquationFile>(&read(src)?, "equation")?.to_equation();
    };
    let mut file = EquationFile {
        schema: None,
        params: BTreeMap::new(),
        f: "arbitrary".into(),
        g: "arbitrary".into(),
        k: "arbitrary".into(),
        big_k: None,
        big_g: None,
    };
    for part in body.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| Error::Invalid(format!("expected element=expression, got `{part}`")))?;
        let value = value.trim().to_string();
        match name.trim() {
            "f" => file.f = value,
            "g" => file.g = value,
            "k" => file.k = value,
            "K" => file.big_k = Some(value),
            "G" => file.big_g = Some(value),
            other => return Err(Error::Invalid(format!("unknown element `{other}`"))),
        }
    }
    let mut ctx = ParameterContext::new();
    auto_declare(&mut ctx, |c| {
        let mut f = file.clone();
        f.params = kolsym::classpde::params_to_file(c);
        f.to_equation()
    })
}

/// Splits at commas outside parentheses.
fn split_top_level(s: &str) -> Vec<&str> {
    let (mut depth, mut start, mut out) = (0i32, 0, Vec::new());
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

#[derive(serde::Deserialize)]
#[serde(untagged)]
enum GeneratorFile {
    Plain([String; 4]),
    WithParams {
        #[serde(default)]
        params: kolsym::classpde::ParamsFile,
        field: [String; 4],
    },
}

/// A generator file, or `expr:τ;ξ;η;θ` (commas also separate components).
/// Parameters of `ctx` are known; further identifiers become parameters.
pub fn generator(src: &str, ctx: &mut ParameterContext) -> Result<VectorField> {
    let parts: Vec<String> = match src.strip_prefix(INLINE) {
        Some(body) => {
            let parts: Vec<&str> = if body.contains(';') {
                body.split(';').collect()
            } else {
                split_top_level(body)
            };
            parts.into_iter().map(|p| p.trim().to_string()).collect()
        }
        None => match json::<GeneratorFile>(&read(src)?, "generator")? {
            GeneratorFile::Plain(c) => c.to_vec(),
            GeneratorFile::WithParams { params, field } => {
                ctx.merge(&kolsym::classpde::params_from_file(&params)?)?;
                field.to_vec()
            }
        },
    };
    let [a, b, c, d]: [String; 4] = parts.try_into().map_err(|p: Vec<String>| {
        Error::Invalid(format!("a generator has 4 components, got {}", p.len()))
    })?;
    auto_declare(ctx, |c0| VectorField::parse(&[&a, &b, &c, &d], c0))
}

/// A transformation file, or `family:N` for the generic member of a bundled
/// family with parameters fixed by `values` (the rest stay symbolic).
pub fn transformation(src: &str, values: &BTreeMap<String, Q>) -> Result<PointTransformation> {
    if let Some(id) = src.strip_prefix(FAMILY) {
        let id: u32 = id
            .trim()
            .parse()
            .map_err(|_| Error::Invalid(format!("bad family id `{id}`")))?;
        let fam = family(id)?;
        let vals = values
            .iter()
            .filter(|(k, _)| fam.generic.ctx.is_declared(k))
            .map(|(k, v)| (k.clone(), symcore::Expr::rational(v.clone())))
            .collect();
        return fam.member(&vals);
    }
    if src.starts_with(INLINE) {
        return Err(Error::Invalid(
            "transformations need an inverse and element maps; use a file or family:N".into(),
        ));
    }
    json::<TransformationFile>(&read(src)?, "transformation")?.to_transformation()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inline_forms() {
        let e = equation("expr:f=t^rho;g=1;k=u").unwrap();
        assert!(e.ctx.is_declared("rho"));
        assert!(!e.is_arbitrary("f") && e.k == symcore::Expr::u());
        let mut ctx = e.ctx.clone();
        let q = generator("expr:0, t, 0, 1", &mut ctx).unwrap();
        assert_eq!(q.xi, symcore::Expr::t());
        assert!(generator("expr:0;t;0", &mut ctx).is_err());
        assert_eq!(split_top_level("f(a,b),c").len(), 2);
        assert!(bindings(&["n=1/2".into()]).is_ok());
        assert!(bindings(&["n=x".into()]).is_err());
    }
}
