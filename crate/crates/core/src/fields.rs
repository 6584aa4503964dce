//! Infinitesimal generators `Q = τ∂t + ξ∂x + η∂y + θ∂u`, their second
//! prolongation, brackets, pushforwards and structure constants.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use symcore::{parse, BaseVar, Expr, JetIndex, ParameterContext, Substitution, Symbol};

use crate::classpde::PointTransformation;
use crate::error::{Error, Result};
use crate::jetspace::{jets_in, total_derivative_multi};
use crate::linalg::{constant_coordinates, constant_rank};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VectorField {
    pub tau: Expr,
    pub xi: Expr,
    pub eta: Expr,
    pub theta: Expr,
}

/// Four expression strings `[tau, xi, eta, theta]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldStrings(pub [String; 4]);

impl VectorField {
    pub fn new(tau: Expr, xi: Expr, eta: Expr, theta: Expr) -> VectorField {
        VectorField {
            tau,
            xi,
            eta,
            theta,
        }
    }

    pub fn zero() -> VectorField {
        VectorField::from_components([Expr::zero(), Expr::zero(), Expr::zero(), Expr::zero()])
    }

    /// The coordinate field `∂v`.
    pub fn partial(v: BaseVar) -> VectorField {
        let mut c = [Expr::zero(), Expr::zero(), Expr::zero(), Expr::zero()];
        c[index(v)] = Expr::one();
        VectorField::from_components(c)
    }

    pub fn from_components(c: [Expr; 4]) -> VectorField {
        let [tau, xi, eta, theta] = c;
        VectorField {
            tau,
            xi,
            eta,
            theta,
        }
    }

    pub fn components(&self) -> [&Expr; 4] {
        [&self.tau, &self.xi, &self.eta, &self.theta]
    }

    pub fn to_vec(&self) -> Vec<Expr> {
        self.components().into_iter().cloned().collect()
    }

    /// Parses `[tau, xi, eta, theta]` and validates the result.
    pub fn parse(src: &[&str; 4], ctx: &ParameterContext) -> Result<VectorField> {
        let mut c = Vec::with_capacity(4);
        for s in src {
            c.push(parse(s, ctx)?);
        }
        let q = VectorField::from_components(c.try_into().expect("four components"));
        q.validate()?;
        Ok(q)
    }

    pub fn to_strings(&self) -> FieldStrings {
        FieldStrings(self.components().map(|e| e.to_string()))
    }

    /// Coefficients live on `(t,x,y,u)`: no jet coordinates and no `f`, `K`.
    pub fn validate(&self) -> Result<()> {
        for (name, e) in ["tau", "xi", "eta", "theta"].iter().zip(self.components()) {
            if !jets_in(e).is_empty() {
                return Err(Error::Invalid(format!(
                    "{name} = {e} contains a jet coordinate"
                )));
            }
            for banned in ["f", "K"] {
                if e.contains_name(banned) {
                    return Err(Error::Invalid(format!("{name} = {e} involves `{banned}`")));
                }
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.components().iter().all(|e| e.is_zero())
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> VectorField {
        VectorField::from_components(self.components().map(f))
    }

    pub fn try_map(&self, f: impl Fn(&Expr) -> Result<Expr>) -> Result<VectorField> {
        let [a, b, c, d] = self.components();
        Ok(VectorField::from_components([f(a)?, f(b)?, f(c)?, f(d)?]))
    }

    pub fn scale(&self, c: &Expr) -> VectorField {
        self.map(|e| e * c)
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        let o = other.components();
        let s = self.components();
        VectorField::from_components(std::array::from_fn(|i| s[i] + o[i]))
    }

    pub fn sub(&self, other: &VectorField) -> VectorField {
        self.add(&other.scale(&Expr::int(-1)))
    }

    /// `Q e = τ e_t + ξ e_x + η e_y + θ e_u` (jet coordinates untouched).
    pub fn apply(&self, e: &Expr) -> Expr {
        BaseVar::ALL
            .iter()
            .zip(self.components())
            .filter(|(_, c)| !c.is_zero())
            .map(|(v, c)| c * &e.diff(&Symbol::Base(*v)))
            .sum()
    }

    /// The characteristic `W = θ − τu_t − ξu_x − ηu_y`.
    pub fn characteristic(&self) -> Expr {
        let mut w = self.theta.clone();
        for (v, c) in BaseVar::INDEPENDENT.iter().zip(self.components()) {
            w = &w - &(c * &jet1(*v));
        }
        w
    }
}

fn index(v: BaseVar) -> usize {
    match v {
        BaseVar::T => 0,
        BaseVar::X => 1,
        BaseVar::Y => 2,
        BaseVar::U => 3,
    }
}

fn jet1(v: BaseVar) -> Expr {
    Expr::sym(Symbol::Jet(JetIndex::default().bump(v)))
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in BaseVar::ALL.iter().zip(self.components()) {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if c.is_one() {
                write!(f, "D_{}", v.name())?;
            } else {
                write!(f, "({c})*D_{}", v.name())?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// A vector field together with its prolonged coefficients `θ^J`, `|J| <= 2`.
#[derive(Debug, Clone)]
pub struct ProlongedField {
    pub base: VectorField,
    pub coeffs: BTreeMap<JetIndex, Expr>,
}

impl ProlongedField {
    pub fn coeff(&self, j: JetIndex) -> Option<&Expr> {
        self.coeffs.get(&j)
    }
}

/// Second prolongation in characteristic form:
/// `θ^J = D_J W + τu_{J,t} + ξu_{J,x} + ηu_{J,y}`.
pub fn prolong2(q: &VectorField) -> Result<ProlongedField> {
    let w = q.characteristic();
    let mut coeffs = BTreeMap::new();
    for j in JetIndex::all_up_to(2) {
        let mut c = total_derivative_multi(&w, j)?;
        for (v, k) in BaseVar::INDEPENDENT.iter().zip(q.components()) {
            if !k.is_zero() {
                c = &c + &(k * &Expr::sym(Symbol::Jet(j.bump(*v))));
            }
        }
        coeffs.insert(j, c);
    }
    Ok(ProlongedField {
        base: q.clone(),
        coeffs,
    })
}

/// `Q^(2) e` for `e` of jet order at most two.
pub fn apply_prolonged(pq: &ProlongedField, e: &Expr) -> Result<Expr> {
    let mut out = pq.base.apply(e);
    for j in jets_in(e) {
        let c = pq
            .coeff(j)
            .ok_or_else(|| Error::Invalid(format!("jet order of `{e}` exceeds two")))?;
        out = &out + &(c * &e.diff(&Symbol::Jet(j)));
    }
    Ok(out)
}

/// `[q1, q2]` with components `q1(c2) − q2(c1)`.
pub fn lie_bracket(q1: &VectorField, q2: &VectorField) -> VectorField {
    let (a, b) = (q1.components(), q2.components());
    VectorField::from_components(std::array::from_fn(|i| &q1.apply(b[i]) - &q2.apply(a[i])))
}

/// The generator in the transformed coordinates: apply `q` to each forward
/// component, then express the result through the inverse map.
pub fn pushforward(q: &VectorField, t: &PointTransformation) -> Result<VectorField> {
    if t.jacobian_determinant().is_zero() {
        return Err(Error::Invalid("transformation is not invertible".into()));
    }
    let mut back = Substitution::new();
    for (v, inv) in BaseVar::ALL.iter().zip(t.inverse()) {
        back.set(Symbol::Base(*v), inv.clone());
    }
    let fwd = t.forward();
    let c: Vec<Expr> = fwd
        .iter()
        .map(|f| q.apply(f).substitute(&back))
        .collect::<symcore::Result<_>>()?;
    Ok(VectorField::from_components(
        c.try_into().expect("four components"),
    ))
}

/// `c[i][j][k]` with `[Q_i, Q_j] = Σ_k c[i][j][k] Q_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    pub c: Vec<Vec<Vec<Expr>>>,
}

impl StructureConstants {
    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn is_abelian(&self) -> bool {
        self.c.iter().flatten().flatten().all(Expr::is_zero)
    }

    /// Nonzero entries as `(i, j, k, value)` with `i < j`.
    pub fn nonzero(&self) -> Vec<(usize, usize, usize, &Expr)> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    if !self.c[i][j][k].is_zero() {
                        out.push((i, j, k, &self.c[i][j][k]));
                    }
                }
            }
        }
        out
    }
}

/// Checks that the basis is independent over constants and closed under the
/// bracket with constant coefficients.
pub fn structure_constants(basis: &[VectorField]) -> Result<StructureConstants> {
    let vectors: Vec<Vec<Expr>> = basis.iter().map(VectorField::to_vec).collect();
    if constant_rank(&vectors)? < basis.len() {
        return Err(Error::LinearDependence);
    }
    let n = basis.len();
    let mut c = vec![vec![vec![Expr::zero(); n]; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let b = lie_bracket(&basis[i], &basis[j]);
            if b.is_zero() {
                continue;
            }
            let coords =
                constant_coordinates(&vectors, &b.to_vec())?.ok_or_else(|| Error::NotInSpan {
                    i,
                    j,
                    bracket: b.to_string(),
                })?;
            for (k, v) in coords.into_iter().enumerate() {
                c[j][i][k] = -&v;
                c[i][j][k] = v;
            }
        }
    }
    Ok(StructureConstants { c })
}

/// True when `q` is a constant-coefficient combination of `basis`.
pub fn in_span(basis: &[VectorField], q: &VectorField) -> Result<bool> {
    let vectors: Vec<Vec<Expr>> = basis.iter().map(VectorField::to_vec).collect();
    Ok(constant_coordinates(&vectors, &q.to_vec())?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> ParameterContext {
        ParameterContext::new().with("rho", &[]).unwrap()
    }

    fn q(src: [&str; 4]) -> VectorField {
        VectorField::parse(&src, &ctx()).unwrap()
    }

    fn e(s: &str) -> Expr {
        parse(s, &ctx()).unwrap()
    }

    #[test]
    fn prolongation_examples() {
        let p = prolong2(&q(["0", "1", "0", "0"])).unwrap();
        assert!(p.coeffs.values().all(Expr::is_zero));

        let p = prolong2(&q(["0", "0", "y", "0"])).unwrap();
        assert_eq!(p.coeff(JetIndex::new(0, 0, 1)).unwrap(), &e("-u_y"));
        assert_eq!(p.coeff(JetIndex::new(0, 0, 2)).unwrap(), &e("-2*u_yy"));
        for j in [
            JetIndex::new(1, 0, 0),
            JetIndex::new(0, 1, 0),
            JetIndex::new(0, 2, 0),
        ] {
            assert!(p.coeff(j).unwrap().is_zero());
        }

        let p = prolong2(&q(["0", "t", "0", "1"])).unwrap();
        assert_eq!(p.coeff(JetIndex::new(1, 0, 0)).unwrap(), &e("-u_x"));
        for j in [
            JetIndex::new(0, 1, 0),
            JetIndex::new(0, 0, 1),
            JetIndex::new(0, 0, 2),
        ] {
            assert!(p.coeff(j).unwrap().is_zero());
        }
    }

    #[test]
    fn apply_examples() {
        let eq = e("u_t - u_yy + u*u_x");
        let p = prolong2(&q(["0", "1", "0", "0"])).unwrap();
        assert!(apply_prolonged(&p, &eq).unwrap().is_zero());
        let p = prolong2(&q(["0", "t", "0", "1"])).unwrap();
        assert!(apply_prolonged(&p, &eq).unwrap().is_zero());
        let p = prolong2(&q(["t", "0", "0", "0"])).unwrap();
        assert_eq!(apply_prolonged(&p, &e("u_t")).unwrap(), e("-u_t"));
    }

    #[test]
    fn bracket_examples() {
        assert!(lie_bracket(&q(["0", "1", "0", "0"]), &q(["0", "0", "1", "0"])).is_zero());
        assert_eq!(
            lie_bracket(&q(["1", "0", "0", "0"]), &q(["2*t", "2*x", "y", "0"])),
            q(["2", "0", "0", "0"])
        );
        assert_eq!(
            lie_bracket(&q(["0", "t", "0", "1"]), &q(["0", "x", "0", "u"])),
            q(["0", "t", "0", "1"])
        );
    }

    #[test]
    fn structure_constant_examples() {
        let basis = [q(["0", "1", "0", "0"]), q(["0", "0", "1", "0"])];
        assert!(structure_constants(&basis).unwrap().is_abelian());
        let bad = [q(["1", "0", "0", "0"]), q(["t^2", "0", "0", "0"])];
        assert!(matches!(
            structure_constants(&bad),
            Err(Error::NotInSpan { .. })
        ));
        let dep = [q(["0", "1", "0", "0"]), q(["0", "rho", "0", "0"])];
        assert!(matches!(
            structure_constants(&dep),
            Err(Error::LinearDependence)
        ));
        let scaling = [
            q(["0", "1", "0", "0"]),
            q(["0", "0", "1", "0"]),
            q(["2*t", "2*x", "(rho+1)*y", "0"]),
        ];
        let sc = structure_constants(&scaling).unwrap();
        assert_eq!(sc.c[0][2][0], Expr::int(2));
        assert_eq!(sc.c[1][2][1], e("rho + 1"));
    }
}
