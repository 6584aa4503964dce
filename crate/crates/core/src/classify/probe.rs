//! Symmetry dimension within a finite polynomial ansatz.
//!
//! Every component of the generator is a combination, with unknown rational
//! coefficients, of monomials in `(t, x, y, u)` of bounded total degree, each
//! optionally multiplied by a kernel factor taken from `f` and `g`. The
//! invariance residual is linear in the unknowns, so the symmetries within the
//! ansatz form the null space of a rational matrix.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use symcore::{Atom, Expr, Kernel};

use super::invariance_residual;
use crate::classpde::ClassEquation;
use crate::error::{Error, Result};
use crate::fields::VectorField;
use crate::linalg::constant_rank;

/// Ceiling on the number of independent functions the residuals split into.
const MAX_SPLIT_KEYS: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeOptions {
    pub degree: u32,
    /// Admit kernel factors (exponentials, logarithms, ...) found in `f` and `g`.
    pub kernel_factors: bool,
    /// Further factors to admit.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra_factors: Vec<String>,
}

impl Default for ProbeOptions {
    fn default() -> ProbeOptions {
        ProbeOptions {
            degree: 2,
            kernel_factors: true,
            extra_factors: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub dimension: usize,
    pub unknowns: usize,
    pub rank: usize,
    pub degree: u32,
    pub factors: Vec<String>,
}

fn monomials(degree: u32) -> Vec<Expr> {
    let vars = [Expr::t(), Expr::x(), Expr::y(), Expr::u()];
    let mut out = vec![Expr::one()];
    let mut layer = vec![(Expr::one(), 0usize)];
    for _ in 0..degree {
        let mut next = Vec::new();
        for (m, start) in &layer {
            for (i, v) in vars.iter().enumerate().skip(*start) {
                next.push((m * v, i));
            }
        }
        out.extend(next.iter().map(|(m, _)| m.clone()));
        layer = next;
    }
    out
}

/// Non-polynomial factors of the time-dependent elements.
fn kernel_factors(e: &ClassEquation) -> Vec<Expr> {
    let mut out: Vec<Expr> = Vec::new();
    for el in [&e.f, &e.g] {
        for a in el.top_atoms() {
            if let Atom::Kernel(k, _) = &a {
                if !matches!(k, Kernel::Opaque(_)) {
                    out.push(Expr::atom(a.clone()));
                }
            }
        }
        out.extend(el.exp_parts().iter().map(Expr::exp));
    }
    out.sort();
    out.dedup();
    out
}

/// Dimension of the symmetry algebra of `e` within the ansatz.
pub fn dimension_probe(e: &ClassEquation, opts: &ProbeOptions) -> Result<ProbeResult> {
    for (name, el) in [("f", &e.f), ("g", &e.g), ("k", &e.k)] {
        if el.params().next().is_some() || !el.kernel_names().is_empty() {
            return Err(Error::Unsupported(format!(
                "dimension probe needs a fully numeric instance; {name} = {el}"
            )));
        }
    }
    let mut factors = vec![Expr::one()];
    if opts.kernel_factors {
        factors.extend(kernel_factors(e));
    }
    for s in &opts.extra_factors {
        factors.push(symcore::parse(s, &e.ctx)?);
    }
    factors.sort();
    factors.dedup();
    let mut ansatz = Vec::new();
    for m in monomials(opts.degree) {
        for fac in &factors {
            let term = &m * fac;
            for slot in 0..4 {
                let mut c = [Expr::zero(), Expr::zero(), Expr::zero(), Expr::zero()];
                c[slot] = term.clone();
                ansatz.push(VectorField::from_components(c));
            }
        }
    }
    let residuals: Vec<Vec<Expr>> = ansatz
        .par_iter()
        .map(|q| invariance_residual(q, e).map(|r| vec![r]))
        .collect::<Result<_>>()?;
    let keys: usize = residuals.iter().map(|r| r[0].numer_terms().len()).sum();
    if keys > MAX_SPLIT_KEYS {
        return Err(Error::Unsupported(format!(
            "residuals split into {keys} terms; the ansatz is too large for this instance"
        )));
    }
    let rank = constant_rank(&residuals)?;
    Ok(ProbeResult {
        dimension: ansatz.len() - rank,
        unknowns: ansatz.len(),
        rank,
        degree: opts.degree,
        factors: factors.iter().map(Expr::to_string).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use symcore::ParameterContext;

    #[test]
    fn heat_like_instance() {
        let ctx = ParameterContext::new();
        let e = ClassEquation::new(Expr::one(), Expr::one(), Expr::u(), ctx).unwrap();
        let r = dimension_probe(
            &e,
            &ProbeOptions {
                degree: 1,
                ..ProbeOptions::default()
            },
        )
        .unwrap();
        // ∂t, ∂x, ∂y, t∂x+∂u, x∂x+u∂u and 2t∂t+y∂y−2u∂u
        assert_eq!(r.dimension, 6);
        let r0 = dimension_probe(
            &e,
            &ProbeOptions {
                degree: 0,
                ..ProbeOptions::default()
            },
        )
        .unwrap();
        assert_eq!(r0.dimension, 3);
        assert!(dimension_probe(&ClassEquation::generic(), &ProbeOptions::default()).is_err());
    }
}
