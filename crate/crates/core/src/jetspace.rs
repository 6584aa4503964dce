//! Second-order jet space over `(t, x, y)` with one dependent variable `u`.
//!
//! Jet coordinates are `symcore` symbols; the internal order cap is three so
//! that total derivatives of second-order expressions stay representable.

use std::collections::BTreeMap;

use symcore::{collect, BaseVar, Expr, JetIndex, SymError, SymMonomial, Symbol};

use crate::error::{Error, Result};

/// The jet space of the class: three independent variables, scalar `u`,
/// coordinates up to order [`JetSpace::MAX_ORDER`].
#[derive(Debug, Clone, Copy, Default)]
pub struct JetSpace;

impl JetSpace {
    pub const MAX_ORDER: u8 = JetIndex::MAX_ORDER;

    /// Coordinates `u_J` with `1 <= |J| <= order`, in canonical order.
    pub fn coordinates(order: u8) -> Vec<JetIndex> {
        JetIndex::all_up_to(order.min(Self::MAX_ORDER))
    }

    /// Canonical name of `u_J`, e.g. `u_tyy`.
    pub fn name(j: JetIndex) -> String {
        format!("u_{}", j.letters())
    }
}

/// Jet coordinates occurring in `e`, ascending.
pub fn jets_in(e: &Expr) -> Vec<JetIndex> {
    e.free_symbols()
        .iter()
        .filter_map(|s| match s {
            Symbol::Jet(j) => Some(*j),
            _ => None,
        })
        .collect()
}

/// Total derivative `D_v e = ∂_v e + u_v ∂_u e + Σ_J u_{J,v} ∂_{u_J} e`.
pub fn total_derivative(e: &Expr, v: BaseVar) -> Result<Expr> {
    if v == BaseVar::U {
        return Err(Error::Invalid("u is not an independent variable".into()));
    }
    let mut out = e.diff(&Symbol::Base(v));
    let du = e.diff(&Symbol::Base(BaseVar::U));
    if !du.is_zero() {
        out = &out + &(&du * &Expr::sym(Symbol::Jet(JetIndex::default().bump(v))));
    }
    for j in jets_in(e) {
        let next = j.bump(v);
        if next.order() > JetSpace::MAX_ORDER {
            return Err(SymError::OrderOverflow(JetSpace::name(next)).into());
        }
        let d = e.diff(&Symbol::Jet(j));
        out = &out + &(&d * &Expr::sym(Symbol::Jet(next)));
    }
    Ok(out)
}

/// `D_J e` for a multi-index `J`, applied in the order t, x, y.
pub fn total_derivative_multi(e: &Expr, j: JetIndex) -> Result<Expr> {
    let mut out = e.clone();
    for v in BaseVar::INDEPENDENT {
        for _ in 0..j.count(v) {
            out = total_derivative(&out, v)?;
        }
    }
    Ok(out)
}

/// Coefficients of `e` as a polynomial in the jet coordinates it contains.
/// `e` vanishes identically exactly when every coefficient does.
pub fn split_by_jet(e: &Expr) -> Result<BTreeMap<SymMonomial, Expr>> {
    let jets: Vec<Symbol> = jets_in(e).into_iter().map(Symbol::Jet).collect();
    Ok(collect(e, &jets)?)
}
