//! Linear algebra over the rationals and over the field of constants
//! (rational functions of parameters).

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use symcore::{rational_terms, split_over_constants, Expr, Q};

use crate::error::{Error, Result};

/// Rows in echelon form over Q, kept sparse.
#[derive(Debug, Clone, Default)]
pub struct RationalEchelon {
    rows: Vec<(usize, BTreeMap<usize, Q>)>,
}

impl RationalEchelon {
    pub fn new() -> RationalEchelon {
        RationalEchelon::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, mut row: BTreeMap<usize, Q>) -> BTreeMap<usize, Q> {
        for (pivot, r) in &self.rows {
            let Some(c) = row.get(pivot).cloned() else {
                continue;
            };
            for (k, v) in r {
                let e = row.entry(*k).or_insert_with(Q::zero);
                *e -= &c * v;
                if e.is_zero() {
                    row.remove(k);
                }
            }
        }
        row
    }

    /// Adds a row; returns false if it was already in the row space.
    pub fn insert(&mut self, row: BTreeMap<usize, Q>) -> bool {
        let row = self.reduce(row);
        let Some((&pivot, lead)) = row.iter().next() else {
            return false;
        };
        let lead = lead.clone();
        let row: BTreeMap<usize, Q> = row.into_iter().map(|(k, v)| (k, v / &lead)).collect();
        // keep earlier rows reduced with respect to the new pivot
        for (_, r) in &mut self.rows {
            if let Some(c) = r.get(&pivot).cloned() {
                for (k, v) in &row {
                    let e = r.entry(*k).or_insert_with(Q::zero);
                    *e -= &c * v;
                    if e.is_zero() {
                        r.remove(k);
                    }
                }
            }
        }
        self.rows.push((pivot, row));
        true
    }

    pub fn contains(&self, row: &BTreeMap<usize, Q>) -> bool {
        self.reduce(row.clone()).is_empty()
    }
}

/// Assigns stable indices to (component, monomial) keys.
#[derive(Debug, Default)]
struct KeyIndex(HashMap<(usize, Expr), usize>);

impl KeyIndex {
    fn get(&mut self, component: usize, k: Expr) -> usize {
        let n = self.0.len();
        *self.0.entry((component, k)).or_insert(n)
    }
}

fn rational_row(e: &Expr, keys: &mut KeyIndex) -> Result<BTreeMap<usize, Q>> {
    let mut row = BTreeMap::new();
    for (m, c) in rational_terms(e)? {
        row.insert(keys.get(0, m), c);
    }
    Ok(row)
}

/// True when `a` and `b` span the same subspace over Q (mutual membership).
pub fn rational_span_equal(a: &[Expr], b: &[Expr]) -> Result<bool> {
    let mut keys = KeyIndex::default();
    let ra: Vec<_> = a
        .iter()
        .map(|e| rational_row(e, &mut keys))
        .collect::<Result<_>>()?;
    let rb: Vec<_> = b
        .iter()
        .map(|e| rational_row(e, &mut keys))
        .collect::<Result<_>>()?;
    let mut ea = RationalEchelon::new();
    ra.into_iter().for_each(|r| {
        ea.insert(r);
    });
    let mut eb = RationalEchelon::new();
    rb.iter().for_each(|r| {
        eb.insert(r.clone());
    });
    Ok(ea.rank() == eb.rank() && rb.iter().all(|r| ea.contains(r)))
}

/// Rewrites each vector (list of components) as coordinates over a common
/// set of constant-independent functions. Returns one column per vector.
fn constant_columns(vectors: &[&[Expr]]) -> Result<Vec<Vec<Expr>>> {
    let width = vectors.first().map_or(0, |v| v.len());
    let mut keys = KeyIndex::default();
    let mut cols: Vec<BTreeMap<usize, Expr>> = vec![BTreeMap::new(); vectors.len()];
    for j in 0..width {
        let mut dens: Vec<Expr> = Vec::new();
        for v in vectors {
            let d = v[j].denom();
            if !d.is_constant() && !dens.contains(&d) {
                dens.push(d);
            }
        }
        let common: Expr = dens.into_iter().product();
        for (i, v) in vectors.iter().enumerate() {
            let scaled = &v[j] * &common;
            for (k, c) in split_over_constants(&scaled)? {
                let idx = keys.get(j, k);
                cols[i].insert(idx, c);
            }
        }
    }
    let n = keys.0.len();
    Ok(cols
        .into_iter()
        .map(|c| {
            (0..n)
                .map(|k| c.get(&k).cloned().unwrap_or_else(Expr::zero))
                .collect()
        })
        .collect())
}

/// Reduced row echelon form of `rows` (in place); returns the pivot columns.
fn rref(rows: &mut [Vec<Expr>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let lead = rows[r][c].recip();
        for v in rows[r].iter_mut() {
            *v = &*v * &lead;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for k in 0..rows[i].len() {
                    let t = &rows[i][k] - &(&f * &rows[r][k]);
                    rows[i][k] = t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

fn transpose(cols: &[Vec<Expr>]) -> Vec<Vec<Expr>> {
    let m = cols.first().map_or(0, |c| c.len());
    (0..m)
        .map(|i| cols.iter().map(|c| c[i].clone()).collect())
        .collect()
}

/// Rank over the constants of a list of vectors.
pub fn constant_rank(vectors: &[Vec<Expr>]) -> Result<usize> {
    if vectors.is_empty() {
        return Ok(0);
    }
    let refs: Vec<&[Expr]> = vectors.iter().map(Vec::as_slice).collect();
    let cols = constant_columns(&refs)?;
    let mut rows = transpose(&cols);
    Ok(rref(&mut rows, vectors.len()).len())
}

/// Constant coefficients `c` with `Σ c_i basis_i = target`, `None` when the
/// target is outside the span. The basis must be independent over constants.
pub fn constant_coordinates(basis: &[Vec<Expr>], target: &[Expr]) -> Result<Option<Vec<Expr>>> {
    let n = basis.len();
    let mut refs: Vec<&[Expr]> = basis.iter().map(Vec::as_slice).collect();
    refs.push(target);
    let cols = constant_columns(&refs)?;
    let mut rows = transpose(&cols);
    let pivots = rref(&mut rows, n + 1);
    if pivots.contains(&n) {
        return Ok(None);
    }
    if pivots.len() < n {
        return Err(Error::LinearDependence);
    }
    Ok(Some((0..n).map(|i| rows[i][n].clone()).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use symcore::{parse, ParameterContext};

    fn p(s: &str) -> Expr {
        let ctx = ParameterContext::new().with("a", &[]).unwrap();
        parse(s, &ctx).unwrap()
    }

    #[test]
    fn echelon_rank() {
        let mut e = RationalEchelon::new();
        let q = |n: i64| Q::from_integer(n.into());
        assert!(e.insert([(0, q(1)), (1, q(2))].into()));
        assert!(e.insert([(1, q(1))].into()));
        assert!(!e.insert([(0, q(3))].into()));
        assert_eq!(e.rank(), 2);
    }

    #[test]
    fn span_equality() {
        let a = [p("t*f(t) + x"), p("x")];
        let b = [p("2*t*f(t)"), p("x - t*f(t)")];
        assert!(rational_span_equal(&a, &b).unwrap());
        assert!(!rational_span_equal(&a, &[p("x")]).unwrap());
    }

    #[test]
    fn coordinates_over_constants() {
        let basis = vec![vec![p("1"), p("t")], vec![p("a*t"), p("0")]];
        let target = vec![p("a + a^2*t"), p("a*t")];
        let c = constant_coordinates(&basis, &target).unwrap().unwrap();
        assert_eq!(c, vec![p("a"), p("a")]);
        assert_eq!(
            constant_coordinates(&basis, &[p("t^2"), p("0")]).unwrap(),
            None
        );
        let dependent = vec![vec![p("t")], vec![p("a*t")]];
        assert_eq!(constant_rank(&dependent).unwrap(), 1);
    }
}
