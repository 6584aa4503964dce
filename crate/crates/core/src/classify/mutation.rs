//! Mutation testing of the table data: single-token corruptions of generator
//! components must make the corresponding case fail.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tables::{verify_entry, CaseFile, Table};
use crate::error::Result;
use crate::fields::in_span;
use crate::linalg::constant_rank;

/// One corrupted generator component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mutant {
    pub table: u32,
    pub label: String,
    pub generator: usize,
    pub component: usize,
    pub original: String,
    pub mutated: String,
    pub detected: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutationReport {
    pub seed: u64,
    pub mutants: Vec<Mutant>,
    /// Candidates dropped because the corrupted basis spans the same algebra
    /// (for instance `0 → 1` in the `τ` slot when `∂t` is already present).
    pub equivalent: usize,
    /// Candidates dropped because the mutated string does not parse.
    pub malformed: usize,
    pub pass: bool,
}

/// Byte spans of the tokens of an expression string: numbers, identifiers and
/// single operator characters.
pub fn tokens(src: &str) -> Vec<(usize, usize)> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let s = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        } else if c.is_ascii_digit() {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
        } else {
            i += 1;
        }
        out.push((s, i));
    }
    out
}

/// Replaces the `token`-th token of `src`.
pub fn mutate_generator(src: &str, token: usize, replacement: &str) -> Option<String> {
    let (a, b) = *tokens(src).get(token)?;
    Some(format!("{}{}{}", &src[..a], replacement, &src[b..]))
}

/// A replacement differing from `tok`.
fn replacement(tok: &str, rng: &mut ChaCha8Rng) -> String {
    if let Ok(n) = tok.parse::<u64>() {
        return (n + rng.gen_range(1..=3)).to_string();
    }
    let pool: &[&str] = match tok {
        "+" => &["-", "*"],
        "-" => &["+", "*"],
        "*" => &["+", "-"],
        "/" => &["*", "+"],
        "^" => &["*"],
        "t" | "x" | "y" | "u" => &["t", "x", "y", "u"],
        "(" | ")" => &[],
        _ => &["t", "2"],
    };
    let pool: Vec<&str> = pool.iter().copied().filter(|s| *s != tok).collect();
    pool.choose(rng).map_or_else(String::new, |s| s.to_string())
}

/// Whether replacing generator `gen` by its mutant leaves the algebra unchanged.
fn is_equivalent(table: &Table, case: &CaseFile, mutated: &CaseFile, gen: usize) -> Result<bool> {
    let basis = table.basis(case)?;
    let new = table.basis(mutated)?;
    let vectors: Vec<Vec<_>> = new.iter().map(|q| q.to_vec()).collect();
    Ok(in_span(&basis, &new[gen])? && constant_rank(&vectors)? == new.len())
}

/// Samples `count` non-equivalent single-token mutants with a fixed seed and
/// verifies each corrupted case.
pub fn mutation_sweep(tables: &[Table], seed: u64, count: usize) -> Result<MutationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sites: Vec<(usize, usize, usize, usize)> = tables
        .iter()
        .enumerate()
        .flat_map(|(ti, t)| {
            t.file.cases.iter().enumerate().flat_map(move |(ci, c)| {
                c.basis.iter().enumerate().flat_map(move |(gi, g)| {
                    (0..4).flat_map(move |k| (0..tokens(&g[k]).len()).map(move |_| (ti, ci, gi, k)))
                })
            })
        })
        .collect();
    let (mut mutants, mut equivalent, mut malformed) = (Vec::new(), 0, 0);
    let mut attempts = 0;
    while mutants.len() < count && attempts < count * 50 && !sites.is_empty() {
        attempts += 1;
        let (ti, ci, gi, k) = sites[rng.gen_range(0..sites.len())];
        let (table, case) = (&tables[ti], &tables[ti].file.cases[ci]);
        let original = case.basis[gi][k].clone();
        let ntok = tokens(&original).len();
        let pos = rng.gen_range(0..ntok);
        let (a, b) = tokens(&original)[pos];
        let rep = replacement(&original[a..b], &mut rng);
        if rep.is_empty() {
            continue;
        }
        let Some(text) = mutate_generator(&original, pos, &rep) else {
            continue;
        };
        let mut bad = case.clone();
        bad.basis[gi][k] = text.clone();
        if table.basis(&bad).is_err() {
            malformed += 1;
            continue;
        }
        if is_equivalent(table, case, &bad, gi)? {
            equivalent += 1;
            continue;
        }
        let detected = verify_entry(table, &bad).map_or(true, |r| !r.pass);
        mutants.push(Mutant {
            table: table.number(),
            label: case.label.clone(),
            generator: gi + 1,
            component: k,
            original,
            mutated: text,
            detected,
        });
    }
    Ok(MutationReport {
        seed,
        pass: mutants.len() >= count && mutants.iter().all(|m| m.detected),
        mutants,
        equivalent,
        malformed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn token_mutation() {
        assert_eq!(tokens("2*(rho+1)*x").len(), 9);
        assert_eq!(mutate_generator("sigma*y/2", 4, "1").unwrap(), "sigma*y/1");
    }
}
