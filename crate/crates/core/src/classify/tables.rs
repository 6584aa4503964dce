//! Classification tables: loading, per-entry verification and reports.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use symcore::{Expr, ParameterContext};

use super::classifying::{classifying_residual, ClassifyingKind};
use super::invariance_residual;
use crate::classpde::{params_from_file, parse_element, ClassEquation, ParamsFile};
use crate::error::{Error, Result};
use crate::fields::{in_span, structure_constants, FieldStrings, VectorField};
use symcore::BaseVar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseFile {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<String>,
    #[serde(rename = "G", default, skip_serializing_if = "Option::is_none")]
    pub big_g: Option<String>,
    /// Per-case constraints replacing the table-wide ones for the named parameters.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: ParamsFile,
    pub basis: Vec<[String; 4]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableFile {
    pub schema: u32,
    pub table: u32,
    pub title: String,
    /// Elements fixed throughout the table.
    #[serde(default)]
    pub class: BTreeMap<String, String>,
    /// The equivalence family used for the classification.
    pub group: u32,
    pub classifying: ClassifyingKind,
    #[serde(default)]
    pub params: ParamsFile,
    pub cases: Vec<CaseFile>,
}

/// A validated table.
#[derive(Debug, Clone)]
pub struct Table {
    pub file: TableFile,
}

const BUNDLED: [&str; 4] = [
    include_str!("../../data/table1.json"),
    include_str!("../../data/table2.json"),
    include_str!("../../data/table3.json"),
    include_str!("../../data/table4.json"),
];

impl Table {
    pub fn from_json(src: &str) -> Result<Table> {
        let file: TableFile =
            serde_json::from_str(src).map_err(|e| Error::Schema(e.to_string()))?;
        if file.schema != 1 {
            return Err(Error::Schema(format!(
                "unsupported table schema {}",
                file.schema
            )));
        }
        if file.cases.is_empty() {
            return Err(Error::NoEntries);
        }
        params_from_file(&file.params)?;
        Ok(Table { file })
    }

    pub fn number(&self) -> u32 {
        self.file.table
    }

    pub fn case(&self, label: &str) -> Option<&CaseFile> {
        self.file.cases.iter().find(|c| c.label == label)
    }

    /// Parameter context of one case.
    pub fn context(&self, case: &CaseFile) -> Result<ParameterContext> {
        let mut p = self.file.params.clone();
        p.extend(case.params.clone());
        params_from_file(&p)
    }

    /// The equation of one case.
    pub fn equation(&self, case: &CaseFile) -> Result<ClassEquation> {
        let ctx = self.context(case)?;
        let pick = |name: &str, own: &Option<String>| -> Result<Expr> {
            let src = own
                .clone()
                .or_else(|| self.file.class.get(name).cloned())
                .unwrap_or_else(|| "arbitrary".into());
            parse_element(name, &src, &ctx)
        };
        let e = ClassEquation {
            f: pick("f", &case.f)?,
            g: pick("g", &case.g)?,
            k: pick("k", &case.k)?,
            big_k: None,
            big_g: case
                .big_g
                .as_deref()
                .map(|s| parse_element("G", s, &ctx))
                .transpose()?,
            ctx,
        };
        e.validate()?;
        Ok(e)
    }

    pub fn basis(&self, case: &CaseFile) -> Result<Vec<VectorField>> {
        let ctx = self.context(case)?;
        case.basis
            .iter()
            .map(|c| {
                let q = VectorField::parse(&[&c[0], &c[1], &c[2], &c[3]], &ctx)?;
                q.validate()?;
                Ok(q)
            })
            .collect()
    }
}

pub fn bundled_table(n: u32) -> Result<Table> {
    let src = BUNDLED
        .get((n as usize).wrapping_sub(1))
        .ok_or_else(|| Error::Invalid(format!("no bundled table {n}")))?;
    Table::from_json(src)
}

pub fn bundled_tables() -> Vec<Table> {
    (1..=4)
        .map(|n| bundled_table(n).expect("bundled tables are valid"))
        .collect()
}

pub fn load_table(path: &Path) -> Result<Table> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
    Table::from_json(&src)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorReport {
    pub field: FieldStrings,
    pub symmetry: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
}

/// Outcome of one check; `detail` explains a failure or why it does not apply.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub ok: bool,
    pub applicable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckResult {
    fn pass() -> CheckResult {
        CheckResult {
            ok: true,
            applicable: true,
            detail: None,
        }
    }

    fn fail(detail: impl Into<String>) -> CheckResult {
        CheckResult {
            ok: false,
            applicable: true,
            detail: Some(detail.into()),
        }
    }

    fn not_applicable(why: &str) -> CheckResult {
        CheckResult {
            ok: true,
            applicable: false,
            detail: Some(why.into()),
        }
    }

    fn from_result(r: Result<()>) -> CheckResult {
        match r {
            Ok(()) => CheckResult::pass(),
            Err(e) => CheckResult::fail(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryReport {
    pub table: u32,
    pub label: String,
    pub equation: String,
    pub dimension: usize,
    pub generators: Vec<GeneratorReport>,
    /// Independence over constants and closure under the bracket.
    pub closure: CheckResult,
    /// Nonzero structure constants `[Q_i, Q_j] = c Q_k` as `(i, j, k, c)`.
    pub structure_constants: Vec<(usize, usize, usize, String)>,
    pub classifying: CheckResult,
    /// `∂x` and `∂y` belong to the algebra.
    pub kernel: CheckResult,
    pub pass: bool,
    /// Wall time in milliseconds; not serialized so that reports are reproducible.
    #[serde(skip)]
    pub wall_ms: u128,
}

/// Verifies one case of a table.
pub fn verify_entry(table: &Table, case: &CaseFile) -> Result<EntryReport> {
    let start = Instant::now();
    let e = table.equation(case)?;
    let basis = table.basis(case)?;
    let generators: Vec<GeneratorReport> = basis
        .iter()
        .map(|q| {
            let r = invariance_residual(q, &e)?;
            Ok(GeneratorReport {
                field: q.to_strings(),
                symmetry: r.is_zero(),
                residual: (!r.is_zero()).then(|| r.to_string()),
            })
        })
        .collect::<Result<_>>()?;
    let (closure, structure) = match structure_constants(&basis) {
        Ok(sc) => (
            CheckResult::pass(),
            sc.nonzero()
                .into_iter()
                .map(|(i, j, k, c)| (i, j, k, c.to_string()))
                .collect(),
        ),
        Err(err) => (CheckResult::fail(err.to_string()), Vec::new()),
    };
    let kernel = CheckResult::from_result((|| {
        for v in [BaseVar::X, BaseVar::Y] {
            if !in_span(&basis, &VectorField::partial(v))? {
                return Err(Error::Invalid(format!(
                    "∂{} is not in the algebra",
                    v.name()
                )));
            }
        }
        Ok(())
    })());
    let classifying = classifying_check(table, &e, &basis);
    let pass = generators.iter().all(|g| g.symmetry) && closure.ok && kernel.ok && classifying.ok;
    Ok(EntryReport {
        table: table.number(),
        label: case.label.clone(),
        equation: e.to_string(),
        dimension: basis.len(),
        generators,
        closure,
        structure_constants: structure,
        classifying,
        kernel,
        pass,
        wall_ms: start.elapsed().as_millis(),
    })
}

fn classifying_check(table: &Table, e: &ClassEquation, basis: &[VectorField]) -> CheckResult {
    let kind = table.file.classifying;
    let element = match kind {
        ClassifyingKind::None => {
            return CheckResult::not_applicable("no classifying condition for this table")
        }
        ClassifyingKind::GeneralK | ClassifyingKind::LinearK => &e.f,
        ClassifyingKind::F1Linear => &e.g,
    };
    let big_g = match kind {
        ClassifyingKind::F1Linear => match e.antiderivative_g() {
            Ok(g) => Some(g),
            Err(err) => return CheckResult::fail(err.to_string()),
        },
        _ => None,
    };
    for (i, q) in basis.iter().enumerate() {
        match classifying_residual(kind, q, element, big_g.as_ref()) {
            Ok(Some(r)) if !r.is_zero() => {
                return CheckResult::fail(format!("generator {}: residual {r}", i + 1))
            }
            Ok(_) => {}
            Err(err) => return CheckResult::fail(format!("generator {}: {err}", i + 1)),
        }
    }
    CheckResult::pass()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableReport {
    pub table: u32,
    pub title: String,
    pub entries: Vec<EntryReport>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub tables: Vec<TableReport>,
    pub entries: usize,
    pub failed: Vec<String>,
    pub pass: bool,
}

fn entry_or_error(table: &Table, case: &CaseFile) -> EntryReport {
    verify_entry(table, case).unwrap_or_else(|err| EntryReport {
        table: table.number(),
        label: case.label.clone(),
        equation: String::new(),
        dimension: case.basis.len(),
        generators: Vec::new(),
        closure: CheckResult::fail(err.to_string()),
        structure_constants: Vec::new(),
        classifying: CheckResult::fail(err.to_string()),
        kernel: CheckResult::fail(err.to_string()),
        pass: false,
        wall_ms: 0,
    })
}

pub fn verify_table(table: &Table) -> TableReport {
    let entries: Vec<EntryReport> = table
        .file
        .cases
        .par_iter()
        .map(|c| entry_or_error(table, c))
        .collect();
    TableReport {
        table: table.number(),
        title: table.file.title.clone(),
        pass: entries.iter().all(|e| e.pass),
        entries,
    }
}

/// Verifies every case of every table, in parallel; output order follows input.
pub fn verify_all_tables(tables: &[Table]) -> Result<VerificationReport> {
    if tables.is_empty() || tables.iter().all(|t| t.file.cases.is_empty()) {
        return Err(Error::NoEntries);
    }
    let jobs: Vec<(usize, &CaseFile)> = tables
        .iter()
        .enumerate()
        .flat_map(|(i, t)| t.file.cases.iter().map(move |c| (i, c)))
        .collect();
    let results: Vec<EntryReport> = jobs
        .par_iter()
        .map(|(i, c)| entry_or_error(&tables[*i], c))
        .collect();
    let mut reports: Vec<TableReport> = tables
        .iter()
        .map(|t| TableReport {
            table: t.number(),
            title: t.file.title.clone(),
            entries: Vec::new(),
            pass: true,
        })
        .collect();
    for ((i, _), r) in jobs.iter().zip(results) {
        reports[*i].pass &= r.pass;
        reports[*i].entries.push(r);
    }
    let failed: Vec<String> = reports
        .iter()
        .flat_map(|t| {
            t.entries
                .iter()
                .filter(|e| !e.pass)
                .map(|e| format!("table {} case {}", e.table, e.label))
        })
        .collect();
    Ok(VerificationReport {
        entries: jobs.len(),
        pass: failed.is_empty(),
        failed,
        tables: reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_tables_load() {
        let tables = bundled_tables();
        assert_eq!(tables.iter().map(|t| t.file.cases.len()).sum::<usize>(), 45);
        assert!(matches!(
            Table::from_json(
                r#"{"schema":1,"table":9,"title":"x","group":3,"classifying":"none","cases":[]}"#
            ),
            Err(Error::NoEntries)
        ));
    }

    #[test]
    fn arctan_entry_verifies_and_detects_corruption() {
        let t = bundled_table(2).unwrap();
        let case = t.case("2").unwrap().clone();
        let r = verify_entry(&t, &case).unwrap();
        assert!(r.pass, "{r:?}");
        let mut bad = case.clone();
        bad.basis[4][2] = "sigma*y".into();
        let r = verify_entry(&t, &bad).unwrap();
        assert!(!r.pass);
        let res = r.generators[4].residual.clone().unwrap();
        assert!(res.contains("sigma"), "{res}");
    }
}
