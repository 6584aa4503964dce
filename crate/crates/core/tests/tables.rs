//! Every bundled classification case verifies, and corrupting it is detected.

use kolsym::classify::{bundled_table, bundled_tables, verify_all_tables, verify_entry, Table};

fn failures(tables: &[Table]) -> Vec<String> {
    let report = verify_all_tables(tables).unwrap();
    report
        .tables
        .iter()
        .flat_map(|t| t.entries.iter())
        .filter(|e| !e.pass)
        .map(|e| format!("{e:#?}"))
        .collect()
}

#[test]
fn all_bundled_cases_verify() {
    let tables = bundled_tables();
    let failed = failures(&tables);
    assert!(failed.is_empty(), "{}", failed.join("\n"));
    let report = verify_all_tables(&tables).unwrap();
    assert_eq!(report.entries, 45);
    let sizes: Vec<usize> = report.tables.iter().map(|t| t.entries.len()).collect();
    assert_eq!(sizes, [16, 5, 17, 7]);
}

#[test]
fn highest_dimension_with_power_nonlinearity_is_five() {
    let t = bundled_table(1).unwrap();
    let case = t.case("8").unwrap();
    let r = verify_entry(&t, case).unwrap();
    assert!(r.pass);
    assert_eq!(r.dimension, 5);
}

#[test]
fn logarithmic_case_contains_the_log_field() {
    let t = bundled_table(3).unwrap();
    let case = t.case("14_b").unwrap();
    assert!(case.basis.iter().any(|b| b[1] == "ln(t)" && b[3] == "u"));
    assert!(verify_entry(&t, case).unwrap().pass);
}

#[test]
fn tangent_case_verifies() {
    let t = bundled_table(4).unwrap();
    let r = verify_entry(&t, t.case("2").unwrap()).unwrap();
    assert!(r.pass, "{r:#?}");
    assert_eq!(r.dimension, 5);
}

#[test]
fn reports_are_reproducible() {
    let tables = vec![bundled_table(2).unwrap()];
    let a = serde_json::to_string(&verify_all_tables(&tables).unwrap()).unwrap();
    let b = serde_json::to_string(&verify_all_tables(&tables).unwrap()).unwrap();
    assert_eq!(a, b);
    assert!(!a.contains("wall_ms"));
}

#[test]
fn sampled_corruptions_are_detected() {
    let report = kolsym::classify::mutation_sweep(&bundled_tables(), 20_240_917, 40).unwrap();
    let missed: Vec<_> = report.mutants.iter().filter(|m| !m.detected).collect();
    assert!(missed.is_empty(), "{missed:#?}");
    assert!(report.mutants.len() >= 40);
    assert!(report.pass);
}
