//! End-to-end behaviour of the binary: outputs and the exit-status contract.

use std::process::{Command, Output};

fn kolsym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kolsym"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(o))
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stderr)))
}

#[test]
fn check_exit_statuses() {
    let o = kolsym(&["check", "expr:f=1;g=1;k=u", "expr:0;t;0;1"]);
    assert_eq!(o.status.code(), Some(0));
    let o = kolsym(&["check", "expr:f=1;g=1;k=u", "expr:t,0,0,0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("residual"));
    let o = kolsym(&["check", "expr:f=1;g=1;k=u", "expr:t,0,0,(u"]);
    assert_eq!(o.status.code(), Some(2));
    let o = kolsym(&["check", "no-such-file.json", "expr:0,1,0,0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn params_respect_constraints() {
    let o = kolsym(&[
        "check",
        "samples/cosh_equation.json",
        "expr:0,1,0,0",
        "--params",
        "nu=0",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = kolsym(&[
        "check",
        "samples/cosh_equation.json",
        "expr:0,1,0,0",
        "--params",
        "nu=1/2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = kolsym(&[
        "check",
        "expr:f=t^rho;g=1;k=u",
        "samples/power_scaling.json",
    ]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn verify_tables_selection_and_report() {
    let path = std::env::temp_dir().join(format!("kolsym-report-{}.json", std::process::id()));
    let o = kolsym(&[
        "verify-tables",
        "--table",
        "1",
        "--report",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("table 1: 16/16 pass"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["entries"], 16);
    assert_eq!(report["pass"], true);
    std::fs::remove_file(path).ok();
    let o = kolsym(&["verify-tables", "--file", "missing-table.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn corrupted_table_file_fails_with_named_case() {
    let src = include_str!("../../core/data/table2.json").replacen("sigma*y/2", "sigma*y", 1);
    let path = std::env::temp_dir().join(format!("kolsym-table2-{}.json", std::process::id()));
    std::fs::write(&path, src).unwrap();
    let o = kolsym(&["verify-tables", "--file", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("case 2 FAILED"), "{out}");
    assert!(out.contains("sigma"), "{out}");
}

#[test]
fn map_link_and_identity() {
    let o = kolsym(&[
        "map",
        "samples/cosh_equation.json",
        "samples/cosh_to_power.json",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["certified"], true);
    let mut args = vec!["map", "expr:f=t^2+1;g=1;k=u", "family:4", "--json"];
    for p in [
        "alpha=1",
        "beta=0",
        "gamma=0",
        "delta=1",
        "kappa=1",
        "mu=0",
        "nu=0",
        "lambda=1",
        "epsilon=0",
    ] {
        args.extend(["--params", p]);
    }
    let o = kolsym(&args);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["equation"]["f"], "t^2 + 1");
    // the family acts on g = 1 only
    let o = kolsym(&["map", "expr:f=1;g=t;k=u", "family:4"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn gauge_and_determine() {
    let o = kolsym(&["gauge", "expr:f=1;g=e^t;k=u", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["equation"]["g"], "1");
    assert_eq!(v["parametric"], false);
    for g in ["g1", "f1"] {
        let o = kolsym(&["determine", "--gauge", g]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).contains("matches the reference system: yes"));
    }
    assert_eq!(
        kolsym(&["determine", "--gauge", "h1"]).status.code(),
        Some(2)
    );
}

#[test]
fn bracket_prolong_probe() {
    let o = kolsym(&["bracket", "expr:1,0,0,0", "expr:2*t,0,y,-2*u"]);
    assert!(stdout(&o).contains("(2, 0, 0, 0)"));
    let o = kolsym(&["prolong", "expr:0,x,0,0"]);
    assert!(stdout(&o).contains("theta^u_x = -u_x"), "{}", stdout(&o));
    let o = kolsym(&["dimension-probe", "expr:f=1;g=1;k=u^2", "--json"]);
    assert_eq!(json(&o)["dimension"], 5);
    assert_eq!(
        kolsym(&["dimension-probe", "expr:f=t^rho;g=1;k=u"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn reports_are_deterministic() {
    let a = stdout(&kolsym(&[
        "verify-tables",
        "--json",
        "--mutations",
        "20",
        "--seed",
        "3",
    ]));
    let b = stdout(&kolsym(&[
        "verify-tables",
        "--json",
        "--mutations",
        "20",
        "--seed",
        "3",
    ]));
    assert_eq!(a, b);
}
