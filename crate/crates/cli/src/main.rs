//! `kolsym`: symmetry analysis of `u_t = f(t)u_yy − g(t)k(u)u_x` from the
//! command line.
//!
//! Exit status: 0 when the check passes, 1 when it is decided negatively,
//! 2 on malformed input.

mod input;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kolsym::classify::{
    bundled_table, bundled_tables, derive_determining, dimension_probe, invariance_residual,
    load_table, mutation_sweep, verify_all_tables, Gauge, MutationReport, ProbeOptions, Table,
    VerificationReport,
};
use kolsym::classpde::{apply_equivalence, gauge_to_g1};
use kolsym::jetspace::JetSpace;
use kolsym::{lie_bracket, prolong2, ClassEquation, Error, VectorField};
use serde::Serialize;
use serde_json::json;
use symcore::{ParameterContext, Q};

#[derive(Parser)]
#[command(
    name = "kolsym",
    version,
    about = "Lie symmetries and equivalence transformations of u_t = f(t)u_yy - g(t)k(u)u_x"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Print the machine-readable report instead of the summary.
    #[arg(long, global = true)]
    json: bool,
    /// Also write the JSON report to this path.
    #[arg(long, global = true, value_name = "PATH")]
    report: Option<PathBuf>,
    /// Bind a parameter to a rational value (repeatable).
    #[arg(long = "params", global = true, value_name = "NAME=VALUE")]
    params: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a generator is a Lie symmetry of an equation.
    Check {
        /// Equation file or `expr:f=...;g=...;k=...`.
        equation: String,
        /// Generator file or `expr:tau;xi;eta;theta`.
        generator: String,
        #[command(flatten)]
        common: Common,
    },
    /// Verify the bundled classification tables (or table files).
    VerifyTables {
        /// Restrict to these bundled tables (1 to 4).
        #[arg(long = "table")]
        tables: Vec<u32>,
        /// Verify table files instead of the bundled data.
        #[arg(long = "file")]
        files: Vec<PathBuf>,
        /// Also run this many sampled single-token corruptions; each must be detected.
        #[arg(long, default_value_t = 0)]
        mutations: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Apply an equivalence transformation to an equation.
    Map {
        equation: String,
        /// Transformation file or `family:N` (parameters from --params).
        transformation: String,
        #[command(flatten)]
        common: Common,
    },
    /// Map an equation to the member with g = 1 by t̃ = ∫g dt.
    Gauge {
        equation: String,
        #[command(flatten)]
        common: Common,
    },
    /// Print the determining equations in the gauge g = 1 (`g1`) or f = 1 (`f1`).
    Determine {
        #[arg(long, default_value = "g1")]
        gauge: String,
        #[command(flatten)]
        common: Common,
    },
    /// Commutator of two generators.
    Bracket {
        first: String,
        second: String,
        #[command(flatten)]
        common: Common,
    },
    /// Second prolongation of a generator.
    Prolong {
        generator: String,
        #[command(flatten)]
        common: Common,
    },
    /// Dimension of the symmetry algebra within a polynomial ansatz.
    DimensionProbe {
        equation: String,
        #[arg(long, default_value_t = 2)]
        degree: u32,
        /// Do not admit the kernel factors of f and g.
        #[arg(long)]
        no_kernel_factors: bool,
        /// Admit a further factor (repeatable).
        #[arg(long = "factor")]
        factors: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
}

/// Outcome of a subcommand: JSON report, human summary, pass/fail.
struct Outcome {
    report: serde_json::Value,
    summary: String,
    pass: bool,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Certification { .. }
        | Error::ClassMismatch(_)
        | Error::Constraint(_)
        | Error::LinearDependence
        | Error::NotInSpan { .. } => 1,
        _ => 2,
    }
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn bound_equation(src: &str, values: &BTreeMap<String, Q>) -> kolsym::Result<ClassEquation> {
    let e = input::equation(src)?;
    let known: BTreeMap<String, Q> = values
        .iter()
        .filter(|(k, _)| e.ctx.is_declared(k))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    if known.is_empty() {
        return Ok(e);
    }
    // a binding that violates a declared constraint is bad input
    e.bind_params(&known).map_err(|err| match err {
        Error::Constraint(m) => Error::Invalid(m),
        other => other,
    })
}

fn bound_generator(
    src: &str,
    ctx: &ParameterContext,
    values: &BTreeMap<String, Q>,
) -> kolsym::Result<VectorField> {
    let mut ctx = ctx.clone();
    let q = input::generator(src, &mut ctx)?;
    let mut s = symcore::Substitution::new();
    for (k, v) in values {
        s.set(
            symcore::Symbol::param(k),
            symcore::Expr::rational(v.clone()),
        );
    }
    q.try_map(|c| Ok(c.substitute(&s)?))
}

fn field_json(q: &VectorField) -> serde_json::Value {
    json!({"tau": q.tau.to_string(), "xi": q.xi.to_string(), "eta": q.eta.to_string(), "theta": q.theta.to_string()})
}

fn numbered_cases(r: &VerificationReport) -> usize {
    let mut seen = std::collections::BTreeSet::new();
    for t in &r.tables {
        for e in &t.entries {
            seen.insert((
                t.table,
                e.label.split('_').next().unwrap_or_default().to_string(),
            ));
        }
    }
    seen.len()
}

fn tables_summary(r: &VerificationReport, m: Option<&MutationReport>) -> String {
    let mut out = String::new();
    for t in &r.tables {
        let ok = t.entries.iter().filter(|e| e.pass).count();
        out += &format!(
            "table {}: {}/{} pass  ({})\n",
            t.table,
            ok,
            t.entries.len(),
            t.title
        );
        for e in t.entries.iter().filter(|e| !e.pass) {
            out += &format!("  case {} FAILED\n", e.label);
            for (i, g) in e.generators.iter().enumerate() {
                if let Some(res) = &g.residual {
                    out += &format!("    generator {}: residual {res}\n", i + 1);
                }
            }
            for (what, c) in [
                ("closure", &e.closure),
                ("kernel", &e.kernel),
                ("classifying", &e.classifying),
            ] {
                if !c.ok {
                    out += &format!("    {what}: {}\n", c.detail.clone().unwrap_or_default());
                }
            }
        }
    }
    let passed = r.entries - r.failed.len();
    out += &format!(
        "total: {passed}/{} rows pass ({} numbered cases)",
        r.entries,
        numbered_cases(r)
    );
    if let Some(m) = m {
        let caught = m.mutants.iter().filter(|x| x.detected).count();
        out += &format!(
            "\nmutations (seed {}): {caught}/{} detected; {} equivalent and {} malformed candidates skipped",
            m.seed,
            m.mutants.len(),
            m.equivalent,
            m.malformed
        );
        for x in m.mutants.iter().filter(|x| !x.detected) {
            out += &format!(
                "\n  undetected: table {} case {} generator {}: {} -> {}",
                x.table, x.label, x.generator, x.original, x.mutated
            );
        }
    }
    out
}

fn equation_json(e: &ClassEquation) -> serde_json::Value {
    to_value(&e.to_file())
}

fn run(cmd: Command) -> kolsym::Result<(Outcome, Common)> {
    Ok(match cmd {
        Command::Check {
            equation,
            generator,
            common,
        } => {
            let values = input::bindings(&common.params)?;
            let e = bound_equation(&equation, &values)?;
            let q = bound_generator(&generator, &e.ctx, &values)?;
            let r = invariance_residual(&q, &e)?;
            let pass = r.is_zero();
            let summary = if pass {
                format!("symmetry: yes\nequation: {e}")
            } else {
                format!("symmetry: no\nequation: {e}\nresidual: {r}")
            };
            let report = json!({"equation": equation_json(&e), "generator": field_json(&q), "symmetry": pass, "residual": r.to_string()});
            (
                Outcome {
                    report,
                    summary,
                    pass,
                },
                common,
            )
        }
        Command::VerifyTables {
            tables,
            files,
            mutations,
            seed,
            common,
        } => {
            let selected: Vec<Table> = if !files.is_empty() {
                files
                    .iter()
                    .map(|p| load_table(p))
                    .collect::<kolsym::Result<_>>()?
            } else if tables.is_empty() {
                bundled_tables()
            } else {
                tables
                    .iter()
                    .map(|n| bundled_table(*n))
                    .collect::<kolsym::Result<_>>()?
            };
            let r = verify_all_tables(&selected)?;
            let m = (mutations > 0)
                .then(|| mutation_sweep(&selected, seed, mutations))
                .transpose()?;
            let pass = r.pass && m.as_ref().is_none_or(|m| m.pass);
            let summary = tables_summary(&r, m.as_ref());
            let mut report = to_value(&r);
            if let Some(m) = &m {
                report["mutations"] = to_value(m);
            }
            (
                Outcome {
                    report,
                    summary,
                    pass,
                },
                common,
            )
        }
        Command::Map {
            equation,
            transformation,
            common,
        } => {
            let values = input::bindings(&common.params)?;
            let e = bound_equation(&equation, &values)?;
            let t = input::transformation(&transformation, &values)?;
            let out = apply_equivalence(&e, &t)?;
            let summary = format!("certified: yes\nfrom: {e}\nto:   {out}");
            let report = json!({"certified": true, "equation": equation_json(&out)});
            (
                Outcome {
                    report,
                    summary,
                    pass: true,
                },
                common,
            )
        }
        Command::Gauge { equation, common } => {
            let values = input::bindings(&common.params)?;
            let e = bound_equation(&equation, &values)?;
            let g = gauge_to_g1(&e)?;
            let how = if g.parametric {
                "parametric (∫g has no closed-form inverse; f is written in the old t)"
            } else {
                "certified"
            };
            let mut summary = format!("{how}\nfrom: {e}\nto:   {}", g.equation);
            if let Some(t) = &g.transformation {
                summary += &format!("\nt~ = {}", t.forward()[0]);
            }
            let report = json!({
                "parametric": g.parametric,
                "equation": equation_json(&g.equation),
                "transformation": g.transformation.as_ref().map(|t| to_value(&t.to_file())),
            });
            (
                Outcome {
                    report,
                    summary,
                    pass: true,
                },
                common,
            )
        }
        Command::Determine { gauge, common } => {
            let gauge: Gauge = gauge.parse()?;
            let sys = derive_determining(gauge)?;
            let matches = sys.matches_reference()?;
            let mut summary = format!(
                "ansatz: tau={}, xi={}, eta={}, theta={}\n",
                sys.ansatz.tau, sys.ansatz.xi, sys.ansatz.eta, sys.ansatz.theta
            );
            let mut eqs = Vec::new();
            for (m, c) in &sys.equations {
                summary += &format!("[{m}]  {c} = 0\n");
                eqs.push(json!({"monomial": m.to_string(), "coefficient": c.to_string()}));
            }
            summary += &format!(
                "matches the reference system: {}",
                if matches { "yes" } else { "no" }
            );
            let report = json!({"gauge": format!("{gauge:?}").to_lowercase(), "equations": eqs, "matches_reference": matches});
            (
                Outcome {
                    report,
                    summary,
                    pass: matches,
                },
                common,
            )
        }
        Command::Bracket {
            first,
            second,
            common,
        } => {
            let values = input::bindings(&common.params)?;
            let mut ctx = ParameterContext::new();
            let a = bound_generator(&first, &ctx, &values)?;
            ctx = ctx_with_params(&ctx, &a);
            let b = bound_generator(&second, &ctx, &values)?;
            let c = lie_bracket(&a, &b);
            let summary = format!("[Q1, Q2] = ({}, {}, {}, {})", c.tau, c.xi, c.eta, c.theta);
            (
                Outcome {
                    report: json!({"bracket": field_json(&c)}),
                    summary,
                    pass: true,
                },
                common,
            )
        }
        Command::Prolong { generator, common } => {
            let values = input::bindings(&common.params)?;
            let q = bound_generator(&generator, &ParameterContext::new(), &values)?;
            let p = prolong2(&q)?;
            let mut summary = format!(
                "tau = {}\nxi = {}\neta = {}\ntheta = {}",
                q.tau, q.xi, q.eta, q.theta
            );
            let mut coeffs = serde_json::Map::new();
            for (j, c) in &p.coeffs {
                if j.order() == 0 {
                    continue;
                }
                let name = JetSpace::name(*j);
                summary += &format!("\ntheta^{name} = {c}");
                coeffs.insert(name, json!(c.to_string()));
            }
            (
                Outcome {
                    report: json!({"field": field_json(&q), "prolongation": coeffs}),
                    summary,
                    pass: true,
                },
                common,
            )
        }
        Command::DimensionProbe {
            equation,
            degree,
            no_kernel_factors,
            factors,
            common,
        } => {
            let values = input::bindings(&common.params)?;
            let e = bound_equation(&equation, &values)?;
            let opts = ProbeOptions {
                degree,
                kernel_factors: !no_kernel_factors,
                extra_factors: factors,
            };
            let r = dimension_probe(&e, &opts)?;
            let summary = format!(
                "dimension: {}\n(degree {}, factors {}, {} unknowns, rank {})",
                r.dimension,
                r.degree,
                r.factors.join(", "),
                r.unknowns,
                r.rank
            );
            (
                Outcome {
                    report: to_value(&r),
                    summary,
                    pass: true,
                },
                common,
            )
        }
    })
}

/// Parameters found in the first generator stay declared for the second.
fn ctx_with_params(ctx: &ParameterContext, q: &VectorField) -> ParameterContext {
    let mut out = ctx.clone();
    for c in q.components() {
        for p in c.params() {
            let name = p.to_string();
            if !out.is_declared(&name) {
                out.declare(&name, &[]).expect("fresh parameter");
            }
        }
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((outcome, common)) => {
            if let Some(path) = &common.report {
                let text =
                    serde_json::to_string_pretty(&outcome.report).expect("reports serialize");
                if let Err(e) = std::fs::write(path, text + "\n") {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            let text = if common.json {
                serde_json::to_string_pretty(&outcome.report).expect("reports serialize")
            } else {
                outcome.summary
            };
            // a closed pipe (e.g. `| head`) is not an error of ours
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::from(if outcome.pass { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
