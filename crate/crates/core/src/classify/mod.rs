//! Group classification: invariance conditions, determining equations, the
//! classification tables and their verifier.

mod classifying;
mod determining;
mod kbranch;
mod mutation;
mod probe;
mod tables;

pub use classifying::{
    classifying_residual, general_k_residual, linear_k_residual, ClassifyingKind, F1_LINEAR,
};
pub use determining::{derive_determining, reference_system, DeterminingSystem, Gauge};
pub use kbranch::{certify_k_branches, solve_k_branches, KBranch};
pub use mutation::{mutate_generator, mutation_sweep, tokens, Mutant, MutationReport};
pub use probe::{dimension_probe, ProbeOptions, ProbeResult};
pub use tables::{
    bundled_table, bundled_tables, load_table, verify_all_tables, verify_entry, verify_table,
    CaseFile, CheckResult, EntryReport, GeneratorReport, Table, TableFile, TableReport,
    VerificationReport,
};

use symcore::Expr;

use crate::classpde::{reduce_mod_equation, ClassEquation};
use crate::error::Result;
use crate::fields::{apply_prolonged, prolong2, VectorField};

/// `Q^(2)Δ` restricted to solutions: `u_t`, `u_tx`, `u_ty` are eliminated.
/// `q` is a point symmetry of `e` exactly when the result vanishes.
pub fn invariance_residual(q: &VectorField, e: &ClassEquation) -> Result<Expr> {
    let pq = prolong2(q)?;
    let r = apply_prolonged(&pq, &e.defining_expr())?;
    reduce_mod_equation(&r, e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use symcore::{parse, ParameterContext};

    #[test]
    fn translations_and_scalings() {
        let e = ClassEquation::generic();
        let ctx = ParameterContext::new();
        let field = |s: [&str; 4]| VectorField::parse(&s, &ctx).unwrap();
        assert!(invariance_residual(&field(["0", "1", "0", "0"]), &e)
            .unwrap()
            .is_zero());
        assert!(invariance_residual(&field(["0", "0", "1", "0"]), &e)
            .unwrap()
            .is_zero());
        assert!(!invariance_residual(&field(["0", "x", "0", "0"]), &e)
            .unwrap()
            .is_zero());
        let burgers = ClassEquation::new(Expr::one(), Expr::one(), Expr::u(), ctx.clone()).unwrap();
        assert!(!invariance_residual(&field(["t", "0", "0", "0"]), &burgers)
            .unwrap()
            .is_zero());
        assert!(
            invariance_residual(&field(["2*t", "0", "y", "-2*u"]), &burgers)
                .unwrap()
                .is_zero()
        );
        assert!(invariance_residual(&field(["0", "x", "0", "u"]), &burgers)
            .unwrap()
            .is_zero());
        let exp_k = ClassEquation::new(
            Expr::one(),
            Expr::one(),
            parse("e^u", &ctx).unwrap(),
            ctx.clone(),
        )
        .unwrap();
        assert!(
            invariance_residual(&field(["2*t", "2*x", "y", "0"]), &exp_k)
                .unwrap()
                .is_zero()
        );
    }
}
