//! The class of equations, its point transformations and equivalence groups.

mod equation;
mod family;
mod gauge;
pub mod integrate;
mod quadruple;
mod transform;

pub use equation::{
    opaque_element, params_from_file, params_to_file, parse_element, ClassEquation, EquationFile,
    ParamsFile, ELEMENTS,
};
pub use family::{
    families, family, verify_theorem_group, CheckOutcome, FamilyReport, Law, TheoremFamily,
};
pub use gauge::{gauge_to_g1, ungauge, GaugeResult};
pub use integrate::{antiderivative, big_k_to_k, inverse_in_t, k_to_big_k};
pub use quadruple::{
    action, normalize, solve as solve_quadruple, ActionParams, CanonicalForm, Normalization,
    Quadruple,
};
pub use transform::{
    apply_equivalence, base_substitution, certification_residual, element_bindings,
    reduce_mod_equation, ElementMap, ElementMapFile, PointTransformation, TransformationFile,
};
