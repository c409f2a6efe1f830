//! Kirchhoff and Symanzik polynomials, momentum data, the `R(t)` quadratic
//! form, the generic condition, and the `(f, m, omega, h, C)` case tables.

mod cases;
mod checks;
mod momentum;
mod symanzik;

pub use cases::{case_table_affine, case_table_sliced, CaseTableResult, Monomial2, Regime};
pub use checks::{auto_gram, exact_invariants, InvariantCheck};
pub use momentum::{MomentumData, MomentumMode};
pub use symanzik::{
    display_poly, generic_condition, kirchhoff_matrix, psi, psi_polynomial, r_form_value, second_symanzik,
    v_function, variable_names, GenericCheck, GenericReport, PMethod, PsiMethod,
};
