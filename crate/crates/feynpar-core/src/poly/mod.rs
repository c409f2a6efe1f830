//! Exact multivariate polynomials over the rationals.

mod det;
mod division;
mod ffield;
mod gcd;
mod groebner;
mod local;
mod multipoly;
mod order;

pub use det::{det_cofactor, det_polynomial, det_rational, PolyMatrix};
pub use division::{div_exact, divides_poly, reduce};
pub use ffield::{finite_field_point_count, is_prime, ModPoly, ENUMERATION_LIMIT};
pub use gcd::{content, gcd, gcd_divides, GcdDivides};
pub use groebner::{
    count_standard_monomials, groebner_basis, s_polynomial, standard_monomials, PolyIdeal, QuotientDim,
    DEFAULT_STEP_BUDGET, MAX_ARITY,
};
pub use local::{mora_normal_form, standard_basis};
pub use multipoly::{CompiledPoly, Exps, Homogeneity, MultiPoly};
pub use order::{divides, grlex_cmp, lcm, MonomialOrder};
