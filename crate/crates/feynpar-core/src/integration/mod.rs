//! Numerical integration.
//!
//! Adaptive simplex cubature and Monte Carlo in [`cubature`], the
//! parametric Feynman integral with its dimensional-regularization series
//! and log moments in [`feynman`], differential forms and the projective
//! integral identity in [`forms`], and sublevel-set methods (Gelfand–Leray
//! functions, Mellin transforms, asymptotic fits, Leray regularization) in
//! [`levels`].

pub mod cubature;
pub mod feynman;
pub mod forms;
pub mod levels;
mod quad1d;

pub use cubature::{
    cubature, integrate_simplex, integrate_simplex_vec, standard_simplex, QuadMethod, QuadOptions, QuadratureResult,
    VecIntegrand, VecQuadrature,
};
pub use feynman::{
    apply_mass_scale, dimreg_series, feynman_u, iterated_log_integral, log_zeta_coeffs, FeynmanIntegral,
    FeynmanOptions, LogKind, Prefactor, SeriesResult, ZetaResult,
};
pub use forms::{
    feynman_identity, feynman_identity_sliced, homogeneous_p, integrate_form, integrate_form_boundary,
    projective_identity_residual, shifted_simplex, volume_form, DiffForm, IdentityReport,
};
pub use levels::{
    asymptotic_fit, boundary_gelfand_leray, gelfand_leray_j, leray_i_epsilon, mellin_transform, sublevel_integral,
    AsymptoticFit, Chart, Domain, GlOptions, LerayReport, LeraySample, Sample,
};

/// One-dimensional adaptive Gauss–Kronrod quadrature, `(value, error)`.
pub fn integrate_interval(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (v, e, _) = quad1d::integrate(f, a, b, tol, tol);
    (v, e)
}
