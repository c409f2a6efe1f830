//! Linear slices of parameter space, restriction of graph polynomials,
//! singular-locus equations, critical points and Milnor numbers.
//!
//! Slice polynomials are limited to three variables; that already covers
//! plane curves and surfaces and keeps the standard-basis work small.

mod milnor;
mod singular;
mod slice;

pub use milnor::{
    feynman_subspace_dim, global_jacobian_dim, local_span_dimension, milnor_number, milnor_number_truncated,
    milnor_report, tree_path_form, two_leg_vertices, FeynmanSubspace, MilnorReport, PointMilnor, MAX_H_PRODUCTS,
};
pub use singular::{
    deletion_check, find_projective_singular_points, find_singular_points, rational_roots, singular_locus_system,
    solve_system, SingularPoint, MAX_SLICE_VARS,
};
pub use slice::{make_slice, restrict, LinearSlice, SliceSpec, SLICE_ATTEMPTS};
