//! Graph Hopf algebra, truncated Laurent series, characters, Birkhoff
//! factorization, grading flows and the connection data `(a, b)`.
//!
//! Lie-algebra elements are modelled as infinitesimal characters with the
//! convolution commutator as bracket.

mod algebra;
mod characters;
mod decoration;
mod laurent;

pub use algebra::{
    add_to, mono_mul, monomial_element, mul_elements, Element, GenId, Generator, GeneratorKind, Grading, HopfAlgebra,
    Mono, Tensor, Tensor3,
};
pub use characters::{
    birkhoff, compose_antipode, connection_data, convolution, convolve_on, grading_flow, mu_prefactored,
    renormalized_value, rota_baxter_t, scaling_check, Birkhoff, Character, ConnectionData, Graded, GeneratorValues,
    Infinitesimal, LinearForm, RenormalizedValue, ZDerivative,
};
pub use decoration::{codim_singular_locus, monomial_ideal_dimension, restrict_to_coordinates, Atom, SliceDecoration};
pub use laurent::{Coeff, FSeries, LaurentSeries, QSeries, DEFAULT_HI, DEFAULT_LO, EXACT};
