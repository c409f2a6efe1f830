//! Parametric Feynman integrals in exact and numerical form.
//!
//! The crate is organised bottom-up:
//!
//! - [`poly`]: exact sparse polynomials over the rationals, determinants,
//!   gcds, Gröbner and local standard bases, finite-field point counts.
//! - [`graph`]: Feynman graphs and their combinatorics.
//! - [`graph_poly`]: Kirchhoff and Symanzik polynomials, momentum data and
//!   the `(f, m, omega, C)` case tables.
//! - [`hopf`]: the graph Hopf algebra, Laurent series, Birkhoff
//!   factorization and connection data.
//! - [`slicing`]: linear slices, singular points and Milnor numbers.
//! - [`integration`]: simplex cubature, regularized parametric integrals,
//!   Gelfand–Leray functions and Mellin transforms.
//! - [`formats`]: JSON schemas shared by the CLI and the Python bindings.

pub mod error;
pub mod formats;
pub mod graph;
pub mod graph_poly;
pub mod hopf;
pub mod integration;
pub mod linalg;
pub mod poly;
pub mod rational;
pub mod slicing;

pub use error::{Error, Result};
pub use rational::Q;
