//! Feynman graphs: validation, incidence and circuit matrices, spanning
//! trees, cut sets, subgraphs, contractions and divergent subgraphs.
//!
//! Edges are oriented and ordered; edge `i` carries the Schwinger parameter
//! `t_{i+1}`. Everything downstream relies on that order.

mod combinat;
mod edit;
mod model;

pub use combinat::{Combinations, CutSet, DEFAULT_ENUMERATION_CAP};
pub use edit::{subgraph_satisfies, AllOnePi, DivergencePredicate, GraphEdit, PowerCounting, Subgraph, MAX_SUBGRAPH_EDGES};
pub use model::{builders, Dsu, Edge, FeynmanGraph, GraphDescription, Leg, Theory};
