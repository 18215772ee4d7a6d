//! Construction and verification of switching networks for directed connectivity.
//!
//! The pieces, bottom up:
//!
//! - [`graph`]: vertex spaces, input graphs, s-t cuts and augmented input families.
//! - [`knowledge`]: knowledge sets, certain-knowledge descriptions, `G'(V, m)` and `sc`.
//! - [`cutspace`]: sparse functions on cuts in the basis `e_V` and the transition test.
//! - [`network`]: switching networks, acceptance, monotone soundness, `G'(H)`, file format.
//! - [`constructions`]: the ordering-chain certain-knowledge network and the
//!   Fourier-function network built from chains of cut functions.
//! - [`bounds`]: useful knowledge sets, overlap probabilities and closed-form bounds.
//!
//! Cut functions are generic over [`Coefficient`]; the aliases below fix the scalar.

pub mod bounds;
pub mod constructions;
pub mod cutspace;
pub mod error;
pub mod graph;
pub mod knowledge;
pub mod network;
pub mod scalar;

pub use cutspace::{can_transition, can_transition_bruteforce, reach, CutFunction};
pub use error::{Error, Result};
pub use graph::{Cut, Edge, EdgeSet, InputFamily, InputGraph, Limits, Vertex, VertexSet, VertexSpace};
pub use knowledge::{CkDescription, KnowledgeSet};
pub use network::{accepts, is_complete_monotone, is_sound_monotone, Label, SwitchingNetwork};
pub use scalar::{Coefficient, Dyadic};

pub type DyadicCutFunction = CutFunction<Dyadic>;
pub type RationalCutFunction = CutFunction<num_rational::BigRational>;
pub type FloatCutFunction = CutFunction<f64>;
