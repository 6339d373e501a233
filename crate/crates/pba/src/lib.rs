//! Finite partial Boolean algebras, their atom graphs, projector systems,
//! and graph-based noncontextuality witnesses.
//!
//! The crate models finite event structures where meet and join exist only
//! for compatible pairs, decides exclusivity and transitivity, rebuilds an
//! algebra from its atom graph where possible, derives algebras and states
//! from finite projector sets, and computes the independence number, the
//! Lovász number and the fractional packing number of weighted graphs.
//!
//! The data-parallel scans use rayon under the default `parallel` feature;
//! `pba::serial` exposes the sequential reference paths that the benchmarks
//! compare against.

mod bits;
mod builder;
mod exec;

pub mod algebra;
pub mod graph;
pub mod iso;
pub mod json;
pub mod lp;
pub mod quantum;
pub mod reconstruct;
pub mod sample;
pub mod scenarios;
pub mod sdp;
pub mod serial;
pub mod state;
pub mod witness;

pub use algebra::{
    AlgebraError, Context, PartialBooleanAlgebra, RawAlgebra, ValidationReport, Violation,
};
pub use graph::{graphs_isomorphic, AtomGraph, CliqueCover, GraphError};
pub use iso::are_isomorphic;
pub use reconstruct::{reconstruct, RealizabilityFailure, ReconstructionResult};
