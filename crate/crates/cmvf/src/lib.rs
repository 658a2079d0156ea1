//! Combinatorial multivector fields on Lefschetz complexes.
//!
//! The crate builds finite cell complexes (simplicial, cubical, Delaunay),
//! discretizes classical vector fields into combinatorial multivector fields,
//! and analyzes the resulting combinatorial dynamics: finest Morse
//! decompositions, Conley indices, Morse intervals with attractor/repeller
//! tests, and connection matrices over exact field arithmetic.
//!
//! Entry points:
//! - [`lefschetz::LefschetzComplex`] — the cell complex and its builders.
//! - [`mvf::MultivectorField`] — partitions of a complex into multivectors.
//! - [`dynamics::Dynamics`] — flow graph, Morse decomposition, intervals.
//! - [`conley`] — Conley indices and connection matrices.
//! - [`discretize`] — expression parsing and vector-field sampling.
//! - [`pipeline`] — the end-to-end runs behind the `cmvf` binary.
//!
//! Each major capability has a runnable demo under `examples/`.

pub mod algebra;
pub mod conley;
pub mod discretize;
pub mod dynamics;
pub mod error;
pub mod homology;
pub mod lefschetz;
pub mod mvf;
pub mod pipeline;
pub mod render;
pub mod systems;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
