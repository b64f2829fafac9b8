//! First-order calculus on discrete and metric graphs with general vertex
//! spaces.
//!
//! A finite graph is decorated at each vertex `v` with a subspace of
//! `C^{deg v}` (the *vertex space*), generalising scalar-valued functions on
//! vertices. On top of that decoration the crate builds exterior derivatives,
//! Dirac and Laplace operators, computes cohomology, indices, curvature and
//! spectra, and solves the companion problems on the metric graph: kernels of
//! the metric Dirac operator for all five boundary-condition families,
//! eigenvalues via a secular matrix, and vertex scattering matrices.
//!
//! The `graphforms` binary drives all of this from JSON problem files and
//! emits machine-checkable reports; see the crate README and
//! `docs/problem-schema.md`.

pub mod calculus;
pub mod driver;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod metric;
pub mod presets;
pub mod problem;
pub mod random;
pub mod relations;
pub mod report;
pub mod space;

pub use error::{Error, Result};
pub use graph::{build_graph, cycle_structure, flux, line_graph, subdivision_graph};
pub use graph::{CycleBasis, Dart, EdgeRecord, EdgeSpec, Graph, Sign};
pub use space::{make_space, SpaceKind, SpaceSpec, VertexSpace};
