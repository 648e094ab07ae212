//! Numerical geometry of the k-entangled states and the k-block positive
//! operators on `C^d ⊗ C^d`.
//!
//! * [`tensor`]: bipartite vectors, Schmidt decompositions, k-norms.
//! * [`seesaw`]: alternating maximization for `S(k)` norms and support functions.
//! * [`cone`]: maps, k-block positivity, duality tests and membership brackets.
//! * [`volumetry`]: widths, volume radii and probability estimates.
//! * [`report`]: experiment configuration, verification suites and output.

pub mod cone;
pub mod ensembles;
pub mod error;
pub mod io;
pub mod linalg;
pub mod report;
pub mod seesaw;
pub mod tensor;
pub mod volumetry;

pub use error::{Error, Result};
