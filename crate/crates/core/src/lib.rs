//! Contextuality scenarios in three languages and the comparisons between
//! them.
//!
//! The crate implements:
//!
//! * sheaf-style scenarios `(Σ, O)` with empirical models and push-forwards,
//! * bundle scenarios of simplicial complexes with the nerve-complex monad
//!   and Kleisli relations,
//! * simplicial bundle scenarios of (dimension-bounded) simplicial sets with
//!   simplicial distributions,
//! * the comparison embeddings between the three settings together with the
//!   natural isomorphisms identifying their distribution theories, and
//! * an exact decision procedure for contextuality over non-negative
//!   rationals (feasibility certificates / separating functionals) and over
//!   booleans (support extension analysis).
//!
//! All arithmetic is exact; nothing in the crate touches floating point.
//! See the `examples/` directory for runnable tours of each capability.

pub mod bundle;
pub mod cli;
pub mod complex;
pub mod contextuality;
pub mod dist;
pub mod doc;
pub mod error;
pub mod lp;
pub mod nerve;
pub mod rng;
pub mod sample;
pub mod scenario;
pub mod sdist;
pub mod semiring;
pub mod sset;

pub use complex::{Complex, ComplexMap, MapFlags, Outcome, Simplex, Vertex};
pub use dist::{convex_mix, Dist};
pub use error::{Error, Result};
pub use semiring::{Rat, Semiring};
