//! Random compact 3-manifolds with boundary, built by gluing `n` truncated
//! tetrahedra along their hexagonal faces.
//!
//! The crate samples and enumerates the gluing space, computes the
//! combinatorial invariants of the resulting complex (interior edge orbits,
//! boundary surface and its genus, integer homology, dual-graph expansion),
//! and ships a Monte Carlo harness that compares the measured statistics
//! against their asymptotic laws.

pub mod boundary;
pub mod complex;
pub mod dual_graph;
pub mod error;
pub mod harness;
pub mod homology;
pub mod model;
pub mod peeling;
pub mod rng;
pub mod snf;
pub mod spectral;
pub mod tet;
pub mod unionfind;
pub mod volume;

pub use error::{Error, Result};
pub use model::{FaceId, FacePair, GluingInstance, Rotation};
pub use rng::Seed;
