//! Monte Carlo L^p-moment and affine quermassintegrals of convex bodies,
//! Steiner symmetrization by shadow systems, and suites that check the
//! associated isoperimetric inequalities numerically.
//!
//! Every estimator is a pure function of its inputs and a `u64` seed; sample
//! `i` of a stream is drawn from its own counter-keyed substream, so results
//! do not depend on the size of the rayon pool.

pub mod bodies;
pub mod error;
pub mod experiments;
pub mod grassmann;
pub mod hull;
pub mod numerics;
pub mod quermass;
pub mod rolodex;
pub mod symmetry;

pub use bodies::{standard_body, Body, BodyParams, Ellipsoid, HPolytope, VPolytope};
pub use error::{Error, Result};
pub use experiments::{run_suite, BodyCatalog, SuiteConfig, SuiteReport};
pub use grassmann::Subspace;
pub use hull::VolumeResult;
pub use numerics::{Linear, Matrix, McEstimate, RngStream, Vector};
pub use quermass::{i_kp, q_kp, QuermassSpec};
