//! Linear algebra, linear programming, random streams and Monte Carlo
//! statistics shared by every other module.

pub mod linalg;
pub mod lp;
pub mod rng;
pub mod special;
pub mod stats;

pub use linalg::{dot, norm, qr_orthonormalize, Matrix, Vector};
pub use lp::{LpOutcome, LpProblem, LpSolution};
pub use rng::{rng_draw_gaussian, RngStream, StreamRng};
pub use special::{binomial, sphere_area, unit_ball_volume};
pub use stats::{KahanSum, Linear, McEstimate, Transform};
