//! Cassinian metric and related hyperbolic-type quantities on balls,
//! half-spaces and punctured spaces.
//!
//! * [`geometry`]: points, domains, `δ_D`, boundary sampling.
//! * [`metrics`]: `c_D`, `j_D`, `ρ` of the ball and half-plane, `v_D`, `p_D`.
//! * [`moebius`]: ball automorphisms and the sharp Cassinian distortion bounds.
//! * [`inner`]: Cassinian path length and the inner metric `c̃_D`.
//! * [`harness`]: seeded verification suites for the inequalities.
//! * [`cli`]: the `cassini` command-line front end.

pub mod cli;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod inner;
pub mod metrics;
pub mod moebius;
pub mod quadrature;
mod solver;
pub mod svg;

pub use error::{Error, Result};
pub use geometry::{Domain, Point};
