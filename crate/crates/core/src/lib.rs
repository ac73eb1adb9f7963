//! Curvature of invariant metrics on the homogeneous space Sp(2)/U(1), with
//! U(1) a short-root circle.
//!
//! The crate models sp(2) in `(lambda, u, v, w)` coordinates and provides:
//!
//! * [`algebra`]: bracket, bi-invariant product, isotropy action and a
//!   quaternionic matrix oracle;
//! * [`metric`]: invariant metrics `M` and deformations `M_t = I + tL`;
//! * [`curvature`]: the homogeneous sectional curvature formula and its
//!   truncated Taylor expansion in `t`;
//! * [`cartan`]: Cartan subalgebras inside `m` and their four isotropy-orbit
//!   families;
//! * [`experiments`]: the numerical checks built on the above;
//! * [`cli`]: the `sp2lab` command line driver.

pub mod algebra;
pub mod cartan;
pub mod cli;
pub mod curvature;
pub mod error;
pub mod experiments;
pub mod jet;
pub mod linalg;
pub mod metric;
pub mod rng;

pub use error::{Error, Result};
