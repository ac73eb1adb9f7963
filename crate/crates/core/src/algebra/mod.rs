//! The Lie algebra sp(2) in `(lambda, u, v, w)` coordinates.
//!
//! An element `(lambda, u, v, w)` stands for the quaternionic matrix
//!
//! ```text
//!   1/2 * [ u + w     v - lambda ]
//!         [ v + lambda  u - w    ]
//! ```
//!
//! where `u`, `v`, `w` are pure imaginary quaternions written as vectors of
//! R^3. The isotropy algebra `h` is the `lambda` line and `m` its orthogonal
//! complement `lambda = 0`.

mod element;
mod quaternion;

pub use element::{ad_h, bi_inner, bracket, project_h, project_m, SpElement, Vec3};
pub use quaternion::{bracket_oracle, from_matrix, to_matrix, trace_form, QuatMatrix, Quaternion};

/// Absolute tolerance for unit-scale comparisons.
pub const TOL: f64 = 1e-10;
