//! Uniform hyperbolic parametrization of the pseudo-hyperbolic space
//! `H^{s,r} = { p ∈ ℝ^{s+r} : -Σ t_i² + Σ x_j² = R² }`.
//!
//! - [`geometry`]: signatures, the signed form, the closed-form curve.
//! - [`ode`]: the first-order system the curve solves, RK4, residual checks.
//! - [`bundle`]: tangent-bundle towers, projection, lifts of the curve.
//! - [`transform`]: boosts, block rotations, isometry checks.
//! - [`verify`]: the invariant sweep over a grid of signatures and radii.
//! - [`export`]: CSV and JSON trajectory files.

pub mod bundle;
pub mod error;
pub mod export;
pub mod geometry;
pub mod ode;
pub mod transform;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{
    effective_radius, inner_product, is_h_orthogonal, is_on_hyperboloid, point_at, velocity_at,
    CurveSpec, PseudoPoint, Signature, TangentVector, DEFAULT_TOL,
};
pub use ode::{
    closed_form_trajectory, integrate, max_deviation, second_order_residual, system_rhs,
    IntegratorConfig, Provenance, Sample, SystemState, Trajectory,
};
