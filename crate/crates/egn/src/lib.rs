//! Exact computations for the Ext-algebras of pointed curves.
//!
//! This crate computes, in exact rational arithmetic, the graded Hochschild
//! cohomology of a family of finite-dimensional quiver algebras attached to
//! pointed curves, the expansion constants of rational functions on nodal
//! curves, the linear systems that reconstruct those constants from the
//! leading coefficients, and the rank of the tangent map of the resulting
//! moduli parametrization. A CLI (`egn`) exposes each computation with JSON
//! output.

pub mod curve;
pub mod hochschild;
pub mod linalg;
pub mod poly;
pub mod quiver;
pub mod reconstruct;
pub mod rat;
pub mod resolution;
pub mod series;
pub mod tangent;
