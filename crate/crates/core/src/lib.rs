//! Curve framing in four-dimensional Euclidean space.
//!
//! Curves are given analytically (an expression per coordinate), picked
//! from a small catalog, or read from sampled points. The pipeline samples
//! the curve, converts derivatives to arclength, builds Frenet and parallel
//! transport frames, relates them through Euler angles and classifies the
//! curve as spherical, normal, rectifying or osculating.

pub mod classify;
pub mod cli;
pub mod curvespec;
pub mod error;
pub mod euler;
pub mod frame;
pub mod frenet;
pub mod ingest;
pub mod jet;
pub mod pipeline;
pub mod ptframe;
pub mod sampling;

pub use error::{Error, Result};
