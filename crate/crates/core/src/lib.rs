//! Curvature prescription on triangulated surfaces with boundary.
//!
//! A surface with boundary is closed up by gluing a triangulated disk onto each
//! boundary loop ([`capping`]). Target data on the original surface is extended over
//! the caps so that the closed-surface Gauss–Bonnet constraint holds ([`fields`]),
//! a discrete conformal metric realizing the extended curvature is found by Newton's
//! method ([`solver`]), and that metric is restricted back to the original surface
//! ([`pipeline`]). Because every interior vertex of the original surface keeps all of
//! its incident faces, its curvature survives the restriction unchanged.

// Negated float comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capping;
pub mod curvature;
pub mod error;
pub mod fields;
pub mod fixtures;
pub mod io;
pub mod linalg;
pub mod mesh;
pub mod pipeline;
pub mod solver;

pub use capping::{cap_all, restrict, CapAtlas};
pub use curvature::{gauss_bonnet_check, CurvatureReport};
pub use error::{Error, Result};
pub use fields::{integrate, ExtensionReport, FaceForm, VertexField};
pub use mesh::{corner_angle, load_mesh, LengthSource, Mesh, MetricLengths};
pub use pipeline::{prescribe_form, prescribe_function, verify, PrescriptionResult};
pub use solver::{solve_prescribed_curvature, ConformalFactors, SolveOptions, SolveTrace};
