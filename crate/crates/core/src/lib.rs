//! View selection toolkit for neural-rendering datasets.
//!
//! The crate covers the whole pipeline from posed cameras to a chosen
//! training (or test) subset:
//!
//! - [`scene`]: cameras, view sets, meshes, surface samples and co-visibility.
//! - [`metrics`]: great-circle, Euclidean, photogrammetric and combined view distances.
//! - [`fvs`]: greedy farthest view sampling.
//! - [`igs`]: the iterative select/evaluate/sample loop with greedy, Zipf and
//!   mixture-of-vMF samplers.
//! - [`relax`]: Lloyd relaxation of freshly proposed views.
//! - [`coverage`]: the ray-cast coverage density field over a mesh.
//! - [`evaluator`]: the scoring boundary (synthetic oracle or external process).
//! - [`split`]: uniform-sphere test poses and farthest-view re-splits.
//! - [`io`]: transforms files, COLMAP text models, manifests and exports.
//!
//! Data-parallel inner loops (ray casting, Lloyd assignment, oracle scoring,
//! distance updates) go through [`par::Exec`]; with the `parallel` feature
//! disabled every path runs sequentially and produces identical results.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coverage;
pub mod error;
pub mod evaluator;
pub mod fvs;
pub mod geometry;
pub mod hull;
pub mod igs;
pub mod io;
pub mod mesh;
pub mod metrics;
pub mod par;
pub mod random;
pub mod relax;
pub mod scene;
pub mod split;

pub use error::{Error, EvaluatorError, Result};
pub use scene::{CameraView, CovisibilityMatrix, Intrinsics, Mat3, QualityReport, SurfaceSamples, Vec3, ViewSet};
