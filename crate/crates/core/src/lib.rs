//! Subtrajectory clustering: cover a set of polygonal curves by few center
//! subcurves so that every point of every curve lies on a subcurve within
//! Fréchet distance Δ of some center.
//!
//! The pipeline simplifies each curve, collects extremal points of the
//! pairwise free spaces, enumerates candidate centers between extremal
//! coordinates, computes each candidate's coverage, and picks centers with a
//! greedy set cover. The core is generic over [`Scalar`] (`f32` or `f64`);
//! the aliases below fix `f64`, which the IO, evaluation and CLI layers use.

pub mod candidates;
pub mod coverage;
pub mod error;
pub mod eval;
pub mod freespace;
pub mod geometry;
pub mod io_formats;
pub mod pipeline;
pub mod scalar;
pub mod setcover;
pub mod simplification;
mod spatial;
pub mod synthetic;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use pipeline::cluster;
pub use scalar::Scalar;

pub type CurveParam = geometry::CurveParam<f64>;
pub type PolygonalCurve = geometry::PolygonalCurve<f64>;
pub type Subcurve = geometry::Subcurve<f64>;
pub type CoverageSet = coverage::CoverageSet<f64>;
pub type Simplification = simplification::Simplification<f64>;
pub type Candidate = candidates::Candidate<f64>;
pub type Solution = setcover::Solution<f64>;
pub type Config = pipeline::ClusteringConfig<f64>;
pub type Clustering = pipeline::ClusteringResult<f64>;
