//! Simulation and verification tools for heavy-tailed partial sum limits.
//!
//! The crate has three layers:
//!
//! * **Finite-sample side** ([`models`]): two-sided Pareto innovations, IID and
//!   finite moving-average series, and the normalizing sequences `a_n`, `b_n`,
//!   `c_n` used to center and scale partial sums.
//! * **Limit side** ([`cluster`], [`limit`]): tail processes and spectral
//!   clusters of the series, Poisson series built from them, the jump/drift
//!   construction of the limit pair `(V, W)`, stable characteristic triples,
//!   characteristic functions, and a direct stable sampler used as an
//!   independent cross-check.
//! * **Comparison side** ([`path`], [`metric`], [`verify`]): cadlag paths on
//!   `[0, 1]`, completed graphs, the Skorokhod M1 metric computed by dynamic
//!   programming, and Monte Carlo experiments that test distributional
//!   convergence of self-normalized partial sum processes.
//!
//! Numeric code is generic over the scalar type through [`scalar::Real`];
//! `f64` aliases for the main types are exported at the crate root.

pub mod cluster;
pub mod limit;
pub mod metric;
pub mod models;
pub mod path;
pub mod quad;
pub mod scalar;
pub mod seeds;
pub mod special;
pub mod verify;

pub use scalar::Real;

/// Cadlag path over `f64`, the concrete type used by the CLI and experiments.
pub type Path64 = path::CadlagPath<f64>;
/// Completed-graph polyline over `f64`.
pub type Polyline64 = path::GraphPolyline<f64>;
/// Point measure over `f64`.
pub type PointMeasure64 = limit::PointMeasure<f64>;
/// Poisson series over `f64`.
pub type PoissonSeries64 = limit::PoissonSeries<f64>;
/// Characteristic triple over `f64`.
pub type CharTriple64 = limit::CharTriple<f64>;
/// Innovation law over `f64`.
pub type InnovationLaw64 = models::InnovationLaw<f64>;
/// Model specification over `f64`.
pub type ModelSpec64 = models::ModelSpec<f64>;
/// Normalizing sequence over `f64`.
pub type NormSeq64 = models::NormSeq<f64>;
/// Cluster law over `f64`.
pub type ClusterLaw64 = cluster::ClusterLaw<f64>;
/// Cluster constants over `f64`.
pub type ClusterConstants64 = cluster::ClusterConstants<f64>;
