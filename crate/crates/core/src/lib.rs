//! Computable finite real trees.
//!
//! The crate builds finite representations of compact real trees, answers
//! geodesic queries on them, measures how tree-like a finite metric space
//! is, reconstructs trees from tree metrics, samples random trees from
//! excursions and computes Gromov-Hausdorff distances between small spaces.

pub mod build;
pub mod gh;
pub mod measure;
pub mod metric;
pub mod query;
pub mod random;
pub mod realize;
pub mod scalar;
pub mod tree;
pub mod triangles;

pub use metric::{Delta, FiniteMetric, HyperbolicityReport, MetricError};
pub use query::{Branch, LeafSkeleton, QueryError, Segment, TreePoint};
pub use scalar::{Rational, Scalar, EPSILON};
pub use tree::{Edge, TreeError, WeightedTree};
