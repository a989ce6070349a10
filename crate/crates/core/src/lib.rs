//! Lower and upper bounds for the bottom of the spectrum of Kirchhoff
//! Laplacians on infinite metric graphs, checked against eigenvalues of
//! finite truncations.
//!
//! Infinite graphs are handled as finite truncations ([`MetricGraph`]) whose
//! vertices remember their ambient degree; quantities "at infinity" are
//! reported as sequences over growing exclusion radii.

pub mod bounds;
pub mod curvature;
pub mod discrete_cheeger;
pub mod enumerate;
pub mod error;
pub mod fit;
pub mod generators;
pub mod graph;
pub mod io;
pub mod isoperimetry;
pub mod linalg;
pub mod report;
pub mod spectra;
pub mod volume;

pub use error::{Error, Result};
pub use generators::FamilySpec;
pub use graph::{Condition, Edge, Metric, MetricGraph, Vertex};
