//! Metric spatial depth for data in arbitrary metric spaces, together with
//! the comparison depths (lens, half-space), closed-form reference values,
//! kernel- and graph-induced metrics, DD-classification and seeded
//! simulation harnesses.
//!
//! All depth estimators consume distances only, so any metric plugs in
//! uniformly: build a [`matrix::DistanceMatrix`] with
//! [`metric::pairwise_distances`] (or load a cached one), then hand it to
//! the estimators in [`depth`].

pub mod classify;
pub mod depth;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod io;
pub mod kernel;
pub mod matrix;
pub mod metric;
pub mod oracle;
pub mod par;
pub mod points;

pub use error::{Error, Result};
