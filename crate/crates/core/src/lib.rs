//! Event-log abstraction based on sessions.
//!
//! The pipeline turns a low-level event log into a high-level one in four
//! steps: split each trace into sessions wherever the gap between
//! consecutive events reaches a threshold, encode every session as a vector
//! over the activity alphabet, cluster the vectors, then replace each
//! session with a start/complete event pair named after its cluster.
//! Normalized-centroid heatmaps support the naming step when domain
//! knowledge is available; automatic naming covers the rest.

pub mod abstraction;
pub mod cluster;
pub mod encode;
pub mod error;
pub mod log;
pub mod session;
pub mod synth;
pub mod view;

pub use error::{Error, Result};
