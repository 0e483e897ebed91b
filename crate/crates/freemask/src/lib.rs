//! Limiting *-moments of masked random matrix models.
//!
//! The exact side enumerates non-crossing pair partitions to evaluate
//! circular, elliptic and Marchenko-Pastur limit moments; the simulation side
//! samples entry-correlated random matrices, applies deterministic 0/1 masks,
//! and estimates trace moments, covariance spectra and freeness relations to
//! compare against those limits.

pub mod combinat;
pub mod ensembles;
pub mod error;
pub mod expcli;
pub mod freelimits;
pub mod linalg;
pub mod masks;
pub mod moments;
pub mod spectra;
pub mod verify;

pub use error::{Error, Result};
