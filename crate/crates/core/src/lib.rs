//! Estimation noise, measurement disturbance and the uncertainty relations
//! between them, for finite-dimensional quantum instruments.

pub mod error;
pub mod inequality;
pub mod instrument;
pub mod metrics;
pub mod models;
pub mod operator;
pub mod quasiprob;
pub mod random;
pub mod report;
pub mod retrodiction;
pub mod sampling;
pub mod scenario;
pub mod tol;

pub use error::{Error, Result};
