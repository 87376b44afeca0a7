//! Econometric toolkit for short annual macro series.
//!
//! The crate covers the full path from a raw CSV of national-accounts data to
//! published-style tables and figures:
//!
//! * [`dataset`]: loading, deflation, aggregation, logs and differences
//! * [`stats`]: distribution functions and stored critical-value surfaces
//! * [`regress`]: OLS with diagnostics, VIF, ridge regression
//! * [`unitroot`]: augmented Dickey-Fuller tests
//! * [`varmod`]: lag selection, VAR estimation, impulse responses, FEVD
//! * [`coint`]: Johansen trace test and VECM estimation
//! * [`report`]: table/figure rendering and the replication pipeline

pub mod coint;
pub mod dataset;
mod error;
mod linalg;
pub mod regress;
pub mod report;
pub mod rng;
pub mod stats;
pub mod unitroot;
pub mod varmod;

pub use error::{Error, ErrorKind, Result};
