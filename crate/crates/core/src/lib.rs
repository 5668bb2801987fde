//! Attribute-based construction safety risk analytics.
//!
//! The crate turns structured injury data (an attribute catalog plus a
//! report/attribute presence matrix) into unitless safety risk values,
//! models their distribution with boundary-corrected kernel density
//! estimators, generates synthetic risk values through univariate and
//! bivariate smoothed bootstrap resampling, and answers quantile-based
//! risk-range and risk-escalation queries.
//!
//! Modules follow the pipeline order:
//!
//! * [`datamodel`] — domain types, CSV ingestion, synthetic matrix
//!   generation ([`demo`] holds the bundled demo catalog)
//! * [`riskcore`] — attribute-level and report-level risk computation
//! * [`density`] — kernel density estimation with Silverman bandwidths and
//!   transformation-based boundary correction
//! * [`simgen`] — smoothed-bootstrap generators with variance correction
//! * [`copula`] — empirical copula density on the unit square, dependence
//!   diagnostics
//! * [`quantiles`] — quantile machinery, risk ranges, escalation queries
//!
//! Every random code path is driven by an explicit 64-bit seed; no wall
//! clock or OS entropy is consulted anywhere.

#![forbid(unsafe_code)]

pub mod copula;
pub mod datamodel;
pub mod demo;
pub mod density;
pub mod error;
mod normal;
pub mod quantiles;
pub mod riskcore;
pub mod simgen;

pub use error::{Result, RiskError};
