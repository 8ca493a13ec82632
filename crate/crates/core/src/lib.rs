//! Covert throughput of a two-hop decode-and-forward relay watched by a
//! radiometer warden with uncertain noise power.
//!
//! The crate evaluates the warden's detection error probability (DEP),
//! the outage probability and covert throughput of the relay link for
//! single-antenna and antenna-selection / maximal-ratio-combining
//! configurations, and maximizes throughput under covertness,
//! reliability and power constraints. Every closed form has an
//! independent quadrature reference and a seeded Monte-Carlo estimator.
//!
//! ```
//! use covert_relay::detection::min_dep_two_hop;
//! use covert_relay::model::{AntennaConfig, SystemParams};
//!
//! let params = SystemParams::from_dbm(3.0, 3.0, -5.0, 1.5, AntennaConfig::single()).unwrap();
//! let xi = min_dep_two_hop(&params).unwrap();
//! assert!(xi > 0.0 && xi < 1.0);
//! ```

pub mod channel;
pub mod cli;

pub mod detection;
pub mod discrepancy;
pub mod error;
pub mod figures;

pub mod model;
pub mod montecarlo;
pub mod optimize;
pub mod quad;
pub mod specfun;
pub mod table;
pub mod throughput;
pub mod validation;

pub use error::{Error, Result};
