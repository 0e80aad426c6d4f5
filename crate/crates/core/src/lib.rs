//! Order flow imbalance toolkit.
//!
//! - [`lob`]: snapshot types, validation and mid-price arithmetic.
//! - [`indicators`]: OFI, log-OFI, GOFI and log-GOFI over snapshot series.
//! - [`simulator`]: depth-capped order book simulator with a known
//!   price-impact slope.
//! - [`regression`]: no-intercept least squares and in/out-of-sample R².
//! - [`ingestion`]: snapshot CSV files, session filtering and day exclusion.
//! - [`config`]: TOML pipeline configuration.
//! - [`reference`]: slow from-scratch indicator computation used as an
//!   oracle.
//! - [`report`]: result tables in the layout of the usual R² comparison.

pub mod config;
pub mod indicators;
pub mod ingestion;
pub mod lob;
pub mod reference;
pub mod regression;
pub mod report;
pub mod simulator;
