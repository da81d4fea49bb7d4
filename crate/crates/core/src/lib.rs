//! Mean and standard deviation estimates from five-number-summary data.

pub mod convert;
pub mod error;
pub mod estimators;
pub mod normal;
pub mod order_stats;
pub mod power_law;
pub mod quadrature;
pub mod render;
pub mod replication;
pub mod simulation;

pub use error::{Error, Result};
