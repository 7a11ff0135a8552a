//! Scenario driver for the slow-light soliton: exports, plot scripts,
//! peak tracking and verification reports.

pub mod commands;
pub mod compare;
pub mod error;
pub mod export;
pub mod plot;
pub mod report;
pub mod study;
pub mod track;

pub use error::{CliError, Result};
