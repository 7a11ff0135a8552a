//! Exact slow-light soliton on a switched control background, the special
//! functions it needs, and an independent Maxwell–Bloch integrator.

pub mod analytic;
pub mod domain;
pub mod error;
pub mod grid;
pub mod integrator;
pub mod special;
pub mod state;

pub use error::{Error, Result, ValidationError};
