//! Dyadic harmonic analysis on step functions.
//!
//! Walsh–Fourier partial sums, Marcinkiewicz and strong means, sequence BMO
//! norms and dyadic maximal operators, all computed exactly on functions that
//! are constant on the cells of a `2^B` (or `2^B × 2^B`) dyadic grid, plus an
//! experiment harness that measures weak-type constants and summability
//! trends.

pub mod dyadic;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod maximal;
pub mod means;
pub mod oracles;
pub mod partial_sums;
pub mod selftest;
pub mod transform;

pub use error::{Result, WssError};
