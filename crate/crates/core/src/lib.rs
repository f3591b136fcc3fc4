//! Conditional states of interferometer test masses under continuous homodyne
//! readout, and the entanglement between them.
//!
//! Internal units: ħ = m = 1, angular frequencies. See `params` for conversions.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod entangle;
pub mod error;
pub mod optimize;
pub mod params;
pub mod poly;
pub mod rational;
pub mod riccati;
pub mod spectra;
pub mod wiener;
