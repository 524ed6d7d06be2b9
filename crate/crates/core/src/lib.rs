//! Analysis toolkit for the damped anisotropic Rabi model with an A² term.
//!
//! The [`meanfield`] and [`stability`] modules work in the thermodynamic
//! (Δ/ω → ∞) limit, [`gaussian`] adds quadratic fluctuations on top of a
//! mean-field state, [`dynamics`] integrates the semiclassical cavity
//! equation and [`fockspace`] solves the full Lindblad problem at finite Δ/ω.

pub mod dynamics;
pub mod fockspace;
pub mod gaussian;
pub mod meanfield;
pub mod params;
pub mod roots;
pub mod stability;

pub use params::{ModelParams, ParamError, ParamPath};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
