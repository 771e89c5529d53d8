//! Bifurcation analysis and simulation of the delayed diffusive
//! Holling-Tanner predator-prey system near its Turing-Hopf point.

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod model;
pub mod normal_form;
pub mod presets;
pub mod sim;
pub mod spectrum;
pub mod unfolding;
pub mod verify;

pub use error::{Error, Result};
pub use model::{Equilibrium, LinearCoeffs, ModelParams};
