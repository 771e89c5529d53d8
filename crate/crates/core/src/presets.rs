//! Parameter sets used throughout the examples and tests. `r` and `tau` are
//! placeholders; the critical values are computed.

use crate::model::ModelParams;

/// `d1 = 0.5, d2 = 8, a = 1, b = 0.1, l = 5`: Turing mode 2, Hopf mode 0 first.
pub fn baseline() -> ModelParams {
    ModelParams::new(0.5, 8.0, 1.0, 0.1, 5.0, 1.0, 0.0)
}

/// Turing mode 2 meets the homogeneous Hopf mode; well separated from mode 1.
pub fn mode_two() -> ModelParams {
    ModelParams::new(2.53, 9.87, 0.9, 0.001, 5.45, 1.0, 0.0)
}

/// Turing modes 1 and 2 nearly tie at the Turing-Hopf point.
pub fn mixed_modes() -> ModelParams {
    ModelParams::new(1.68, 16.0, 0.8, 0.0004, 4.37, 1.0, 0.0)
}
