//! The delayed diffusive Holling-Tanner system
//!
//! ```text
//! u_t - d1 u_xx = u(1 - u) - a u v / (u + b)
//! v_t - d2 v_xx = r v (1 - v(t - tau) / u(t - tau))
//! ```
//!
//! on `(0, l*pi)` with homogeneous Neumann conditions. This module holds the
//! parameter set, the coexistence equilibrium, the linearization at it, and
//! every second and third order partial derivative of the kinetics.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One instance of the system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub d1: f64,
    pub d2: f64,
    pub a: f64,
    pub b: f64,
    /// Domain is `(0, l*pi)`.
    pub l: f64,
    pub r: f64,
    pub tau: f64,
}

impl ModelParams {
    pub fn new(d1: f64, d2: f64, a: f64, b: f64, l: f64, r: f64, tau: f64) -> Self {
        Self {
            d1,
            d2,
            a,
            b,
            l,
            r,
            tau,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("d1", self.d1),
            ("d2", self.d2),
            ("a", self.a),
            ("b", self.b),
            ("l", self.l),
            ("r", self.r),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "{name} must be finite and > 0, got {value}"
                )));
            }
        }
        if !(self.tau.is_finite() && self.tau >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "tau must be finite and >= 0, got {}",
                self.tau
            )));
        }
        Ok(())
    }

    pub fn with_r(self, r: f64) -> Self {
        Self { r, ..self }
    }

    pub fn with_tau(self, tau: f64) -> Self {
        Self { tau, ..self }
    }

    /// Same system shifted by `(alpha1, alpha2)` in the `(r, tau)` plane.
    pub fn shifted(self, alpha1: f64, alpha2: f64) -> Self {
        Self {
            r: self.r + alpha1,
            tau: self.tau + alpha2,
            ..self
        }
    }

    /// `n^2 / l^2`, the Neumann eigenvalue of `-d^2/dx^2` for `cos(n x / l)`.
    pub fn wave_eig(&self, n: usize) -> f64 {
        let n = n as f64;
        n * n / (self.l * self.l)
    }

    pub fn domain_length(&self) -> f64 {
        self.l * std::f64::consts::PI
    }

    /// `a > (b+1)^2 / (2(1-b))`, needed for the equilibrium to be destabilizable.
    pub fn a_above_threshold(&self) -> bool {
        self.b < 1.0 && self.a > (self.b + 1.0).powi(2) / (2.0 * (1.0 - self.b))
    }

    /// Prey and predator reaction terms.
    #[inline]
    pub fn kinetics(&self, u: f64, v: f64, u_tau: f64, v_tau: f64) -> [f64; 2] {
        [
            u * (1.0 - u) - self.a * u * v / (u + self.b),
            self.r * v * (1.0 - v_tau / u_tau),
        ]
    }
}

/// Coexistence equilibrium `(u0, u0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub u0: f64,
}

impl Equilibrium {
    pub fn v0(&self) -> f64 {
        self.u0
    }
}

/// Entries `A0 = df1/du` and `B0 = df1/dv` at the equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearCoeffs {
    pub a0: f64,
    pub b0: f64,
}

pub fn equilibrium(params: &ModelParams) -> Equilibrium {
    let s = params.a + params.b - 1.0;
    let u0 = 0.5 * (-s + (s * s + 4.0 * params.b).sqrt());
    Equilibrium { u0 }
}

pub fn linear_coeffs(params: &ModelParams, eq: &Equilibrium) -> LinearCoeffs {
    let u0 = eq.u0;
    let b = params.b;
    LinearCoeffs {
        a0: u0 / (b + u0) * (1.0 - b - 2.0 * u0),
        b0: u0 - 1.0,
    }
}

/// Residual of `u0^2 + (a+b-1) u0 - b = 0`.
pub fn equilibrium_residual(params: &ModelParams, eq: &Equilibrium) -> f64 {
    let u0 = eq.u0;
    u0 * u0 + (params.a + params.b - 1.0) * u0 - params.b
}

/// Argument slots of the kinetics: current `u`, `v` and delayed `u`, `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Var {
    U = 0,
    V = 1,
    UTau = 2,
    VTau = 3,
}

impl Var {
    pub const ALL: [Var; 4] = [Var::U, Var::V, Var::UTau, Var::VTau];
}

type Vec2 = [f64; 2];

/// Second and third derivatives of `(f1, f2)` in `(u, v, u_tau, v_tau)` at
/// the equilibrium, optionally multiplied by the delay of the time-rescaled
/// system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeTensor {
    second: [[Vec2; 4]; 4],
    third: [[[Vec2; 4]; 4]; 4],
    /// `Some(tau)` when every entry carries the factor `tau`.
    pub scale: Option<f64>,
}

impl DerivativeTensor {
    pub fn second(&self, i: Var, j: Var) -> Vec2 {
        self.second[i as usize][j as usize]
    }

    pub fn third(&self, i: Var, j: Var, k: Var) -> Vec2 {
        self.third[i as usize][j as usize][k as usize]
    }

    /// Tensor with all third-order entries removed.
    pub fn without_cubic(&self) -> Self {
        Self {
            third: [[[[0.0; 2]; 4]; 4]; 4],
            ..self.clone()
        }
    }

    /// `D^2 F [x, y]` for complex argument vectors over `(u, v, u_tau, v_tau)`.
    pub fn bilinear(&self, x: &[Complex64; 4], y: &[Complex64; 4]) -> [Complex64; 2] {
        let mut out = [Complex64::new(0.0, 0.0); 2];
        for i in 0..4 {
            for j in 0..4 {
                let w = x[i] * y[j];
                let t = self.second[i][j];
                out[0] += w * t[0];
                out[1] += w * t[1];
            }
        }
        out
    }

    /// `D^3 F [x, y, z]`.
    pub fn trilinear(
        &self,
        x: &[Complex64; 4],
        y: &[Complex64; 4],
        z: &[Complex64; 4],
    ) -> [Complex64; 2] {
        let mut out = [Complex64::new(0.0, 0.0); 2];
        for i in 0..4 {
            for j in 0..4 {
                let xy = x[i] * y[j];
                for k in 0..4 {
                    let w = xy * z[k];
                    let t = self.third[i][j][k];
                    out[0] += w * t[0];
                    out[1] += w * t[1];
                }
            }
        }
        out
    }

    fn set2(&mut self, i: Var, j: Var, value: Vec2) {
        self.second[i as usize][j as usize] = value;
        self.second[j as usize][i as usize] = value;
    }

    fn set3(&mut self, i: Var, j: Var, k: Var, value: Vec2) {
        let (i, j, k) = (i as usize, j as usize, k as usize);
        for (p, q, s) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
            self.third[p][q][s] = value;
        }
    }
}

/// Partial derivatives of the kinetics at the equilibrium.
///
/// With `scale = Some(tau)` every entry is multiplied by `tau`, which is the
/// nonlinearity of the system after the time rescaling `t -> t / tau`.
pub fn derivative_tensor(
    params: &ModelParams,
    eq: &Equilibrium,
    scale: Option<f64>,
) -> DerivativeTensor {
    use Var::*;

    let (a, b, r, u0) = (params.a, params.b, params.r, eq.u0);
    let s = scale.unwrap_or(1.0);
    let bu = b + u0;

    let mut t = DerivativeTensor {
        second: [[[0.0; 2]; 4]; 4],
        third: [[[[0.0; 2]; 4]; 4]; 4],
        scale,
    };

    // f1 = u(1-u) - a u v/(u+b); only u and v enter, linearly in v.
    t.set2(U, U, [s * (2.0 * a * b * u0 / bu.powi(3) - 2.0), 0.0]);
    t.set2(U, V, [-s * a * b / bu.powi(2), 0.0]);
    t.set3(U, U, U, [-s * 6.0 * a * b * u0 / bu.powi(4), 0.0]);
    t.set3(U, U, V, [s * 2.0 * a * b / bu.powi(3), 0.0]);

    // f2 = r v (1 - v_tau/u_tau)
    let ru = r / u0;
    let ru2 = r / (u0 * u0);
    t.set2(V, UTau, [0.0, s * ru]);
    t.set2(V, VTau, [0.0, -s * ru]);
    t.set2(UTau, UTau, [0.0, -2.0 * s * ru]);
    t.set2(UTau, VTau, [0.0, s * ru]);
    t.set3(V, UTau, UTau, [0.0, -2.0 * s * ru2]);
    t.set3(V, UTau, VTau, [0.0, s * ru2]);
    t.set3(UTau, UTau, UTau, [0.0, 6.0 * s * ru2]);
    t.set3(UTau, UTau, VTau, [0.0, -2.0 * s * ru2]);

    t
}
