//! Third-order normal form at a Turing-Hopf point with a spatially
//! homogeneous Hopf mode (`n_H = 0`) and a Turing mode `n_T != 0`.
//!
//! The system is rescaled by `t -> t / tau`, so the linear part at the
//! critical point is
//!
//! ```text
//! L0(phi) = tau* (D phi_xx(0) + A phi(0) + B phi(-1)),
//! A = [[A0, B0], [0, 0]],  B = [[0, 0], [r*, -r*]],  D = diag(d1, d2)
//! ```
//!
//! and the center space is spanned by `phi1 e^{i omega0 theta}`, its
//! conjugate, and the constant Turing vector `phi2` times `cos(n_T x / l)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{derivative_tensor, equilibrium, linear_coeffs, DerivativeTensor, ModelParams};
use crate::spectrum::{s0_and_star, turing_branch, DEFAULT_BRANCHES};

type C = Complex64;
type Vec2 = [C; 2];
type Mat2 = [[C; 2]; 2];

const I: C = C::new(0.0, 1.0);
const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

/// Condition number above which a linear solve is reported as resonant.
pub const RESONANCE_COND: f64 = 1e12;

/// Panels of the composite Simpson rule used for the delay bilinear form.
pub const QUADRATURE_PANELS: usize = 1024;

fn dot(x: &Vec2, y: &Vec2) -> C {
    x[0] * y[0] + x[1] * y[1]
}

fn scale(s: C, x: &Vec2) -> Vec2 {
    [s * x[0], s * x[1]]
}

fn add(x: &Vec2, y: &Vec2) -> Vec2 {
    [x[0] + y[0], x[1] + y[1]]
}

fn conj2(x: &Vec2) -> Vec2 {
    [x[0].conj(), x[1].conj()]
}

fn mat_vec(m: &Mat2, x: &Vec2) -> Vec2 {
    [
        m[0][0] * x[0] + m[0][1] * x[1],
        m[1][0] * x[0] + m[1][1] * x[1],
    ]
}

fn mat_real(m: [[f64; 2]; 2]) -> Mat2 {
    [
        [C::from(m[0][0]), C::from(m[0][1])],
        [C::from(m[1][0]), C::from(m[1][1])],
    ]
}

fn inf_norm(m: &Mat2) -> f64 {
    (m[0][0].norm() + m[0][1].norm()).max(m[1][0].norm() + m[1][1].norm())
}

/// Solves `m x = rhs` by Gaussian elimination with partial pivoting.
/// Returns the solution and the infinity-norm condition number.
pub fn solve2(m: &Mat2, rhs: &Vec2) -> (Vec2, f64) {
    let (mut a, mut b) = (*m, *rhs);
    if a[1][0].norm() > a[0][0].norm() {
        a.swap(0, 1);
        b.swap(0, 1);
    }
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if a[0][0] == ZERO || det == ZERO {
        return ([C::new(f64::NAN, f64::NAN); 2], f64::INFINITY);
    }
    let factor = a[1][0] / a[0][0];
    let u11 = a[1][1] - factor * a[0][1];
    let y1 = b[1] - factor * b[0];
    let x1 = y1 / u11;
    let x0 = (b[0] - a[0][1] * x1) / a[0][0];

    let inv = [
        [m[1][1] / det, -m[0][1] / det],
        [-m[1][0] / det, m[0][0] / det],
    ];
    ([x0, x1], inf_norm(m) * inf_norm(&inv))
}

/// Eigenvectors of the critical linearization and of its adjoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigenbasis {
    pub n_t: usize,
    /// `n_T^2 / l^2`
    pub k_t: f64,
    pub r_star: f64,
    pub tau_star: f64,
    pub omega_star: f64,
    /// `omega* tau*`
    pub omega0: f64,
    pub k1: C,
    pub k2: C,
    pub k3: f64,
    pub k4: f64,
    pub t1: C,
    pub t2: f64,
    pub a0: f64,
    pub b0: f64,
    pub d1: f64,
    pub d2: f64,
    pub l: f64,
}

impl Eigenbasis {
    pub fn new(params: &ModelParams, n_t: usize, r_star: f64, tau_star: f64, omega_star: f64) -> Result<Self> {
        if n_t == 0 {
            return Err(Error::DegenerateCase("Turing wave number is 0".into()));
        }
        let lc = linear_coeffs(params, &equilibrium(params));
        let (a0, b0) = (lc.a0, lc.b0);
        let (d1, r, tau) = (params.d1, r_star, tau_star);
        let k_t = params.wave_eig(n_t);
        let omega0 = omega_star * tau;
        let e = (-I * omega0).exp();

        let k1 = -(a0 - I * omega_star) / b0;
        let k2 = -(a0 - I * omega_star) * (I * omega0).exp() / r;
        let k3 = -(a0 - d1 * k_t) / b0;
        let k4 = -(a0 - d1 * k_t) / r;
        let t1 = ONE / (k1 * k2 + e * r * tau * k2 * (1.0 - k1) + 1.0);
        let t2 = 1.0 / (k3 * k4 + r * tau * k4 * (1.0 - k3) + 1.0);

        Ok(Self {
            n_t,
            k_t,
            r_star,
            tau_star,
            omega_star,
            omega0,
            k1,
            k2,
            k3,
            k4,
            t1,
            t2,
            a0,
            b0,
            d1,
            d2: params.d2,
            l: params.l,
        })
    }

    pub fn phi1(&self, theta: f64) -> Vec2 {
        scale((I * self.omega0 * theta).exp(), &[ONE, self.k1])
    }

    pub fn phi1_bar(&self, theta: f64) -> Vec2 {
        conj2(&self.phi1(theta))
    }

    pub fn phi2(&self) -> Vec2 {
        [ONE, C::from(self.k3)]
    }

    /// Adjoint Hopf vector, `s` in `[0, 1]`.
    pub fn psi1(&self, s: f64) -> Vec2 {
        scale(self.t1 * (-I * self.omega0 * s).exp(), &[ONE, self.k2])
    }

    pub fn psi2(&self) -> Vec2 {
        [C::from(self.t2), C::from(self.t2 * self.k4)]
    }

    /// Slot vectors over `(u, v, u_tau, v_tau)`, i.e. `(phi(0), phi(-1))`.
    pub fn phi1_slots(&self) -> [C; 4] {
        let (p0, p1) = (self.phi1(0.0), self.phi1(-1.0));
        [p0[0], p0[1], p1[0], p1[1]]
    }

    pub fn phi1_bar_slots(&self) -> [C; 4] {
        self.phi1_slots().map(|z| z.conj())
    }

    pub fn phi2_slots(&self) -> [C; 4] {
        let p = self.phi2();
        [p[0], p[1], p[0], p[1]]
    }

    pub fn a_matrix(&self) -> Mat2 {
        mat_real([[self.a0, self.b0], [0.0, 0.0]])
    }

    pub fn b_matrix(&self) -> Mat2 {
        mat_real([[0.0, 0.0], [self.r_star, -self.r_star]])
    }

    pub fn d_matrix(&self) -> Mat2 {
        mat_real([[self.d1, 0.0], [0.0, self.d2]])
    }

    /// `L0(e^{lambda .} I) = tau* (A + B e^{-lambda})`.
    pub fn l0(&self, lambda: C) -> Mat2 {
        let (a, b) = (self.a_matrix(), self.b_matrix());
        let e = (-lambda).exp();
        let t = self.tau_star;
        let mut m = [[ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = t * (a[i][j] + b[i][j] * e);
            }
        }
        m
    }

    /// `Delta_n(lambda) = lambda I + tau* k D - L0(e^{lambda .} I)` for the
    /// wave eigenvalue `k = n^2/l^2`.
    pub fn delta(&self, k: f64, lambda: C) -> Mat2 {
        let l0 = self.l0(lambda);
        let d = [self.d1, self.d2];
        let mut m = [[ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = -l0[i][j];
            }
            m[i][i] += lambda + self.tau_star * k * d[i];
        }
        m
    }

    /// Largest of the right and left eigenvector residuals.
    pub fn eigen_residual(&self) -> f64 {
        let iw = I * self.omega0;
        let rh = mat_vec(&self.delta(0.0, iw), &[ONE, self.k1]);
        let rt = mat_vec(&self.delta(self.k_t, ZERO), &self.phi2());
        let left = |m: Mat2, y: Vec2| [y[0] * m[0][0] + y[1] * m[1][0], y[0] * m[0][1] + y[1] * m[1][1]];
        let lh = left(self.delta(0.0, iw), [ONE, self.k2]);
        let lt = left(self.delta(self.k_t, ZERO), [ONE, C::from(self.k4)]);
        [rh, rt, lh, lt]
            .iter()
            .flat_map(|v| v.iter().map(|z| z.norm()))
            .fold(0.0, f64::max)
    }

    /// `<psi, phi> = psi(0) phi(0) + int_{-1}^0 psi(xi + 1) B phi(xi) dxi`
    /// with `B` scaled by `tau*`, by composite Simpson quadrature.
    pub fn pairing(&self, psi: impl Fn(f64) -> Vec2, phi: impl Fn(f64) -> Vec2) -> C {
        let b = self.b_matrix();
        let tau = self.tau_star;
        let integrand = |xi: f64| tau * dot(&psi(xi + 1.0), &mat_vec(&b, &phi(xi)));
        let n = QUADRATURE_PANELS;
        let h = 1.0 / n as f64;
        let mut sum = integrand(-1.0) + integrand(0.0);
        for j in 1..n {
            let w = if j % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * integrand(-1.0 + j as f64 * h);
        }
        dot(&psi(0.0), &phi(0.0)) + sum * h / 3.0
    }

    /// `[<psi1, phi1>, <psi1, phi1_bar>, <psi2, phi2>]`. Pairs across the two
    /// spatial modes vanish through the `x` integral and are not listed.
    pub fn biorthogonality(&self) -> [C; 3] {
        [
            self.pairing(|s| self.psi1(s), |t| self.phi1(t)),
            self.pairing(|s| self.psi1(s), |t| self.phi1_bar(t)),
            self.pairing(|_| self.psi2(), |_| self.phi2()),
        ]
    }
}

/// Quadratic and cubic coefficient vectors `F_mnk`, indexed by powers of
/// `(z1, z1_bar, z2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffVectors {
    pub f200: Vec2,
    pub f110: Vec2,
    pub f101: Vec2,
    pub f002: Vec2,
    pub f020: Vec2,
    pub f011: Vec2,
    pub f210: Vec2,
    pub f102: Vec2,
    pub f111: Vec2,
    pub f003: Vec2,
}

pub fn coeff_vectors(tensor: &DerivativeTensor, basis: &Eigenbasis) -> CoeffVectors {
    let p1 = basis.phi1_slots();
    let p1b = basis.phi1_bar_slots();
    let p2 = basis.phi2_slots();
    let two = C::from(2.0);
    let f200 = tensor.bilinear(&p1, &p1);
    let f101 = scale(two, &tensor.bilinear(&p1, &p2));
    CoeffVectors {
        f200,
        f110: scale(two, &tensor.bilinear(&p1, &p1b)),
        f101,
        f002: tensor.bilinear(&p2, &p2),
        f020: conj2(&f200),
        f011: conj2(&f101),
        f210: scale(C::from(3.0), &tensor.trilinear(&p1, &p1, &p1b)),
        f102: scale(C::from(3.0), &tensor.trilinear(&p1, &p2, &p2)),
        f111: scale(C::from(6.0), &tensor.trilinear(&p1, &p1b, &p2)),
        f003: tensor.trilinear(&p2, &p2, &p2),
    }
}

/// Projections of the `F_mnk` onto the center space.
///
/// Suffix `_11` is the `z1` equation, `_12` the `z1_bar` equation and `_13`
/// the `z2` equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectedCoeffs {
    pub f200_11: C,
    pub f110_11: C,
    pub f020_11: C,
    pub f002_11: C,
    pub f200_12: C,
    pub f110_12: C,
    pub f020_12: C,
    pub f002_12: C,
    pub f101_13: C,
    pub f011_13: C,
    pub f210_11: C,
    pub f102_11: C,
    pub f111_13: C,
    pub f003_13: C,
}

pub fn project(vectors: &CoeffVectors, basis: &Eigenbasis) -> ProjectedCoeffs {
    let sl = (basis.l * PI).sqrt();
    let len = basis.l * PI;
    let psi1 = basis.psi1(0.0);
    let psi2 = basis.psi2();
    let f200 = dot(&psi1, &vectors.f200) / sl;
    let f110 = dot(&psi1, &vectors.f110) / sl;
    let f020 = dot(&psi1, &vectors.f020) / sl;
    let f002 = dot(&psi1, &vectors.f002) / sl;
    ProjectedCoeffs {
        f200_11: f200,
        f110_11: f110,
        f020_11: f020,
        f002_11: f002,
        f200_12: f020.conj(),
        f110_12: f110.conj(),
        f020_12: f200.conj(),
        f002_12: f002.conj(),
        f101_13: dot(&psi2, &vectors.f101) / sl,
        f011_13: dot(&psi2, &vectors.f011) / sl,
        f210_11: dot(&psi1, &vectors.f210) / len,
        f102_11: dot(&psi1, &vectors.f102) / len,
        f111_13: dot(&psi2, &vectors.f111) / len,
        f003_13: 1.5 * dot(&psi2, &vectors.f003) / len,
    }
}

/// `h(theta) = e^{rate theta} particular + c1 phi1(theta) + c1_bar phi1_bar(theta) + c2 phi2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HFunction {
    pub rate: C,
    pub particular: Vec2,
    pub c1: C,
    pub c1_bar: C,
    pub c2: C,
}

impl HFunction {
    pub fn eval(&self, basis: &Eigenbasis, theta: f64) -> Vec2 {
        let mut out = scale((self.rate * theta).exp(), &self.particular);
        out = add(&out, &scale(self.c1, &basis.phi1(theta)));
        out = add(&out, &scale(self.c1_bar, &basis.phi1_bar(theta)));
        add(&out, &scale(self.c2, &basis.phi2()))
    }

    /// `(h(0), h(-1))` over the four kinetic slots.
    pub fn slots(&self, basis: &Eigenbasis) -> [C; 4] {
        let (h0, h1) = (self.eval(basis, 0.0), self.eval(basis, -1.0));
        [h0[0], h0[1], h1[0], h1[1]]
    }
}

/// One 2x2 solve with its back-substitution residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub which: String,
    pub cond: f64,
    pub residual: f64,
}

/// Projections of the second-order center manifold terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HFunctions {
    pub h200: HFunction,
    pub h110: HFunction,
    pub h101: HFunction,
    pub h011: HFunction,
    /// `h002` on the `beta_0` component.
    pub h002_h: HFunction,
    /// `h002` on the `beta_{2 n_T}` component, plus the `beta_0` part.
    pub h002_t: HFunction,
    pub solves: Vec<SolveRecord>,
}

fn checked_solve(which: &'static str, m: &Mat2, rhs: &Vec2, log: &mut Vec<SolveRecord>) -> Result<Vec2> {
    let (x, cond) = solve2(m, rhs);
    if !(cond.is_finite() && cond <= RESONANCE_COND) {
        return Err(Error::ResonantMatrix { which, cond });
    }
    let back = mat_vec(m, &x);
    let residual = (back[0] - rhs[0]).norm().max((back[1] - rhs[1]).norm());
    log.push(SolveRecord {
        which: which.to_string(),
        cond,
        residual,
    });
    Ok(x)
}

pub fn h_solve(basis: &Eigenbasis, vectors: &CoeffVectors, f: &ProjectedCoeffs) -> Result<HFunctions> {
    let w0 = basis.omega0;
    let iw = I * w0;
    let sl = (basis.l * PI).sqrt();
    let len = basis.l * PI;
    let inv = ONE / (iw * sl);
    let mut log = Vec::new();

    let m200 = basis.delta(0.0, 2.0 * iw);
    let m0 = basis.l0(ZERO);
    let m101 = basis.delta(basis.k_t, iw);
    let m011 = basis.delta(basis.k_t, -iw);
    // 4 k_T tau* D - L0(I) = Delta_{2 n_T}(0)
    let m002 = basis.delta(4.0 * basis.k_t, ZERO);

    let s200 = checked_solve("h200", &m200, &vectors.f200, &mut log)?;
    let s110 = checked_solve("h110", &m0, &vectors.f110, &mut log)?;
    let s101 = checked_solve("h101", &m101, &vectors.f101, &mut log)?;
    let s011 = checked_solve("h011", &m011, &vectors.f011, &mut log)?;
    let s002 = checked_solve("h002_h", &m0, &vectors.f002, &mut log)?;
    let s002t = checked_solve("h002_t", &m002, &vectors.f002, &mut log)?;

    let inv_len = C::from(1.0 / len);
    let h002_h = HFunction {
        rate: ZERO,
        particular: scale(-inv_len, &s002),
        c1: inv * f.f002_11,
        c1_bar: -inv * f.f002_12,
        c2: ZERO,
    };
    let h002_t = HFunction {
        particular: add(&scale(C::from(0.5 / len), &s002t), &h002_h.particular),
        ..h002_h.clone()
    };

    Ok(HFunctions {
        h200: HFunction {
            rate: 2.0 * iw,
            particular: scale(inv_len, &s200),
            c1: -inv * f.f200_11,
            c1_bar: -inv * f.f200_12 / 3.0,
            c2: ZERO,
        },
        h110: HFunction {
            rate: ZERO,
            particular: scale(-inv_len, &s110),
            c1: inv * f.f110_11,
            c1_bar: -inv * f.f110_12,
            c2: ZERO,
        },
        h101: HFunction {
            rate: iw,
            particular: scale(inv_len, &s101),
            c1: ZERO,
            c1_bar: ZERO,
            c2: -inv * f.f101_13,
        },
        h011: HFunction {
            rate: -iw,
            particular: scale(inv_len, &s011),
            c1: ZERO,
            c1_bar: ZERO,
            c2: inv * f.f011_13,
        },
        h002_h,
        h002_t,
        solves: log,
    })
}

/// `S_mode(h) = 2 D^2F[(h(0), h(-1)), mode]`, the quadratic interaction of a
/// center-manifold term with one center mode.
pub fn s_operator(tensor: &DerivativeTensor, basis: &Eigenbasis, mode: &[C; 4], h: &HFunction) -> Vec2 {
    scale(C::from(2.0), &tensor.bilinear(&h.slots(basis), mode))
}

/// A cubic normal form coefficient split by origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GTerms {
    /// Direct cubic projection `f_mnk`.
    pub cubic: C,
    /// Products of quadratic projections, from the second-order normal form
    /// transformation.
    pub quadratic: C,
    /// Center-manifold correction `(3/2) psi(0) S(h)`.
    pub correction: C,
}

impl GTerms {
    pub fn total(&self) -> C {
        self.cubic + self.quadratic + self.correction
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GBreakdown {
    pub g210: GTerms,
    pub g102: GTerms,
    pub g111: GTerms,
    pub g003: GTerms,
}

pub fn g_coeffs(
    tensor: &DerivativeTensor,
    basis: &Eigenbasis,
    f: &ProjectedCoeffs,
    h: &HFunctions,
) -> GBreakdown {
    let c = C::from(3.0) / (2.0 * I * basis.omega0);
    let p1 = basis.phi1_slots();
    let p1b = basis.phi1_bar_slots();
    let p2 = basis.phi2_slots();
    let s = |mode: &[C; 4], hf: &HFunction| s_operator(tensor, basis, mode, hf);
    let psi1 = basis.psi1(0.0);
    let psi2 = basis.psi2();

    let g210 = GTerms {
        cubic: f.f210_11,
        quadratic: c
            * (-f.f110_11 * f.f200_11 + f.f110_11 * f.f110_12 + 2.0 / 3.0 * f.f020_11 * f.f200_12),
        correction: 1.5 * dot(&psi1, &add(&s(&p1, &h.h110), &s(&p1b, &h.h200))),
    };
    let g102 = GTerms {
        cubic: f.f102_11,
        quadratic: c
            * (-2.0 * f.f002_11 * f.f200_11
                + f.f002_12 * f.f110_11
                + 2.0 * f.f002_11 * f.f101_13),
        correction: 1.5 * dot(&psi1, &add(&s(&p1, &h.h002_h), &s(&p2, &h.h101))),
    };
    let g111 = GTerms {
        cubic: f.f111_13,
        quadratic: c * (-f.f101_13 * f.f110_11 + f.f011_13 * f.f110_12),
        correction: 1.5
            * dot(
                &psi2,
                &add(&add(&s(&p1, &h.h011), &s(&p1b, &h.h101)), &s(&p2, &h.h110)),
            ),
    };
    let g003 = GTerms {
        cubic: f.f003_13,
        quadratic: c * (-f.f002_11 * f.f101_13 + f.f002_12 * f.f011_13),
        correction: 1.5 * dot(&psi2, &s(&p2, &h.h002_t)),
    };
    GBreakdown {
        g210,
        g102,
        g111,
        g003,
    }
}

/// Coefficients of `alpha_i z_j` in the normal form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnfoldingCoeffs {
    pub f_a1z1: C,
    pub f_a2z1: C,
    pub f_a1z2: f64,
    pub f_a2z2: f64,
}

pub fn unfolding_coeffs(basis: &Eigenbasis) -> UnfoldingCoeffs {
    let psi1 = basis.psi1(0.0);
    let psi2 = basis.psi2();
    let (a, b, d) = (basis.a_matrix(), basis.b_matrix(), basis.d_matrix());
    // derivative of tau* B in r
    let b_r = mat_real([[0.0, 0.0], [basis.tau_star, -basis.tau_star]]);
    let p1_0 = basis.phi1(0.0);
    let p1_1 = basis.phi1(-1.0);
    let p2 = basis.phi2();

    let f_a1z1 = 2.0 * dot(&psi1, &mat_vec(&b_r, &p1_1));
    let f_a2z1 = 2.0 * dot(&psi1, &add(&mat_vec(&a, &p1_0), &mat_vec(&b, &p1_1)));
    let f_a1z2 = 2.0 * dot(&psi2, &mat_vec(&b_r, &p2));
    let diffusion = scale(C::from(-basis.k_t), &mat_vec(&d, &p2));
    let f_a2z2 = 2.0
        * dot(
            &psi2,
            &add(&diffusion, &add(&mat_vec(&a, &p2), &mat_vec(&b, &p2))),
        );
    UnfoldingCoeffs {
        f_a1z1,
        f_a2z1,
        f_a1z2: f_a1z2.re,
        f_a2z2: f_a2z2.re,
    }
}

/// Complete normal form data at one Turing-Hopf point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalFormCoeffs {
    pub basis: Eigenbasis,
    pub unfolding: UnfoldingCoeffs,
    pub g210: C,
    pub g102: C,
    pub g111: f64,
    pub g003: f64,
    /// Imaginary parts dropped from `g111`, `g003`; zero up to roundoff.
    pub g111_im: f64,
    pub g003_im: f64,
    pub breakdown: GBreakdown,
    pub vectors: CoeffVectors,
    pub projected: ProjectedCoeffs,
    pub h: HFunctions,
}

/// Normal form from the critical data `(n_T, r*, tau*, omega*)`.
pub fn normal_form_at(
    params: &ModelParams,
    n_t: usize,
    r_star: f64,
    tau_star: f64,
    omega_star: f64,
) -> Result<NormalFormCoeffs> {
    let crit = params.with_r(r_star).with_tau(tau_star);
    let basis = Eigenbasis::new(&crit, n_t, r_star, tau_star, omega_star)?;
    let tensor = derivative_tensor(&crit, &equilibrium(&crit), Some(tau_star));
    normal_form_with(&tensor, basis)
}

/// Same chain with a caller-supplied derivative tensor, e.g. one with the
/// cubic entries removed.
pub fn normal_form_with(tensor: &DerivativeTensor, basis: Eigenbasis) -> Result<NormalFormCoeffs> {
    let vectors = coeff_vectors(tensor, &basis);
    let projected = project(&vectors, &basis);
    let h = h_solve(&basis, &vectors, &projected)?;
    let breakdown = g_coeffs(tensor, &basis, &projected, &h);
    let unfolding = unfolding_coeffs(&basis);
    let g111 = breakdown.g111.total();
    let g003 = breakdown.g003.total();
    let out = NormalFormCoeffs {
        unfolding,
        g210: breakdown.g210.total(),
        g102: breakdown.g102.total(),
        g111: g111.re,
        g003: g003.re,
        g111_im: g111.im,
        g003_im: g003.im,
        breakdown,
        vectors,
        projected,
        h,
        basis,
    };
    let finite = [out.g210, out.g102, out.unfolding.f_a1z1, out.unfolding.f_a2z1]
        .iter()
        .all(|z| z.re.is_finite() && z.im.is_finite())
        && out.g111.is_finite()
        && out.g003.is_finite();
    if !finite {
        return Err(Error::DegenerateCase("non-finite normal form coefficient".into()));
    }
    Ok(out)
}

/// Locates the Turing-Hopf point of `params` (ignoring its `r`, `tau`) and
/// computes the normal form there.
pub fn normal_form(params: &ModelParams) -> Result<NormalFormCoeffs> {
    let turing = turing_branch(params)?;
    let hopf = s0_and_star(params, turing.r_star, turing.n_t, DEFAULT_BRANCHES)?;
    if hopf.n_h != 0 {
        return Err(Error::DegenerateCase(format!(
            "critical Hopf wave number is {}, only 0 is supported",
            hopf.n_h
        )));
    }
    normal_form_at(params, turing.n_t, turing.r_star, hopf.tau_star, hopf.omega_star)
}
