//! Characteristic equations of the linearization at the coexistence
//! equilibrium, one per Neumann wave number `n`:
//!
//! ```text
//! G_n(lambda, r, tau) = lambda^2 - T_n lambda + D_n
//! T_n = A0 - (d1 + d2) n^2/l^2 - r e^{-lambda tau}
//! D_n = d2 n^2/l^2 (d1 n^2/l^2 - A0) + r e^{-lambda tau} (d1 n^2/l^2 - A0 - B0)
//! ```
//!
//! From these we get the Turing values `r_n^T`, the Hopf frequencies and
//! delays `tau_n^(k)`, the Bogdanov-Takens delay and the Turing-Hopf point.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{equilibrium, linear_coeffs, LinearCoeffs, ModelParams};

/// Hard cap on the wave numbers scanned for Turing values.
pub const MAX_WAVE_NUMBER: usize = 512;

/// Default number of delay branches `tau_n^(k)`, `k = 0..DEFAULT_BRANCHES`.
pub const DEFAULT_BRANCHES: usize = 3;

const ARCCOS_CLAMP_TOL: f64 = 1e-9;
const QUARTIC_ZERO_TOL: f64 = 1e-12;

/// `G_n` for one wave number with the parameter-independent pieces cached.
#[derive(Debug, Clone, Copy)]
pub struct Characteristic {
    pub n: usize,
    /// `n^2 / l^2`
    pub k: f64,
    d1: f64,
    d2: f64,
    a0: f64,
    b0: f64,
}

impl Characteristic {
    pub fn new(params: &ModelParams, lc: &LinearCoeffs, n: usize) -> Self {
        Self {
            n,
            k: params.wave_eig(n),
            d1: params.d1,
            d2: params.d2,
            a0: lc.a0,
            b0: lc.b0,
        }
    }

    pub fn from_params(params: &ModelParams, n: usize) -> Self {
        let lc = linear_coeffs(params, &equilibrium(params));
        Self::new(params, &lc, n)
    }

    /// `d1 k - A0 - B0`, the coefficient of the delayed term in `D_n`.
    pub fn delayed_coeff(&self) -> f64 {
        self.d1 * self.k - self.a0 - self.b0
    }

    /// `d2 k (d1 k - A0)`
    pub fn diffusive_det(&self) -> f64 {
        self.d2 * self.k * (self.d1 * self.k - self.a0)
    }

    /// `A0 - (d1 + d2) k`
    pub fn undelayed_trace(&self) -> f64 {
        self.a0 - (self.d1 + self.d2) * self.k
    }

    pub fn trace(&self, lambda: Complex64, r: f64, tau: f64) -> Complex64 {
        self.undelayed_trace() - r * (-lambda * tau).exp()
    }

    pub fn det(&self, lambda: Complex64, r: f64, tau: f64) -> Complex64 {
        self.diffusive_det() + r * (-lambda * tau).exp() * self.delayed_coeff()
    }

    pub fn eval(&self, lambda: Complex64, r: f64, tau: f64) -> Complex64 {
        lambda * lambda - self.trace(lambda, r, tau) * lambda + self.det(lambda, r, tau)
    }

    /// `dG/dlambda`
    pub fn dlambda(&self, lambda: Complex64, r: f64, tau: f64) -> Complex64 {
        let e = (-lambda * tau).exp();
        let dtrace = r * tau * e;
        let ddet = -r * tau * self.delayed_coeff() * e;
        2.0 * lambda - self.trace(lambda, r, tau) - lambda * dtrace + ddet
    }

    /// `d^2G/dlambda^2`
    pub fn d2lambda(&self, lambda: Complex64, r: f64, tau: f64) -> Complex64 {
        let e = (-lambda * tau).exp();
        let dtrace = r * tau * e;
        let d2trace = -r * tau * tau * e;
        let d2det = r * tau * tau * self.delayed_coeff() * e;
        2.0 - 2.0 * dtrace - lambda * d2trace + d2det
    }

    /// Turing value `r_n^T`, the `r` with `D_n(., r, 0) = 0`.
    pub fn turing_value(&self) -> f64 {
        -self.diffusive_det() / self.delayed_coeff()
    }

    /// Hopf value `r_n^H`, the `r` with `T_n(., r, 0) = 0`.
    pub fn hopf_value(&self) -> f64 {
        self.undelayed_trace()
    }

    /// `P_n(r)` of the biquadratic `w^4 - P w^2 + Q = 0`.
    pub fn p(&self, r: f64) -> f64 {
        let (d1, d2, a0, k) = (self.d1, self.d2, self.a0, self.k);
        -(d1 * d1 + d2 * d2) * k * k + 2.0 * d1 * a0 * k + r * r - a0 * a0
    }

    /// `Q_n(r) = -(r - r_n^T)(r + r_n^T)(d1 k - A0 - B0)^2`.
    pub fn q(&self, r: f64) -> f64 {
        let c = self.delayed_coeff();
        let dd = self.diffusive_det();
        // expanded form, exact at r = r_n^T up to roundoff in dd^2 - r^2 c^2
        dd * dd - r * r * c * c
    }

    /// `cos(w tau)` on the imaginary axis.
    pub fn cos_part(&self, omega: f64, r: f64) -> f64 {
        let c = self.delayed_coeff();
        let w2 = omega * omega;
        (-(self.b0 + self.d2 * self.k) * w2 - self.diffusive_det() * c) / (r * (w2 + c * c))
    }

    /// `sin(w tau)` on the imaginary axis.
    pub fn sin_part(&self, omega: f64, r: f64) -> f64 {
        let c = self.delayed_coeff();
        let w2 = omega * omega;
        let e = self.d1 * self.k - self.a0;
        omega * (w2 + e * e + self.b0 * self.undelayed_trace()) / (r * (w2 + c * c))
    }
}

/// Auxiliary scalars and flags of the condition guaranteeing `A0 < r*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct A6Check {
    pub d2_gt_d1: bool,
    pub b_lt_bstar: bool,
    pub a_in_window: bool,
    pub m1_le_m2: bool,
    /// All four inequalities.
    pub holds: bool,
    /// `0 < b < 1` and `a > (b+1)^2 / (2(1-b))`.
    pub a_above_threshold: bool,
    pub b_star: Option<f64>,
    pub a_minus: Option<f64>,
    pub a_plus: Option<f64>,
    pub x_minus: Option<f64>,
    pub x_plus: Option<f64>,
    pub m1: Option<usize>,
    pub m2: Option<usize>,
}

impl A6Check {
    /// `(a-, a+)`, or [`Error::ComplexAux`] when they are not real.
    pub fn a_bounds(&self) -> Result<(f64, f64)> {
        match (self.a_minus, self.a_plus) {
            (Some(lo), Some(hi)) => Ok((lo, hi)),
            _ => Err(Error::ComplexAux),
        }
    }
}

pub fn check_a6(params: &ModelParams) -> A6Check {
    let (d1, d2, a, b, l) = (params.d1, params.d2, params.a, params.b, params.l);
    let lc = linear_coeffs(params, &equilibrium(params));
    let (a0, b0) = (lc.a0, lc.b0);

    let sum4 = (d1 + d2).powi(4);
    let diff4 = (d1 - d2).powi(4);

    let b_star = (diff4 > 0.0).then(|| ((d1 + d2).powi(2) - (sum4 - diff4).sqrt()).powi(2) / diff4);

    let aux = (b + 1.0).powi(2) * diff4 - 4.0 * b * sum4;
    let (a_minus, a_plus) = if aux >= 0.0 && sum4 > diff4 {
        let root = (d1 + d2).powi(2) * aux.sqrt();
        let base = (1.0 - b) * sum4;
        (
            Some((base - root) / (sum4 - diff4)),
            Some((base + root) / (sum4 - diff4)),
        )
    } else {
        (None, None)
    };

    let disc = (d1 + d2).powi(2) * a0 * a0 + 4.0 * d1 * d2 * a0 * b0;
    let (x_minus, x_plus) = if disc >= 0.0 {
        let s = disc.sqrt();
        (
            Some(((d2 - d1) * a0 - s) / (2.0 * d1 * d2)),
            Some(((d2 - d1) * a0 + s) / (2.0 * d1 * d2)),
        )
    } else {
        (None, None)
    };

    // M1: smallest n with n^2/l^2 > x-, M2: largest n with n^2/l^2 < x+
    let m1 = x_minus.map(|x| {
        if x <= 0.0 {
            1
        } else {
            (l * x.sqrt()).floor() as usize + 1
        }
    });
    let m2 = x_plus
        .filter(|x| *x > 0.0)
        .map(|x| ((l * x.sqrt()).ceil() as usize).saturating_sub(1));

    let d2_gt_d1 = d2 > d1;
    let b_lt_bstar = b > 0.0 && b_star.is_some_and(|bs| b < bs);
    let a_in_window = matches!((a_minus, a_plus), (Some(lo), Some(hi)) if lo < a && a < hi);
    let m1_le_m2 = matches!((m1, m2), (Some(m1), Some(m2)) if m1 <= m2);

    A6Check {
        d2_gt_d1,
        b_lt_bstar,
        a_in_window,
        m1_le_m2,
        holds: d2_gt_d1 && b_lt_bstar && a_in_window && m1_le_m2,
        a_above_threshold: params.a_above_threshold(),
        b_star,
        a_minus,
        a_plus,
        x_minus,
        x_plus,
        m1,
        m2,
    }
}

/// Turing and Hopf values over wave numbers, and the critical Turing mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuringReport {
    /// `r_n^T` for `n = 0..r_t.len()`.
    pub r_t: Vec<f64>,
    /// `r_n^H` for the same wave numbers.
    pub r_h: Vec<f64>,
    /// `r_n^T < 0` for every `n >= negative_from`.
    pub negative_from: usize,
    pub n_t: usize,
    pub r_star: f64,
    pub a0: f64,
    pub b0: f64,
    pub u0: f64,
    pub a6: A6Check,
}

impl TuringReport {
    /// Wave number with the second largest Turing value, the `n_I` of
    /// Turing-Turing-Hopf patterns.
    pub fn secondary_mode(&self) -> Option<(usize, f64)> {
        self.r_t
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(n, _)| *n != self.n_t)
            .map(|(n, &r)| (n, r))
            .max_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// Second Turing value within `threshold` (relative) of `r*`.
    pub fn is_mixed_mode(&self, threshold: f64) -> bool {
        match self.secondary_mode() {
            Some((_, r2)) if r2 > 0.0 => (self.r_star - r2) / self.r_star <= threshold,
            _ => false,
        }
    }
}

pub fn turing_branch(params: &ModelParams) -> Result<TuringReport> {
    params.validate()?;
    let eq = equilibrium(params);
    let lc = linear_coeffs(params, &eq);

    // Past d1 n^2/l^2 > A0 both factors of r_n^T keep their sign and r_n^T < 0.
    let mut negative_from = MAX_WAVE_NUMBER;
    for n in 1..=MAX_WAVE_NUMBER {
        let ch = Characteristic::new(params, &lc, n);
        if params.d1 * ch.k > lc.a0.max(lc.a0 + lc.b0) {
            negative_from = n;
            break;
        }
    }

    let (r_t, r_h): (Vec<f64>, Vec<f64>) = (0..=negative_from)
        .map(|n| {
            let ch = Characteristic::new(params, &lc, n);
            let rt = if n == 0 { 0.0 } else { ch.turing_value() };
            (rt, ch.hopf_value())
        })
        .unzip();

    let (n_t, r_star) = r_t
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, &r)| (n, r))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .filter(|(_, r)| *r > 0.0)
        .ok_or(Error::NoPositiveTuring)?;

    Ok(TuringReport {
        r_t,
        r_h,
        negative_from,
        n_t,
        r_star,
        a0: lc.a0,
        b0: lc.b0,
        u0: eq.u0,
        a6: check_a6(params),
    })
}

/// Double-zero delay at `r = r*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BtPoint {
    pub r_star: f64,
    pub tau0: f64,
}

pub fn bt_point(params: &ModelParams, r_star: f64, n_t: usize) -> Result<BtPoint> {
    let ch = Characteristic::from_params(params, n_t);
    let tau0 = (r_star - ch.undelayed_trace()) / (r_star * ch.delayed_coeff());
    if !(tau0.is_finite() && tau0 > 0.0) {
        return Err(Error::DegenerateCase(format!(
            "Bogdanov-Takens delay is not positive ({tau0})"
        )));
    }
    Ok(BtPoint { r_star, tau0 })
}

/// Slope `d gamma / d r` of the real root through zero of `G_{n_T}` at `r*`.
pub fn turing_slope(params: &ModelParams, r_star: f64, n_t: usize, tau: f64) -> f64 {
    let ch = Characteristic::from_params(params, n_t);
    let c = ch.delayed_coeff();
    c / (ch.undelayed_trace() - r_star + r_star * tau * c)
}

/// Existence case of positive roots of `w^4 - P w^2 + Q = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RootCase {
    /// `Q < 0`
    C1,
    /// `Q = 0, P > 0`
    C2,
    /// `Q > 0, P = 2 sqrt(Q)`
    C3,
    /// `Q > 0, P > 2 sqrt(Q)`, two roots
    C4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopfRoot {
    pub omega: f64,
    pub cos: f64,
    pub sin: f64,
    /// `tau^(k)` for `k = 0, 1, ...`
    pub taus: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopfBranch {
    pub n: usize,
    pub r: f64,
    pub p: f64,
    pub q: f64,
    pub case: RootCase,
    /// Largest frequency first.
    pub roots: Vec<HopfRoot>,
}

impl HopfBranch {
    /// `(omega_n, tau_n^(0))` of the principal root.
    pub fn principal(&self) -> (f64, f64) {
        let root = &self.roots[0];
        (root.omega, root.taus[0])
    }
}

fn hopf_root(ch: &Characteristic, omega: f64, r: f64, branches: usize) -> HopfRoot {
    let cos = ch.cos_part(omega, r);
    let sin = ch.sin_part(omega, r);
    let clamped = if cos.abs() > 1.0 && cos.abs() <= 1.0 + ARCCOS_CLAMP_TOL {
        cos.signum()
    } else {
        cos
    };
    let acos = clamped.acos();
    let taus = (0..branches)
        .map(|k| {
            let k = k as f64;
            if sin >= 0.0 {
                (acos + 2.0 * k * PI) / omega
            } else {
                (-acos + 2.0 * (k + 1.0) * PI) / omega
            }
        })
        .collect();
    HopfRoot {
        omega,
        cos,
        sin,
        taus,
    }
}

/// Purely imaginary roots `i w` of `G_n` at birth rate `r` and the delays
/// at which they occur.
pub fn hopf_branch(params: &ModelParams, r: f64, n: usize, branches: usize) -> Result<HopfBranch> {
    let ch = Characteristic::from_params(params, n);
    hopf_branch_with(&ch, r, branches)
}

pub fn hopf_branch_with(ch: &Characteristic, r: f64, branches: usize) -> Result<HopfBranch> {
    let branches = branches.max(1);
    let p = ch.p(r);
    let q = ch.q(r);
    let scale = 1.0f64.max(p * p);
    let q_zero = q.abs() <= QUARTIC_ZERO_TOL * scale;

    let (case, squares): (RootCase, Vec<f64>) = if q_zero {
        if p > 0.0 {
            (RootCase::C2, vec![p])
        } else {
            return Err(Error::NoRoot { n: ch.n, r });
        }
    } else if q < 0.0 {
        (RootCase::C1, vec![0.5 * (p + (p * p - 4.0 * q).sqrt())])
    } else {
        let disc = p * p - 4.0 * q;
        if p > 0.0 && disc.abs() <= QUARTIC_ZERO_TOL * scale {
            (RootCase::C3, vec![0.5 * p])
        } else if p > 0.0 && disc > 0.0 {
            let s = disc.sqrt();
            (RootCase::C4, vec![0.5 * (p + s), 0.5 * (p - s)])
        } else {
            return Err(Error::NoRoot { n: ch.n, r });
        }
    };

    let roots = squares
        .into_iter()
        .map(|w2| hopf_root(ch, w2.sqrt(), r, branches))
        .collect();
    Ok(HopfBranch {
        n: ch.n,
        r,
        p,
        q,
        case,
        roots,
    })
}

/// Imaginary-axis data at `r*` and the Turing-Hopf point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopfReport {
    pub r: f64,
    pub n1: Option<usize>,
    pub n_q: usize,
    pub x_p: Option<f64>,
    pub x_q: f64,
    /// `n_T sqrt(1 / x_P(r*))`; `n_T` is admissible iff `l` exceeds it.
    pub l_threshold: f64,
    pub s0: Vec<usize>,
    pub branches: Vec<HopfBranch>,
    pub n_h: usize,
    pub tau_star: f64,
    pub omega_star: f64,
}

impl HopfReport {
    pub fn branch(&self, n: usize) -> Option<&HopfBranch> {
        self.branches.iter().find(|b| b.n == n)
    }
}

pub fn x_p(params: &ModelParams, a0: f64, r: f64) -> Option<f64> {
    let (d1, d2) = (params.d1, params.d2);
    let s = d1 * d1 + d2 * d2;
    let disc = r * r * s - d2 * d2 * a0 * a0;
    (disc >= 0.0).then(|| (d1 * a0 + disc.sqrt()) / s)
}

pub fn x_q(params: &ModelParams, lc: &LinearCoeffs, r: f64) -> f64 {
    let (d1, d2) = (params.d1, params.d2);
    let disc = (d1 * r - d2 * lc.a0).powi(2) - 4.0 * d1 * d2 * r * lc.b0;
    (d1 * r + d2 * lc.a0 + disc.sqrt()) / (2.0 * d1 * d2)
}

/// `N` with `N / sqrt(x) < l <= (N + 1) / sqrt(x)`.
fn count_below(l: f64, x: f64) -> usize {
    ((l * x.sqrt()).ceil() as usize).saturating_sub(1)
}

pub fn s0_and_star(
    params: &ModelParams,
    r_star: f64,
    n_t: usize,
    branches: usize,
) -> Result<HopfReport> {
    let lc = linear_coeffs(params, &equilibrium(params));
    let n1 = (lc.a0 > 0.0).then(|| count_below(params.l, lc.a0 / params.d1));
    let xq = x_q(params, &lc, r_star);
    let n_q = count_below(params.l, xq);
    let xp = x_p(params, lc.a0, r_star);
    let l_threshold = match xp {
        Some(x) if x > 0.0 => n_t as f64 / x.sqrt(),
        _ => f64::INFINITY,
    };

    let s0: Vec<usize> = (0..=n_q)
        .filter(|&n| n != n_t || params.l > l_threshold)
        .collect();

    let mut out = Vec::new();
    for &n in &s0 {
        out.push(hopf_branch(params, r_star, n, branches)?);
    }

    let best = out
        .iter()
        .min_by(|a, b| a.principal().1.total_cmp(&b.principal().1))
        .ok_or_else(|| Error::DegenerateCase("empty admissible wave-number set".into()))?;
    let (omega_star, tau_star) = best.principal();
    let n_h = best.n;

    Ok(HopfReport {
        r: r_star,
        n1,
        n_q,
        x_p: xp,
        x_q: xq,
        l_threshold,
        s0,
        n_h,
        tau_star,
        omega_star,
        branches: out,
    })
}

/// Newton iteration on `G_n(lambda, r, tau)` from `seed`.
pub fn track_root(
    params: &ModelParams,
    n: usize,
    r: f64,
    tau: f64,
    seed: Complex64,
) -> Result<Complex64> {
    let ch = Characteristic::from_params(params, n);
    track_root_with(&ch, r, tau, seed)
}

pub fn track_root_with(ch: &Characteristic, r: f64, tau: f64, seed: Complex64) -> Result<Complex64> {
    const MAX_ITER: usize = 100;
    let mut z = seed;
    let mut g = ch.eval(z, r, tau);
    for _ in 0..MAX_ITER {
        if g.norm() < 1e-13 {
            return Ok(z);
        }
        let dg = ch.dlambda(z, r, tau);
        let mut step = g / dg;
        // backtrack on residual growth
        let mut next = z - step;
        let mut g_next = ch.eval(next, r, tau);
        let mut tries = 0;
        while g_next.norm() > g.norm() && tries < 30 {
            step *= 0.5;
            next = z - step;
            g_next = ch.eval(next, r, tau);
            tries += 1;
        }
        z = next;
        g = g_next;
    }
    if g.norm() < 1e-12 {
        Ok(z)
    } else {
        Err(Error::NoConvergence {
            iterations: MAX_ITER,
            residual: g.norm(),
        })
    }
}

/// Everything the spectral analysis produces for one parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub params: ModelParams,
    pub turing: TuringReport,
    pub bt: Option<BtPoint>,
    pub hopf: Option<HopfReport>,
}

impl SpectralReport {
    /// Turing-Hopf point `(r*, tau*, omega*)`.
    pub fn turing_hopf(&self) -> Option<(f64, f64, f64)> {
        self.hopf
            .as_ref()
            .map(|h| (self.turing.r_star, h.tau_star, h.omega_star))
    }
}

/// Runs the full chain; Bogdanov-Takens and Hopf data are filled in only when
/// the Turing condition holds.
pub fn analyze(params: &ModelParams, branches: usize) -> Result<SpectralReport> {
    let turing = turing_branch(params)?;
    let (bt, hopf) = if turing.a6.holds {
        (
            Some(bt_point(params, turing.r_star, turing.n_t)?),
            Some(s0_and_star(params, turing.r_star, turing.n_t, branches)?),
        )
    } else {
        (None, None)
    };
    Ok(SpectralReport {
        params: *params,
        turing,
        bt,
        hopf,
    })
}

/// Linear stability of the constant state at `(r, tau)`, read off the
/// Turing values and the first Hopf crossings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StabilityLabel {
    Stable,
    TuringUnstable,
    HopfUnstable,
    TuringHopfUnstable,
}

impl StabilityLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            StabilityLabel::Stable => "stable",
            StabilityLabel::TuringUnstable => "turing-unstable",
            StabilityLabel::HopfUnstable => "hopf-unstable",
            StabilityLabel::TuringHopfUnstable => "turing-hopf-unstable",
        }
    }
}

pub fn stability_label(params: &ModelParams, turing: &TuringReport, r: f64, tau: f64) -> StabilityLabel {
    let turing_unstable = turing.r_t.iter().skip(1).any(|&rt| rt > r);
    let lc = LinearCoeffs {
        a0: turing.a0,
        b0: turing.b0,
    };
    let hopf_unstable = (0..turing.r_t.len()).any(|n| {
        let ch = Characteristic::new(params, &lc, n);
        match hopf_branch_with(&ch, r, 1) {
            Ok(branch) => branch.roots.iter().any(|root| tau > root.taus[0]),
            Err(_) => false,
        }
    }) || (tau == 0.0 && turing.r_h.iter().any(|&rh| rh > r));
    match (turing_unstable, hopf_unstable) {
        (false, false) => StabilityLabel::Stable,
        (true, false) => StabilityLabel::TuringUnstable,
        (false, true) => StabilityLabel::HopfUnstable,
        (true, true) => StabilityLabel::TuringHopfUnstable,
    }
}
