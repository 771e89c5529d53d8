//! Planar amplitude system of the Turing-Hopf normal form.
//!
//! In cylindrical coordinates `z1 = rho e^{i theta}`, `z2 = v`, and after
//! rescaling both amplitudes, the truncated normal form becomes
//!
//! ```text
//! rho' = -rho (eps1 + sigma rho^2 + b0 v^2)
//! v'   = -v   (eps2 + c0 rho^2 + d0 v^2)
//! ```
//!
//! with `sigma = -sign(Re g210)` (`+1` in the supercritical case) and
//! `d0 = -sign(g003)`. Equilibria map to PDE patterns: the origin to the
//! constant state, the `rho` axis to a homogeneous oscillation, the `v` axis
//! to a pair of stripes `cos(n_T x / l)`, and mixed points to inhomogeneous
//! oscillations.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::normal_form::{normal_form, NormalFormCoeffs};
use crate::spectrum::{track_root_with, turing_branch, Characteristic};

/// Width of the band around a bifurcation boundary reported as `Boundary`.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Default relative closeness of the second Turing value to `r*` for the
/// mixed-mode tag.
pub const MIXED_MODE_THRESHOLD: f64 = 0.05;

/// Blowup threshold of [`planar_integrate`].
pub const PLANAR_BLOWUP: f64 = 1e6;

/// Location of the Turing-Hopf point, kept so that linear growth rates can be
/// recomputed from the characteristic equations away from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub params: ModelParams,
    pub n_t: usize,
    pub r_star: f64,
    pub tau_star: f64,
    pub omega_star: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarUnfolding {
    /// `eps1 = eps1_r alpha1 + eps1_tau alpha2`
    pub eps1_r: f64,
    pub eps1_tau: f64,
    pub eps2_r: f64,
    pub eps2_tau: f64,
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
    /// Coefficient of `rho^3` in the bracket, `-sign(a11)`.
    pub sigma: f64,
    pub b0: f64,
    pub c0: f64,
    pub d0: f64,
    /// `sigma d0 - b0 c0`, equal to `d0 - b0 c0` when `sigma = 1`.
    pub det: f64,
    pub case_tag: String,
    pub n_t: usize,
    /// Secondary Turing wave number when its Turing value is close to `r*`.
    pub secondary_mode: Option<usize>,
    pub critical: Option<CriticalPoint>,
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        -1.0
    }
}

fn case_tag(b0: f64, c0: f64, d0: f64, det: f64) -> String {
    let roman = match (d0 > 0.0, b0 > 0.0, c0 > 0.0) {
        (true, true, true) => "I",
        (true, true, false) => "II",
        (true, false, true) => "III",
        (true, false, false) => "IV",
        (false, true, true) => "V",
        (false, true, false) => "VI",
        (false, false, true) => "VII",
        (false, false, false) => "VIII",
    };
    format!("{roman}{}", if det > 0.0 { "a" } else { "b" })
}

pub fn planar_reduce(nf: &NormalFormCoeffs) -> Result<PlanarUnfolding> {
    let a11 = nf.g210.re / 6.0;
    let a12 = nf.g102.re / 6.0;
    let a21 = nf.g111 / 6.0;
    let a22 = nf.g003 / 6.0;
    if a11 == 0.0 || !a11.is_finite() {
        return Err(Error::DegenerateCubic("Re g210 = 0".into()));
    }
    if a22 == 0.0 || !a22.is_finite() {
        return Err(Error::DegenerateCubic("g003 = 0".into()));
    }
    let sigma = -sign(a11);
    let b0 = -a12 / a22.abs();
    let c0 = -a21 / a11.abs();
    let d0 = -sign(a22);
    let det = sigma * d0 - b0 * c0;
    let u = &nf.unfolding;
    Ok(PlanarUnfolding {
        eps1_r: -0.5 * u.f_a1z1.re,
        eps1_tau: -0.5 * u.f_a2z1.re,
        eps2_r: -0.5 * u.f_a1z2,
        eps2_tau: -0.5 * u.f_a2z2,
        a11,
        a12,
        a21,
        a22,
        sigma,
        b0,
        c0,
        d0,
        det,
        case_tag: case_tag(b0, c0, d0, det),
        n_t: nf.basis.n_t,
        secondary_mode: None,
        critical: None,
    })
}

/// Normal form and planar reduction of `params` at its Turing-Hopf point,
/// with the critical point attached and the mixed-mode tag evaluated.
pub fn unfold(params: &ModelParams, mixed_threshold: f64) -> Result<(NormalFormCoeffs, PlanarUnfolding)> {
    let nf = normal_form(params)?;
    let mut pu = planar_reduce(&nf)?;
    let b = &nf.basis;
    pu.critical = Some(CriticalPoint {
        params: params.with_r(b.r_star).with_tau(b.tau_star),
        n_t: b.n_t,
        r_star: b.r_star,
        tau_star: b.tau_star,
        omega_star: b.omega_star,
    });
    let turing = turing_branch(params)?;
    if turing.is_mixed_mode(mixed_threshold) {
        pu.secondary_mode = turing.secondary_mode().map(|(n, _)| n);
    }
    Ok((nf, pu))
}

/// Where the values of `(eps1, eps2)` came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EpsSource {
    /// First-order forms in `(alpha1, alpha2)`.
    Linear,
    /// Negated real parts of the critical roots, followed by Newton
    /// continuation from the Turing-Hopf point, in rescaled time.
    Tracked,
}

impl PlanarUnfolding {
    pub fn eps_linear(&self, alpha1: f64, alpha2: f64) -> [f64; 2] {
        [
            self.eps1_r * alpha1 + self.eps1_tau * alpha2,
            self.eps2_r * alpha1 + self.eps2_tau * alpha2,
        ]
    }

    /// Growth rates of the two critical modes at `(r* + alpha1, tau* + alpha2)`
    /// computed from the characteristic equations. Needs the critical point.
    pub fn eps_tracked(&self, alpha1: f64, alpha2: f64) -> Result<[f64; 2]> {
        let crit = self
            .critical
            .ok_or_else(|| Error::DegenerateCase("critical point not attached".into()))?;
        let hopf = Characteristic::from_params(&crit.params, 0);
        let turing = Characteristic::from_params(&crit.params, crit.n_t);
        let mut lh = Complex64::new(0.0, crit.omega_star);
        let mut lt = Complex64::new(0.0, 0.0);
        const STEPS: usize = 16;
        for j in 1..=STEPS {
            let s = j as f64 / STEPS as f64;
            let (r, tau) = (crit.r_star + s * alpha1, crit.tau_star + s * alpha2);
            lh = track_root_with(&hopf, r, tau, lh)?;
            lt = track_root_with(&turing, r, tau, lt)?;
        }
        let tau = crit.tau_star + alpha2;
        Ok([-tau * lh.re, -tau * lt.re])
    }

    /// Tracked rates when the critical point is known and tracking succeeds,
    /// linear forms otherwise.
    pub fn eps(&self, alpha1: f64, alpha2: f64) -> ([f64; 2], EpsSource) {
        match self.eps_tracked(alpha1, alpha2) {
            Ok(e) => (e, EpsSource::Tracked),
            Err(_) => (self.eps_linear(alpha1, alpha2), EpsSource::Linear),
        }
    }

    /// Right-hand side of the rescaled planar system.
    pub fn rhs(&self, eps: [f64; 2], state: [f64; 2]) -> [f64; 2] {
        let [rho, v] = state;
        let (r2, v2) = (rho * rho, v * v);
        [
            -rho * (eps[0] + self.sigma * r2 + self.b0 * v2),
            -v * (eps[1] + self.c0 * r2 + self.d0 * v2),
        ]
    }

    /// Right-hand side of the unscaled amplitude system
    /// `rho' = rho (c1 + a11 rho^2 + a12 v^2)`, `v' = v (c2 + a21 rho^2 + a22 v^2)`
    /// with `c = -eps`.
    pub fn raw_rhs(&self, eps: [f64; 2], state: [f64; 2]) -> [f64; 2] {
        let [rho, v] = state;
        let (r2, v2) = (rho * rho, v * v);
        [
            rho * (-eps[0] + self.a11 * r2 + self.a12 * v2),
            v * (-eps[1] + self.a21 * r2 + self.a22 * v2),
        ]
    }

    /// Map from unscaled to rescaled amplitudes.
    pub fn rescale(&self, raw: [f64; 2]) -> [f64; 2] {
        [raw[0] * self.a11.abs().sqrt(), raw[1] * self.a22.abs().sqrt()]
    }

    pub fn jacobian(&self, eps: [f64; 2], state: [f64; 2]) -> [[f64; 2]; 2] {
        let [rho, v] = state;
        let (r2, v2) = (rho * rho, v * v);
        [
            [
                -(eps[0] + 3.0 * self.sigma * r2 + self.b0 * v2),
                -2.0 * self.b0 * rho * v,
            ],
            [
                -2.0 * self.c0 * rho * v,
                -(eps[1] + self.c0 * r2 + 3.0 * self.d0 * v2),
            ],
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquilibriumKind {
    Origin,
    HopfAxis,
    TuringAxis,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarEquilibrium {
    pub kind: EquilibriumKind,
    pub rho: f64,
    pub v: f64,
    pub eigs: [Complex64; 2],
    pub stable: bool,
    /// Smallest `|Re|` over the eigenvalues; near zero on a boundary.
    pub margin: f64,
}

fn eigenvalues(j: [[f64; 2]; 2]) -> [Complex64; 2] {
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = Complex64::from(tr * tr - 4.0 * det).sqrt();
    [0.5 * (tr + disc), 0.5 * (tr - disc)]
}

fn make_eq(pu: &PlanarUnfolding, eps: [f64; 2], kind: EquilibriumKind, rho: f64, v: f64) -> PlanarEquilibrium {
    let eigs = eigenvalues(pu.jacobian(eps, [rho, v]));
    PlanarEquilibrium {
        kind,
        rho,
        v,
        stable: eigs.iter().all(|z| z.re < 0.0),
        margin: eigs.iter().map(|z| z.re.abs()).fold(f64::INFINITY, f64::min),
        eigs,
    }
}

/// All equilibria with `rho >= 0`, given the linear rates directly.
pub fn planar_equilibria_eps(pu: &PlanarUnfolding, eps: [f64; 2]) -> Result<Vec<PlanarEquilibrium>> {
    use EquilibriumKind::*;
    let mut out = vec![make_eq(pu, eps, Origin, 0.0, 0.0)];

    let rho2 = -eps[0] / pu.sigma;
    if rho2 > 0.0 {
        out.push(make_eq(pu, eps, HopfAxis, rho2.sqrt(), 0.0));
    }
    let v2 = -eps[1] / pu.d0;
    if v2 > 0.0 {
        let v = v2.sqrt();
        out.push(make_eq(pu, eps, TuringAxis, 0.0, v));
        out.push(make_eq(pu, eps, TuringAxis, 0.0, -v));
    }

    // sigma rho^2 + b0 v^2 = -eps1, c0 rho^2 + d0 v^2 = -eps2
    if pu.det == 0.0 {
        return Err(Error::SingularMixedSystem);
    }
    let rho2 = (-eps[0] * pu.d0 + pu.b0 * eps[1]) / pu.det;
    let v2 = (-eps[1] * pu.sigma + pu.c0 * eps[0]) / pu.det;
    if rho2 > 0.0 && v2 > 0.0 {
        let (rho, v) = (rho2.sqrt(), v2.sqrt());
        out.push(make_eq(pu, eps, Mixed, rho, v));
        out.push(make_eq(pu, eps, Mixed, rho, -v));
    }
    Ok(out)
}

/// Equilibria at `(alpha1, alpha2)` using the linear rates.
pub fn planar_equilibria(pu: &PlanarUnfolding, alpha1: f64, alpha2: f64) -> Result<Vec<PlanarEquilibrium>> {
    planar_equilibria_eps(pu, pu.eps_linear(alpha1, alpha2))
}

/// Pattern predicted for, or observed in, the PDE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PatternLabel {
    #[serde(rename = "constant-SS")]
    ConstantSteadyState,
    #[serde(rename = "nonconstant-SS")]
    NonconstantSteadyState,
    #[serde(rename = "homogeneous-periodic")]
    HomogeneousPeriodic,
    #[serde(rename = "inhomogeneous-periodic")]
    InhomogeneousPeriodic,
}

impl PatternLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            PatternLabel::ConstantSteadyState => "constant-SS",
            PatternLabel::NonconstantSteadyState => "nonconstant-SS",
            PatternLabel::HomogeneousPeriodic => "homogeneous-periodic",
            PatternLabel::InhomogeneousPeriodic => "inhomogeneous-periodic",
        }
    }
}

impl EquilibriumKind {
    pub fn pattern(&self) -> PatternLabel {
        match self {
            EquilibriumKind::Origin => PatternLabel::ConstantSteadyState,
            EquilibriumKind::TuringAxis => PatternLabel::NonconstantSteadyState,
            EquilibriumKind::HopfAxis => PatternLabel::HomogeneousPeriodic,
            EquilibriumKind::Mixed => PatternLabel::InhomogeneousPeriodic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    D1,
    D2,
    D3,
    D4,
    D5,
    D6,
    /// Within the tolerance band of a boundary; no prediction.
    Boundary,
    /// Signature outside the six-region picture.
    Unlabeled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionClass {
    pub alpha: [f64; 2],
    pub eps: [f64; 2],
    pub eps_source: EpsSource,
    pub region: Region,
    pub equilibria: Vec<PlanarEquilibrium>,
    /// Patterns of the stable equilibria, without repeats.
    pub predicted: Vec<PatternLabel>,
    /// Spatial law of the non-homogeneous patterns.
    pub spatial_profile: Option<String>,
    pub mixed_mode: bool,
}

impl RegionClass {
    /// The single predicted pattern, when exactly one kind is stable.
    pub fn predicted_pattern(&self) -> Option<PatternLabel> {
        match self.predicted.as_slice() {
            [p] => Some(*p),
            _ => None,
        }
    }
}

fn region_of(eps: [f64; 2], eqs: &[PlanarEquilibrium]) -> Region {
    use EquilibriumKind::*;
    let on_boundary = eps.iter().any(|e| e.abs() <= BOUNDARY_TOL)
        || eqs.iter().any(|e| e.margin <= BOUNDARY_TOL)
        || eqs
            .iter()
            .filter(|e| e.kind != Origin)
            .any(|e| e.rho.max(e.v.abs()).powi(2) <= BOUNDARY_TOL);
    if on_boundary {
        return Region::Boundary;
    }
    let stable = |k| eqs.iter().any(|e| e.kind == k && e.stable);
    let exists = |k| eqs.iter().any(|e| e.kind == k);
    let only = |k| {
        eqs.iter()
            .filter(|e| e.stable)
            .all(|e| e.kind == k)
            && stable(k)
    };
    if only(Origin) {
        Region::D1
    } else if only(TuringAxis) && eps[0] > 0.0 {
        Region::D2
    } else if only(Mixed) && eps[0] > 0.0 {
        Region::D3
    } else if only(Mixed) && exists(HopfAxis) && eps[1] < 0.0 {
        Region::D4
    } else if only(Mixed) && exists(HopfAxis) && eps[1] > 0.0 {
        Region::D5
    } else if only(HopfAxis) {
        Region::D6
    } else {
        Region::Unlabeled
    }
}

/// Classification from explicit rates.
pub fn classify_eps(pu: &PlanarUnfolding, alpha: [f64; 2], eps: [f64; 2], source: EpsSource) -> Result<RegionClass> {
    let equilibria = planar_equilibria_eps(pu, eps)?;
    let region = region_of(eps, &equilibria);
    let mut predicted: Vec<PatternLabel> = Vec::new();
    if region != Region::Boundary {
        for e in equilibria.iter().filter(|e| e.stable) {
            let p = e.kind.pattern();
            if !predicted.contains(&p) {
                predicted.push(p);
            }
        }
    }
    let spatial = predicted.iter().any(|p| {
        matches!(
            p,
            PatternLabel::NonconstantSteadyState | PatternLabel::InhomogeneousPeriodic
        )
    });
    let spatial_profile = spatial.then(|| match pu.secondary_mode {
        Some(ni) => format!("h1 cos({} x/l) + h2 cos({ni} x/l)", pu.n_t),
        None => format!("h cos({} x/l)", pu.n_t),
    });
    Ok(RegionClass {
        alpha,
        eps,
        eps_source: source,
        region,
        equilibria,
        predicted,
        spatial_profile,
        mixed_mode: pu.secondary_mode.is_some(),
    })
}

/// Classifies `(alpha1, alpha2)`, using tracked rates when available.
pub fn classify(pu: &PlanarUnfolding, alpha1: f64, alpha2: f64) -> Result<RegionClass> {
    let (eps, source) = pu.eps(alpha1, alpha2);
    classify_eps(pu, [alpha1, alpha2], eps, source)
}

/// Classification with the first-order rates only.
pub fn classify_linear(pu: &PlanarUnfolding, alpha1: f64, alpha2: f64) -> Result<RegionClass> {
    classify_eps(pu, [alpha1, alpha2], pu.eps_linear(alpha1, alpha2), EpsSource::Linear)
}

/// Fixed-step RK4 for an autonomous planar field; returns samples at every
/// step including the initial state.
pub fn rk4_planar(
    f: impl Fn([f64; 2]) -> [f64; 2],
    init: [f64; 2],
    dt: f64,
    steps: usize,
) -> Result<Vec<[f64; 2]>> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut y = init;
    out.push(y);
    let axpy = |y: [f64; 2], a: f64, k: [f64; 2]| [y[0] + a * k[0], y[1] + a * k[1]];
    for step in 0..steps {
        let k1 = f(y);
        let k2 = f(axpy(y, 0.5 * dt, k1));
        let k3 = f(axpy(y, 0.5 * dt, k2));
        let k4 = f(axpy(y, dt, k3));
        for i in 0..2 {
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if !(y[0].abs() <= PLANAR_BLOWUP && y[1].abs() <= PLANAR_BLOWUP) {
            return Err(Error::Blowup {
                t: (step + 1) as f64 * dt,
            });
        }
        out.push(y);
    }
    Ok(out)
}

/// Integrates the rescaled planar system with step `dt` up to `t_end`.
pub fn planar_integrate(pu: &PlanarUnfolding, eps: [f64; 2], init: [f64; 2], t_end: f64, dt: f64) -> Result<Vec<[f64; 2]>> {
    let steps = (t_end / dt).round() as usize;
    rk4_planar(|y| pu.rhs(eps, y), init, dt, steps)
}
