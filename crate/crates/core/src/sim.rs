//! Method-of-lines solver for the delayed system on `(0, l*pi)` with
//! homogeneous Neumann conditions.
//!
//! Cell-centered grid with mirror ghost cells, classical RK4 in time. The
//! step is snapped to `dt = tau / m`, so `t - tau` always falls on a stored
//! step. Only the ratio `v/u` enters the delayed term, so that ratio is what
//! the history ring buffer holds. Stage values at `t - tau + dt/2` come from
//! the four-point cubic interpolant on stored steps, which keeps the scheme
//! fourth order in time; a frozen step-start sample would drop it to first.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{equilibrium, ModelParams};

/// Any `|u|` or `|v|` above this aborts the run.
pub const BLOWUP_LIMIT: f64 = 1e6;
/// `u` at or below this aborts the run.
pub const POSITIVITY_FLOOR: f64 = 1e-12;
/// `dt <= DIFFUSION_SAFETY * h^2 / max(d1, d2)`.
pub const DIFFUSION_SAFETY: f64 = 0.25;
/// Target spacing of stored samples when no stride is given.
pub const DEFAULT_SAMPLE_INTERVAL: f64 = 0.25;

fn default_nx() -> usize {
    200
}

fn default_t_end() -> f64 {
    3000.0
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(default = "default_nx")]
    pub nx: usize,
    /// Upper bound on the step; the actual step is the largest `tau / m`
    /// below both this and the diffusion limit.
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    /// Steps between stored samples.
    #[serde(default)]
    pub stride: Option<usize>,
    /// `false` switches the reaction terms off, leaving pure diffusion.
    #[serde(default = "default_true")]
    pub kinetics: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            nx: default_nx(),
            dt: None,
            t_end: default_t_end(),
            stride: None,
            kinetics: true,
        }
    }
}

/// History on `[-tau, 0]`, constant in time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialCondition {
    /// `u = v = u0 + sign * amplitude * sin(wavenumber * x)`.
    EquilibriumOffsetSine {
        amplitude: f64,
        wavenumber: f64,
        #[serde(default = "one")]
        sign: f64,
    },
    /// Values at the cell centers.
    CustomSamples { u: Vec<f64>, v: Vec<f64> },
}

fn one() -> f64 {
    1.0
}

impl InitialCondition {
    pub fn offset_sine(amplitude: f64, wavenumber: f64, sign: f64) -> Self {
        InitialCondition::EquilibriumOffsetSine {
            amplitude,
            wavenumber,
            sign,
        }
    }

    /// Samples at the given cell centers.
    pub fn sample(&self, params: &ModelParams, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let (u, v) = match self {
            InitialCondition::EquilibriumOffsetSine {
                amplitude,
                wavenumber,
                sign,
            } => {
                let u0 = equilibrium(params).u0;
                let u: Vec<f64> = x
                    .iter()
                    .map(|&x| u0 + sign * amplitude * (wavenumber * x).sin())
                    .collect();
                (u.clone(), u)
            }
            InitialCondition::CustomSamples { u, v } => {
                if u.len() != x.len() || v.len() != x.len() {
                    return Err(Error::Config(format!(
                        "custom initial samples have lengths {}/{}, grid has {} cells",
                        u.len(),
                        v.len(),
                        x.len()
                    )));
                }
                (u.clone(), v.clone())
            }
        };
        if u.iter().chain(&v).any(|&w| !(w.is_finite() && w > 0.0)) {
            return Err(Error::Config("initial history must be finite and positive".into()));
        }
        Ok((u, v))
    }
}

/// Cell centers `(i + 1/2) h` of the uniform grid on `(0, l*pi)`.
pub fn grid(params: &ModelParams, nx: usize) -> Vec<f64> {
    let h = params.domain_length() / nx as f64;
    (0..nx).map(|i| (i as f64 + 0.5) * h).collect()
}

/// Resolved step: `dt` and the number of steps per delay (0 when `tau = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepPlan {
    pub dt: f64,
    pub m: usize,
    pub steps: usize,
    pub stride: usize,
    pub h: f64,
}

pub fn plan_steps(params: &ModelParams, cfg: &SimConfig) -> Result<StepPlan> {
    params.validate()?;
    if cfg.nx < 2 {
        return Err(Error::Config(format!("nx must be at least 2, got {}", cfg.nx)));
    }
    if !(cfg.t_end.is_finite() && cfg.t_end > 0.0) {
        return Err(Error::Config(format!("t_end must be positive, got {}", cfg.t_end)));
    }
    let h = params.domain_length() / cfg.nx as f64;
    let mut dt_max = DIFFUSION_SAFETY * h * h / params.d1.max(params.d2);
    if let Some(dt) = cfg.dt {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive, got {dt}")));
        }
        dt_max = dt_max.min(dt);
    }
    let (dt, m) = if params.tau > 0.0 {
        // m >= 3 so that the interpolation stencil ends at a stored step
        let m = ((params.tau / dt_max).ceil() as usize).max(3);
        (params.tau / m as f64, m)
    } else {
        (dt_max, 0)
    };
    let steps = (cfg.t_end / dt).round().max(1.0) as usize;
    let stride = match cfg.stride {
        Some(0) => return Err(Error::Config("stride must be positive".into())),
        Some(s) => s,
        None => ((DEFAULT_SAMPLE_INTERVAL / dt).round() as usize).max(1),
    };
    Ok(StepPlan {
        dt,
        m,
        steps,
        stride,
        h,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Termination {
    Completed,
    Blowup { t: f64 },
    PositivityViolation { t: f64, index: usize, value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub params: ModelParams,
    pub config: SimConfig,
    pub init: InitialCondition,
    pub plan: StepPlan,
    pub x: Vec<f64>,
    pub t: Vec<f64>,
    /// One row per stored sample.
    pub u: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub termination: Termination,
}

impl SimResult {
    pub fn into_result(self) -> Result<Self> {
        match self.termination {
            Termination::Completed => Ok(self),
            Termination::Blowup { t } => Err(Error::Blowup { t }),
            Termination::PositivityViolation { t, index, value } => {
                Err(Error::PositivityViolation { t, index, value })
            }
        }
    }

    pub fn final_u(&self) -> &[f64] {
        self.u.last().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn final_v(&self) -> &[f64] {
        self.v.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

struct Coeffs {
    d1h: f64,
    d2h: f64,
    a: f64,
    b: f64,
    r: f64,
}

/// Weights of one RK4 stage: `acc <- ca acc + ck k`, `out <- base + wn k + wa acc`.
#[derive(Clone, Copy)]
struct StageWeights {
    ca: f64,
    ck: f64,
    wn: f64,
    wa: f64,
}

/// Buffers are padded with one ghost cell on each side.
struct Stage<'a> {
    su: &'a [f64],
    sv: &'a [f64],
    base_u: &'a [f64],
    base_v: &'a [f64],
    /// Delayed `v/u` at the cell centers (unpadded); ignored without delay.
    qd: &'a [f64],
}

fn set_ghosts(w: &mut [f64]) {
    let n = w.len();
    w[0] = w[1];
    w[n - 1] = w[n - 2];
}

/// One fused RK4 stage: evaluates the right-hand side at the stage input,
/// updates the accumulator and writes the next stage input. The Laplacian is
/// written as `(left + right) - 2 c` so mirrored inputs give bitwise
/// mirrored outputs.
fn stage<const KINETICS: bool, const DELAYED: bool>(
    c: &Coeffs,
    s: Stage,
    w: StageWeights,
    acc_u: &mut [f64],
    acc_v: &mut [f64],
    out_u: &mut [f64],
    out_v: &mut [f64],
) {
    let n = acc_u.len();
    let (ul, uc, ur) = (&s.su[..n], &s.su[1..n + 1], &s.su[2..n + 2]);
    let (vl, vc, vr) = (&s.sv[..n], &s.sv[1..n + 1], &s.sv[2..n + 2]);
    let (bu, bv) = (&s.base_u[1..n + 1], &s.base_v[1..n + 1]);
    let (acc_u, acc_v) = (&mut acc_u[..n], &mut acc_v[..n]);
    let (ou, ov) = (&mut out_u[1..n + 1], &mut out_v[1..n + 1]);
    let qd = if DELAYED { &s.qd[..n] } else { &s.qd[..0] };
    let (d1h, d2h, a, b, r) = (c.d1h, c.d2h, c.a, c.b, c.r);
    for i in 0..n {
        let (ui, vi) = (uc[i], vc[i]);
        let mut ku = d1h * ((ul[i] + ur[i]) - 2.0 * ui);
        let mut kv = d2h * ((vl[i] + vr[i]) - 2.0 * vi);
        if KINETICS {
            let q = if DELAYED { qd[i] } else { vi / ui };
            ku += ui * (1.0 - ui) - a * ui * vi / (ui + b);
            kv += r * vi * (1.0 - q);
        }
        let au = w.ca * acc_u[i] + w.ck * ku;
        let av = w.ca * acc_v[i] + w.ck * kv;
        acc_u[i] = au;
        acc_v[i] = av;
        ou[i] = bu[i] + w.wn * ku + w.wa * au;
        ov[i] = bv[i] + w.wn * kv + w.wa * av;
    }
    set_ghosts(out_u);
    set_ghosts(out_v);
}

/// Ring buffer of `v/u` at the last `m + 3` steps, addressed by step index
/// (negative indices are history).
struct History {
    slots: usize,
    nx: usize,
    data: Vec<f64>,
}

impl History {
    fn new(m: usize, q0: &[f64]) -> Self {
        let slots = m + 3;
        let nx = q0.len();
        let mut data = Vec::with_capacity(slots * nx);
        for _ in 0..slots {
            data.extend_from_slice(q0);
        }
        Self { slots, nx, data }
    }

    fn slot(&self, step: i64) -> usize {
        step.rem_euclid(self.slots as i64) as usize * self.nx
    }

    fn get(&self, step: i64) -> &[f64] {
        let s = self.slot(step);
        &self.data[s..s + self.nx]
    }

    /// Stores `v/u` from padded state buffers.
    fn store(&mut self, step: i64, u: &[f64], v: &[f64]) {
        let s = self.slot(step);
        let n = self.nx;
        for ((q, &u), &v) in self.data[s..s + n].iter_mut().zip(&u[1..n + 1]).zip(&v[1..n + 1]) {
            *q = v / u;
        }
    }

    /// Cubic interpolant at the midpoint of `step` and `step + 1`. The
    /// stencil never straddles `t = 0`, where the derivative jumps from the
    /// constant history to the solution.
    fn midpoint(&self, step: i64, out: &mut [f64]) {
        if step < 0 {
            out.copy_from_slice(self.get(step));
            return;
        }
        let (w, first) = if step == 0 {
            ([5.0, 15.0, -5.0, 1.0], 0)
        } else {
            ([-1.0, 9.0, 9.0, -1.0], step - 1)
        };
        let (a, b, c, d) = (
            self.get(first),
            self.get(first + 1),
            self.get(first + 2),
            self.get(first + 3),
        );
        for i in 0..out.len() {
            out[i] = (w[0] * a[i] + w[1] * b[i] + w[2] * c[i] + w[3] * d[i]) * 0.0625;
        }
    }
}

fn check_state(u: &[f64], v: &[f64], t: f64) -> Option<Termination> {
    // branch-free count first; the loop below only runs on failure
    let bad: usize = u
        .iter()
        .zip(v)
        .map(|(&u, &v)| !(u > POSITIVITY_FLOOR && u <= BLOWUP_LIMIT && v.abs() <= BLOWUP_LIMIT) as usize)
        .sum();
    if bad == 0 {
        return None;
    }
    for (i, (&ui, &vi)) in u.iter().zip(v).enumerate() {
        if !(ui.abs() <= BLOWUP_LIMIT && vi.abs() <= BLOWUP_LIMIT) {
            return Some(Termination::Blowup { t });
        }
        if ui <= POSITIVITY_FLOOR {
            return Some(Termination::PositivityViolation { t, index: i, value: ui });
        }
    }
    None
}

fn padded(w: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(w.len() + 2);
    out.push(w[0]);
    out.extend_from_slice(w);
    out.push(w[w.len() - 1]);
    out
}

/// Runs the solver; a blowup or positivity violation ends the run early and
/// is recorded in [`SimResult::termination`] with the samples up to then.
pub fn run(params: &ModelParams, init: &InitialCondition, cfg: &SimConfig) -> Result<SimResult> {
    let plan = plan_steps(params, cfg)?;
    let x = grid(params, cfg.nx);
    let (u0, v0) = init.sample(params, &x)?;
    let nx = cfg.nx;
    let coeffs = Coeffs {
        d1h: params.d1 / (plan.h * plan.h),
        d2h: params.d2 / (plan.h * plan.h),
        a: params.a,
        b: params.b,
        r: params.r,
    };
    let dt = plan.dt;
    let m = plan.m as i64;

    let q0: Vec<f64> = v0.iter().zip(&u0).map(|(v, u)| v / u).collect();
    let mut hist = History::new(plan.m, &q0);

    let mut ts = vec![0.0];
    let mut us = vec![u0.clone()];
    let mut vs = vec![v0.clone()];

    let (mut u, mut v) = (padded(&u0), padded(&v0));
    let pad = || vec![0.0; nx + 2];
    let (mut a_u, mut a_v, mut b_u, mut b_v) = (pad(), pad(), pad(), pad());
    let (mut new_u, mut new_v) = (pad(), pad());
    let (mut acc_u, mut acc_v) = (vec![0.0; nx], vec![0.0; nx]);
    let mut q_mid = vec![0.0; nx];

    let weights = [
        StageWeights { ca: 0.0, ck: 1.0, wn: 0.5 * dt, wa: 0.0 },
        StageWeights { ca: 1.0, ck: 2.0, wn: 0.5 * dt, wa: 0.0 },
        StageWeights { ca: 1.0, ck: 2.0, wn: dt, wa: 0.0 },
        StageWeights { ca: 1.0, ck: 1.0, wn: 0.0, wa: dt / 6.0 },
    ];
    let step_fn = match (cfg.kinetics, m > 0) {
        (true, true) => stage::<true, true>,
        (true, false) => stage::<true, false>,
        (false, true) => stage::<false, true>,
        (false, false) => stage::<false, false>,
    };

    let mut termination = check_state(&u0, &v0, 0.0).unwrap_or(Termination::Completed);
    let steps = if termination == Termination::Completed { plan.steps as i64 } else { 0 };
    for n in 0..steps {
        let delayed = m > 0;
        if delayed {
            hist.midpoint(n - m, &mut q_mid);
        }
        let q_start = hist.get(n - m);
        let q_mid_ref = q_mid.as_slice();
        let q_end = hist.get(n - m + 1);

        let s = Stage { su: &u, sv: &v, base_u: &u, base_v: &v, qd: q_start };
        step_fn(&coeffs, s, weights[0], &mut acc_u, &mut acc_v, &mut a_u, &mut a_v);
        let s = Stage { su: &a_u, sv: &a_v, base_u: &u, base_v: &v, qd: q_mid_ref };
        step_fn(&coeffs, s, weights[1], &mut acc_u, &mut acc_v, &mut b_u, &mut b_v);
        let s = Stage { su: &b_u, sv: &b_v, base_u: &u, base_v: &v, qd: q_mid_ref };
        step_fn(&coeffs, s, weights[2], &mut acc_u, &mut acc_v, &mut a_u, &mut a_v);
        let s = Stage { su: &a_u, sv: &a_v, base_u: &u, base_v: &v, qd: q_end };
        step_fn(&coeffs, s, weights[3], &mut acc_u, &mut acc_v, &mut new_u, &mut new_v);
        std::mem::swap(&mut u, &mut new_u);
        std::mem::swap(&mut v, &mut new_v);

        let t = (n + 1) as f64 * dt;
        let (uc, vc) = (&u[1..nx + 1], &v[1..nx + 1]);
        if let Some(bad) = check_state(uc, vc, t) {
            ts.push(t);
            us.push(uc.to_vec());
            vs.push(vc.to_vec());
            termination = bad;
            break;
        }
        if delayed {
            hist.store(n + 1, &u, &v);
        }
        let done = (n + 1) as usize;
        if done % plan.stride == 0 || done == plan.steps {
            ts.push(t);
            us.push(uc.to_vec());
            vs.push(vc.to_vec());
        }
    }

    Ok(SimResult {
        params: *params,
        config: cfg.clone(),
        init: init.clone(),
        plan,
        x,
        t: ts,
        u: us,
        v: vs,
        termination,
    })
}

/// Like [`run`] but turns an early termination into an error.
pub fn simulate(params: &ModelParams, init: &InitialCondition, cfg: &SimConfig) -> Result<SimResult> {
    run(params, init, cfg)?.into_result()
}
