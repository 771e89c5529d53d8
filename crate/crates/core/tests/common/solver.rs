//! Measurements of the solver properties, shared by the solver tests and the
//! acceptance run. Each returns the measured quantity; callers assert.

use thopf::diagnostics::mode_projections;
use thopf::model::equilibrium;
use thopf::sim::{grid, plan_steps, simulate, InitialCondition, SimConfig};
use thopf::unfolding::{unfold, MIXED_MODE_THRESHOLD};
use thopf::{presets, ModelParams};

pub fn delayed_set() -> ModelParams {
    presets::mode_two().with_r(1.2).with_tau(0.8)
}

pub fn cfg(nx: usize, t_end: f64) -> SimConfig {
    SimConfig {
        nx,
        t_end,
        ..SimConfig::default()
    }
}

pub fn custom(p: &ModelParams, nx: usize, f: impl Fn(f64) -> (f64, f64)) -> InitialCondition {
    let (u, v) = grid(p, nx).into_iter().map(f).unzip();
    InitialCondition::CustomSamples { u, v }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Largest deviation from the equilibrium when started exactly on it.
pub fn equilibrium_drift() -> f64 {
    let p = delayed_set();
    let u0 = equilibrium(&p).u0;
    let res = simulate(&p, &InitialCondition::offset_sine(0.0, 1.0, 1.0), &cfg(20, 100.0)).unwrap();
    res.u
        .iter()
        .chain(&res.v)
        .flatten()
        .map(|w| (w - u0).abs())
        .fold(0.0, f64::max)
}

fn ode_rhs(p: &ModelParams, u: f64, v: f64, ud: f64, vd: f64) -> [f64; 2] {
    [u * (1.0 - u) - p.a * u * v / (u + p.b), p.r * v * (1.0 - vd / ud)]
}

fn rk4_step(y: [f64; 2], k: f64, f: impl Fn([f64; 2], usize) -> [f64; 2]) -> [f64; 2] {
    let k1 = f(y, 0);
    let k2 = f([y[0] + 0.5 * k * k1[0], y[1] + 0.5 * k * k1[1]], 1);
    let k3 = f([y[0] + 0.5 * k * k2[0], y[1] + 0.5 * k * k2[1]], 1);
    let k4 = f([y[0] + k * k3[0], y[1] + k * k3[1]], 2);
    [0, 1].map(|i| y[i] + k / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

/// Independent RK4 for the spatially uniform problem with constant history;
/// for `tau > 0` a method of steps with `m` steps per delay and delayed
/// midpoints by linear interpolation.
pub fn uniform_oracle(p: &ModelParams, init: [f64; 2], t_end: f64, m: usize) -> [f64; 2] {
    if p.tau == 0.0 {
        let k = t_end / (m as f64 * t_end).round();
        let mut y = init;
        for _ in 0..(t_end / k).round() as usize {
            y = rk4_step(y, k, |y, _| ode_rhs(p, y[0], y[1], y[0], y[1]));
        }
        return y;
    }
    let k = p.tau / m as f64;
    let steps = (t_end / k).round() as usize;
    let mut hist: Vec<[f64; 2]> = vec![init];
    for n in 0..steps {
        let at = |j: isize| if j <= 0 { init } else { hist[j as usize] };
        let j = n as isize - m as isize;
        let (d0, d1) = (at(j), at(j + 1));
        let delayed = [d0, [0, 1].map(|i| 0.5 * (d0[i] + d1[i])), d1];
        let y = rk4_step(hist[n], k, |y, s| ode_rhs(p, y[0], y[1], delayed[s][0], delayed[s][1]));
        hist.push(y);
    }
    hist[steps]
}

/// Worst disagreement with [`uniform_oracle`] over `tau = 0` and `tau = 0.8`.
pub fn ode_oracle_error() -> f64 {
    let mut worst = 0.0f64;
    for tau in [0.0, 0.8] {
        let p = presets::baseline().with_r(0.6).with_tau(tau);
        let nx = 4;
        let (u_i, v_i) = (0.2, 0.15);
        let init = custom(&p, nx, |_| (u_i, v_i));
        let c = SimConfig {
            dt: Some(0.01),
            ..cfg(nx, 50.0)
        };
        let res = simulate(&p, &init, &c).unwrap();
        let want = uniform_oracle(&p, [u_i, v_i], 50.0, if tau == 0.0 { 1000 } else { 4000 });
        for i in 0..nx {
            worst = worst
                .max((res.final_u()[i] - want[0]).abs())
                .max((res.final_v()[i] - want[1]).abs());
        }
    }
    worst
}

/// Reflection asymmetry after evolving mirror-symmetric data, and how far
/// the solution moved.
pub fn mirror_asymmetry() -> (f64, f64) {
    let p = delayed_set();
    let u0 = equilibrium(&p).u0;
    let nx = 40;
    let init = custom(&p, nx, |x| {
        let w = u0 + 0.3 * u0 * (2.0 * x / p.l).cos();
        (w, w)
    });
    let res = simulate(&p, &init, &cfg(nx, 50.0)).unwrap();
    let asym = |w: &[f64]| (0..nx).map(|i| (w[i] - w[nx - 1 - i]).abs()).fold(0.0, f64::max);
    let moved = max_abs_diff(res.final_u(), &res.u[0]);
    (asym(res.final_u()).max(asym(res.final_v())), moved)
}

/// Relative drift of the total of `u` and `v` with the kinetics switched off.
pub fn mass_drift() -> f64 {
    let p = delayed_set();
    let nx = 37;
    let init = custom(&p, nx, |x| {
        (1.0 + 0.5 * (0.7 * x).sin() + 0.2 * (3.1 * x).cos(), 0.5 + 0.4 * (x / p.l).sin())
    });
    let c = SimConfig {
        kinetics: false,
        ..cfg(nx, 30.0)
    };
    let res = simulate(&p, &init, &c).unwrap();
    let mass = |w: &[f64]| w.iter().sum::<f64>();
    let (mu, mv) = (mass(&res.u[0]), mass(&res.v[0]));
    res.u
        .iter()
        .zip(&res.v)
        .map(|(ru, rv)| ((mass(ru) - mu).abs() / mu).max((mass(rv) - mv).abs() / mv))
        .fold(0.0, f64::max)
}

pub fn orders(errs: &[f64]) -> Vec<f64> {
    errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

/// Observed orders for a diffusing cosine against its exact decay rate,
/// `nx = 25, 50, 100, 200`.
pub fn spatial_orders() -> Vec<f64> {
    let p = delayed_set();
    let mut errs = Vec::new();
    for nx in [25, 50, 100, 200] {
        let init = custom(&p, nx, |x| {
            let w = 1.0 + 0.1 * (3.0 * x / p.l).cos();
            (w, w)
        });
        let c = SimConfig {
            kinetics: false,
            ..cfg(nx, 2.0)
        };
        let res = simulate(&p, &init, &c).unwrap();
        let t = *res.t.last().unwrap();
        let got = mode_projections(res.final_u(), &res.x, p.l, 3)[3];
        let want = 0.1 * (-p.d1 * 9.0 / (p.l * p.l) * t).exp();
        errs.push((got - want).abs());
    }
    orders(&errs)
}

/// Self-convergence orders of the low mode projections with kinetics and
/// delay on.
pub fn spatial_self_orders() -> Vec<f64> {
    let p = delayed_set();
    let proj = |nx: usize| {
        let res = simulate(&p, &InitialCondition::offset_sine(0.01, 1.3, 1.0), &cfg(nx, 5.0)).unwrap();
        mode_projections(res.final_u(), &res.x, p.l, 3)
    };
    let levels: Vec<Vec<f64>> = [25, 50, 100, 200].into_iter().map(proj).collect();
    let diffs: Vec<f64> = levels.windows(2).map(|w| max_abs_diff(&w[0], &w[1])).collect();
    orders(&diffs)
}

/// Self-convergence order in time at `dt = tau/8, tau/16, tau/32`.
pub fn temporal_order() -> f64 {
    let p = delayed_set();
    let nx = 8;
    let run_with = |m: f64| {
        let c = SimConfig {
            dt: Some(p.tau / m),
            ..cfg(nx, 10.0)
        };
        let plan = plan_steps(&p, &c).unwrap();
        assert!((plan.dt - p.tau / m).abs() < 1e-15, "diffusion limit binds");
        simulate(&p, &InitialCondition::offset_sine(0.02, 0.6, 1.0), &c).unwrap()
    };
    let sols: Vec<_> = [8.0, 16.0, 32.0].into_iter().map(run_with).collect();
    let diff = |a: usize, b: usize| {
        max_abs_diff(sols[a].final_u(), sols[b].final_u()).max(max_abs_diff(sols[a].final_v(), sols[b].final_v()))
    };
    (diff(0, 1) / diff(1, 2)).log2()
}

/// Extremes of `u, v` over a run converging to a stationary pattern.
pub fn steady_extremes() -> (f64, f64) {
    let (_, pu) = unfold(&presets::mode_two(), MIXED_MODE_THRESHOLD).unwrap();
    let crit = pu.critical.unwrap();
    let p = presets::mode_two()
        .with_r(crit.r_star - 0.05)
        .with_tau(crit.tau_star - 0.05);
    let res = simulate(&p, &InitialCondition::offset_sine(0.01, 1.3, 1.0), &cfg(50, 600.0)).unwrap();
    let all = || res.u.iter().chain(&res.v).flatten().copied();
    (all().fold(f64::INFINITY, f64::min), all().fold(0.0, f64::max))
}
