//! Pattern classification of a finished run from its late-time window.

use std::f64::consts::PI;

use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::SimResult;
use crate::unfolding::PatternLabel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsConfig {
    /// Final fraction of the run used as the window.
    pub window_fraction: f64,
    /// Highest cosine mode reported.
    pub n_max: usize,
    /// Expected oscillation period; the window must cover five of them.
    pub period_scale: Option<f64>,
    /// Relative variation below which the window counts as steady.
    pub steady_rel: f64,
    /// Mode amplitude above which spatial structure is reported.
    pub mode_threshold: f64,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            window_fraction: 0.2,
            n_max: 10,
            period_scale: None,
            steady_rel: 1e-5,
            mode_threshold: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternDiagnostics {
    pub window: [f64; 2],
    pub samples: usize,
    /// `mode_amps[n]`, `n >= 1`: largest `|a_n(t)|` over the window, where
    /// `a_n = 2/(l pi) int (u - mean u) cos(n x / l) dx`. `mode_amps[0]` is
    /// the largest deviation of the spatial mean from its window average.
    pub mode_amps: Vec<f64>,
    /// Window average of the signed projections `a_n(t)`.
    pub mode_proj: Vec<f64>,
    pub dominant_mode: Option<usize>,
    /// Angular frequency of the spectral peak, if anything oscillates.
    pub temporal_freq: Option<f64>,
    /// Largest pointwise range of `u` over the window.
    pub steadiness: f64,
    /// Scale `steadiness` is compared against: `max(range of u, mean of u)`
    /// at the final sample.
    pub scale: f64,
    pub label: PatternLabel,
    pub u_min: f64,
    pub u_max: f64,
    pub v_min: f64,
    pub v_max: f64,
}

/// `a_n` for `n = 0..=n_max` of one sample, midpoint rule on cell centers;
/// entry 0 is the spatial mean.
pub fn mode_projections(u: &[f64], x: &[f64], l: f64, n_max: usize) -> Vec<f64> {
    let nx = u.len() as f64;
    let mean = u.iter().sum::<f64>() / nx;
    // 2/(l pi) * sum * h with h = l pi / nx
    let w = 2.0 / nx;
    let mut out = vec![mean];
    for n in 1..=n_max {
        let k = n as f64 / l;
        out.push(
            w * u
                .iter()
                .zip(x)
                .map(|(&u, &x)| (u - mean) * (k * x).cos())
                .sum::<f64>(),
        );
    }
    out
}

/// Angular frequency of the largest peak of a uniformly sampled signal, with
/// the mean removed and a Hann taper, refined by parabolic interpolation.
pub fn peak_frequency(signal: &[f64], dt: f64) -> Option<f64> {
    let n = signal.len();
    if n < 4 {
        return None;
    }
    let mean = signal.iter().sum::<f64>() / n as f64;
    if signal.iter().all(|&s| s == mean) {
        return None;
    }
    let mut buf: Vec<Complex<f64>> = signal
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let hann = 0.5 - 0.5 * (2.0 * PI * i as f64 / (n - 1) as f64).cos();
            Complex::new((s - mean) * hann, 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let mags: Vec<f64> = buf[..n / 2 + 1].iter().map(|z| z.norm()).collect();
    let k = (1..mags.len()).max_by(|&a, &b| mags[a].total_cmp(&mags[b]))?;
    let mut shift = 0.0;
    if k + 1 < mags.len() {
        let (a, b, c) = (mags[k - 1], mags[k], mags[k + 1]);
        let denom = a - 2.0 * b + c;
        if denom != 0.0 {
            shift = (0.5 * (a - c) / denom).clamp(-0.5, 0.5);
        }
    }
    Some(2.0 * PI * (k as f64 + shift) / (n as f64 * dt))
}

fn min_max(w: &[f64]) -> (f64, f64) {
    w.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

pub fn diagnostics(res: &SimResult, cfg: &DiagnosticsConfig) -> Result<PatternDiagnostics> {
    let total = *res.t.last().unwrap_or(&0.0);
    let start_t = total * (1.0 - cfg.window_fraction);
    let mut idx: Vec<usize> = (0..res.t.len()).filter(|&i| res.t[i] >= start_t).collect();
    // a trailing sample off the stride grid would break uniform spacing
    if idx.len() >= 3 {
        let k = idx.len();
        let d_last = res.t[idx[k - 1]] - res.t[idx[k - 2]];
        let d_prev = res.t[idx[k - 2]] - res.t[idx[k - 3]];
        if (d_last - d_prev).abs() > 1e-9 * d_prev {
            idx.pop();
        }
    }
    if idx.len() < 8 {
        return Err(Error::WindowTooShort(format!("{} samples in window", idx.len())));
    }
    let t0 = res.t[idx[0]];
    let t1 = res.t[*idx.last().unwrap()];
    let span = t1 - t0;
    let tau = res.params.tau;
    if tau > 0.0 && span < 10.0 * tau {
        return Err(Error::WindowTooShort(format!(
            "window {span:.3} is shorter than 10 delays ({:.3})",
            10.0 * tau
        )));
    }
    if let Some(p) = cfg.period_scale {
        if span < 5.0 * p {
            return Err(Error::WindowTooShort(format!(
                "window {span:.3} is shorter than 5 periods ({:.3})",
                5.0 * p
            )));
        }
    }

    let l = res.params.l;
    let proj: Vec<Vec<f64>> = idx
        .iter()
        .map(|&i| mode_projections(&res.u[i], &res.x, l, cfg.n_max))
        .collect();
    let samples = idx.len();
    let mut mode_amps = vec![0.0; cfg.n_max + 1];
    let mut mode_proj = vec![0.0; cfg.n_max + 1];
    for p in &proj {
        for n in 0..=cfg.n_max {
            mode_proj[n] += p[n] / samples as f64;
        }
    }
    for p in &proj {
        mode_amps[0] = f64::max(mode_amps[0], (p[0] - mode_proj[0]).abs());
        for n in 1..=cfg.n_max {
            mode_amps[n] = f64::max(mode_amps[n], p[n].abs());
        }
    }

    let nx = res.x.len();
    let mut steadiness = 0.0f64;
    for j in 0..nx {
        let (lo, hi) = min_max(&idx.iter().map(|&i| res.u[i][j]).collect::<Vec<_>>());
        steadiness = steadiness.max(hi - lo);
    }
    let last = &res.u[*idx.last().unwrap()];
    let (u_min, u_max) = min_max(last);
    let (v_min, v_max) = min_max(&res.v[*idx.last().unwrap()]);
    let mean = last.iter().sum::<f64>() / nx as f64;
    let scale = (u_max - u_min).max(mean.abs());

    let steady = steadiness < cfg.steady_rel * scale;
    let dominant_mode = (1..=cfg.n_max)
        .max_by(|&a, &b| mode_amps[a].total_cmp(&mode_amps[b]))
        .filter(|&n| mode_amps[n] > cfg.mode_threshold);
    let spatial = dominant_mode.is_some();

    let dt = span / (samples - 1) as f64;
    let mean_signal: Vec<f64> = proj.iter().map(|p| p[0]).collect();
    let temporal_freq = match peak_frequency(&mean_signal, dt) {
        Some(w) if mode_amps[0] > 1e-12 => Some(w),
        _ => dominant_mode
            .and_then(|n| peak_frequency(&proj.iter().map(|p| p[n]).collect::<Vec<_>>(), dt)),
    };

    let label = match (steady, spatial) {
        (true, false) => PatternLabel::ConstantSteadyState,
        (true, true) => PatternLabel::NonconstantSteadyState,
        (false, false) => PatternLabel::HomogeneousPeriodic,
        (false, true) => PatternLabel::InhomogeneousPeriodic,
    };

    Ok(PatternDiagnostics {
        window: [t0, t1],
        samples,
        mode_amps,
        mode_proj,
        dominant_mode,
        temporal_freq,
        steadiness,
        scale,
        label,
        u_min,
        u_max,
        v_min,
        v_max,
    })
}
