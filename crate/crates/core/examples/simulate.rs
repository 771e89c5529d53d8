//! Runs the PDE in region D2 from a small sine perturbation and reports the
//! late-time pattern. Pass `t_end` as the first argument (default 600).
//!
//! `cargo run --release --example simulate -- 3000`

use thopf::diagnostics::{diagnostics, DiagnosticsConfig};
use thopf::presets;
use thopf::sim::{simulate, InitialCondition, SimConfig};
use thopf::unfolding::{unfold, MIXED_MODE_THRESHOLD};

fn main() -> thopf::Result<()> {
    let t_end = std::env::args().nth(1).map_or(600.0, |s| s.parse().expect("t_end"));
    let (_, pu) = unfold(&presets::mode_two(), MIXED_MODE_THRESHOLD)?;
    let crit = pu.critical.expect("critical point");
    let params = crit.params.shifted(-0.05, -0.05);
    let init = InitialCondition::offset_sine(0.01, 0.1, 1.0);
    let cfg = SimConfig {
        t_end,
        ..SimConfig::default()
    };
    let start = std::time::Instant::now();
    let res = simulate(&params, &init, &cfg)?;
    println!(
        "r = {:.5}, tau = {:.5}: {} steps of dt = {:.5} in {:.1?}",
        params.r,
        params.tau,
        res.plan.steps,
        res.plan.dt,
        start.elapsed()
    );
    let d = diagnostics(&res, &DiagnosticsConfig::default())?;
    println!("pattern: {}", d.label.as_str());
    println!("dominant mode: {:?}", d.dominant_mode);
    println!("u in [{:.5}, {:.5}], v in [{:.5}, {:.5}]", d.u_min, d.u_max, d.v_min, d.v_max);
    for (n, a) in d.mode_proj.iter().enumerate().skip(1).take(4) {
        println!("  a_{n} = {a:+.3e}");
    }
    Ok(())
}
