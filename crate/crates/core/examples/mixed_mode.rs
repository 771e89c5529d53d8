//! Two Turing modes at once: near-tied Turing values let modes 1 and 2
//! coexist in a steady pattern. Pass `t_end` as the first argument.
//!
//! `cargo run --release --example mixed_mode -- 1500`

use thopf::diagnostics::{diagnostics, DiagnosticsConfig};
use thopf::presets;
use thopf::sim::{simulate, InitialCondition, SimConfig};
use thopf::unfolding::{classify, unfold, MIXED_MODE_THRESHOLD};

fn main() -> thopf::Result<()> {
    let t_end = std::env::args().nth(1).map_or(1500.0, |s| s.parse().expect("t_end"));
    let (_, pu) = unfold(&presets::mixed_modes(), MIXED_MODE_THRESHOLD)?;
    let alpha = [-0.05, -0.02];
    let c = classify(&pu, alpha[0], alpha[1])?;
    println!(
        "n_T = {}, secondary mode {:?}, mixed = {}, region {:?}",
        pu.n_t, pu.secondary_mode, c.mixed_mode, c.region
    );
    println!("expected profile: {}", c.spatial_profile.as_deref().unwrap_or("-"));
    let params = pu.critical.expect("critical point").params.shifted(alpha[0], alpha[1]);
    let cfg = SimConfig {
        t_end,
        ..SimConfig::default()
    };
    for sign in [1.0, -1.0] {
        let res = simulate(&params, &InitialCondition::offset_sine(0.01, 0.5, sign), &cfg)?;
        let d = diagnostics(&res, &DiagnosticsConfig::default())?;
        let a = &d.mode_proj;
        println!(
            "sign {sign:+}: {}  a1 = {:+.4e}  a2 = {:+.4e}  a3 = {:+.1e}  a4 = {:+.1e}",
            d.label.as_str(),
            a[1],
            a[2],
            a[3],
            a[4]
        );
    }
    Ok(())
}
