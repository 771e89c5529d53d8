//! Normal form at the Turing-Hopf point and its planar amplitude system.
//!
//! `cargo run --example normal_form`

use thopf::presets;
use thopf::unfolding::{unfold, MIXED_MODE_THRESHOLD};

fn main() -> thopf::Result<()> {
    let (nf, pu) = unfold(&presets::mode_two(), MIXED_MODE_THRESHOLD)?;
    let c = pu.critical.expect("critical point");
    println!(
        "r* = {:.6}  tau* = {:.6}  omega* = {:.6}  n_T = {}",
        c.params.r, c.params.tau, c.omega_star, pu.n_t
    );
    let u = &nf.unfolding;
    println!("f_a1z1 = {:.5}", u.f_a1z1);
    println!("f_a2z1 = {:.5}", u.f_a2z1);
    println!("f_a1z2 = {:.6}  f_a2z2 = {:.1e}", u.f_a1z2, u.f_a2z2);
    println!("g210 = {:.5}  g102 = {:.5}", nf.g210, nf.g102);
    println!("g111 = {:.5}  g003 = {:.5}", nf.g111, nf.g003);
    println!("|Im g111| = {:.1e}  |Im g003| = {:.1e}", nf.g111_im.abs(), nf.g003_im.abs());
    let b = &nf.breakdown.g210;
    println!("g210 = cubic {:.4} + quadratic {:.4} + correction {:.4}", b.cubic, b.quadratic, b.correction);
    for s in &nf.h.solves {
        println!("  h-solve {:>8}: cond {:.2e}, residual {:.1e}", s.which, s.cond, s.residual);
    }
    println!(
        "planar: sigma = {}  b0 = {:.4}  c0 = {:.4}  d0 = {}  d0 - b0 c0 = {:.4}  case {}",
        pu.sigma,
        pu.b0,
        pu.c0,
        pu.d0,
        pu.d0 - pu.b0 * pu.c0,
        pu.case_tag
    );
    Ok(())
}
