//! Turing and Hopf spectra of the baseline parameter set.
//!
//! `cargo run --example spectrum`

use thopf::presets;
use thopf::spectrum::{analyze, DEFAULT_BRANCHES};

fn main() -> thopf::Result<()> {
    let params = presets::baseline();
    let report = analyze(&params, DEFAULT_BRANCHES)?;
    let t = &report.turing;
    println!("u0 = {:.6}  A0 = {:.6}  B0 = {:.6}", t.u0, t.a0, t.b0);
    println!("Turing condition holds: {}", t.a6.holds);
    for (n, (rt, rh)) in t.r_t.iter().zip(&t.r_h).enumerate().take(8) {
        println!("  n = {n:2}  r_T = {rt:>10.6}  r_H = {rh:>10.6}");
    }
    println!("n_T = {}  r* = {:.6}", t.n_t, t.r_star);
    if let Some(bt) = report.bt {
        println!("Bogdanov-Takens point (r, tau) = ({:.6}, {:.6})", bt.r_star, bt.tau0);
    }
    if let Some(h) = &report.hopf {
        println!("S0 = {:?}", h.s0);
        for b in &h.branches {
            let (w, tau) = b.principal();
            println!("  n = {}  omega = {w:.6}  tau^(0) = {tau:.6}  ({:?})", b.n, b.case);
        }
        println!(
            "first Hopf mode n_H = {}, tau* = {:.6}, omega* = {:.6}",
            h.n_h, h.tau_star, h.omega_star
        );
    }
    Ok(())
}
