//! Linear stability labels over the `(r, tau)` plane with the Turing line,
//! Hopf curves, and the Bogdanov-Takens and Turing-Hopf points.
//!
//! `cargo run --example sweep`

use rayon::prelude::*;
use thopf::presets;
use thopf::spectrum::{analyze, hopf_branch, stability_label, turing_branch, StabilityLabel};

fn main() -> thopf::Result<()> {
    let params = presets::baseline();
    let turing = turing_branch(&params)?;
    let report = analyze(&params, 1)?;
    let (nr, nt) = (48, 24);
    let (r_lo, r_hi, t_hi) = (0.3, 0.6, 8.0);
    let rows: Vec<String> = (0..nt)
        .into_par_iter()
        .rev()
        .map(|j| {
            let tau = t_hi * j as f64 / (nt - 1) as f64;
            (0..nr)
                .map(|i| {
                    let r = r_lo + (r_hi - r_lo) * i as f64 / (nr - 1) as f64;
                    match stability_label(&params, &turing, r, tau) {
                        StabilityLabel::Stable => ' ',
                        StabilityLabel::TuringUnstable => 'T',
                        StabilityLabel::HopfUnstable => 'H',
                        StabilityLabel::TuringHopfUnstable => '#',
                    }
                })
                .collect()
        })
        .collect();
    println!("tau from {t_hi} (top) to 0, r from {r_lo} to {r_hi}:");
    for row in rows {
        println!("|{row}|");
    }
    println!("Turing line r = {:.4} (mode {})", turing.r_star, turing.n_t);
    if let Some(bt) = report.bt {
        println!("BT point ({:.4}, {:.4})", bt.r_star, bt.tau0);
    }
    if let Some((r, tau, w)) = report.turing_hopf() {
        println!("Turing-Hopf point ({r:.4}, {tau:.4}), omega = {w:.4}");
    }
    for n in 0..3 {
        let pts: Vec<String> = [0.35, 0.45, 0.55]
            .iter()
            .filter_map(|&r| hopf_branch(&params, r, n, 1).ok().map(|b| format!("({r}, {:.3})", b.principal().1)))
            .collect();
        println!("tau_{n}^(0)(r): {}", pts.join(" "));
    }
    Ok(())
}
