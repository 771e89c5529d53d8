//! Region map of the unfolding: classify a grid of `(alpha1, alpha2)` and a
//! few named points.
//!
//! `cargo run --example classify`

use thopf::presets;
use thopf::unfolding::{classify, classify_linear, unfold, Region, MIXED_MODE_THRESHOLD};

fn glyph(r: Region) -> char {
    match r {
        Region::D1 => '1',
        Region::D2 => '2',
        Region::D3 => '3',
        Region::D4 => '4',
        Region::D5 => '5',
        Region::D6 => '6',
        Region::Boundary => '+',
        Region::Unlabeled => '.',
    }
}

fn main() -> thopf::Result<()> {
    let (_, pu) = unfold(&presets::mode_two(), MIXED_MODE_THRESHOLD)?;
    for alpha in [[0.05, -0.05], [-0.05, -0.05], [-0.05, 0.0105], [0.05, -0.01]] {
        let c = classify(&pu, alpha[0], alpha[1])?;
        let lin = classify_linear(&pu, alpha[0], alpha[1])?;
        let labels: Vec<_> = c.predicted.iter().map(|p| p.as_str()).collect();
        println!(
            "alpha = {alpha:?}: {:?} (first-order eps gives {:?}), eps = [{:.5}, {:.5}], predicts {labels:?}",
            c.region, lin.region, c.eps[0], c.eps[1]
        );
        for e in &c.equilibria {
            println!("    {:?} rho = {:.4} v = {:.4} stable = {}", e.kind, e.rho, e.v, e.stable);
        }
    }

    // coarse map with the first-order eps (cheap); alpha2 upward
    println!("\nregions, alpha1 in [-0.08, 0.08] across, alpha2 in [-0.06, 0.03] up:");
    let n = 41;
    for j in (0..n).rev() {
        let a2 = -0.06 + 0.09 * j as f64 / (n - 1) as f64;
        let row: String = (0..n)
            .map(|i| {
                let a1 = -0.08 + 0.16 * i as f64 / (n - 1) as f64;
                classify_linear(&pu, a1, a2).map(|c| glyph(c.region)).unwrap_or('?')
            })
            .collect();
        println!("  {row}");
    }
    Ok(())
}
