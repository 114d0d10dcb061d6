//! Direct Rayleigh-Ritz on an unbalanced basis produces spurious gap
//! eigenvalues; the minimax values do not.

use gapminimax::dirac::{pollution_demo, ChannelConfig};
use gapminimax::SolveOptions;

fn main() -> gapminimax::Result<()> {
    let mut config = ChannelConfig::new(-1).with_splines(100);
    for refinement in [1, 2] {
        config.upper_refinement = refinement;
        let report = pollution_demo(&config, 0.5, 3, &SolveOptions::default())?;
        println!("upper refinement {refinement}:");
        println!("  direct gap eigenvalues: {}", report.direct.len());
        println!("  spurious candidates:    {}", report.spurious.len());
        for (r, d) in report.minimax.iter().zip(&report.minimax_distance) {
            println!("  minimax k={} lambda={:.10} distance to level {:.2e}", r.k, r.lambda, d.unwrap());
        }
    }
    Ok(())
}
