//! Lowest levels of the κ = -1 Dirac-Coulomb channel at ν = 0.5.
//!
//! Pass `--release`: the default basis has 2 × 200 B-splines.

use gapminimax::dirac::{assemble_channel, solve_channel, ChannelConfig, ChannelSolveOptions, SplitKind};

fn main() -> gapminimax::Result<()> {
    let channel = assemble_channel(&ChannelConfig::new(-1))?;
    let opts = ChannelSolveOptions {
        k_max: 3,
        ..Default::default()
    };
    for split in [SplitKind::P, SplitKind::T] {
        let sol = solve_channel(&channel, 0.5, split, &opts)?;
        println!("split {split}: a = {:.6}", sol.a);
        for (r, (oracle, err)) in sol.results.iter().zip(sol.oracle.iter().zip(sol.errors())) {
            println!(
                "  lambda = {:.12}  closed form = {:.12}  error = {:.2e}  status = {}",
                r.lambda,
                oracle.unwrap(),
                err.unwrap(),
                r.status.describe()
            );
        }
        if let Some(report) = &sol.conditions {
            println!("  form conditions pass: {}", report.all_pass());
        }
    }
    Ok(())
}
