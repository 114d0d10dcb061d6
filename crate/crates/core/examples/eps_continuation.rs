//! `g_{ν,ε}[x+] → g_{ν,0}[x+]` for the regularised potential `-ν/(r + ε)`.

use gapminimax::dirac::{assemble_channel, epsilon_continuation, gap_state_components, ChannelConfig, SplitKind};

fn main() -> gapminimax::Result<()> {
    let channel = assemble_channel(&ChannelConfig::new(-1).with_splines(100))?;
    let samples = gap_state_components(&channel, 0.5, SplitKind::P, 3)?;
    let eps = [1e-1, 1e-2, 1e-3, 1e-4];
    let report = epsilon_continuation(&channel, 0.5, &eps, 0.0, SplitKind::P, &samples, 1e-4)?;
    for (i, row) in report.rows.iter().enumerate() {
        let rel: Vec<String> = row.differences.iter().map(|d| format!("{:.2e}", d / row.scale)).collect();
        println!("state {}: g0 = {:.6}, relative differences [{}]", i + 1, row.g0, rel.join(", "));
    }
    println!("pass: {}", report.pass);
    Ok(())
}
