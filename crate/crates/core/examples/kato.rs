//! `m[L x+] <= (π/2)‖x+‖²` in the `|H₀|` norm at ν = 0.9.

use gapminimax::dirac::{assemble_channel, kato_certificate, ChannelConfig, SplitKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gapminimax::Result<()> {
    let channel = assemble_channel(&ChannelConfig::new(-1).with_splines(100))?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for nu in [0.5, 0.9] {
        let report = kato_certificate(&channel, nu, 0.0, SplitKind::P, 100, &mut rng)?;
        println!(
            "nu = {nu}: {} samples, max ratio {:.4} (bound {:.4}), pass {}",
            report.samples, report.max_ratio, report.bound, report.pass
        );
    }
    Ok(())
}
