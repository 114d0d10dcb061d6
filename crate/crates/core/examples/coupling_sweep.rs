//! Ground state over ν = 0.1 … 0.9 with both splits, and the regime flags.

use gapminimax::workflow::{parse_grid, run, Command, RunConfig};
use gapminimax::dirac::{regime_classify, SplitKind, Thresholds};

fn main() -> gapminimax::Result<()> {
    let t = Thresholds::compute();
    println!("thresholds: gls {:.7}  core {:.7}  talman {:.7}", t.gls, t.core, t.talman);
    let mut config = RunConfig::new(Command::Sweep);
    config.nu = parse_grid("0.1:0.9:0.1")?;
    config.nu.push(0.93);
    config.splits = vec![SplitKind::P, SplitKind::T];
    config.channel.n_splines = 100;
    let record = run(&config)?;
    print!("{}", record.table.to_csv()?);
    for nu in [0.2, 0.5, 0.93] {
        println!("nu = {nu}: {:?}", regime_classify(nu));
    }
    for f in &record.failures {
        println!("not computed: {f}");
    }
    println!("assertions pass: {}", record.passed());
    Ok(())
}
