//! Export an assembled channel to Matrix Market and solve it with the
//! abstract pipeline.

use gapminimax::dirac::{assemble_channel, ChannelConfig, SplitKind};
use gapminimax::workflow::{export_channel, run, Command, MatrixInputs, RunConfig};

fn main() -> gapminimax::Result<()> {
    let dir = std::env::temp_dir().join("gapminimax-matrix-market-example");
    let channel = assemble_channel(&ChannelConfig::new(-1).with_splines(60))?;
    export_channel(&channel, 0.5, 0.0, SplitKind::P, &dir)?;

    let mut config = RunConfig::new(Command::AbstractSolve);
    config.matrices = Some(MatrixInputs {
        m: dir.join("m.mtx"),
        q: dir.join("q.mtx"),
        v: dir.join("v.mtx"),
        split: dir.join("split.json"),
    });
    config.b = Some(1.0);
    config.k_max = 2;
    let record = run(&config)?;
    println!("files in {}", dir.display());
    print!("{}", record.table.to_csv()?);
    Ok(())
}
