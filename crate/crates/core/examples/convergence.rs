//! Ground-state error against basis size.

use gapminimax::workflow::{run, Command, RunConfig};

fn main() -> gapminimax::Result<()> {
    let mut config = RunConfig::new(Command::Converge);
    config.sizes = vec![30, 50, 100];
    let record = run(&config)?;
    print!("{}", record.table.to_csv()?);
    println!("monotone within slack: {}", record.passed());
    Ok(())
}
