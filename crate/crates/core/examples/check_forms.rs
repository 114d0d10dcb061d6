//! Condition report of a valid random pair and of the same pair with the
//! split reversed.

use gapminimax::forms::{check_all, default_tolerance, FormPair, SplitSpace};
use gapminimax::random::random_block_pair;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gapminimax::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let good = random_block_pair::<f64, _>(&mut rng, 6, 3);
    let flipped = FormPair::new(good.m().clone(), good.q().clone(), good.v().clone(), SplitSpace::from_indices(6, &[3, 4, 5])?)?;
    for (name, pair) in [("valid", &good), ("flipped", &flipped)] {
        let report = check_all(pair, default_tolerance(pair));
        println!("{name}: all pass = {}", report.all_pass());
        for c in &report.checks {
            let note = c.note.as_deref().unwrap_or("");
            println!("  ({}) pass={:<5} margin={:+.4e} {note}", c.condition, c.pass, c.margin);
        }
    }
    Ok(())
}
