//! Grid search over subspaces of `D+` against the root solver.

use gapminimax::minimax::{brute_force_minimax, solve_lambda_k};
use gapminimax::random::random_pair;
use gapminimax::{SForm, SolveOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gapminimax::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (n, n_plus) in [(5, 2), (6, 3)] {
        let s = SForm::assemble(&random_pair::<f64, _>(&mut rng, n, n_plus).to_block_coordinates());
        let root = solve_lambda_k(&s, 1, &SolveOptions::default())?.lambda;
        for grid in [100, 1_000, 10_000] {
            let brute = brute_force_minimax(&s, 1, grid)?;
            println!("n={n} n_plus={n_plus} grid={grid:>6}: brute {brute:.8} root {root:.8} gap {:.1e}", brute - root);
        }
    }
    Ok(())
}
