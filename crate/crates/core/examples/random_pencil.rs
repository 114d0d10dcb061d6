//! Minimax values of a seeded random pair against the dense pencil.

use gapminimax::minimax::solve_all;
use gapminimax::random::random_pair;
use gapminimax::{SForm, SolveOptions};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gapminimax::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let pair = random_pair::<f64, _>(&mut rng, 20, 8);
    let s = SForm::assemble(&pair.to_block_coordinates());
    println!("real n = 20, n_plus = 8, a = {:.6}", s.a());
    for r in solve_all(&s, 5, &SolveOptions::default())? {
        println!("  k={} lambda={:.14} mu={:.14} diff={:.1e}", r.k, r.lambda, r.pencil_mu_k.unwrap(), r.mu_difference().unwrap());
    }

    let pair = random_pair::<Complex64, _>(&mut rng, 12, 5);
    let s = SForm::assemble(&pair.to_block_coordinates());
    println!("complex n = 12, n_plus = 5");
    for r in solve_all(&s, 3, &SolveOptions::default())? {
        println!("  k={} lambda={:.14} diff={:.1e}", r.k, r.lambda, r.mu_difference().unwrap());
    }
    Ok(())
}
