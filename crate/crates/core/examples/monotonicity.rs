//! Matrix inequalities between Schur reductions at two shifts, and the
//! strictly decreasing bracket scan.

use gapminimax::minimax::{monotonicity_certificate, solve_lambda_k};
use gapminimax::random::random_pair;
use gapminimax::{SForm, SolveOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gapminimax::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let s = SForm::assemble(&random_pair::<f64, _>(&mut rng, 10, 4).to_block_coordinates());
    let r = solve_lambda_k(&s, 1, &SolveOptions::default())?;
    println!("a = {:.6}, lambda_1 = {:.10}", s.a(), r.lambda);
    for (u, u2) in [(s.a() + 0.1, s.a() + 0.5), (s.a() + 0.5, r.lambda), (r.lambda, r.lambda + 1.0)] {
        let cert = monotonicity_certificate(&s, u, u2, Some(r.lambda))?;
        println!("u = {u:.4}, u' = {u2:.4}: all pass = {}, min slack = {:.3e}", cert.all_pass(), cert.min_slack());
        for c in &cert.checks {
            println!("    {:<28} {:+.3e} {}", c.name, c.slack, c.pass);
        }
    }
    println!("scan points: {}, strictly decreasing: {}", r.scan.len(), r.scan_decreasing);
    Ok(())
}
