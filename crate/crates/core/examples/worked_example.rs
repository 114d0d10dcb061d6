//! The 2×2 pair `Q = diag(1, -1)`, `V = [[0, ½], [½, 0]]` with `D+ = e1`.
//!
//! Its only eigenvalue above `a = -1` is `√(1 + ¼) = 1.1180339887…`.

use gapminimax::forms::check_all;
use gapminimax::minimax::{schur_reduce, solve_lambda_k};
use gapminimax::{FormPair, SForm, SolveOptions, SplitSpace};
use nalgebra::{DMatrix, DVector};

fn main() -> gapminimax::Result<()> {
    let pair = FormPair::new(
        DMatrix::identity(2, 2),
        DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0])),
        DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0]),
        SplitSpace::from_indices(2, &[0])?,
    )?;
    let report = check_all(&pair, 1e-10);
    for c in &report.checks {
        println!("condition {}: pass={} margin={:.6}", c.condition, c.pass, c.margin);
    }

    let s = SForm::assemble(&pair);
    println!("a = {}, b = {} (surrogate)", s.a(), s.b());
    let red = schur_reduce(&s, 0.5)?;
    println!("G(0.5) = {:.6}, N(0.5) = {:.6}", red.g[(0, 0)], red.n[(0, 0)]);

    let r = solve_lambda_k(&s, 1, &SolveOptions::default())?;
    println!("lambda_1 = {:.12}  mu_1 = {:.12}  ({} iterations)", r.lambda, r.pencil_mu_k.unwrap(), r.iterations);
    println!("closed form {:.12}", 1.25_f64.sqrt());
    Ok(())
}
