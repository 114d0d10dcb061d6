use nalgebra::{DMatrix, DVector, Vector3};

use super::SForm;
use crate::{linalg, Error, Result};

/// Grid oracle for `inf_V sup_{V ⊕ D-} s[x]/‖x‖²` over `k`-dimensional
/// `V ⊂ D+`. Restricted to `n_plus <= 3`, `k <= 2`.
///
/// Lines in the plane are sampled by `grid` angles in `[0, π)`; lines and
/// planes in 3-space by `grid` points of a Fibonacci lattice on the upper
/// hemisphere (direction or normal). The inner supremum is the top
/// eigenvalue of `S` compressed to `V ⊕ D-`.
pub fn brute_force_minimax(s: &SForm<f64>, k: usize, grid: usize) -> Result<f64> {
    let np = s.n_plus();
    if np > 3 || k > 2 {
        return Err(Error::DimensionLimit { n_plus: np, k });
    }
    if k == 0 || k > np {
        return Err(Error::IndexOutOfRange { k, max: np });
    }
    let value = |basis: DMatrix<f64>| sup_on(s, &basis);
    if k == np {
        return Ok(value(DMatrix::identity(np, np)));
    }
    let grid = grid.max(1);
    let best = match (np, k) {
        (2, 1) => (0..grid)
            .map(|i| {
                let t = std::f64::consts::PI * i as f64 / grid as f64;
                value(DMatrix::from_column_slice(2, 1, &[t.cos(), t.sin()]))
            })
            .fold(f64::INFINITY, f64::min),
        (3, 1) => hemisphere(grid)
            .map(|d| value(DMatrix::from_column_slice(3, 1, d.as_slice())))
            .fold(f64::INFINITY, f64::min),
        (3, 2) => hemisphere(grid)
            .map(|normal| value(plane_basis(&normal)))
            .fold(f64::INFINITY, f64::min),
        _ => unreachable!("k == n_plus handled above"),
    };
    Ok(best)
}

fn sup_on(s: &SForm<f64>, basis_plus: &DMatrix<f64>) -> f64 {
    let np = s.n_plus();
    let nm = s.n_minus();
    let k = basis_plus.ncols();
    let mut basis = DMatrix::zeros(np + nm, k + nm);
    basis.view_mut((0, 0), (np, k)).copy_from(basis_plus);
    for j in 0..nm {
        basis[(np + j, k + j)] = 1.0;
    }
    linalg::max_eig(&(basis.transpose() * s.s() * &basis))
}

fn hemisphere(n: usize) -> impl Iterator<Item = Vector3<f64>> {
    let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
    (0..n).map(move |i| {
        let z = 1.0 - (i as f64 + 0.5) / n as f64;
        let r = (1.0 - z * z).sqrt();
        let phi = golden * i as f64;
        Vector3::new(r * phi.cos(), r * phi.sin(), z)
    })
}

fn plane_basis(normal: &Vector3<f64>) -> DMatrix<f64> {
    let helper = if normal.x.abs() < 0.9 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    let e1 = normal.cross(&helper).normalize();
    let e2 = normal.cross(&e1).normalize();
    DMatrix::from_columns(&[DVector::from_column_slice(e1.as_slice()), DVector::from_column_slice(e2.as_slice())])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minimax::{solve_lambda_k, SolveOptions};
    use crate::random::random_pair;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn worked_example_single_subspace() {
        let s = SForm::from_block_matrix(DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, -1.0]), 1);
        let v = brute_force_minimax(&s, 1, 10).unwrap();
        assert!((v - 1.25_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn diagonal_levels_on_grid() {
        let s = SForm::from_block_matrix(DMatrix::from_diagonal(&DVector::from_column_slice(&[2.0, 5.0, 7.0, -1.0])), 3);
        assert!((brute_force_minimax(&s, 1, 4000).unwrap() - 2.0).abs() < 1e-2);
        assert!((brute_force_minimax(&s, 2, 4000).unwrap() - 5.0).abs() < 1e-2);
    }

    #[test]
    fn limits_enforced() {
        let s = SForm::from_block_matrix(DMatrix::<f64>::identity(5, 5), 4);
        assert!(matches!(brute_force_minimax(&s, 1, 10), Err(Error::DimensionLimit { .. })));
    }

    #[test]
    fn agrees_with_root_solver() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        for np in [2, 3] {
            let s = SForm::assemble(&random_pair::<f64, _>(&mut rng, 6, np));
            for k in 1..=2 {
                let lambda = solve_lambda_k(&s, k, &SolveOptions::default()).unwrap().lambda;
                let brute = brute_force_minimax(&s, k, 10_000).unwrap();
                assert!(brute >= lambda - 1e-9);
                assert!(brute - lambda <= 1e-3, "np {np} k {k}: {brute} vs {lambda}");
            }
        }
    }
}
