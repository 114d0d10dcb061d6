//! Dense Hermitian helpers shared by the form and minimax layers.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

use crate::{Error, Result, Scalar};

/// Hermitian part `(A + A†)/2` together with the Frobenius norm of the
/// correction that was removed.
pub fn hermitian_part<T: Scalar>(a: &DMatrix<T>) -> (DMatrix<T>, f64) {
    let half = T::from_real(0.5);
    let sym = (a + a.adjoint()) * half;
    let correction = (a - &sym).norm();
    (sym, correction)
}

/// Force exact Hermitian symmetry without reporting the correction.
pub fn symmetrize<T: Scalar>(a: &DMatrix<T>) -> DMatrix<T> {
    hermitian_part(a).0
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn eigh<T: Scalar>(a: &DMatrix<T>) -> (DVector<f64>, DMatrix<T>) {
    let n = a.nrows();
    if n == 0 {
        return (DVector::zeros(0), DMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(symmetrize(a));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigvalsh<T: Scalar>(a: &DMatrix<T>) -> Vec<f64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let mut values: Vec<f64> = symmetrize(a).symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

pub fn min_eig<T: Scalar>(a: &DMatrix<T>) -> f64 {
    eigvalsh(a).first().copied().unwrap_or(f64::INFINITY)
}

pub fn max_eig<T: Scalar>(a: &DMatrix<T>) -> f64 {
    eigvalsh(a).last().copied().unwrap_or(f64::NEG_INFINITY)
}

/// Largest singular value; zero for empty matrices.
pub fn spectral_norm<T: Scalar>(a: &DMatrix<T>) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0.0;
    }
    a.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Ratio of extreme singular values; infinite for rank-deficient input.
pub fn condition_number<T: Scalar>(a: &DMatrix<T>) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 1.0;
    }
    let sv = a.clone().svd(false, false).singular_values;
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub fn cholesky<T: Scalar>(a: &DMatrix<T>, what: &'static str) -> Result<Cholesky<T, Dyn>> {
    Cholesky::new(symmetrize(a)).ok_or(Error::NotPositiveDefinite(what))
}

/// `L⁻¹ A L⁻†` for the Cholesky factor `L` of a metric, symmetrised.
pub fn congruence_by_inverse_factor<T: Scalar>(a: &DMatrix<T>, chol: &Cholesky<T, Dyn>) -> DMatrix<T> {
    let l = chol.l();
    let left = l
        .solve_lower_triangular(a)
        .expect("Cholesky factor has a nonzero diagonal");
    let both = l
        .solve_lower_triangular(&left.adjoint())
        .expect("Cholesky factor has a nonzero diagonal");
    symmetrize(&both)
}

/// Hermitian pencil `A x = λ M x` with `M` positive definite.
///
/// Eigenvalues ascending; eigenvectors are `M`-orthonormal columns.
pub fn pencil_eigh<T: Scalar>(a: &DMatrix<T>, m: &DMatrix<T>) -> Result<(DVector<f64>, DMatrix<T>)> {
    let chol = cholesky(m, "pencil metric")?;
    let reduced = congruence_by_inverse_factor(a, &chol);
    let (values, y) = eigh(&reduced);
    let x = chol
        .l()
        .ad_solve_lower_triangular(&y)
        .expect("Cholesky factor has a nonzero diagonal");
    Ok((values, x))
}

/// Eigenvalues of the Hermitian pencil `(A, M)`, ascending.
pub fn pencil_eigvals<T: Scalar>(a: &DMatrix<T>, m: &DMatrix<T>) -> Result<Vec<f64>> {
    let chol = cholesky(m, "pencil metric")?;
    Ok(eigvalsh(&congruence_by_inverse_factor(a, &chol)))
}

/// Real quadratic form `x† A x`.
pub fn quad<T: Scalar>(a: &DMatrix<T>, x: &DVector<T>) -> f64 {
    x.dotc(&(a * x)).real()
}

/// Sesquilinear form `x† A y`.
pub fn sesq<T: Scalar>(a: &DMatrix<T>, x: &DVector<T>, y: &DVector<T>) -> T {
    x.dotc(&(a * y))
}

/// Sine of the largest principal angle between the column spans of two
/// matrices with orthonormal columns (same dimension required).
pub fn subspace_gap<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>) -> f64 {
    if a.ncols() != b.ncols() {
        return 1.0;
    }
    if a.ncols() == 0 {
        return 0.0;
    }
    // Residual of projecting a onto span(b).
    let residual = a - b * (b.adjoint() * a);
    spectral_norm(&residual).min(1.0)
}

/// Orthonormalise the columns of `basis` in the inner product `x† M y`.
pub fn m_orthonormalize<T: Scalar>(basis: &DMatrix<T>, m: &DMatrix<T>) -> Result<DMatrix<T>> {
    if basis.ncols() == 0 {
        return Ok(basis.clone());
    }
    let gram = basis.adjoint() * m * basis;
    let chol = cholesky(&gram, "block Gram matrix")?;
    // basis · L⁻† has identity Gram.
    let t = chol
        .l()
        .ad_solve_lower_triangular(&DMatrix::identity(basis.ncols(), basis.ncols()))
        .expect("Cholesky factor has a nonzero diagonal");
    Ok(basis * t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    #[test]
    fn eigh_sorts_ascending() {
        let a = DMatrix::from_row_slice(3, 3, &[3.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 2.0]);
        let (values, vectors) = eigh(&a);
        assert_eq!(values.as_slice(), &[-1.0, 2.0, 3.0]);
        assert_relative_eq!(vectors[(1, 0)].abs(), 1.0);
    }

    #[test]
    fn pencil_matches_scaled_problem() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, -3.0]);
        let m = DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 1.0]);
        let (values, x) = pencil_eigh(&a, &m).unwrap();
        assert_relative_eq!(values[0], -3.0, epsilon = 1e-14);
        assert_relative_eq!(values[1], 0.5, epsilon = 1e-14);
        let gram = x.transpose() * &m * &x;
        assert_relative_eq!(gram, DMatrix::identity(2, 2), epsilon = 1e-14);
    }

    #[test]
    fn complex_hermitian_part() {
        let i = Complex64::new(0.0, 1.0);
        let a = DMatrix::from_row_slice(2, 2, &[Complex64::new(1.0, 0.0), i, -i * 0.9, Complex64::new(2.0, 0.0)]);
        let (h, correction) = hermitian_part(&a);
        assert!(correction > 0.0);
        assert_relative_eq!((h.clone() - h.adjoint()).norm(), 0.0);
    }

    #[test]
    fn subspace_gap_detects_rotation() {
        let a = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        let b = DMatrix::from_column_slice(2, 1, &[0.0, 1.0]);
        assert_relative_eq!(subspace_gap(&a, &a), 0.0);
        assert_relative_eq!(subspace_gap(&a, &b), 1.0);
    }
}
