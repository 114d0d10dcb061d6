use nalgebra::{DMatrix, DVectorView};

use crate::linalg::{self, hermitian_part};
use crate::{Error, Result, Scalar};

/// Largest admissible condition number of the stacked split basis.
pub const MAX_SPLIT_CONDITION: f64 = 1e10;

/// Orthogonal decomposition `D+ ⊕ D-` given by coordinate bases.
///
/// Columns of `basis_plus` span `D+`, columns of `basis_minus` span `D-`.
/// Orthonormality is not required on input; [`FormPair::to_block_coordinates`]
/// produces the canonical form.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitSpace<T: Scalar = f64> {
    basis_plus: DMatrix<T>,
    basis_minus: DMatrix<T>,
}

impl<T: Scalar> SplitSpace<T> {
    pub fn new(basis_plus: DMatrix<T>, basis_minus: DMatrix<T>) -> Result<Self> {
        if basis_plus.nrows() != basis_minus.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "split bases have {} and {} rows",
                basis_plus.nrows(),
                basis_minus.nrows()
            )));
        }
        if basis_plus.ncols() + basis_minus.ncols() != basis_plus.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "n_plus + n_minus = {} + {} differs from dim = {}",
                basis_plus.ncols(),
                basis_minus.ncols(),
                basis_plus.nrows()
            )));
        }
        Ok(Self {
            basis_plus,
            basis_minus,
        })
    }

    /// Coordinate split: the listed unit vectors span `D+`, the rest `D-`.
    pub fn from_indices(dim: usize, plus: &[usize]) -> Result<Self> {
        let mut is_plus = vec![false; dim];
        for &i in plus {
            if i >= dim {
                return Err(Error::DimensionMismatch(format!("plus index {i} out of range for dim {dim}")));
            }
            if is_plus[i] {
                return Err(Error::InvalidParameter(format!("duplicate plus index {i}")));
            }
            is_plus[i] = true;
        }
        let plus_idx: Vec<usize> = (0..dim).filter(|&i| is_plus[i]).collect();
        let minus_idx: Vec<usize> = (0..dim).filter(|&i| !is_plus[i]).collect();
        let unit = |idx: &[usize]| {
            let mut b = DMatrix::zeros(dim, idx.len());
            for (col, &row) in idx.iter().enumerate() {
                b[(row, col)] = T::one();
            }
            b
        };
        Self::new(unit(&plus_idx), unit(&minus_idx))
    }

    /// Canonical block split: first `n_plus` coordinates span `D+`.
    pub fn leading(dim: usize, n_plus: usize) -> Self {
        let id = DMatrix::<T>::identity(dim, dim);
        Self {
            basis_plus: id.columns(0, n_plus).into_owned(),
            basis_minus: id.columns(n_plus, dim - n_plus).into_owned(),
        }
    }

    /// Spectral split of the pencil `(Q, M)`: eigenvectors with positive
    /// eigenvalue span `D+`, those with eigenvalue `<= 0` span `D-`.
    ///
    /// Returns the split together with the eigenvalue closest to zero.
    pub fn sign_of(q: &DMatrix<T>, m: &DMatrix<T>) -> Result<(Self, f64)> {
        let (values, vectors) = linalg::pencil_eigh(q, m)?;
        let n_minus = values.iter().filter(|&&e| e <= 0.0).count();
        let dim = values.len();
        let closest = values.iter().copied().fold(f64::INFINITY, |acc, e| if e.abs() < acc.abs() { e } else { acc });
        let split = Self {
            basis_minus: vectors.columns(0, n_minus).into_owned(),
            basis_plus: vectors.columns(n_minus, dim - n_minus).into_owned(),
        };
        Ok((split, closest))
    }

    pub fn dim(&self) -> usize {
        self.basis_plus.nrows()
    }

    pub fn n_plus(&self) -> usize {
        self.basis_plus.ncols()
    }

    pub fn n_minus(&self) -> usize {
        self.basis_minus.ncols()
    }

    pub fn basis_plus(&self) -> &DMatrix<T> {
        &self.basis_plus
    }

    pub fn basis_minus(&self) -> &DMatrix<T> {
        &self.basis_minus
    }
}

/// Hermitian forms `q` (unperturbed) and `v` (perturbation) on a Galerkin
/// space with Gram matrix `M` and a splitting of that space.
#[derive(Clone, Debug)]
pub struct FormPair<T: Scalar = f64> {
    m: DMatrix<T>,
    q: DMatrix<T>,
    v: DMatrix<T>,
    split: SplitSpace<T>,
    symmetrization_correction: f64,
    split_condition: f64,
    /// Columns map block coordinates to the input coordinates; `X† M X = I`.
    transform: DMatrix<T>,
    canonical: bool,
}

impl<T: Scalar> FormPair<T> {
    /// Validate and ingest. All three matrices are replaced by their
    /// Hermitian parts; the total correction is kept for diagnostics.
    pub fn new(m: DMatrix<T>, q: DMatrix<T>, v: DMatrix<T>, split: SplitSpace<T>) -> Result<Self> {
        let dim = m.nrows();
        for (name, a) in [("M", &m), ("Q", &q), ("V", &v)] {
            if a.nrows() != dim || a.ncols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "{name} is {}x{}, expected {dim}x{dim}",
                    a.nrows(),
                    a.ncols()
                )));
            }
        }
        if split.dim() != dim {
            return Err(Error::DimensionMismatch(format!(
                "split acts on dimension {}, matrices have {dim}",
                split.dim()
            )));
        }
        let (m, cm) = hermitian_part(&m);
        let (q, cq) = hermitian_part(&q);
        let (v, cv) = hermitian_part(&v);
        let correction = cm + cq + cv;
        if correction > 0.0 {
            log::debug!("symmetrization removed {correction:.3e} (Frobenius) from M, Q, V");
        }
        let chol = linalg::cholesky(&m, "Gram matrix M")?;

        // Conditioning of the stacked basis in the M geometry, columns normalised.
        let mut stacked = DMatrix::zeros(dim, dim);
        stacked.columns_mut(0, split.n_plus()).copy_from(split.basis_plus());
        stacked.columns_mut(split.n_plus(), split.n_minus()).copy_from(split.basis_minus());
        let mut weighted = chol.l().adjoint() * &stacked;
        for mut col in weighted.column_iter_mut() {
            let norm = col.norm();
            if norm > 0.0 {
                col /= T::from_real(norm);
            }
        }
        let split_condition = linalg::condition_number(&weighted);
        if !(split_condition <= MAX_SPLIT_CONDITION) {
            return Err(Error::DegenerateSplit {
                condition: split_condition,
            });
        }

        let plus = linalg::m_orthonormalize(split.basis_plus(), &m)?;
        let minus_raw = split.basis_minus() - &plus * (plus.adjoint() * &m * split.basis_minus());
        let minus = linalg::m_orthonormalize(&minus_raw, &m)?;
        let mut transform = DMatrix::zeros(dim, dim);
        transform.columns_mut(0, plus.ncols()).copy_from(&plus);
        transform.columns_mut(plus.ncols(), minus.ncols()).copy_from(&minus);

        Ok(Self {
            m,
            q,
            v,
            split,
            symmetrization_correction: correction,
            split_condition,
            transform,
            canonical: false,
        })
    }

    /// Equivalent pair in coordinates where `M = I`, the first `n_plus`
    /// coordinates span `D+` and the remaining ones span `D-`.
    ///
    /// `D-` is taken as the `M`-orthogonal complement of `D+`, so a split
    /// whose blocks were not orthogonal on input is orthogonalised against
    /// `D+`.
    pub fn to_block_coordinates(&self) -> FormPair<T> {
        if self.canonical {
            return self.clone();
        }
        let x = &self.transform;
        let dim = self.dim();
        let congruent = |a: &DMatrix<T>| linalg::symmetrize(&(x.adjoint() * a * x));
        FormPair {
            m: DMatrix::identity(dim, dim),
            q: congruent(&self.q),
            v: congruent(&self.v),
            split: SplitSpace::leading(dim, self.split.n_plus()),
            symmetrization_correction: self.symmetrization_correction,
            split_condition: self.split_condition,
            transform: DMatrix::identity(dim, dim),
            canonical: true,
        }
    }

    /// Apply a congruence `A ↦ C† A C` to all matrices and map the split
    /// bases by `C⁻¹`. Pass/fail of every condition is invariant.
    pub fn congruence(&self, c: &DMatrix<T>) -> Result<FormPair<T>> {
        let inv = c
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidParameter("congruence matrix is singular".into()))?;
        let tr = |a: &DMatrix<T>| c.adjoint() * a * c;
        let split = SplitSpace::new(&inv * self.split.basis_plus(), &inv * self.split.basis_minus())?;
        FormPair::new(tr(&self.m), tr(&self.q), tr(&self.v), split)
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn n_plus(&self) -> usize {
        self.split.n_plus()
    }

    pub fn n_minus(&self) -> usize {
        self.split.n_minus()
    }

    pub fn m(&self) -> &DMatrix<T> {
        &self.m
    }

    pub fn q(&self) -> &DMatrix<T> {
        &self.q
    }

    pub fn v(&self) -> &DMatrix<T> {
        &self.v
    }

    pub fn split(&self) -> &SplitSpace<T> {
        &self.split
    }

    pub fn is_block_coordinates(&self) -> bool {
        self.canonical
    }

    /// Block-coordinate basis: column `j` is the input-coordinate vector of
    /// block coordinate `j`.
    pub fn block_basis(&self) -> &DMatrix<T> {
        &self.transform
    }

    pub fn symmetrization_correction(&self) -> f64 {
        self.symmetrization_correction
    }

    /// Condition number of the column-normalised stacked split basis in the
    /// `M` geometry.
    pub fn split_condition(&self) -> f64 {
        self.split_condition
    }

    /// Map a vector given in block coordinates back to input coordinates.
    pub fn from_block(&self, y: DVectorView<'_, T>) -> nalgebra::DVector<T> {
        &self.transform * y
    }
}

/// The four blocks of a Hermitian matrix in canonical block coordinates.
#[derive(Clone, Debug)]
pub struct Blocks<T: Scalar> {
    pub pp: DMatrix<T>,
    pub pm: DMatrix<T>,
    pub mm: DMatrix<T>,
}

impl<T: Scalar> Blocks<T> {
    pub fn of(a: &DMatrix<T>, n_plus: usize) -> Self {
        let n = a.nrows();
        let n_minus = n - n_plus;
        Self {
            pp: a.view((0, 0), (n_plus, n_plus)).into_owned(),
            pm: a.view((0, n_plus), (n_plus, n_minus)).into_owned(),
            mm: a.view((n_plus, n_plus), (n_minus, n_minus)).into_owned(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag(values: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(values))
    }

    #[test]
    fn identity_case_is_unchanged() {
        let m = DMatrix::identity(2, 2);
        let q = diag(&[1.0, -1.0]);
        let v = DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0]);
        let pair = FormPair::new(m, q.clone(), v.clone(), SplitSpace::from_indices(2, &[0]).unwrap()).unwrap();
        let block = pair.to_block_coordinates();
        assert_relative_eq!(block.q(), &q, epsilon = 1e-14);
        assert_relative_eq!(block.v(), &v, epsilon = 1e-14);
        assert_relative_eq!(block.m(), &DMatrix::identity(2, 2), epsilon = 1e-14);
    }

    #[test]
    fn diagonal_rescaling() {
        let m = diag(&[4.0, 1.0]);
        let q = diag(&[3.0, -2.0]);
        let pair = FormPair::new(m, q, DMatrix::zeros(2, 2), SplitSpace::from_indices(2, &[0]).unwrap()).unwrap();
        assert_relative_eq!(pair.block_basis()[(0, 0)], 0.5, epsilon = 1e-15);
        let block = pair.to_block_coordinates();
        assert_relative_eq!(block.q()[(0, 0)], 3.0 / 4.0, epsilon = 1e-15);
        assert_relative_eq!(block.q()[(1, 1)], -2.0, epsilon = 1e-15);
    }

    #[test]
    fn random_gram_becomes_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let r = DMatrix::<f64>::from_fn(6, 6, |_, _| f64::sample_normal(&mut rng));
        let m = &r * r.transpose() + DMatrix::identity(6, 6);
        let basis = DMatrix::<f64>::from_fn(6, 6, |_, _| f64::sample_normal(&mut rng));
        let split = SplitSpace::new(basis.columns(0, 3).into_owned(), basis.columns(3, 3).into_owned()).unwrap();
        let pair = FormPair::new(m.clone(), DMatrix::identity(6, 6), DMatrix::zeros(6, 6), split).unwrap();
        let x = pair.block_basis();
        let gram = x.transpose() * &m * x;
        let plus = gram.view((0, 0), (3, 3)).into_owned();
        let minus = gram.view((3, 3), (3, 3)).into_owned();
        let cross = gram.view((0, 3), (3, 3)).into_owned();
        assert!((plus - DMatrix::identity(3, 3)).norm() <= 1e-12);
        assert!((minus - DMatrix::identity(3, 3)).norm() <= 1e-12);
        assert!(cross.norm() <= 1e-12);
        // D+ is preserved exactly.
        let plus_span = linalg::m_orthonormalize(&basis.columns(0, 3).into_owned(), &m).unwrap();
        let proj = x.columns(0, 3).into_owned();
        let c = linalg::cholesky(&m, "m").unwrap();
        let gap = linalg::subspace_gap(&(c.l().transpose() * proj), &(c.l().transpose() * plus_span));
        assert!(gap < 1e-10);
    }

    #[test]
    fn degenerate_split_rejected() {
        let m = DMatrix::identity(2, 2);
        let plus = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        let minus = DMatrix::from_column_slice(2, 1, &[1.0, 1e-13]);
        let split = SplitSpace::new(plus, minus).unwrap();
        let err = FormPair::new(m, DMatrix::zeros(2, 2), DMatrix::zeros(2, 2), split).unwrap_err();
        assert!(matches!(err, Error::DegenerateSplit { .. }));
    }

    #[test]
    fn rejects_indefinite_gram() {
        let m = diag(&[1.0, -1.0]);
        let err = FormPair::new(m, DMatrix::zeros(2, 2), DMatrix::zeros(2, 2), SplitSpace::from_indices(2, &[0]).unwrap())
            .unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite(_)));
    }

    #[test]
    fn symmetrization_is_recorded() {
        let q = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, -1.0]);
        let pair = FormPair::new(DMatrix::identity(2, 2), q, DMatrix::zeros(2, 2), SplitSpace::from_indices(2, &[0]).unwrap())
            .unwrap();
        assert_relative_eq!(pair.q()[(0, 1)], 0.05);
        assert!(pair.symmetrization_correction() > 0.0);
    }

    #[test]
    fn sign_split_puts_zero_in_minus() {
        let q = diag(&[2.0, 0.0, -1.0]);
        let (split, closest) = SplitSpace::sign_of(&q, &DMatrix::identity(3, 3)).unwrap();
        assert_eq!(split.n_plus(), 1);
        assert_eq!(split.n_minus(), 2);
        assert_eq!(closest, 0.0);
    }
}
