//! Seeded generators of pairs that satisfy conditions (1)–(8) by
//! construction.
//!
//! In block coordinates `Q = diag(d+, d-)` with `d+ ∈ [0.5, 3]` and
//! `d- ∈ [-3, -0.5]`, and `V` is a random Hermitian matrix rescaled to
//! spectral norm `0.45·θ·ρ`, `θ = 0.5` the distance of `Q`'s spectrum from
//! zero and `ρ ∈ [0.2, 1]` uniform. Hence `a <= -0.275` and every eigenvalue
//! above `a` is at least `0.275`. The pair is then moved to random
//! coordinates by `T = U·D` (`U` unitary, `D` diagonal in `[0.5, 2]`):
//! `M = T†T`, `Q ↦ T†QT`, `V ↦ T†VT`, and the split bases are the columns of
//! `T⁻¹`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::forms::{FormPair, SplitSpace};
use crate::{linalg, Scalar};

const THETA: f64 = 0.5;

/// Hermitian matrix with independent normal entries (GUE/GOE-like).
pub fn random_hermitian<T: Scalar, R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<T> {
    let a = DMatrix::<T>::from_fn(n, n, |_, _| T::sample_normal(rng));
    linalg::symmetrize(&a)
}

/// Unitary factor of the QR decomposition of a Gaussian matrix.
pub fn random_unitary<T: Scalar, R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<T> {
    let a = DMatrix::<T>::from_fn(n, n, |_, _| T::sample_normal(rng));
    a.qr().q()
}

/// Valid pair in canonical block coordinates (`M = I`, leading split).
pub fn random_block_pair<T: Scalar, R: Rng + ?Sized>(rng: &mut R, n: usize, n_plus: usize) -> FormPair<T> {
    assert!(n_plus <= n, "n_plus exceeds dimension");
    let d = DVector::from_fn(n, |i, _| {
        if i < n_plus {
            rng.random_range(0.5..3.0)
        } else {
            rng.random_range(-3.0..-0.5)
        }
    });
    let q = DMatrix::<T>::from_diagonal(&d.map(T::from_real));
    let mut v = random_hermitian::<T, R>(rng, n);
    let norm = linalg::spectral_norm(&v);
    let target = 0.45 * THETA * rng.random_range(0.2..1.0);
    if norm > 0.0 {
        v *= T::from_real(target / norm);
    }
    FormPair::new(DMatrix::identity(n, n), q, v, SplitSpace::leading(n, n_plus))
        .expect("identity Gram and coordinate split are valid")
}

/// Valid pair in random coordinates with a non-trivial Gram matrix.
pub fn random_pair<T: Scalar, R: Rng + ?Sized>(rng: &mut R, n: usize, n_plus: usize) -> FormPair<T> {
    let block = random_block_pair::<T, R>(rng, n, n_plus);
    let u = random_unitary::<T, R>(rng, n);
    let scales = DVector::from_fn(n, |_, _| T::from_real(rng.random_range(0.5..2.0)));
    let t = u * DMatrix::from_diagonal(&scales);
    let t_inv = t.clone().try_inverse().expect("unitary times positive diagonal is invertible");
    let tr = |a: &DMatrix<T>| t.adjoint() * a * &t;
    let split = SplitSpace::new(
        t_inv.columns(0, n_plus).into_owned(),
        t_inv.columns(n_plus, n - n_plus).into_owned(),
    )
    .expect("column counts add up");
    FormPair::new(tr(block.m()), tr(block.q()), tr(block.v()), split).expect("congruent pair stays valid")
}
