//! Gap eigenvalues through the Schur-complement reduction of `s = q + v`.
//!
//! For a shift `u` above `a = λ_max(S--)` the maximisation over `D-` is
//! explicit: `y- = L_u x+` with `L_u = (u - S--)⁻¹ S-+`. What remains is the
//! reduced form `G_u` on `D+` and the metric `N_u = I + L_u† L_u`. The `k`-th
//! eigenvalue above `a` is the unique `u` where the `k`-th eigenvalue of
//! `(G_u, N_u)` vanishes.

mod brute;
mod certificate;
mod solve;

pub use brute::brute_force_minimax;
pub use certificate::{monotonicity_certificate, CertificateCheck, MonotonicityReport};
pub use solve::{
    full_pencil_eigenvalues, multiplicity, mu_k, solve_all, solve_lambda_k, MinimaxResult, SolveOptions, SolveStatus,
};

use nalgebra::{DMatrix, DVector};

use crate::forms::{Blocks, FormPair};
use crate::{linalg, Error, Result, Scalar};

/// Largest accepted condition estimate of `u - S--`.
pub const MAX_SHIFT_CONDITION: f64 = 1e14;

/// The form `s = q + v` in block coordinates with its gap edges.
#[derive(Clone, Debug)]
pub struct SForm<T: Scalar = f64> {
    s: DMatrix<T>,
    n_plus: usize,
    blocks: Blocks<T>,
    minus_eigs: Vec<f64>,
    a: f64,
    b: f64,
    b_surrogate: bool,
}

impl<T: Scalar> SForm<T> {
    /// `S = Q + V` of a pair. `b` defaults to the surrogate
    /// `λ_max(S) + 1`; use [`SForm::with_ceiling`] to supply a gap edge.
    pub fn assemble(pair: &FormPair<T>) -> Self {
        let block;
        let pair = if pair.is_block_coordinates() {
            pair
        } else {
            block = pair.to_block_coordinates();
            &block
        };
        Self::from_block_matrix(pair.q() + pair.v(), pair.n_plus())
    }

    /// Build from a matrix already in block coordinates (`M = I`, first
    /// `n_plus` coordinates span `D+`).
    pub fn from_block_matrix(s: DMatrix<T>, n_plus: usize) -> Self {
        assert!(s.is_square() && n_plus <= s.nrows(), "bad block layout");
        let s = linalg::symmetrize(&s);
        let blocks = Blocks::of(&s, n_plus);
        let minus_eigs = linalg::eigvalsh(&blocks.mm);
        let a = minus_eigs.last().copied().unwrap_or(f64::NEG_INFINITY);
        if minus_eigs.is_empty() {
            log::info!("n_minus = 0: a = -inf, falling back to Rayleigh-Ritz");
        }
        let b = linalg::max_eig(&s) + 1.0;
        Self {
            s,
            n_plus,
            blocks,
            minus_eigs,
            a,
            b,
            b_surrogate: true,
        }
    }

    /// Use a supplied upper gap edge `b > a`.
    pub fn with_ceiling(mut self, b: f64) -> Result<Self> {
        if !(b > self.a) {
            return Err(Error::InvalidParameter(format!("ceiling b = {b} must exceed a = {}", self.a)));
        }
        self.b = b;
        self.b_surrogate = false;
        Ok(self)
    }

    /// `S + c·I`; both `a` and every `λ_k` move by `c`.
    pub fn shifted(&self, c: f64) -> Self {
        let n = self.dim();
        let mut out = Self::from_block_matrix(&self.s + DMatrix::<T>::identity(n, n) * T::from_real(c), self.n_plus);
        if !self.b_surrogate {
            out.b = self.b + c;
            out.b_surrogate = false;
        }
        out
    }

    pub fn s(&self) -> &DMatrix<T> {
        &self.s
    }

    pub fn blocks(&self) -> &Blocks<T> {
        &self.blocks
    }

    pub fn dim(&self) -> usize {
        self.s.nrows()
    }

    pub fn n_plus(&self) -> usize {
        self.n_plus
    }

    pub fn n_minus(&self) -> usize {
        self.dim() - self.n_plus
    }

    /// `sup s` over the unit sphere of `D-`; `-∞` when `D- = {0}`.
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn is_ceiling_surrogate(&self) -> bool {
        self.b_surrogate
    }

    /// Eigenvalues of `S--`, ascending.
    pub fn minus_eigenvalues(&self) -> &[f64] {
        &self.minus_eigs
    }

    fn check_shift(&self, u: f64) -> Result<()> {
        if self.n_minus() == 0 {
            return Ok(());
        }
        let margin = 1e-12 * (1.0 + self.a.abs());
        if !(u > self.a + margin) {
            return Err(Error::ShiftBelowEdge { u, a: self.a });
        }
        let lowest = self.minus_eigs[0];
        let condition = (u - lowest) / (u - self.a);
        if condition > MAX_SHIFT_CONDITION {
            return Err(Error::IllConditionedShift { u, condition });
        }
        Ok(())
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.n_plus {
            return Err(Error::IndexOutOfRange { k, max: self.n_plus });
        }
        Ok(())
    }
}

/// Reduced form, maximiser map and metric at a shift `u > a`.
#[derive(Clone, Debug)]
pub struct SchurReduction<T: Scalar = f64> {
    pub u: f64,
    /// `G_u = (S++ - u) + S+- (u - S--)⁻¹ S-+`.
    pub g: DMatrix<T>,
    /// `L_u = (u - S--)⁻¹ S-+`.
    pub l: DMatrix<T>,
    /// `N_u = I + L_u† L_u`.
    pub n: DMatrix<T>,
}

impl<T: Scalar> SchurReduction<T> {
    /// `g_u[x+]`.
    pub fn g_value(&self, x_plus: &DVector<T>) -> f64 {
        linalg::quad(&self.g, x_plus)
    }

    /// `n_u[x+] = ‖x+‖² + ‖L_u x+‖²`.
    pub fn n_value(&self, x_plus: &DVector<T>) -> f64 {
        linalg::quad(&self.n, x_plus)
    }

    /// The maximiser `L_u x+`.
    pub fn maximizer(&self, x_plus: &DVector<T>) -> DVector<T> {
        &self.l * x_plus
    }
}

/// `φ_{u,x+}(y-) = s[x+ + y-] - u‖x+ + y-‖²`, evaluated on the full matrix.
pub fn phi<T: Scalar>(s: &SForm<T>, u: f64, x_plus: &DVector<T>, y_minus: &DVector<T>) -> f64 {
    let mut x = DVector::<T>::zeros(s.dim());
    x.rows_mut(0, s.n_plus).copy_from(x_plus);
    x.rows_mut(s.n_plus, s.n_minus()).copy_from(y_minus);
    linalg::quad(&s.s, &x) - u * x.norm_squared()
}

/// Schur reduction at `u`, through a Cholesky factorisation of `u - S--`.
pub fn schur_reduce<T: Scalar>(s: &SForm<T>, u: f64) -> Result<SchurReduction<T>> {
    s.check_shift(u)?;
    let np = s.n_plus;
    let nm = s.n_minus();
    let shift = T::from_real(u);
    let mut g = s.blocks.pp.clone();
    for i in 0..np {
        g[(i, i)] -= shift;
    }
    if nm == 0 {
        return Ok(SchurReduction {
            u,
            g,
            l: DMatrix::zeros(0, np),
            n: DMatrix::identity(np, np),
        });
    }
    let mut shifted = -s.blocks.mm.clone();
    for i in 0..nm {
        shifted[(i, i)] += shift;
    }
    let chol = linalg::cholesky(&shifted, "u - S--")?;
    let l = chol.solve(&s.blocks.pm.adjoint());
    g += &s.blocks.pm * &l;
    let n = DMatrix::identity(np, np) + l.adjoint() * &l;
    Ok(SchurReduction {
        u,
        g: linalg::symmetrize(&g),
        l,
        n: linalg::symmetrize(&n),
    })
}

/// `l_k(u)`: `k`-th smallest eigenvalue of the pencil `(G_u, N_u)`.
pub fn level_l_k<T: Scalar>(s: &SForm<T>, u: f64, k: usize) -> Result<f64> {
    s.check_index(k)?;
    let red = schur_reduce(s, u)?;
    Ok(linalg::pencil_eigvals(&red.g, &red.n)?[k - 1])
}

/// `k`-th smallest eigenvalue of `G_u` itself (unit metric).
///
/// By Sylvester's law of inertia it has the sign of `l_k(u)`, and it is
/// strictly decreasing in `u` with slope at most `-1`, which makes it the
/// safer function to bracket.
pub fn unit_level<T: Scalar>(s: &SForm<T>, u: f64, k: usize) -> Result<f64> {
    s.check_index(k)?;
    let red = schur_reduce(s, u)?;
    Ok(linalg::eigvalsh(&red.g)[k - 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::SplitSpace;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn worked() -> SForm<f64> {
        SForm::from_block_matrix(DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, -1.0]), 1)
    }

    #[test]
    fn assemble_worked_example() {
        let pair = FormPair::new(
            DMatrix::identity(2, 2),
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]),
            DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0]),
            SplitSpace::from_indices(2, &[0]).unwrap(),
        )
        .unwrap();
        let s = SForm::assemble(&pair);
        assert_relative_eq!(s.s(), &DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, -1.0]));
        assert_eq!(s.a(), -1.0);
        let diag = SForm::from_block_matrix(DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, -3.0]), 1);
        assert_eq!(diag.a(), -3.0);
    }

    #[test]
    fn no_minus_block_gives_infinite_edge() {
        let s = SForm::from_block_matrix(DMatrix::<f64>::identity(2, 2), 2);
        assert_eq!(s.a(), f64::NEG_INFINITY);
        let red = schur_reduce(&s, -10.0).unwrap();
        assert_relative_eq!(red.g, DMatrix::identity(2, 2) * 11.0);
    }

    #[test]
    fn worked_example_reduction() {
        let s = worked();
        let red = schur_reduce(&s, 1.0).unwrap();
        assert_relative_eq!(red.g[(0, 0)], 0.125, epsilon = 1e-15);
        assert_relative_eq!(red.n[(0, 0)], 1.0625, epsilon = 1e-15);
        assert_relative_eq!(level_l_k(&s, 1.0, 1).unwrap(), 0.125 / 1.0625, epsilon = 1e-15);
        let g12 = schur_reduce(&s, 1.2).unwrap().g[(0, 0)];
        assert_relative_eq!(g12, -0.2 + 0.25 / 2.2, epsilon = 1e-15);
        assert!(g12 < 0.0);
    }

    #[test]
    fn decoupled_reduction() {
        let q = DMatrix::from_diagonal(&DVector::from_column_slice(&[2.0, 5.0, -1.0]));
        let s = SForm::from_block_matrix(q, 2);
        let red = schur_reduce(&s, 0.5).unwrap();
        assert_relative_eq!(red.g, DMatrix::from_diagonal(&DVector::from_column_slice(&[1.5, 4.5])));
        assert_eq!(red.l, DMatrix::zeros(1, 2));
        assert_eq!(red.n, DMatrix::identity(2, 2));
        for u in [0.0, 1.0, 1.9, 3.0] {
            assert_relative_eq!(level_l_k(&s, u, 1).unwrap(), 2.0 - u, epsilon = 1e-14);
        }
    }

    #[test]
    fn shift_below_edge_rejected() {
        let s = worked();
        assert!(matches!(schur_reduce(&s, -1.0), Err(Error::ShiftBelowEdge { .. })));
        assert!(matches!(schur_reduce(&s, -2.0), Err(Error::ShiftBelowEdge { .. })));
        assert!(matches!(level_l_k(&s, 0.0, 2), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn maximizer_is_strict() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let pair = crate::random::random_pair::<f64, _>(&mut rng, 8, 4);
        let s = SForm::assemble(&pair);
        let u = s.a() + 1.0;
        let red = schur_reduce(&s, u).unwrap();
        for _ in 0..20 {
            let x = DVector::from_fn(4, |_, _| f64::sample_normal(&mut rng));
            let y = red.maximizer(&x);
            let best = phi(&s, u, &x, &y);
            assert_relative_eq!(best, red.g_value(&x), max_relative = 1e-12, epsilon = 1e-12);
            for _ in 0..100 {
                let d = DVector::from_fn(4, |_, _| 1e-2 * f64::sample_normal(&mut rng));
                assert!(phi(&s, u, &x, &(&y + d)) < best);
            }
        }
    }

    #[test]
    fn sampled_sup_never_exceeds_reduced_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let pair = crate::random::random_pair::<f64, _>(&mut rng, 7, 3);
        let s = SForm::assemble(&pair);
        let u = s.a() + 0.3;
        let red = schur_reduce(&s, u).unwrap();
        for _ in 0..50 {
            let x = DVector::from_fn(3, |_, _| f64::sample_normal(&mut rng));
            let g = red.g_value(&x);
            let sampled = (0..200)
                .map(|_| {
                    let y = DVector::from_fn(4, |_, _| 3.0 * f64::sample_normal(&mut rng));
                    phi(&s, u, &x, &y)
                })
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(sampled <= g + 1e-10 * (1.0 + g.abs()));
        }
    }

    #[test]
    fn metric_is_at_least_identity_complex() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let pair = crate::random::random_pair::<num_complex::Complex64, _>(&mut rng, 10, 4);
        let s = SForm::assemble(&pair);
        for du in [1e-6, 0.1, 1.0, 10.0] {
            let red = schur_reduce(&s, s.a() + du).unwrap();
            assert!(linalg::min_eig(&red.n) >= 1.0 - 1e-12);
        }
    }
}
