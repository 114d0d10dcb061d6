use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::bspline::RadialBasis;
use super::quadrature::gauss_legendre;
use crate::forms::SplitSpace;
use crate::{linalg, Error, Result};

/// Channel configuration as read from JSON.
///
/// `n_splines` counts the kept functions of the lower component (and of the
/// upper one when `upper_refinement = 1`). `lower_spline_order` defaults to
/// `spline_order` for `κ < 0` and `spline_order - 1` for `κ > 0`.
/// `upper_refinement = f` gives the upper component `f` times as many knot
/// intervals (nested grids), the unbalanced layout of the pollution demo.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub kappa: i32,
    #[serde(default = "defaults::r_max")]
    pub r_max: f64,
    #[serde(default = "defaults::n_splines")]
    pub n_splines: usize,
    #[serde(default = "defaults::spline_order")]
    pub spline_order: usize,
    #[serde(default = "defaults::grading")]
    pub grading: f64,
    #[serde(default = "defaults::quad_order")]
    pub quad_order: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_spline_order: Option<usize>,
    #[serde(default = "defaults::refinement")]
    pub upper_refinement: usize,
}

mod defaults {
    pub fn r_max() -> f64 {
        60.0
    }
    pub fn n_splines() -> usize {
        200
    }
    pub fn spline_order() -> usize {
        7
    }
    pub fn grading() -> f64 {
        10.0
    }
    pub fn quad_order() -> usize {
        10
    }
    pub fn refinement() -> usize {
        1
    }
}

impl ChannelConfig {
    pub fn new(kappa: i32) -> Self {
        Self {
            kappa,
            r_max: defaults::r_max(),
            n_splines: defaults::n_splines(),
            spline_order: defaults::spline_order(),
            grading: defaults::grading(),
            quad_order: defaults::quad_order(),
            lower_spline_order: None,
            upper_refinement: 1,
        }
    }

    pub fn with_splines(mut self, n: usize) -> Self {
        self.n_splines = n;
        self
    }

    pub fn lower_order(&self) -> usize {
        self.lower_spline_order
            .unwrap_or(if self.kappa > 0 { self.spline_order - 1 } else { self.spline_order })
    }

    pub fn validate(&self) -> Result<()> {
        if self.kappa == 0 {
            return Err(Error::InvalidKappa);
        }
        if self.quad_order == 0 {
            return Err(Error::InvalidParameter("quad_order must be positive".into()));
        }
        if self.upper_refinement == 0 {
            return Err(Error::InvalidParameter("upper_refinement must be positive".into()));
        }
        if self.lower_order() < 2 {
            return Err(Error::InvalidParameter("lower spline order must be at least 2".into()));
        }
        Ok(())
    }
}

/// One quadrature point with the nonzero splines of both components.
#[derive(Clone, Debug)]
struct QuadPoint {
    r: f64,
    w: f64,
    upper_first: isize,
    upper: Vec<f64>,
    lower_first: isize,
    lower: Vec<f64>,
    lower_deriv: Vec<f64>,
}

/// Galerkin discretisation of one radial Dirac channel, components `(P, Q)`
/// with `P` (upper) coordinates first.
///
/// The free radial operator is `[[1, -d/dr + κ/r], [d/dr + κ/r, -1]]`; its
/// form matrix is `W = [[Mu, A], [Aᵀ, -Ml]]` with
/// `A_ij = ∫ Bu_i (-Bl_j' + κ/r·Bl_j)`.
#[derive(Debug)]
pub struct KappaChannel {
    config: ChannelConfig,
    upper: RadialBasis,
    lower: RadialBasis,
    points: Vec<QuadPoint>,
    mass: DMatrix<f64>,
    free: DMatrix<f64>,
    free_eig: OnceLock<(DVector<f64>, DMatrix<f64>)>,
}

impl KappaChannel {
    pub fn config(&self) -> &ChannelConfig {
        &self.config
    }

    pub fn kappa(&self) -> i32 {
        self.config.kappa
    }

    pub fn upper_basis(&self) -> &RadialBasis {
        &self.upper
    }

    pub fn lower_basis(&self) -> &RadialBasis {
        &self.lower
    }

    pub fn n_upper(&self) -> usize {
        self.upper.len()
    }

    pub fn n_lower(&self) -> usize {
        self.lower.len()
    }

    pub fn dim(&self) -> usize {
        self.n_upper() + self.n_lower()
    }

    /// Block-diagonal Gram matrix of the two components.
    pub fn mass(&self) -> &DMatrix<f64> {
        &self.mass
    }

    /// Free form matrix `W`.
    pub fn free(&self) -> &DMatrix<f64> {
        &self.free
    }

    /// Galerkin matrix of the multiplication form `f(r)` on both components.
    pub fn potential<F: Fn(f64) -> f64>(&self, f: F) -> DMatrix<f64> {
        let nu = self.n_upper();
        let mut v = DMatrix::zeros(self.dim(), self.dim());
        for p in &self.points {
            let fw = f(p.r) * p.w;
            if fw == 0.0 {
                continue;
            }
            accumulate_outer(&mut v, 0, nu, p.upper_first, &p.upper, p.upper_first, &p.upper, fw);
            accumulate_outer(&mut v, nu, self.n_lower(), p.lower_first, &p.lower, p.lower_first, &p.lower, fw);
        }
        linalg::symmetrize(&v)
    }

    /// Coulomb form `-ν/(r + ε)`.
    pub fn coulomb(&self, nu: f64, eps: f64) -> Result<DMatrix<f64>> {
        if !(eps >= 0.0) {
            return Err(Error::InvalidParameter(format!("eps must be nonnegative, got {eps}")));
        }
        if !(nu >= 0.0) {
            return Err(Error::InvalidParameter(format!("nu must be nonnegative, got {nu}")));
        }
        if nu == 0.0 {
            return Ok(DMatrix::zeros(self.dim(), self.dim()));
        }
        Ok(self.potential(|r| -nu / (r + eps)))
    }

    /// Eigen-decomposition of the free pencil `(W, M)`: eigenvalues ascending
    /// and `M`-orthonormal eigenvectors. Computed once.
    pub fn free_spectrum(&self) -> &(DVector<f64>, DMatrix<f64>) {
        self.free_eig.get_or_init(|| {
            linalg::pencil_eigh(&self.free, &self.mass).expect("mass matrix is positive definite")
        })
    }

    /// Upper/lower component split.
    pub fn t_split(&self) -> SplitSpace<f64> {
        SplitSpace::from_indices(self.dim(), &(0..self.n_upper()).collect::<Vec<_>>())
            .expect("indices are in range")
    }

    /// Split by the sign of the free pencil's eigenvalues.
    pub fn p_split(&self) -> Result<SplitSpace<f64>> {
        let (values, vectors) = self.free_spectrum();
        let closest = values.iter().copied().fold(f64::INFINITY, |acc, e| if e.abs() < acc.abs() { e } else { acc });
        if closest.abs() < 1e-12 {
            return Err(Error::AmbiguousSplit { value: closest });
        }
        let n_minus = values.iter().filter(|&&e| e <= 0.0).count();
        SplitSpace::new(
            vectors.columns(n_minus, values.len() - n_minus).into_owned(),
            vectors.columns(0, n_minus).into_owned(),
        )
    }

    /// Coefficients in this channel's basis of the basis functions of
    /// `coarse`, whose spline spaces must be contained in this one's
    /// (nested knots, equal orders). Columns follow `coarse`'s coordinates.
    pub fn embedding_of(&self, coarse: &KappaChannel) -> Result<DMatrix<f64>> {
        let nu = self.n_upper();
        let nl = self.n_lower();
        let mut cross = DMatrix::zeros(self.dim(), coarse.dim());
        for p in &self.points {
            let (cu_first, cu, _) = coarse.upper.eval(p.r);
            let (cl_first, cl, _) = coarse.lower.eval(p.r);
            for (a, &x) in p.upper.iter().enumerate() {
                let i = p.upper_first + a as isize;
                if i < 0 || i as usize >= nu {
                    continue;
                }
                for (b, &y) in cu.iter().enumerate() {
                    let j = cu_first + b as isize;
                    if j >= 0 && (j as usize) < coarse.n_upper() {
                        cross[(i as usize, j as usize)] += p.w * x * y;
                    }
                }
            }
            for (a, &x) in p.lower.iter().enumerate() {
                let i = p.lower_first + a as isize;
                if i < 0 || i as usize >= nl {
                    continue;
                }
                for (b, &y) in cl.iter().enumerate() {
                    let j = cl_first + b as isize;
                    if j >= 0 && (j as usize) < coarse.n_lower() {
                        cross[(nu + i as usize, coarse.n_upper() + j as usize)] += p.w * x * y;
                    }
                }
            }
        }
        let e = linalg::cholesky(&self.mass, "mass matrix")?.solve(&cross);
        let residual = (e.transpose() * &self.mass * &e - coarse.mass()).norm();
        if residual > 1e-8 * coarse.mass().norm() {
            return Err(Error::InvalidParameter(format!(
                "basis is not contained in the reference space (Gram residual {residual:.3e})"
            )));
        }
        Ok(e)
    }

    /// `(MZ)|D|(MZ)†` for the free eigenpairs `(D, Z)`: the form of `|H₀|`.
    pub fn h_half_metric(&self) -> DMatrix<f64> {
        let (values, vectors) = self.free_spectrum();
        let mz = &self.mass * vectors;
        let scaled = &mz * DMatrix::from_diagonal(&values.map(f64::abs));
        linalg::symmetrize(&(scaled * mz.transpose()))
    }
}

#[allow(clippy::too_many_arguments)]
fn accumulate_outer(
    target: &mut DMatrix<f64>,
    row_offset: usize,
    n: usize,
    first_i: isize,
    vi: &[f64],
    first_j: isize,
    vj: &[f64],
    weight: f64,
) {
    for (a, &x) in vi.iter().enumerate() {
        let i = first_i + a as isize;
        if i < 0 || i as usize >= n || x == 0.0 {
            continue;
        }
        for (b, &y) in vj.iter().enumerate() {
            let j = first_j + b as isize;
            if j < 0 || j as usize >= n {
                continue;
            }
            target[(row_offset + i as usize, row_offset + j as usize)] += weight * x * y;
        }
    }
}

fn union_breakpoints(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut all: Vec<f64> = a.iter().chain(b).copied().collect();
    all.sort_by(f64::total_cmp);
    all.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * y.abs().max(1e-300));
    all
}

/// Assemble mass and free form matrices with Gauss-Legendre quadrature of
/// `quad_order` points on every interval of the merged breakpoint set.
pub fn assemble_channel(config: &ChannelConfig) -> Result<KappaChannel> {
    config.validate()?;
    let lower = RadialBasis::with_count(config.r_max, config.n_splines, config.lower_order(), config.grading)?;
    let upper = RadialBasis::new(
        config.r_max,
        lower.intervals() * config.upper_refinement,
        config.spline_order,
        config.grading,
    )?;
    let (nodes, weights) = gauss_legendre(config.quad_order);
    let breaks = union_breakpoints(upper.breakpoints(), lower.breakpoints());
    let mut points = Vec::with_capacity((breaks.len() - 1) * nodes.len());
    for w in breaks.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        let half = 0.5 * (x1 - x0);
        let mid = 0.5 * (x1 + x0);
        for (&t, &wt) in nodes.iter().zip(&weights) {
            let r = mid + half * t;
            let (upper_first, upper_vals, _) = upper.eval(r);
            let (lower_first, lower_vals, lower_deriv) = lower.eval(r);
            points.push(QuadPoint {
                r,
                w: half * wt,
                upper_first,
                upper: upper_vals,
                lower_first,
                lower: lower_vals,
                lower_deriv,
            });
        }
    }

    let nu = upper.len();
    let nl = lower.len();
    let kappa = config.kappa as f64;
    let mut mass = DMatrix::zeros(nu + nl, nu + nl);
    let mut cross = DMatrix::<f64>::zeros(nu, nl);
    for p in &points {
        accumulate_outer(&mut mass, 0, nu, p.upper_first, &p.upper, p.upper_first, &p.upper, p.w);
        accumulate_outer(&mut mass, nu, nl, p.lower_first, &p.lower, p.lower_first, &p.lower, p.w);
        for (a, &bu) in p.upper.iter().enumerate() {
            let i = p.upper_first + a as isize;
            if i < 0 || i as usize >= nu {
                continue;
            }
            for (b, (&bl, &dl)) in p.lower.iter().zip(&p.lower_deriv).enumerate() {
                let j = p.lower_first + b as isize;
                if j < 0 || j as usize >= nl {
                    continue;
                }
                cross[(i as usize, j as usize)] += p.w * bu * (-dl + kappa / p.r * bl);
            }
        }
    }
    let mass = linalg::symmetrize(&mass);
    let mut free = mass.clone();
    free.view_mut((nu, nu), (nl, nl)).neg_mut();
    free.view_mut((0, nu), (nu, nl)).copy_from(&cross);
    free.view_mut((nu, 0), (nl, nu)).copy_from(&cross.transpose());
    Ok(KappaChannel {
        config: config.clone(),
        upper,
        lower,
        points,
        mass,
        free,
        free_eig: OnceLock::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kappa: i32) -> KappaChannel {
        let mut c = ChannelConfig::new(kappa).with_splines(60);
        c.r_max = 30.0;
        c.grading = 6.0;
        assemble_channel(&c).unwrap()
    }

    #[test]
    fn kappa_zero_rejected() {
        assert!(matches!(assemble_channel(&ChannelConfig::new(0)), Err(Error::InvalidKappa)));
    }

    #[test]
    fn config_json_defaults() {
        let c: ChannelConfig = serde_json::from_str(r#"{"kappa": -1}"#).unwrap();
        assert_eq!(c, ChannelConfig::new(-1));
        assert_eq!(ChannelConfig::new(2).lower_order(), 6);
        assert!(serde_json::from_str::<ChannelConfig>(r#"{"kappa": -1, "bogus": 1}"#).is_err());
    }

    #[test]
    fn mass_block_structure() {
        let ch = small(-1);
        let nu = ch.n_upper();
        assert_eq!(ch.mass().view((0, nu), (nu, ch.n_lower())).norm(), 0.0);
        assert!(linalg::min_eig(ch.mass()) > 0.0);
        // A polynomial vanishing at both ends lies in the spline space, so its
        // norm is integrated exactly: ∫_0^R (r(R - r))² dr = R⁵/30.
        let r_max = ch.upper_basis().r_max();
        let v = linalg::quad(ch.mass(), &interpolate(&ch, |r| r * (r_max - r)));
        assert!((v - r_max.powi(5) / 30.0).abs() < 1e-9 * v);
    }

    /// Coefficients of a function on the upper component, by least squares
    /// in the mass inner product.
    fn interpolate<F: Fn(f64) -> f64>(ch: &KappaChannel, f: F) -> DVector<f64> {
        let nu = ch.n_upper();
        let mut rhs = DVector::zeros(ch.dim());
        for p in &ch.points {
            for (a, &b) in p.upper.iter().enumerate() {
                let i = p.upper_first + a as isize;
                if i >= 0 && (i as usize) < nu {
                    rhs[i as usize] += p.w * b * f(p.r);
                }
            }
        }
        let mu = ch.mass().view((0, 0), (nu, nu)).into_owned();
        let c = mu.cholesky().unwrap().solve(&rhs.rows(0, nu).into_owned());
        let mut out = DVector::zeros(ch.dim());
        out.rows_mut(0, nu).copy_from(&c);
        out
    }

    #[test]
    fn coulomb_basics() {
        let ch = small(-1);
        assert_eq!(ch.coulomb(0.0, 0.0).unwrap(), DMatrix::zeros(ch.dim(), ch.dim()));
        assert!(ch.coulomb(0.5, -1.0).is_err());
        let v = ch.coulomb(0.5, 0.0).unwrap();
        assert!(linalg::pencil_eigvals(&v, ch.mass()).unwrap().last().unwrap() <= &0.0);
        // Large eps: V ≈ -(ν/ε) M.
        let eps = 1e3;
        let far = ch.coulomb(0.5, eps).unwrap();
        let ratio = far.norm() / (0.5 / eps * ch.mass().norm());
        assert!((ratio - 1.0).abs() < 0.05, "{ratio}");
    }

    #[test]
    fn free_spectrum_is_symmetric_for_equal_bases() {
        let ch = small(-1);
        let (values, _) = ch.free_spectrum();
        let n = values.len();
        for i in 0..n {
            assert!((values[i] + values[n - 1 - i]).abs() <= 1e-10 * values[i].abs().max(1.0));
        }
        assert!(values.iter().all(|e| e.abs() >= 1.0 - 1e-8));
    }

    #[test]
    fn p_split_and_h_half() {
        let ch = small(-1);
        let split = ch.p_split().unwrap();
        assert_eq!(split.n_plus(), split.n_minus());
        let h = ch.h_half_metric();
        let lo = linalg::pencil_eigvals(&h, ch.mass()).unwrap()[0];
        assert!(lo >= 1.0 - 1e-8);
        let (values, vectors) = ch.free_spectrum();
        let z = vectors.column(values.len() - 1).into_owned();
        let expected = values[values.len() - 1].abs() * linalg::quad(ch.mass(), &z);
        assert!((linalg::quad(&h, &z) - expected).abs() <= 1e-9 * expected);
    }

    #[test]
    fn t_split_shape() {
        let ch = small(-1);
        let split = ch.t_split();
        assert_eq!(split.n_plus(), split.n_minus());
        let nu = ch.n_upper();
        assert!(ch.free().view((0, nu), (nu, ch.n_lower())).norm() > 1.0);
    }

    #[test]
    fn p_split_decouples_free_form() {
        use crate::forms::{check_decoupling, check_sign_conditions, FormPair};
        let ch = small(-1);
        let zero = DMatrix::zeros(ch.dim(), ch.dim());
        let pair = FormPair::new(ch.mass().clone(), ch.free().clone(), zero, ch.p_split().unwrap())
            .unwrap()
            .to_block_coordinates();
        // Roundoff in the eigenvectors scales with the largest free eigenvalue.
        let scale = linalg::spectral_norm(pair.q());
        let dec = check_decoupling(&pair, 1e-13 * scale);
        assert!(dec.all_pass(), "{dec:?}");
        let signs = check_sign_conditions(&pair, 1e-10);
        let (lo, hi) = (signs.checks[0].margin, signs.checks[1].margin);
        assert!((lo - 1.0).abs() < 5e-3 && (hi + 1.0).abs() < 5e-3, "{signs:?}");
        let h = pair.block_basis().transpose() * ch.h_half_metric() * pair.block_basis();
        let np = pair.n_plus();
        assert!(h.view((0, np), (np, pair.n_minus())).norm() <= 1e-13 * linalg::spectral_norm(&h));
    }

    #[test]
    fn coulomb_is_monotone_in_eps() {
        use rand::SeedableRng;
        let ch = small(-1);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let vs: Vec<_> = [0.0, 0.1, 1.0].iter().map(|&e| ch.coulomb(0.7, e).unwrap()).collect();
        for _ in 0..100 {
            let x = DVector::from_fn(ch.dim(), |_, _| rand::Rng::sample::<f64, _>(&mut rng, rand_distr::StandardNormal));
            let q: Vec<f64> = vs.iter().map(|v| linalg::quad(v, &x)).collect();
            assert!(q[0] <= q[1] + 1e-12 * q[0].abs() && q[1] <= q[2] + 1e-12 * q[1].abs());
            assert!(q[2] <= 0.0);
        }
    }

    #[test]
    fn mirrored_kappa_has_same_free_spectrum() {
        let mut plus = ChannelConfig::new(1).with_splines(60);
        plus.lower_spline_order = Some(plus.spline_order);
        let a = assemble_channel(&plus).unwrap();
        let b = assemble_channel(&ChannelConfig::new(-1).with_splines(60)).unwrap();
        let (ea, eb) = (&a.free_spectrum().0, &b.free_spectrum().0);
        for (x, y) in ea.iter().zip(eb.iter()) {
            assert!((x - y).abs() <= 1e-10 * x.abs().max(1.0), "{x} {y}");
        }
    }

    fn lowest_positive(kappa: i32, n: usize) -> f64 {
        let ch = assemble_channel(&ChannelConfig::new(kappa).with_splines(n)).unwrap();
        ch.free_spectrum().0.iter().copied().find(|&e| e > 0.0).unwrap()
    }

    #[test]
    fn lowest_positive_free_level_under_doubling() {
        // κ > 0: a kernel vector of the coupling block sits exactly at 1.
        let (a, b) = (lowest_positive(1, 50), lowest_positive(1, 100));
        assert!((a - b).abs() < 1e-10 && (a - 1.0).abs() < 1e-10, "{a} {b}");
        // κ < 0: the lowest box state lies above 1 and settles under refinement.
        let v: Vec<f64> = [50, 100, 200].iter().map(|&n| lowest_positive(-1, n)).collect();
        assert!(v.iter().all(|&e| e > 1.0 && e < 1.01));
        assert!((v[2] - v[1]).abs() < (v[1] - v[0]).abs());
        assert!((v[2] - v[1]).abs() < 1e-6);
    }
}
