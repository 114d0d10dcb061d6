use nalgebra::{DMatrix, DVector};

use super::pair::{Blocks, FormPair, MAX_SPLIT_CONDITION};
use super::report::{ConditionCheck, ConditionReport};
use crate::linalg;
use crate::{Error, Result, Scalar};

/// Geometric grid of `α` values scanned for condition (8).
pub const ALPHA_GRID: [f64; 11] = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0, 1024.0];

/// Default structural tolerance: `1e-10` relative to `max(‖Q‖, 1)`.
pub fn default_tolerance<T: Scalar>(pair: &FormPair<T>) -> f64 {
    1e-10 * linalg::spectral_norm(pair.q()).max(1.0)
}

fn canonical<T: Scalar>(pair: &FormPair<T>) -> std::borrow::Cow<'_, FormPair<T>> {
    if pair.is_block_coordinates() {
        std::borrow::Cow::Borrowed(pair)
    } else {
        std::borrow::Cow::Owned(pair.to_block_coordinates())
    }
}

/// Conditions (2) and (3): `Q++` positive, `Q--` nonpositive.
///
/// Margins are the smallest eigenvalue of `Q++` and the largest of `Q--`.
/// Pass iff `λ_min(Q++) > tol` and `λ_max(Q--) <= tol`. An empty block
/// passes with an infinite margin.
pub fn check_sign_conditions<T: Scalar>(pair: &FormPair<T>, tol: f64) -> ConditionReport {
    let pair = canonical(pair);
    let blocks = Blocks::of(pair.q(), pair.n_plus());
    let lo_plus = linalg::min_eig(&blocks.pp);
    let hi_minus = linalg::max_eig(&blocks.mm);
    ConditionReport::new(vec![
        ConditionCheck::new(2, lo_plus > tol, lo_plus, tol),
        ConditionCheck::new(3, hi_minus <= tol, hi_minus, tol),
    ])
}

/// Condition (4): the largest singular value of `Q+-` is at most `tol`.
pub fn check_decoupling<T: Scalar>(pair: &FormPair<T>, tol: f64) -> ConditionReport {
    let pair = canonical(pair);
    let blocks = Blocks::of(pair.q(), pair.n_plus());
    let norm = linalg::spectral_norm(&blocks.pm);
    ConditionReport::new(vec![ConditionCheck::new(4, norm <= tol, norm, tol)])
}

/// Gram matrix of `⟨x, y⟩_α = q[P+x, P+y] - q[P-x, P-y] + α⟨x, y⟩` in block
/// coordinates.
#[derive(Clone, Debug)]
pub struct AlphaMetric<T: Scalar = f64> {
    alpha: f64,
    g: DMatrix<T>,
    n_plus: usize,
}

impl<T: Scalar> AlphaMetric<T> {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.g
    }

    pub fn n_plus(&self) -> usize {
        self.n_plus
    }

    /// `‖x‖²_α` for `x` in block coordinates.
    pub fn norm_sq(&self, x: &DVector<T>) -> f64 {
        linalg::quad(&self.g, x)
    }

    /// `⟨x, y⟩_α` for block-coordinate vectors.
    pub fn inner(&self, x: &DVector<T>, y: &DVector<T>) -> T {
        linalg::sesq(&self.g, x, y)
    }
}

/// Build `G_α = blockdiag(Q++, -Q--) + α·I`.
pub fn alpha_gram<T: Scalar>(pair: &FormPair<T>, alpha: f64) -> Result<AlphaMetric<T>> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    let pair = canonical(pair);
    let tol = default_tolerance(&pair);
    let signs = check_sign_conditions(&pair, tol);
    if !signs.all_pass() {
        let detail: Vec<String> = signs
            .failed()
            .map(|c| format!("condition ({}) margin {:.3e}", c.condition, c.margin))
            .collect();
        return Err(Error::AlphaMetricUndefined(format!("sign conditions violated: {}", detail.join(", "))));
    }
    let n = pair.dim();
    let n_plus = pair.n_plus();
    let blocks = Blocks::of(pair.q(), n_plus);
    let mut g = DMatrix::<T>::identity(n, n) * T::from_real(alpha);
    let mut top = g.view_mut((0, 0), (n_plus, n_plus));
    top += &blocks.pp;
    let mut bottom = g.view_mut((n_plus, n_plus), (n - n_plus, n - n_plus));
    bottom -= &blocks.mm;
    Ok(AlphaMetric { alpha, g, n_plus })
}

fn metric_factor<T: Scalar>(metric: &AlphaMetric<T>) -> Result<nalgebra::Cholesky<T, nalgebra::Dyn>> {
    linalg::cholesky(&metric.g, "alpha metric").map_err(|_| Error::MetricSingular)
}

/// Smallest `C_α` with `|v[x, y]| <= C_α ‖x‖_α ‖y‖_α`: the spectral radius
/// of the pencil `(V, G_α)`.
pub fn form_bound_constant<T: Scalar>(pair: &FormPair<T>, metric: &AlphaMetric<T>) -> f64 {
    let pair = canonical(pair);
    match metric_factor(metric) {
        Ok(chol) => {
            let reduced = linalg::congruence_by_inverse_factor(pair.v(), &chol);
            linalg::eigvalsh(&reduced).iter().fold(0.0, |acc, e| acc.max(e.abs()))
        }
        Err(_) => f64::INFINITY,
    }
}

/// `V_α = G_α⁻¹ V`, the operator representing `v` in the `α`-inner product.
pub fn build_v_alpha<T: Scalar>(pair: &FormPair<T>, metric: &AlphaMetric<T>) -> Result<DMatrix<T>> {
    let pair = canonical(pair);
    let chol = metric_factor(metric)?;
    Ok(chol.solve(pair.v()))
}

/// Smallest singular value of `U + V_α` measured in the `G_α` geometry.
///
/// `G_α` is block diagonal, so its Cholesky factor `L` commutes with `U` and
/// the operator is unitarily similar to the Hermitian `U + L⁻¹ V L⁻†`.
pub fn u_plus_v_margin<T: Scalar>(pair: &FormPair<T>, metric: &AlphaMetric<T>) -> Result<f64> {
    let pair = canonical(pair);
    let chol = metric_factor(metric)?;
    let mut a = linalg::congruence_by_inverse_factor(pair.v(), &chol);
    for i in 0..pair.dim() {
        let sign = if i < metric.n_plus { 1.0 } else { -1.0 };
        a[(i, i)] += T::from_real(sign);
    }
    Ok(linalg::eigvalsh(&a).iter().fold(f64::INFINITY, |acc, e| acc.min(e.abs())))
}

/// Result of the condition (8) check: the verdict at the metric's own `α`
/// plus a scan over [`ALPHA_GRID`].
#[derive(Clone, Debug)]
pub struct InvertibilityReport {
    /// Condition (8) evaluated at the supplied metric.
    pub report: ConditionReport,
    /// `(α, margin)` for every grid point.
    pub scan: Vec<(f64, f64)>,
    pub best_alpha: f64,
    pub best_margin: f64,
    pub tolerance: f64,
}

impl InvertibilityReport {
    /// "For α big enough": true if some grid point passes.
    pub fn scan_passes(&self) -> bool {
        self.best_margin > self.tolerance
    }

    /// Condition (8) judged on the scan.
    pub fn scan_check(&self) -> ConditionCheck {
        ConditionCheck::new(8, self.scan_passes(), self.best_margin, self.tolerance)
            .with_note(format!("best alpha {}", self.best_alpha))
    }
}

pub fn check_u_plus_v_invertible<T: Scalar>(
    pair: &FormPair<T>,
    metric: &AlphaMetric<T>,
    tol: f64,
) -> Result<InvertibilityReport> {
    let pair = canonical(pair);
    let at_metric = u_plus_v_margin(&pair, metric)?;
    let mut scan = Vec::with_capacity(ALPHA_GRID.len());
    for &alpha in &ALPHA_GRID {
        let margin = if alpha == metric.alpha {
            at_metric
        } else {
            u_plus_v_margin(&pair, &alpha_gram(&pair, alpha)?)?
        };
        scan.push((alpha, margin));
    }
    let (best_alpha, best_margin) = scan
        .iter()
        .chain(std::iter::once(&(metric.alpha, at_metric)))
        .fold((metric.alpha, at_metric), |best, &(a, m)| if m > best.1 { (a, m) } else { best });
    Ok(InvertibilityReport {
        report: ConditionReport::new(vec![ConditionCheck::new(8, at_metric > tol, at_metric, tol)]),
        scan,
        best_alpha,
        best_margin,
        tolerance: tol,
    })
}

/// Whether the split coincides with the spectral split of `Q` (positive
/// eigenvalues to `D+`, nonpositive ones to `D-`).
///
/// Reported under condition number 1. The margin is the sine of the largest
/// principal angle between `D+` and the positive spectral subspace. An
/// eigenvalue within `tol` of zero is flagged in the note and classified into
/// `D-`.
pub fn check_spectral_split_consistency<T: Scalar>(pair: &FormPair<T>, tol: f64) -> ConditionReport {
    let pair = canonical(pair);
    let n = pair.dim();
    let n_plus = pair.n_plus();
    let (values, vectors) = linalg::eigh(pair.q());
    let n_minus_spec = values.iter().filter(|&&e| e <= 0.0).count();
    let ambiguous: Vec<f64> = values.iter().copied().filter(|e| e.abs() <= tol).collect();
    let mut check = if n - n_minus_spec != n_plus {
        ConditionCheck::new(1, false, 1.0, tol).with_note(format!(
            "spectral split has {} positive directions, D+ has {n_plus}",
            n - n_minus_spec
        ))
    } else {
        let spectral_plus = vectors.columns(n_minus_spec, n_plus).into_owned();
        let coordinate_plus = DMatrix::<T>::identity(n, n).columns(0, n_plus).into_owned();
        let gap = linalg::subspace_gap(&spectral_plus, &coordinate_plus);
        ConditionCheck::new(1, gap <= tol, gap, tol)
    };
    if !ambiguous.is_empty() {
        let note = format!("ambiguous sign split: {} eigenvalue(s) within {tol:.1e} of 0 assigned to D-", ambiguous.len());
        log::warn!("{note}");
        check.note = Some(match check.note.take() {
            Some(prev) => format!("{prev}; {note}"),
            None => note,
        });
    }
    ConditionReport::new(vec![check])
}

/// Conditions (1)–(8) at `α = 1`, with (8) judged on the `α` scan.
pub fn check_all<T: Scalar>(pair: &FormPair<T>, tol: f64) -> ConditionReport {
    let split_margin = 1.0 / pair.split_condition();
    let split_tol = 1.0 / MAX_SPLIT_CONDITION;
    let block = canonical(pair);
    let mut checks = vec![ConditionCheck::new(1, split_margin >= split_tol, split_margin, split_tol)];
    checks.extend(check_sign_conditions(&block, tol).checks);
    checks.extend(check_decoupling(&block, tol).checks);
    checks.push(ConditionCheck::new(5, true, 0.0, 0.0).with_note("vacuously true in finite dimension"));
    checks.push(ConditionCheck::new(6, true, 0.0, 0.0).with_note("D[v] = D[q] at matrix level"));
    match alpha_gram(&block, 1.0) {
        Ok(metric) => {
            let c_alpha = form_bound_constant(&block, &metric);
            checks.push(ConditionCheck::new(7, c_alpha.is_finite(), c_alpha, 0.0));
            match check_u_plus_v_invertible(&block, &metric, tol) {
                Ok(inv) => checks.push(inv.scan_check()),
                Err(e) => checks.push(ConditionCheck::new(8, false, f64::NAN, tol).with_note(e.to_string())),
            }
        }
        Err(e) => {
            let note = e.to_string();
            checks.push(ConditionCheck::new(7, false, f64::NAN, 0.0).with_note(note.clone()));
            checks.push(ConditionCheck::new(8, false, f64::NAN, tol).with_note(note));
        }
    }
    ConditionReport::new(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::SplitSpace;
    use approx::assert_relative_eq;
    use nalgebra::DVector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag(values: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_column_slice(values))
    }

    fn pair(q: DMatrix<f64>, v: DMatrix<f64>, plus: &[usize]) -> FormPair<f64> {
        let n = q.nrows();
        FormPair::new(DMatrix::identity(n, n), q, v, SplitSpace::from_indices(n, plus).unwrap()).unwrap()
    }

    fn worked() -> FormPair<f64> {
        pair(diag(&[1.0, -1.0]), DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0]), &[0])
    }

    #[test]
    fn sign_conditions_pass_and_fail() {
        let ok = check_sign_conditions(&pair(diag(&[1.0, -1.0]), DMatrix::zeros(2, 2), &[0]), 1e-10);
        assert!(ok.all_pass());
        assert_eq!(ok.get(2).unwrap().margin, 1.0);
        assert_eq!(ok.get(3).unwrap().margin, -1.0);
        let bad = check_sign_conditions(&pair(diag(&[-1.0, 1.0]), DMatrix::zeros(2, 2), &[0]), 1e-10);
        assert!(!bad.get(2).unwrap().pass);
        assert!(!bad.get(3).unwrap().pass);
    }

    #[test]
    fn decoupling() {
        let ok = check_decoupling(&pair(diag(&[1.0, -1.0]), DMatrix::zeros(2, 2), &[0]), 1e-10);
        assert!(ok.all_pass());
        assert_eq!(ok.checks[0].margin, 0.0);
        let coupled = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.1, -1.0]);
        assert!(!check_decoupling(&pair(coupled, DMatrix::zeros(2, 2), &[0]), 1e-10).all_pass());
    }

    #[test]
    fn alpha_gram_values() {
        let p = pair(diag(&[1.0, -1.0]), DMatrix::zeros(2, 2), &[0]);
        assert_relative_eq!(alpha_gram(&p, 1.0).unwrap().matrix(), &diag(&[2.0, 2.0]));
        assert_relative_eq!(alpha_gram(&p, 3.0).unwrap().matrix(), &diag(&[4.0, 4.0]));
        assert!(matches!(alpha_gram(&p, 0.0), Err(Error::InvalidParameter(_))));
        let flipped = pair(diag(&[1.0, -1.0]), DMatrix::zeros(2, 2), &[1]);
        assert!(matches!(alpha_gram(&flipped, 1.0), Err(Error::AlphaMetricUndefined(_))));
    }

    #[test]
    fn bound_constant_trivial_cases() {
        let p = pair(diag(&[1.0, -1.0]), DMatrix::zeros(2, 2), &[0]);
        let metric = alpha_gram(&p, 1.0).unwrap();
        assert_eq!(form_bound_constant(&p, &metric), 0.0);
        let q = diag(&[2.0, -0.5]);
        let g = alpha_gram(&pair(q.clone(), DMatrix::zeros(2, 2), &[0]), 1.0).unwrap().matrix().clone();
        let same = pair(q, g, &[0]);
        let metric = alpha_gram(&same, 1.0).unwrap();
        assert_relative_eq!(form_bound_constant(&same, &metric), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn v_alpha_trivial_cases() {
        let zero = pair(diag(&[1.0, -1.0]), DMatrix::zeros(2, 2), &[0]);
        let metric = alpha_gram(&zero, 1.0).unwrap();
        assert_eq!(build_v_alpha(&zero, &metric).unwrap(), DMatrix::zeros(2, 2));
        let p = pair(diag(&[1.0, -1.0]), DMatrix::identity(2, 2), &[0]);
        let metric = alpha_gram(&p, 1.0).unwrap();
        assert_relative_eq!(build_v_alpha(&p, &metric).unwrap(), DMatrix::identity(2, 2) * 0.5, epsilon = 1e-15);
    }

    #[test]
    fn v_alpha_defining_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let generated = crate::random::random_pair::<f64, _>(&mut rng, 9, 4);
        let p = generated.to_block_coordinates();
        let metric = alpha_gram(&p, 1.7).unwrap();
        let v_alpha = build_v_alpha(&p, &metric).unwrap();
        let gv = metric.matrix() * &v_alpha;
        assert!((&gv - gv.transpose()).norm() <= 1e-12 * gv.norm());
        for _ in 0..100 {
            let x = DVector::from_fn(9, |_, _| f64::sample_normal(&mut rng));
            let y = DVector::from_fn(9, |_, _| f64::sample_normal(&mut rng));
            let lhs = metric.inner(&(&v_alpha * &x), &y);
            let rhs = linalg::sesq(p.v(), &x, &y);
            assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn u_plus_v_trivial_cases() {
        let zero = pair(diag(&[1.0, -1.0]), DMatrix::zeros(2, 2), &[0]);
        let metric = alpha_gram(&zero, 1.0).unwrap();
        let inv = check_u_plus_v_invertible(&zero, &metric, 1e-10).unwrap();
        assert!(inv.report.all_pass());
        for &(_, margin) in &inv.scan {
            assert_relative_eq!(margin, 1.0, epsilon = 1e-14);
        }
        // V = -G_1 U gives V_1 = -U.
        let v = diag(&[-2.0, 2.0]);
        let p = pair(diag(&[1.0, -1.0]), v, &[0]);
        let metric = alpha_gram(&p, 1.0).unwrap();
        let inv = check_u_plus_v_invertible(&p, &metric, 1e-10).unwrap();
        assert!(!inv.report.all_pass());
        assert!(inv.report.checks[0].margin.abs() < 1e-15);
        // Away from alpha = 1 the operator is invertible again.
        assert!(inv.scan_passes());
    }

    #[test]
    fn spectral_split_consistency() {
        let good = pair(diag(&[1.0, -1.0]), DMatrix::zeros(2, 2), &[0]);
        assert!(check_spectral_split_consistency(&good, 1e-10).all_pass());
        let bad = pair(diag(&[1.0, -1.0]), DMatrix::zeros(2, 2), &[1]);
        assert!(!check_spectral_split_consistency(&bad, 1e-10).all_pass());
        let zero_mode = pair(diag(&[1.0, 0.0]), DMatrix::zeros(2, 2), &[0]);
        let report = check_spectral_split_consistency(&zero_mode, 1e-10);
        assert!(report.all_pass());
        assert!(report.checks[0].note.as_deref().unwrap().contains("ambiguous"));
    }

    #[test]
    fn worked_example_passes_everything() {
        let report = check_all(&worked(), 1e-10);
        assert!(report.all_pass(), "{report:?}");
        assert_eq!(report.checks.len(), 8);
    }

    #[test]
    fn zero_perturbation_margins() {
        let report = check_all(&pair(diag(&[1.0, -1.0]), DMatrix::zeros(2, 2), &[0]), 1e-10);
        assert_eq!(report.get(6).unwrap().margin, 0.0);
        assert_eq!(report.get(7).unwrap().margin, 0.0);
        assert_relative_eq!(report.get(8).unwrap().margin, 1.0, epsilon = 1e-14);
    }

    mod props {
        use super::*;
        use crate::random::{random_block_pair, random_unitary};
        use proptest::prelude::*;
        use rand::Rng;

        fn random_vectors(rng: &mut ChaCha8Rng, n: usize, count: usize) -> Vec<DVector<f64>> {
            (0..count)
                .map(|_| DVector::from_fn(n, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal)))
                .collect()
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn congruence_keeps_outcomes(seed in any::<u64>(), n in 2usize..9, flip in any::<bool>()) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let n_plus = rng.random_range(1..n);
                let block = random_block_pair::<f64, _>(&mut rng, n, n_plus);
                let plus: Vec<usize> = if flip { (n_plus..n).collect() } else { (0..n_plus).collect() };
                let p = FormPair::new(block.m().clone(), block.q().clone(), block.v().clone(),
                    SplitSpace::from_indices(n, &plus).unwrap()).unwrap();
                let u = random_unitary::<f64, _>(&mut rng, n);
                let d = DVector::from_fn(n, |_, _| rng.random_range(0.5..2.0));
                let c = u * DMatrix::from_diagonal(&d);
                let moved = p.congruence(&c).unwrap();
                let (a, b) = (check_all(&p, 1e-9), check_all(&moved, 1e-9));
                prop_assert_eq!(a.checks.len(), b.checks.len());
                for (x, y) in a.checks.iter().zip(&b.checks) {
                    prop_assert_eq!(x.condition, y.condition);
                    prop_assert_eq!(x.pass, y.pass, "condition {}: {:?} vs {:?}", x.condition, x, y);
                }
                prop_assert_eq!(a.all_pass(), !flip);
            }

            #[test]
            fn alpha_norms_are_equivalent(seed in any::<u64>(), n in 2usize..9, alpha in 0.05f64..10.0, factor in 1.0f64..20.0) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let n_plus = rng.random_range(1..n);
                let p = random_block_pair::<f64, _>(&mut rng, n, n_plus);
                let small = alpha_gram(&p, alpha).unwrap();
                let large = alpha_gram(&p, alpha * factor).unwrap();
                for x in random_vectors(&mut rng, n, 200) {
                    let (a, b) = (small.norm_sq(&x), large.norm_sq(&x));
                    prop_assert!(a <= b * (1.0 + 1e-12));
                    prop_assert!(b <= factor * a * (1.0 + 1e-12));
                }
            }

            #[test]
            fn alpha_gram_is_positive_definite(seed in any::<u64>(), n in 1usize..9, alpha in 1e-6f64..1e3) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let n_plus = rng.random_range(0..=n);
                let p = random_block_pair::<f64, _>(&mut rng, n, n_plus);
                let tol = default_tolerance(&p);
                prop_assume!(check_sign_conditions(&p, tol).all_pass() && check_decoupling(&p, tol).all_pass());
                let metric = alpha_gram(&p, alpha).unwrap();
                prop_assert!(linalg::min_eig(metric.matrix()) > 0.0);
            }
        }
    }
}
