use serde::Serialize;

use super::{schur_reduce, unit_level, SForm};
use crate::root::{self, Sample};
use crate::{linalg, Error, Result, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    /// Root of `l_k` found inside `(a, b)`.
    Converged,
    /// `l_k > 0` up to `b - δ`: no `k`-th eigenvalue below `b`, `λ_k := b`.
    Ceiling,
    /// `l_k <= 0` already at `a + δ`: the root lies within `δ` of `a`.
    LowerEdge,
    /// Iteration budget exhausted; `lambda` is the last bracket estimate.
    NotConverged,
}

impl SolveStatus {
    pub fn describe(self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::Ceiling => "no eigenvalue below ceiling",
            SolveStatus::LowerEdge => "root within delta of a",
            SolveStatus::NotConverged => "iteration limit reached",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Relative bracket width at convergence.
    pub rel_tol: f64,
    pub max_iter: usize,
    /// Points of the scan clustered geometrically toward `a`.
    pub scan_geometric: usize,
    /// Uniform points of the scan.
    pub scan_uniform: usize,
    /// Also compute `μ_k` from a dense eigensolve of `S`.
    pub cross_check: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_iter: 200,
            scan_geometric: 16,
            scan_uniform: 32,
            cross_check: true,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimaxResult {
    pub k: usize,
    pub lambda: f64,
    pub multiplicity: usize,
    pub bracket: (f64, f64),
    pub iterations: usize,
    /// `|l_k(λ_k)|` in the `N_u` metric; zero for ceiling results.
    pub schur_residual: f64,
    pub pencil_mu_k: Option<f64>,
    pub status: SolveStatus,
    pub a: f64,
    pub b: f64,
    /// `(u, k-th eigenvalue of G_u)` along the bracket scan.
    #[serde(skip)]
    pub scan: Vec<Sample>,
    pub scan_decreasing: bool,
    /// Smallest eigenvalue of `G_λ` (for `k = 1`), the a-posteriori check that
    /// the first eigenvalue lies above `a`.
    pub edge_check: Option<f64>,
}

impl MinimaxResult {
    pub fn mu_difference(&self) -> Option<f64> {
        self.pencil_mu_k.map(|mu| (self.lambda - mu).abs())
    }

    /// Whether `G_λ ⪰ 0` was confirmed at `λ_1` (vacuous for `k > 1`).
    pub fn above_edge_certified(&self) -> bool {
        match self.edge_check {
            Some(m) => m >= -1e-9 * (1.0 + self.lambda.abs()),
            None => true,
        }
    }
}

/// All eigenvalues of `(S, I)`, ascending.
pub fn full_pencil_eigenvalues<T: Scalar>(s: &SForm<T>) -> Vec<f64> {
    linalg::eigvalsh(s.s())
}

/// `μ_k`: the `k`-th eigenvalue of `S` in `(a, b)`, or `b` if there is none.
///
/// Only the top `n_plus` eigenvalues are candidates: by interlacing the
/// remaining ones lie at or below `a`.
pub fn mu_k<T: Scalar>(s: &SForm<T>, k: usize) -> f64 {
    mu_from_spectrum(&full_pencil_eigenvalues(s), s, k)
}

fn mu_from_spectrum<T: Scalar>(spectrum: &[f64], s: &SForm<T>, k: usize) -> f64 {
    spectrum[s.n_minus()..]
        .iter()
        .copied()
        .filter(|&e| e < s.b())
        .nth(k - 1)
        .unwrap_or(s.b())
}

/// Solve `l_k(u) = 0` on `(a, b)`.
///
/// The sign change is located on the `k`-th eigenvalue of `G_u`, which has
/// the sign of `l_k(u)` and decreases strictly; the residual is reported in
/// the `N_u` metric.
pub fn solve_lambda_k<T: Scalar>(s: &SForm<T>, k: usize, opts: &SolveOptions) -> Result<MinimaxResult> {
    s.check_index(k)?;
    let mu = opts.cross_check.then(|| mu_k(s, k));
    let a = s.a();
    let b = s.b();
    let mut result = MinimaxResult {
        k,
        lambda: b,
        multiplicity: 1,
        bracket: (a, b),
        iterations: 0,
        schur_residual: 0.0,
        pencil_mu_k: mu,
        status: SolveStatus::Ceiling,
        a,
        b,
        scan: Vec::new(),
        scan_decreasing: true,
        edge_check: None,
    };

    if s.n_minus() == 0 {
        // Rayleigh-Ritz on S++.
        let value = linalg::eigvalsh(&s.blocks().pp)[k - 1];
        if value < b {
            result.lambda = value;
            result.bracket = (value, value);
            result.status = SolveStatus::Converged;
        }
        return Ok(result);
    }

    let delta = 1e-8 * (1.0 + a.abs());
    let lo = a + delta;
    let hi = b - delta;
    if !(hi > lo) {
        return if s.is_ceiling_surrogate() {
            Err(Error::AboveCeiling { ceiling: b })
        } else {
            Ok(result)
        };
    }
    let grid = root::scan_grid(lo, hi, opts.scan_geometric, opts.scan_uniform);
    let mut failure = None;
    let scan = root::scan_for_sign_change(&grid, |u| match unit_level(s, u, k) {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    result.scan_decreasing = scan.strictly_decreasing();
    result.scan = scan.samples.clone();

    match scan.bracket {
        Some((low, high)) => {
            let root = root::hybrid_root(
                |u| unit_level(s, u, k).unwrap_or(f64::NAN),
                low,
                high,
                opts.rel_tol,
                opts.max_iter,
            );
            result.lambda = root.x;
            result.bracket = (root.lo, root.hi);
            result.iterations = root.iterations;
            result.status = if root.converged {
                SolveStatus::Converged
            } else {
                SolveStatus::NotConverged
            };
        }
        None => {
            let first = scan.samples[0];
            if first.value <= 0.0 {
                result.lambda = first.u;
                result.bracket = (a, first.u);
                result.status = SolveStatus::LowerEdge;
            } else if s.is_ceiling_surrogate() {
                return Err(Error::AboveCeiling { ceiling: b });
            } else {
                return Ok(result);
            }
        }
    }

    let red = schur_reduce(s, result.lambda)?;
    let levels = linalg::pencil_eigvals(&red.g, &red.n)?;
    result.schur_residual = levels[k - 1].abs();
    if k == 1 {
        result.edge_check = Some(linalg::min_eig(&red.g));
    }
    Ok(result)
}

/// `λ_1, …, λ_{k_max}` with multiplicities filled in. Levels run in parallel.
pub fn solve_all<T: Scalar>(s: &SForm<T>, k_max: usize, opts: &SolveOptions) -> Result<Vec<MinimaxResult>> {
    use rayon::prelude::*;
    let mut results = (1..=k_max)
        .into_par_iter()
        .map(|k| solve_lambda_k(s, k, opts))
        .collect::<Result<Vec<_>>>()?;
    multiplicity(&mut results, None);
    Ok(results)
}

/// Cluster `λ` values (sorted by `k`) and assign each the cluster size.
/// Default tolerance `1e-8·(1 + |λ|)`.
pub fn multiplicity(results: &mut [MinimaxResult], tol: Option<f64>) -> Vec<usize> {
    let n = results.len();
    let mut counts = vec![1; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n {
            let prev = results[end - 1].lambda;
            let t = tol.unwrap_or(1e-8 * (1.0 + prev.abs()));
            if (results[end].lambda - prev).abs() <= t {
                end += 1;
            } else {
                break;
            }
        }
        for c in &mut counts[start..end] {
            *c = end - start;
        }
        start = end;
    }
    for (r, &c) in results.iter_mut().zip(&counts) {
        r.multiplicity = c;
    }
    counts
}
