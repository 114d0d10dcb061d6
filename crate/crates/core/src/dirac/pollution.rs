use nalgebra::DMatrix;
use serde::Serialize;

use super::channel::{assemble_channel, ChannelConfig};
use super::oracle::sommerfeld_levels;
use super::solve::{check_coupling, GAP_TOP};
use crate::forms::{FormPair, SplitSpace};
use crate::minimax::{solve_all, MinimaxResult, SForm, SolveOptions, SolveStatus};
use crate::{linalg, Result};

/// Distance beyond which a direct gap eigenvalue is listed as spurious.
pub const SPURIOUS_DISTANCE: f64 = 1e-2;
/// Accepted distance of a minimax value from the closed-form spectrum.
pub const MINIMAX_TOLERANCE: f64 = 5e-4;

#[derive(Clone, Debug, Serialize)]
pub struct PollutionReport {
    pub nu: f64,
    pub kappa: i32,
    pub upper_refinement: usize,
    /// Eigenvalues of the trial-space pencil `(W + V, M)` inside `(-1, 1)`.
    pub direct: Vec<f64>,
    /// Direct values farther than [`SPURIOUS_DISTANCE`] from every level.
    pub spurious: Vec<f64>,
    pub minimax: Vec<MinimaxResult>,
    /// Distance of each converged minimax value to the nearest level.
    pub minimax_distance: Vec<Option<f64>>,
    pub levels: Vec<f64>,
    pub pass: bool,
}

fn nearest(levels: &[f64], x: f64) -> f64 {
    levels
        .iter()
        .map(|l| (l - x).abs())
        .fold((GAP_TOP - x).abs(), f64::min)
}

/// Direct Rayleigh-Ritz on an unbalanced trial space against the minimax
/// with `D+ = P+(trial space)` and the complete `D-` of a reference space.
///
/// The reference space uses the upper component's refined grid for both
/// components, so it contains the trial space. `P±` are the free spectral
/// projectors of the reference space.
pub fn pollution_demo(config: &ChannelConfig, nu: f64, k_max: usize, opts: &SolveOptions) -> Result<PollutionReport> {
    check_coupling(nu, config.kappa)?;
    let trial = assemble_channel(config)?;
    let v_trial = trial.coulomb(nu, 0.0)?;
    let direct: Vec<f64> = linalg::pencil_eigvals(&(trial.free() + &v_trial), trial.mass())?
        .into_iter()
        .filter(|e| e.abs() < GAP_TOP)
        .collect();

    let mut reference_config = config.clone();
    reference_config.upper_refinement = 1;
    reference_config.n_splines = trial.upper_basis().intervals() + config.lower_order() - 3;
    let reference = assemble_channel(&reference_config)?;
    let embed = reference.embedding_of(&trial)?;

    let (values, z) = reference.free_spectrum();
    let n_minus = values.iter().filter(|&&e| e <= 0.0).count();
    let z_minus = z.columns(0, n_minus).into_owned();
    let z_plus = z.columns(n_minus, values.len() - n_minus).into_owned();
    // Coordinates of P+ applied to the trial space, in the M-orthonormal Z+.
    let coeffs = z_plus.transpose() * reference.mass() * &embed;
    let svd = coeffs.svd(true, false);
    let sigma_max = svd.singular_values.max();
    let u = svd.u.expect("left singular vectors requested");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > 1e-8 * sigma_max)
        .collect();
    let d_plus = &z_plus * u.select_columns(&keep);
    let n_plus = d_plus.ncols();

    let mut x = DMatrix::zeros(reference.dim(), n_plus + n_minus);
    x.columns_mut(0, n_plus).copy_from(&d_plus);
    x.columns_mut(n_plus, n_minus).copy_from(&z_minus);
    let v_ref = reference.coulomb(nu, 0.0)?;
    let dim = x.ncols();
    let pair = FormPair::new(
        x.transpose() * reference.mass() * &x,
        x.transpose() * reference.free() * &x,
        x.transpose() * v_ref * &x,
        SplitSpace::leading(dim, n_plus),
    )?;
    let s = SForm::assemble(&pair).with_ceiling(GAP_TOP)?;
    let minimax = solve_all(&s, k_max, opts)?;

    let levels = sommerfeld_levels(nu, config.kappa, 400).unwrap_or_default();
    let spurious: Vec<f64> = direct
        .iter()
        .copied()
        .filter(|&e| nearest(&levels, e) > SPURIOUS_DISTANCE)
        .collect();
    let minimax_distance: Vec<Option<f64>> = minimax
        .iter()
        .map(|r| (r.status == SolveStatus::Converged).then(|| nearest(&levels, r.lambda)))
        .collect();
    let pass = minimax_distance.iter().all(|d| d.is_none_or(|d| d <= MINIMAX_TOLERANCE));
    Ok(PollutionReport {
        nu,
        kappa: config.kappa,
        upper_refinement: config.upper_refinement,
        direct,
        spurious,
        minimax,
        minimax_distance,
        levels: levels.into_iter().take(k_max.max(3)).collect(),
        pass,
    })
}
