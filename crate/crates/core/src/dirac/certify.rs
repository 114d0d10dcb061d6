use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

use super::channel::KappaChannel;
use super::solve::{channel_pair, SplitKind};
use crate::minimax::{schur_reduce, SForm};
use crate::{linalg, Error, Result};

/// Constant of the Kato inequality in the squared form used here.
pub const KATO_CONSTANT: f64 = std::f64::consts::FRAC_PI_2;

#[derive(Clone, Debug, Serialize)]
pub struct KatoReport {
    pub nu: f64,
    pub eps: f64,
    pub samples: usize,
    /// `max m[L x+] / ‖x+‖²_{H^1/2}` over the samples.
    pub max_ratio: f64,
    pub bound: f64,
    pub violations: usize,
    pub pass: bool,
}

/// Check `m[L x+] <= (π/2)·‖x+‖²_{H^1/2}` for the maximiser `L x+` at `u = 0`.
///
/// Here `m[y] = -s[y]` on `D-`, `L = (-S--)⁻¹ S-+`, and the `H^1/2` norm is
/// the form of `|H₀|` restricted to `D+`. Samples: every block-coordinate
/// basis vector of `D+` plus `random` Gaussian combinations.
pub fn kato_certificate<R: Rng + ?Sized>(
    channel: &KappaChannel,
    nu: f64,
    eps: f64,
    split: SplitKind,
    random: usize,
    rng: &mut R,
) -> Result<KatoReport> {
    let pair = channel_pair(channel, nu, eps, split)?;
    let x = pair.block_basis().clone();
    let block = pair.to_block_coordinates();
    let s = SForm::assemble(&block);
    let np = s.n_plus();
    let red = schur_reduce(&s, 0.0)?;
    let h = x.transpose() * channel.h_half_metric() * &x;
    let h_plus = h.view((0, 0), (np, np)).into_owned();
    let s_mm = &s.blocks().mm;

    let mut max_ratio: f64 = 0.0;
    let mut violations = 0;
    let mut check = |xp: &DVector<f64>| {
        let y = &red.l * xp;
        let m = -linalg::quad(s_mm, &y);
        let hv = linalg::quad(&h_plus, xp);
        if hv > 0.0 {
            max_ratio = max_ratio.max(m / hv);
        }
        if m > KATO_CONSTANT * hv + 1e-8 * hv.max(1.0) {
            violations += 1;
        }
    };
    for i in 0..np {
        let mut e = DVector::zeros(np);
        e[i] = 1.0;
        check(&e);
    }
    for _ in 0..random {
        let xp = DVector::from_fn(np, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
        check(&xp);
    }
    Ok(KatoReport {
        nu,
        eps,
        samples: np + random,
        max_ratio,
        bound: KATO_CONSTANT,
        violations,
        pass: violations == 0,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ContinuationRow {
    /// `g_{ν,0}[x+]`.
    pub g0: f64,
    /// `g_{ν,ε}[x+] - g_{ν,0}[x+]` along the ε list.
    pub differences: Vec<f64>,
    /// `‖x+‖²_{H^1/2}`, the scale of the tolerance.
    pub scale: f64,
    pub monotone: bool,
    pub final_ok: bool,
    /// `g_ε >= 0` for every sampled ε implies `g_0 >= -1e-10·scale`.
    pub transfer_ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ContinuationReport {
    pub nu: f64,
    pub u: f64,
    pub eps_list: Vec<f64>,
    pub tolerance: f64,
    pub rows: Vec<ContinuationRow>,
    pub pass: bool,
}

/// `g_{ν,ε}[x+] → g_{ν,0}[x+]` as `ε ↘ 0`, at a fixed shift `u`.
///
/// `x_plus` are block coordinates of `D+` for the chosen split (the split
/// depends only on the free form, so it is shared by every ε). The
/// differences must decrease along `eps_list` and end below
/// `tolerance·‖x+‖²_{H^1/2}`.
pub fn epsilon_continuation(
    channel: &KappaChannel,
    nu: f64,
    eps_list: &[f64],
    u: f64,
    split: SplitKind,
    x_plus: &[DVector<f64>],
    tolerance: f64,
) -> Result<ContinuationReport> {
    if eps_list.iter().any(|&e| !(e > 0.0)) || eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("eps_list must be positive and strictly decreasing".into()));
    }
    let g_at = |eps: f64| -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let pair = channel_pair(channel, nu, eps, split)?;
        let x = pair.block_basis().clone();
        let s = SForm::assemble(&pair.to_block_coordinates());
        Ok((schur_reduce(&s, u)?.g, x))
    };
    let (g0, x) = g_at(0.0)?;
    let np = g0.nrows();
    let h = x.transpose() * channel.h_half_metric() * &x;
    let h_plus = h.view((0, 0), (np, np)).into_owned();
    let g_eps = eps_list.iter().map(|&e| g_at(e).map(|(g, _)| g)).collect::<Result<Vec<_>>>()?;

    let rows: Vec<ContinuationRow> = x_plus
        .iter()
        .map(|xp| {
            let base = linalg::quad(&g0, xp);
            let scale = linalg::quad(&h_plus, xp).max(f64::MIN_POSITIVE);
            let values: Vec<f64> = g_eps.iter().map(|g| linalg::quad(g, xp)).collect();
            let differences: Vec<f64> = values.iter().map(|v| v - base).collect();
            let slack = 1e-12 * scale;
            let monotone = differences.windows(2).all(|w| w[1] <= w[0] + slack);
            let final_ok = differences.last().is_none_or(|d| d.abs() <= tolerance * scale);
            let transfer_ok = !values.iter().all(|&v| v >= 0.0) || base >= -1e-10 * scale;
            ContinuationRow {
                g0: base,
                differences,
                scale,
                monotone,
                final_ok,
                transfer_ok,
            }
        })
        .collect();
    let pass = rows.iter().all(|r| r.monotone && r.final_ok && r.transfer_ok);
    Ok(ContinuationReport {
        nu,
        u,
        eps_list: eps_list.to_vec(),
        tolerance,
        rows,
        pass,
    })
}

/// `D+` block coordinates of the lowest `count` gap eigenvectors of
/// `(W + V_{ν,0}, M)`, for use as continuation samples.
pub fn gap_state_components(channel: &KappaChannel, nu: f64, split: SplitKind, count: usize) -> Result<Vec<DVector<f64>>> {
    let pair = channel_pair(channel, nu, 0.0, split)?;
    let x = pair.block_basis();
    let np = pair.n_plus();
    let (values, z) = linalg::pencil_eigh(&(pair.q() + pair.v()), pair.m())?;
    let coords = x.transpose() * pair.m() * z;
    Ok((0..values.len())
        .filter(|&i| values[i].abs() < super::GAP_TOP)
        .take(count)
        .map(|i| coords.view((0, i), (np, 1)).column(0).into_owned())
        .collect())
}
