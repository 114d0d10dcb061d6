use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::channel::KappaChannel;
use super::oracle::{regime_classify, sommerfeld_oracle, CouplingRegime};
use crate::forms::{check_all, default_tolerance, ConditionReport, FormPair};
use crate::minimax::{multiplicity, solve_all, solve_lambda_k, MinimaxResult, SForm, SolveOptions, SolveStatus};
use crate::{Error, Result};

/// Upper gap edge of every Dirac channel.
pub const GAP_TOP: f64 = 1.0;

/// Coupling above which a resolution warning is logged.
pub const WARN_NU: f64 = 0.95;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SplitKind {
    /// Free spectral projectors.
    P,
    /// Upper/lower components.
    T,
}

impl fmt::Display for SplitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplitKind::P => "P",
            SplitKind::T => "T",
        })
    }
}

impl FromStr for SplitKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "P" | "p" => Ok(SplitKind::P),
            "T" | "t" => Ok(SplitKind::T),
            other => Err(Error::InvalidParameter(format!("unknown split {other:?}, expected P or T"))),
        }
    }
}

/// `q` = free form, `v` = Coulomb form `-ν/(r + ε)`, with the chosen split.
pub fn channel_pair(channel: &KappaChannel, nu: f64, eps: f64, split: SplitKind) -> Result<FormPair<f64>> {
    let v = channel.coulomb(nu, eps)?;
    let split = match split {
        SplitKind::P => channel.p_split()?,
        SplitKind::T => channel.t_split(),
    };
    FormPair::new(channel.mass().clone(), channel.free().clone(), v, split)
}

/// Refuse `ν >= 1` and overcritical channels; warn from [`WARN_NU`] on.
pub fn check_coupling(nu: f64, kappa: i32) -> Result<CouplingRegime> {
    if !(nu >= 0.0) {
        return Err(Error::InvalidParameter(format!("nu must be nonnegative, got {nu}")));
    }
    let regime = regime_classify(nu);
    if !regime.in_p1 {
        return Err(Error::RegimeViolation {
            nu,
            reason: "the admissible class requires nu < 1".into(),
        });
    }
    if nu >= kappa.unsigned_abs() as f64 {
        return Err(Error::Overcritical { nu, kappa });
    }
    if nu >= WARN_NU {
        log::warn!("nu = {nu} is close to 1: the r^sqrt(kappa^2 - nu^2) behaviour at the origin needs a fine basis");
    }
    Ok(regime)
}

#[derive(Clone, Debug)]
pub struct ChannelSolveOptions {
    pub k_max: usize,
    pub eps: f64,
    /// Proceed with the T split above the Talman threshold.
    pub force: bool,
    pub solve: SolveOptions,
}

impl Default for ChannelSolveOptions {
    fn default() -> Self {
        Self {
            k_max: 1,
            eps: 0.0,
            force: false,
            solve: SolveOptions::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ChannelSolution {
    pub kappa: i32,
    pub nu: f64,
    pub eps: f64,
    pub split: SplitKind,
    pub a: f64,
    pub regime: CouplingRegime,
    pub results: Vec<MinimaxResult>,
    /// Abstract indices whose level sits at or below `a` and were skipped.
    pub below_gap: usize,
    /// Closed-form level matching each `k` (only for `ε = 0`).
    pub oracle: Vec<Option<f64>>,
    /// Form conditions (P split only).
    pub conditions: Option<ConditionReport>,
}

impl ChannelSolution {
    pub fn errors(&self) -> Vec<Option<f64>> {
        self.results
            .iter()
            .zip(&self.oracle)
            .map(|(r, o)| o.map(|o| (r.lambda - o).abs()))
            .collect()
    }
}

/// Gap eigenvalues `λ_1..λ_{k_max}` of one channel in `(a, 1)`.
///
/// For the P split the form conditions are checked first and a failure
/// aborts. For the T split the free form is not block diagonal, so the
/// q-specific checks are skipped and the a-posteriori check `G_λ1 ⪰ 0`
/// carried by the first result stands in for them.
///
/// `k` counts levels inside the gap: indices whose level falls on the lower
/// edge are skipped and counted in `below_gap`.
pub fn solve_channel(channel: &KappaChannel, nu: f64, split: SplitKind, opts: &ChannelSolveOptions) -> Result<ChannelSolution> {
    let regime = check_coupling(nu, channel.kappa())?;
    if split == SplitKind::T && !regime.talman_ok {
        if opts.force {
            log::warn!("T split at nu = {nu} above 2/(2/pi + pi/2): proceeding as requested");
        } else {
            return Err(Error::RegimeViolation {
                nu,
                reason: "T split requires nu <= 2/(2/pi + pi/2); pass --force to proceed".into(),
            });
        }
    }
    let pair = channel_pair(channel, nu, opts.eps, split)?.to_block_coordinates();
    let conditions = if split == SplitKind::P {
        let report = check_all(&pair, default_tolerance(&pair));
        if !report.all_pass() {
            return Err(Error::FormCheckFailed(Box::new(report)));
        }
        Some(report)
    } else {
        None
    };
    let s = SForm::assemble(&pair).with_ceiling(GAP_TOP)?;
    let mut results = solve_all(&s, opts.k_max, &opts.solve)?;
    // A lower basis one function short of the upper one leaves a D+ direction
    // that pairs with the negative continuum; its index lands on the lower edge.
    let mut below_gap = results.iter().take_while(|r| r.status == SolveStatus::LowerEdge).count();
    while below_gap > 0 && results.len() < opts.k_max + below_gap && results.len() < s.n_plus() {
        results.push(solve_lambda_k(&s, results.len() + 1, &opts.solve)?);
        below_gap = results.iter().take_while(|r| r.status == SolveStatus::LowerEdge).count();
    }
    let mut results: Vec<MinimaxResult> = results.into_iter().skip(below_gap).collect();
    multiplicity(&mut results, None);
    let start = u32::from(channel.kappa() > 0);
    let oracle = (0..results.len() as u32)
        .map(|i| {
            if opts.eps == 0.0 {
                sommerfeld_oracle(nu, channel.kappa(), start + i).ok()
            } else {
                None
            }
        })
        .collect();
    Ok(ChannelSolution {
        kappa: channel.kappa(),
        nu,
        eps: opts.eps,
        split,
        a: s.a(),
        regime,
        results,
        below_gap,
        oracle,
        conditions,
    })
}
