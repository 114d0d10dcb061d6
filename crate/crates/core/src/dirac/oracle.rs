use serde::Serialize;

use crate::root::bisect;
use crate::{Error, Result};

/// Closed-form Dirac-Coulomb level (units `m = c = 1`):
/// `E = (1 + ν²/(n_r + √(κ² - ν²))²)^(-1/2)`.
///
/// `n_r` starts at 0 for `κ < 0` and at 1 for `κ > 0`.
pub fn sommerfeld_oracle(nu: f64, kappa: i32, n_r: u32) -> Result<f64> {
    if kappa == 0 {
        return Err(Error::InvalidKappa);
    }
    if !(nu >= 0.0) {
        return Err(Error::InvalidParameter(format!("nu must be nonnegative, got {nu}")));
    }
    let k = kappa as f64;
    if nu >= k.abs() {
        return Err(Error::Overcritical { nu, kappa });
    }
    if kappa > 0 && n_r == 0 {
        return Err(Error::InvalidParameter(format!("n_r = 0 does not exist for kappa = {kappa} > 0")));
    }
    let denom = n_r as f64 + (k * k - nu * nu).sqrt();
    Ok((1.0 + nu * nu / (denom * denom)).powf(-0.5))
}

/// The lowest `count` closed-form levels of channel `κ`, ascending.
pub fn sommerfeld_levels(nu: f64, kappa: i32, count: usize) -> Result<Vec<f64>> {
    let start = u32::from(kappa > 0);
    (0..count as u32).map(|i| sommerfeld_oracle(nu, kappa, start + i)).collect()
}

/// Coupling thresholds, each computed from its defining expression.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Thresholds {
    /// Real root of `2γ³ - 3γ² + 4γ = 1`.
    pub gls: f64,
    /// `√3/2`.
    pub core: f64,
    /// `2/(2/π + π/2)`.
    pub talman: f64,
    /// Open upper end of the admissible class.
    pub p1: f64,
}

impl Thresholds {
    pub fn compute() -> Self {
        use std::f64::consts::PI;
        let gls = bisect(|g| 2.0 * g * g * g - 3.0 * g * g + 4.0 * g - 1.0, 0.0, 1.0, 1e-16);
        Self {
            gls,
            core: 3.0_f64.sqrt() / 2.0,
            talman: 2.0 / (2.0 / PI + PI / 2.0),
            p1: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CouplingRegime {
    pub nu: f64,
    pub in_p1: bool,
    pub talman_ok: bool,
    pub core_regime: bool,
    pub gls_regime: bool,
}

/// Independent flags against each threshold.
pub fn regime_classify(nu: f64) -> CouplingRegime {
    let t = Thresholds::compute();
    CouplingRegime {
        nu,
        in_p1: nu < t.p1,
        talman_ok: nu <= t.talman,
        core_regime: nu <= t.core,
        gls_regime: nu <= t.gls,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        assert_eq!(sommerfeld_oracle(0.0, -1, 0).unwrap(), 1.0);
        assert!((sommerfeld_oracle(0.5, -1, 0).unwrap() - 0.75_f64.sqrt()).abs() < 1e-15);
        assert!((sommerfeld_oracle(0.5, -1, 0).unwrap() - 0.8660254038).abs() < 1e-10);
        assert!((sommerfeld_oracle(0.5, -1, 1).unwrap() - 0.9659258263).abs() < 1e-10);
        assert!((sommerfeld_oracle(0.9, -1, 0).unwrap() - 0.4358898944).abs() < 1e-10);
        // κ = +1 lowest level coincides with κ = -1, n_r = 1.
        assert_eq!(sommerfeld_oracle(0.5, 1, 1).unwrap(), sommerfeld_oracle(0.5, -1, 1).unwrap());
    }

    #[test]
    fn invalid_inputs() {
        assert!(matches!(sommerfeld_oracle(1.0, -1, 0), Err(Error::Overcritical { .. })));
        assert!(matches!(sommerfeld_oracle(0.5, 0, 0), Err(Error::InvalidKappa)));
        assert!(sommerfeld_oracle(0.5, 2, 0).is_err());
        assert!(sommerfeld_oracle(1.5, 2, 1).is_ok());
    }

    #[test]
    fn thresholds_are_ordered() {
        let t = Thresholds::compute();
        assert!(t.gls < t.core && t.core < t.talman && t.talman < t.p1);
        assert!((t.gls - 0.3).abs() < 0.01);
        assert!((t.talman - 0.906036).abs() < 1e-6);
    }

    #[test]
    fn regime_examples() {
        let r = regime_classify(0.5);
        assert!(r.in_p1 && r.talman_ok && r.core_regime && !r.gls_regime);
        let r = regime_classify(0.95);
        assert!(r.in_p1 && !r.talman_ok && !r.core_regime && !r.gls_regime);
        let r = regime_classify(1.0);
        assert!(!r.in_p1);
        assert!(regime_classify(0.2).gls_regime);
    }

    /// RK4 in `t = ln r` for `P' = -κP/r + (E + 1 - V)Q`, `Q' = κQ/r - (E - 1 - V)P`
    /// with `V = -ν/r`, starting on the regular branch `Q/P = (κ + γ)/ν`.
    fn shoot(nu: f64, kappa: f64, e: f64, r_end: f64) -> f64 {
        let g = (kappa * kappa - nu * nu).sqrt();
        let rhs = |t: f64, y: [f64; 2]| {
            let r = t.exp();
            let v = -nu / r;
            [
                -kappa * y[0] + r * (e + 1.0 - v) * y[1],
                kappa * y[1] - r * (e - 1.0 - v) * y[0],
            ]
        };
        let (t0, t1) = (1e-8_f64.ln(), r_end.ln());
        let steps = 40_000;
        let h = (t1 - t0) / steps as f64;
        let mut y = [1.0, (kappa + g) / nu];
        let mut t = t0;
        for _ in 0..steps {
            let k1 = rhs(t, y);
            let k2 = rhs(t + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
            let k3 = rhs(t + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
            let k4 = rhs(t + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
            for i in 0..2 {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            t += h;
            let scale = y[0].abs().max(y[1].abs());
            if scale > 1e100 {
                y = [y[0] / scale, y[1] / scale];
            }
        }
        y[0]
    }

    #[test]
    fn closed_form_matches_shooting() {
        for (nu, kappa, n_r) in [(0.5, -1, 0), (0.5, -1, 1), (0.9, -1, 0)] {
            let e0 = sommerfeld_oracle(nu, kappa, n_r).unwrap();
            let decay = (1.0 - e0 * e0).sqrt();
            let r_end = 30.0 / decay;
            let f = |e: f64| shoot(nu, kappa as f64, e, r_end);
            let (lo, hi) = (e0 - 5e-3, e0 + 5e-3);
            assert!(f(lo) * f(hi) < 0.0, "no sign change around {e0}");
            let e = bisect(f, lo, hi, 1e-13);
            assert!((e - e0).abs() < 1e-7, "nu {nu} n_r {n_r}: shooting {e} vs {e0}");
        }
    }
}
