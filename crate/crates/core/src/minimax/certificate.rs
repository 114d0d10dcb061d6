use nalgebra::DMatrix;
use serde::Serialize;

use super::{schur_reduce, SForm};
use crate::{linalg, Error, Result, Scalar};

/// One matrix inequality `A ⪰ 0` (or sign equivalence) of the certificate.
#[derive(Clone, Debug, Serialize)]
pub struct CertificateCheck {
    pub name: &'static str,
    /// Smallest eigenvalue of the slack matrix; for sign checks, the
    /// smallest eigenvalue of `G_u`.
    pub slack: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityReport {
    pub u: f64,
    pub u2: f64,
    pub tolerance: f64,
    pub checks: Vec<CertificateCheck>,
}

impl MonotonicityReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn min_slack(&self) -> f64 {
        self.checks
            .iter()
            .filter(|c| c.name.starts_with("N") || c.name.starts_with("G"))
            .map(|c| c.slack)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Matrix inequalities relating the reductions at `a < u <= u2`:
///
/// * `N_u2 ⪯ N_u ⪯ ((u2 - a)/(u - a))² N_u2`
/// * `(u2 - u) N_u2 ⪯ G_u - G_u2 ⪯ (u2 - u) N_u`
///
/// and, when `lambda_1` is given, `λ_1 > u ⇔ G_u ≻ 0` and `λ_1 >= u ⇔ G_u ⪰ 0`
/// (checked at both shifts).
pub fn monotonicity_certificate<T: Scalar>(
    s: &SForm<T>,
    u: f64,
    u2: f64,
    lambda_1: Option<f64>,
) -> Result<MonotonicityReport> {
    if u2 < u {
        return Err(Error::InvalidParameter(format!("shifts must satisfy u <= u2, got {u} > {u2}")));
    }
    let r1 = schur_reduce(s, u)?;
    let r2 = schur_reduce(s, u2)?;
    let ratio = if s.n_minus() == 0 {
        1.0
    } else {
        (u2 - s.a()) / (u - s.a())
    };
    let du = T::from_real(u2 - u);
    let scale = 1f64
        .max(linalg::spectral_norm(&r1.n) * ratio * ratio)
        .max(linalg::spectral_norm(&r1.g))
        .max(linalg::spectral_norm(&r2.g));
    let tolerance = 1e-10 * scale;
    let dg = &r1.g - &r2.g;
    let slack = |m: DMatrix<T>| linalg::min_eig(&m);
    let mut checks = Vec::new();
    let mut push = |name, value: f64| {
        checks.push(CertificateCheck {
            name,
            slack: value,
            pass: value >= -tolerance,
        })
    };
    push("N_u - N_u2", slack(&r1.n - &r2.n));
    push("r^2 N_u2 - N_u", slack(&r2.n * T::from_real(ratio * ratio) - &r1.n));
    push("G_u - G_u2 - (u2-u) N_u2", slack(&dg - &r2.n * du));
    push("(u2-u) N_u - (G_u - G_u2)", slack(&r1.n * du - &dg));

    if let Some(lambda) = lambda_1 {
        let band = 1e-8 * (1.0 + lambda.abs());
        for (shift, red) in [(u, &r1), (u2, &r2)] {
            let g_min = linalg::min_eig(&red.g);
            // Skip shifts that sit on the eigenvalue within solver accuracy.
            if (lambda - shift).abs() <= band {
                continue;
            }
            let definite = g_min > 0.0;
            let consistent = (lambda > shift) == definite;
            checks.push(CertificateCheck {
                name: "sign: lambda_1 > u iff G_u > 0",
                slack: g_min,
                pass: consistent,
            });
            checks.push(CertificateCheck {
                name: "sign: lambda_1 >= u iff G_u >= 0",
                slack: g_min,
                pass: (lambda >= shift) == (g_min >= -tolerance),
            });
        }
    }
    Ok(MonotonicityReport {
        u,
        u2,
        tolerance,
        checks,
    })
}
