//! Bracketing scans and safeguarded root iteration for scalar functions.

/// Evaluated point of a bracket scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub u: f64,
    pub value: f64,
}

/// Outcome of scanning a (presumed decreasing) function for a sign change.
#[derive(Clone, Debug)]
pub struct Scan {
    /// Samples in increasing `u`, up to and including the first nonpositive value.
    pub samples: Vec<Sample>,
    /// `(lo, hi)` with `f(lo) > 0 >= f(hi)`, if a sign change was found.
    pub bracket: Option<(Sample, Sample)>,
}

impl Scan {
    /// True if the sampled values strictly decrease.
    pub fn strictly_decreasing(&self) -> bool {
        self.samples.windows(2).all(|w| w[1].value < w[0].value)
    }
}

/// Scan grid on `[lo, hi]`: `n_geo` points clustered geometrically toward
/// `lo` merged with `n_uni` uniformly spaced points. Sorted, deduplicated.
pub fn scan_grid(lo: f64, hi: f64, n_geo: usize, n_uni: usize) -> Vec<f64> {
    assert!(hi > lo, "empty scan interval");
    let width = hi - lo;
    let mut grid = Vec::with_capacity(n_geo + n_uni + 2);
    grid.push(lo);
    // Offsets from 1e-6·width to width, geometric.
    let first = 1e-6_f64;
    for i in 0..n_geo {
        let t = i as f64 / n_geo.max(1) as f64;
        grid.push(lo + width * first.powf(1.0 - t));
    }
    for i in 1..n_uni {
        grid.push(lo + width * i as f64 / n_uni as f64);
    }
    grid.push(hi);
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() <= f64::EPSILON * (1.0 + b.abs()));
    grid
}

/// Evaluate `f` along `grid` until the first sign change from positive to
/// nonpositive.
pub fn scan_for_sign_change<F: FnMut(f64) -> f64>(grid: &[f64], mut f: F) -> Scan {
    let mut samples: Vec<Sample> = Vec::new();
    for &u in grid {
        let s = Sample { u, value: f(u) };
        samples.push(s);
        if s.value <= 0.0 {
            let bracket = if samples.len() >= 2 {
                Some((samples[samples.len() - 2], s))
            } else {
                None
            };
            return Scan { samples, bracket };
        }
    }
    Scan { samples, bracket: None }
}

/// Result of a bracketed root iteration.
#[derive(Clone, Copy, Debug)]
pub struct Root {
    pub x: f64,
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Hybrid bisection/secant on a bracket with `f(lo) > 0 >= f(hi)` (or the
/// reverse signs). Terminates when the bracket width is at most
/// `rel_tol·(1 + |x|)` or after `max_iter` iterations.
pub fn hybrid_root<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: Sample,
    mut hi: Sample,
    rel_tol: f64,
    max_iter: usize,
) -> Root {
    assert!(lo.u < hi.u, "bracket must be ordered");
    let lo_positive = lo.value > 0.0;
    if hi.value == 0.0 {
        return Root {
            x: hi.u,
            lo: lo.u,
            hi: hi.u,
            iterations: 0,
            converged: true,
        };
    }
    let mut last_width = hi.u - lo.u;
    let mut iterations = 0;
    while iterations < max_iter {
        let width = hi.u - lo.u;
        let mid = 0.5 * (lo.u + hi.u);
        if width <= rel_tol * (1.0 + mid.abs()) {
            break;
        }
        iterations += 1;
        // Secant through the bracket ends, kept well inside the bracket;
        // bisect when the previous step failed to halve the width.
        let secant = hi.u - hi.value * (hi.u - lo.u) / (hi.value - lo.value);
        let margin = 0.01 * width;
        let x = if width <= 0.5 * last_width && secant.is_finite() && secant > lo.u + margin && secant < hi.u - margin {
            secant
        } else {
            mid
        };
        last_width = width;
        let s = Sample { u: x, value: f(x) };
        if s.value == 0.0 {
            return Root {
                x,
                lo: x,
                hi: x,
                iterations,
                converged: true,
            };
        }
        if (s.value > 0.0) == lo_positive {
            lo = s;
        } else {
            hi = s;
        }
    }
    let width = hi.u - lo.u;
    // Report the interpolated point inside the final bracket.
    let x = if hi.value != lo.value {
        (hi.u - hi.value * width / (hi.value - lo.value)).clamp(lo.u, hi.u)
    } else {
        0.5 * (lo.u + hi.u)
    };
    Root {
        x,
        lo: lo.u,
        hi: hi.u,
        iterations,
        converged: width <= rel_tol * (1.0 + x.abs()),
    }
}

/// Plain bisection for a continuous function with a sign change on `[lo, hi]`.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    assert!(f_lo * f(hi) <= 0.0, "no sign change on [{lo}, {hi}]");
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if mid == lo && mid == hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_sorted_and_spans_interval() {
        let g = scan_grid(-1.0, 3.0, 20, 20);
        assert_eq!(g[0], -1.0);
        assert_eq!(*g.last().unwrap(), 3.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(g[1] - g[0] < 1e-4);
    }

    #[test]
    fn scan_finds_first_sign_change() {
        let grid = scan_grid(0.0, 10.0, 10, 50);
        let scan = scan_for_sign_change(&grid, |u| 3.0 - u);
        let (lo, hi) = scan.bracket.unwrap();
        assert!(lo.u < 3.0 && hi.u >= 3.0);
        assert!(scan.strictly_decreasing());
        assert_eq!(scan.samples.last().unwrap().u, hi.u);
    }

    #[test]
    fn scan_without_sign_change() {
        let grid = scan_grid(0.0, 1.0, 5, 5);
        let scan = scan_for_sign_change(&grid, |u| 2.0 - u);
        assert!(scan.bracket.is_none());
        assert_eq!(scan.samples.len(), grid.len());
    }

    #[test]
    fn hybrid_converges_on_quadratic() {
        let f = |u: f64| 1.25 - u * u;
        let lo = Sample { u: 0.0, value: f(0.0) };
        let hi = Sample { u: 3.0, value: f(3.0) };
        let root = hybrid_root(f, lo, hi, 1e-12, 200);
        assert!(root.converged);
        assert!((root.x - 1.25_f64.sqrt()).abs() < 1e-12);
        assert!(root.iterations < 60);
    }

    #[test]
    fn hybrid_handles_flat_then_steep() {
        let f = |u: f64| if u < 0.9 { 1e-9 * (0.9 - u) + 1e-12 } else { -(u - 0.9).powi(3) - 1e-15 };
        let lo = Sample { u: 0.0, value: f(0.0) };
        let hi = Sample { u: 1.0, value: f(1.0) };
        let root = hybrid_root(f, lo, hi, 1e-12, 200);
        assert!(root.converged);
        assert!((root.x - 0.9).abs() < 1e-10);
    }

    #[test]
    fn bisection_solves_cubic() {
        let gamma = bisect(|g| 2.0 * g * g * g - 3.0 * g * g + 4.0 * g - 1.0, 0.0, 1.0, 1e-15);
        // Cardano: depressed cubic t³ + pt + q with g = t + 1/2.
        let (p, q) = (1.25_f64, 0.25_f64);
        let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
        let cardano = (-q / 2.0 + disc).cbrt() + (-q / 2.0 - disc).cbrt() + 0.5;
        assert!((gamma - cardano).abs() < 1e-14);
        assert!((gamma - 0.3).abs() < 0.01);
        assert!((2.0 * gamma.powi(3) - 3.0 * gamma.powi(2) + 4.0 * gamma - 1.0).abs() < 1e-13);
    }
}
