use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// B-splines of a given order on exponentially graded breakpoints
/// `r_j = r_max·expm1(g·j/N)/expm1(g)`, `j = 0..=N`, with the first and last
/// functions removed so that every kept function vanishes at `0` and
/// `r_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialBasis {
    r_max: f64,
    order: usize,
    grading: f64,
    breakpoints: Vec<f64>,
    knots: Vec<f64>,
}

impl RadialBasis {
    pub fn new(r_max: f64, intervals: usize, order: usize, grading: f64) -> Result<Self> {
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(Error::InvalidParameter(format!("r_max must be positive, got {r_max}")));
        }
        if order < 2 {
            return Err(Error::InvalidParameter(format!("spline order must be at least 2, got {order}")));
        }
        if intervals < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 knot intervals, got {intervals}")));
        }
        if !(grading >= 0.0) {
            return Err(Error::InvalidParameter(format!("grading must be nonnegative, got {grading}")));
        }
        let n = intervals as f64;
        let breakpoints: Vec<f64> = (0..=intervals)
            .map(|j| {
                if j == intervals {
                    r_max
                } else if grading == 0.0 {
                    r_max * j as f64 / n
                } else {
                    r_max * (grading * j as f64 / n).exp_m1() / grading.exp_m1()
                }
            })
            .collect();
        let p = order - 1;
        let mut knots = vec![0.0; p];
        knots.extend_from_slice(&breakpoints);
        knots.extend(std::iter::repeat_n(r_max, p));
        Ok(Self {
            r_max,
            order,
            grading,
            breakpoints,
            knots,
        })
    }

    /// Basis with `n_splines` kept functions.
    pub fn with_count(r_max: f64, n_splines: usize, order: usize, grading: f64) -> Result<Self> {
        let intervals = (n_splines + 3)
            .checked_sub(order)
            .filter(|&n| n >= 2)
            .ok_or_else(|| Error::InvalidParameter(format!("{n_splines} splines too few for order {order}")))?;
        Self::new(r_max, intervals, order, grading)
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn grading(&self) -> f64 {
        self.grading
    }

    pub fn intervals(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Number of kept functions (the two boundary splines are dropped).
    pub fn len(&self) -> usize {
        self.intervals() + self.order - 3
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Knot interval containing `r` (the last interval is closed).
    pub fn interval_of(&self, r: f64) -> usize {
        let m = self.breakpoints.partition_point(|&b| b <= r);
        m.clamp(1, self.intervals()) - 1
    }

    /// Values and first derivatives of the `order` splines that can be
    /// nonzero at `r`, as `(first, values, derivatives)` where `first` is
    /// the kept-function index of the first entry (may be `-1` for the
    /// dropped boundary spline).
    pub fn eval(&self, r: f64) -> (isize, Vec<f64>, Vec<f64>) {
        let p = self.order - 1;
        let span = self.interval_of(r) + p;
        let u = &self.knots;
        // Triangular table of all degrees (Piegl & Tiller, A2.2).
        let mut ndu = vec![vec![0.0; p + 1]; p + 1];
        let mut left = vec![0.0; p + 1];
        let mut right = vec![0.0; p + 1];
        ndu[0][0] = 1.0;
        for j in 1..=p {
            left[j] = r - u[span + 1 - j];
            right[j] = u[span + j] - r;
            let mut saved = 0.0;
            for k in 0..j {
                ndu[j][k] = right[k + 1] + left[j - k];
                let temp = ndu[k][j - 1] / ndu[j][k];
                ndu[k][j] = saved + right[k + 1] * temp;
                saved = left[j - k] * temp;
            }
            ndu[j][j] = saved;
        }
        let values: Vec<f64> = (0..=p).map(|k| ndu[k][p]).collect();
        let first_global = span - p;
        let pf = p as f64;
        let derivs: Vec<f64> = (0..=p)
            .map(|k| {
                let g = first_global + k;
                let mut d = 0.0;
                if k >= 1 {
                    d += pf * ndu[k - 1][p - 1] / (u[g + p] - u[g]);
                }
                if k < p {
                    d -= pf * ndu[k][p - 1] / (u[g + p + 1] - u[g + 1]);
                }
                d
            })
            .collect();
        (first_global as isize - 1, values, derivs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_grading() {
        let b = RadialBasis::with_count(60.0, 200, 7, 10.0).unwrap();
        assert_eq!(b.intervals(), 196);
        assert_eq!(b.len(), 200);
        assert_eq!(b.breakpoints()[0], 0.0);
        assert_eq!(*b.breakpoints().last().unwrap(), 60.0);
        assert!(b.breakpoints()[1] < 2e-4);
    }

    #[test]
    fn partition_of_unity_and_derivative_sum() {
        let b = RadialBasis::new(10.0, 12, 7, 3.0).unwrap();
        for &r in &[0.0, 1e-3, 0.37, 2.0, 9.999, 10.0] {
            let (_, v, d) = b.eval(r);
            assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-13, "r = {r}");
            assert!(d.iter().sum::<f64>().abs() < 1e-9 * (1.0 + d.iter().map(|x| x.abs()).sum::<f64>()));
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let b = RadialBasis::new(5.0, 8, 5, 2.0).unwrap();
        let r = 1.234;
        let h = 1e-6;
        let (first, _, d) = b.eval(r);
        let (f1, vp, _) = b.eval(r + h);
        let (f2, vm, _) = b.eval(r - h);
        assert_eq!(first, f1);
        assert_eq!(first, f2);
        for k in 0..d.len() {
            let fd = (vp[k] - vm[k]) / (2.0 * h);
            assert!((fd - d[k]).abs() < 1e-6 * (1.0 + d[k].abs()), "{fd} vs {}", d[k]);
        }
    }

    #[test]
    fn kept_functions_vanish_at_ends() {
        let b = RadialBasis::new(4.0, 6, 4, 1.0).unwrap();
        let (first, v, _) = b.eval(0.0);
        assert_eq!(first, -1);
        assert!((v[0] - 1.0).abs() < 1e-15);
        assert!(v[1..].iter().all(|x| x.abs() < 1e-15));
        let (first, v, _) = b.eval(4.0);
        let last_kept = b.len() as isize - 1;
        assert_eq!(first + v.len() as isize - 1, last_kept + 1);
        assert!((v.last().unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn nested_grids_share_breakpoints() {
        let fine = RadialBasis::new(60.0, 200, 7, 10.0).unwrap();
        let coarse = RadialBasis::new(60.0, 100, 7, 10.0).unwrap();
        for (j, &c) in coarse.breakpoints().iter().enumerate() {
            assert!((fine.breakpoints()[2 * j] - c).abs() <= 1e-13 * c.max(1.0));
        }
    }
}
