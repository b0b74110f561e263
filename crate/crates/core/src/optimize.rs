//! Derivative-free maximization of a scalar function on an interval.
//!
//! A coarse pre-scan locates the best grid point and records whether the
//! sampled values rise then fall; golden-section search then refines inside
//! the two grid cells adjacent to the best point.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Result of [`maximize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    /// Location of the maximum.
    pub x: f64,
    /// Function value there.
    pub value: f64,
    /// Number of function evaluations.
    pub evaluations: usize,
    /// Whether the pre-scan looked unimodal.
    pub unimodal: bool,
}

/// Options for [`maximize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchSpec {
    /// Grid points in the pre-scan, at least 3.
    pub prescan: usize,
    /// Absolute tolerance on the location.
    pub x_tol: f64,
}

impl Default for SearchSpec {
    fn default() -> Self {
        Self {
            prescan: 33,
            x_tol: 1e-8,
        }
    }
}

/// Golden-section search for a maximum of a unimodal `f` on `[lo, hi]`.
pub fn golden_section<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    x_tol: f64,
) -> Maximum {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let mut evaluations = 2;
    while hi - lo > x_tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
        evaluations += 1;
    }
    let (x, value) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    Maximum {
        x,
        value,
        evaluations,
        unimodal: true,
    }
}

/// Maximizes `f` on `[lo, hi]`: grid pre-scan, then golden-section
/// refinement around the best grid point. Endpoints are candidates.
pub fn maximize<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, spec: &SearchSpec) -> Result<Maximum> {
    let n = spec.prescan.max(3);
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::BracketFailure { lo, hi });
    }
    let step = (hi - lo) / (n - 1) as f64;
    let xs = |i: usize| if i + 1 == n { hi } else { lo + step * i as f64 };
    let mut values = alloc::vec::Vec::with_capacity(n);
    for i in 0..n {
        let v = f(xs(i));
        if v.is_nan() {
            return Err(Error::BracketFailure { lo, hi });
        }
        values.push(v);
    }
    let best = (0..n).fold(0, |b, i| if values[i] > values[b] { i } else { b });
    // Unimodal if non-decreasing up to `best` and non-increasing after it.
    let unimodal = values[..=best].windows(2).all(|w| w[1] >= w[0])
        && values[best..].windows(2).all(|w| w[1] <= w[0]);
    let a = xs(best.saturating_sub(1));
    let b = xs((best + 1).min(n - 1));
    let mut refined = golden_section(&mut f, a, b, spec.x_tol);
    refined.evaluations += n;
    refined.unimodal = unimodal;
    if values[best] > refined.value {
        refined.x = xs(best);
        refined.value = values[best];
    }
    Ok(refined)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn golden_finds_parabola_peak() {
        let m = golden_section(|x| -(x - 0.3) * (x - 0.3), -1.0, 2.0, 1e-10);
        assert_abs_diff_eq!(m.x, 0.3, epsilon = 1e-8);
    }

    #[test]
    fn boundary_maximum() {
        let m = maximize(|x| -x, 0.0, 3.0, &SearchSpec::default()).unwrap();
        assert!(m.x < 1e-8);
        assert_abs_diff_eq!(m.value, 0.0, epsilon = 1e-8);
        let m = maximize(|x| x, 0.0, 3.0, &SearchSpec::default()).unwrap();
        assert_abs_diff_eq!(m.x, 3.0, epsilon = 1e-8);
    }

    #[test]
    fn bimodal_is_flagged_and_global_peak_found() {
        let f = |x: f64| libm::exp(-(x - 1.0) * (x - 1.0) * 20.0) + 2.0 * libm::exp(-(x - 4.0) * (x - 4.0) * 20.0);
        let m = maximize(f, 0.0, 5.0, &SearchSpec { prescan: 101, x_tol: 1e-9 }).unwrap();
        assert!(!m.unimodal);
        assert_abs_diff_eq!(m.x, 4.0, epsilon = 1e-6);
    }

    #[test]
    fn bad_interval() {
        assert!(matches!(
            maximize(|x| x, 1.0, 1.0, &SearchSpec::default()),
            Err(Error::BracketFailure { .. })
        ));
        assert!(maximize(|_| f64::NAN, 0.0, 1.0, &SearchSpec::default()).is_err());
    }
}
