//! Memoryless threshold rules: closed-form expected rank, numerical
//! optimization of the thresholds, and the parametric rational family of
//! Assaf and Samuel-Cahn.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::policy::Policy;

/// Upper cap for thresholds before the last: keeps the 1/(1 - a_j)
/// denominators of the closed form finite inside the optimizer.
const THRESHOLD_CAP: f64 = 1.0 - 1e-12;
const THRESHOLD_FLOOR: f64 = 1e-12;

/// Memoryless thresholds `0 < a_1 <= a_2 <= ... <= a_n = 1`.
///
/// The rule accepts observation k iff `X_k <= a_k`, ignoring history.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdVector {
    a: Vec<f64>,
}

impl ThresholdVector {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::input("threshold vector must be non-empty"));
        }
        if a[0] <= 0.0 {
            return Err(Error::input("first threshold must be positive"));
        }
        if a.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::input("thresholds must be nondecreasing"));
        }
        if *a.last().unwrap() != 1.0 {
            return Err(Error::input("last threshold must equal 1"));
        }
        Ok(ThresholdVector { a })
    }

    pub fn horizon(&self) -> usize {
        self.a.len()
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.a
    }
}

impl Policy for ThresholdVector {
    fn horizon(&self) -> usize {
        self.a.len()
    }
    fn threshold(&self, step: usize, _history: &[f64]) -> f64 {
        self.a[step - 1]
    }
}

/// Closed-form expected rank of a memoryless threshold rule:
///
/// 1 + (1/2) sum_{k<n} (n-k) a_k^2 prod_{j<k} (1-a_j)
///   + (1/2) sum_{k<=n} prod_{j<k} (1-a_j) sum_{j<k} (a_k-a_j)^2 / (1-a_j)
///
/// Thresholds equal to 1 before the last step are tolerated: their prefix
/// product vanishes, and monotonicity forces the paired differences to
/// vanish with it.
pub fn expected_rank(tv: &ThresholdVector) -> f64 {
    let a = tv.thresholds();
    let n = a.len();
    let mut total = 1.0;
    let mut prefix = 1.0; // prod_{j<k} (1 - a_j)
    for k in 1..=n {
        let ak = a[k - 1];
        if k < n {
            total += 0.5 * (n - k) as f64 * ak * ak * prefix;
        }
        if prefix > 0.0 {
            let mut sum = 0.0;
            for &aj in &a[..k - 1] {
                let d = ak - aj;
                if d > 0.0 {
                    sum += d * d / (1.0 - aj);
                }
            }
            total += 0.5 * prefix * sum;
        }
        prefix *= 1.0 - ak;
    }
    total
}

fn golden_min(mut lo: f64, mut hi: f64, xtol: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > xtol {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

fn coordinate_descent(
    mut a: Vec<f64>,
    obj_tol: f64,
    max_sweeps: usize,
) -> (Vec<f64>, f64, bool) {
    let n = a.len();
    let mut value = expected_rank(&ThresholdVector { a: a.clone() });
    for _ in 0..max_sweeps {
        let before = value;
        for k in 0..n - 1 {
            let lo = if k == 0 { THRESHOLD_FLOOR } else { a[k - 1] };
            let hi = a[k + 1].min(THRESHOLD_CAP);
            if hi <= lo {
                a[k] = lo;
                continue;
            }
            let current = &a;
            let (best_x, best_f) = golden_min(lo, hi, 1e-12, |x| {
                let mut t = current.clone();
                t[k] = x;
                expected_rank(&ThresholdVector { a: t })
            });
            if best_f < value {
                a[k] = best_x;
                value = best_f;
            }
        }
        if before - value < obj_tol {
            return (a, value, true);
        }
    }
    (a, value, false)
}

/// Minimizes [`expected_rank`] over all valid threshold vectors of
/// horizon `n` by multi-start coordinate descent with golden-section line
/// searches. Starts run concurrently; ties merge on the lowest start
/// index so the result is deterministic.
pub fn optimize(n: usize, tol: f64) -> Result<(ThresholdVector, f64)> {
    if n == 0 {
        return Err(Error::input("horizon must be at least 1"));
    }
    if tol <= 0.0 {
        return Err(Error::input("tolerance must be positive"));
    }
    if n == 1 {
        return Ok((ThresholdVector::new(vec![1.0])?, 1.0));
    }
    const STARTS: [f64; 5] = [0.2, 0.6, 1.0, 1.4, 1.8];
    const MAX_SWEEPS: usize = 2_000;
    let runs: Vec<(Vec<f64>, f64, bool)> = STARTS
        .par_iter()
        .map(|&scale| {
            let mut a: Vec<f64> = (1..=n)
                .map(|k| (scale * k as f64 / n as f64).clamp(THRESHOLD_FLOOR, THRESHOLD_CAP))
                .collect();
            a[n - 1] = 1.0;
            coordinate_descent(a, tol, MAX_SWEEPS)
        })
        .collect();
    let (best_a, best_value, converged) = runs
        .into_iter()
        .reduce(|best, run| if run.1 < best.1 { run } else { best })
        .expect("at least one start");
    if !converged {
        return Err(Error::NoConvergence {
            context: format!("memoryless optimize(n = {n})"),
            best: best_value,
            achieved: tol,
        });
    }
    // Monotonicity projection; the line-search boxes already enforce it,
    // so this at most rounds out floating-point noise.
    let mut a = best_a;
    for k in 1..n {
        a[k] = a[k].max(a[k - 1]);
    }
    Ok((ThresholdVector::new(a)?, best_value))
}

/// Coefficients of the rational threshold family
/// `a_k = min(1, (c0 + c1 t + c2 t^2) / (n - k + c))` with `t = k / n`.
///
/// The numerator polynomial takes the normalized step `t`, not the raw
/// index: with the published coefficients (1.77, 0.54, -0.27) a raw-index
/// quadratic goes negative from k = 4 on and the family degenerates,
/// while the normalized form reproduces the known limit bound (~2.33).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AscCoefficients {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    /// Denominator offset; never pinned down numerically in the
    /// literature, so it stays a free parameter (see [`tune_asc_offset`]).
    pub c: f64,
}

impl AscCoefficients {
    /// The reported optimal quadratic coefficients (c unset; pick by search).
    pub fn reference(c: f64) -> Self {
        AscCoefficients {
            c0: 1.77,
            c1: 0.54,
            c2: -0.27,
            c,
        }
    }
}

/// Builds the threshold vector of the rational family, clamped to [0, 1]
/// and projected to nondecreasing order by running maximum.
pub fn asc_thresholds(n: usize, coeffs: &AscCoefficients) -> Result<ThresholdVector> {
    if n == 0 {
        return Err(Error::input("horizon must be at least 1"));
    }
    let mut a = Vec::with_capacity(n);
    let mut running_max = THRESHOLD_FLOOR;
    for k in 1..n {
        let t = k as f64 / n as f64;
        let den = (n - k) as f64 + coeffs.c;
        if den <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "denominator n - k + c = {den} is not positive at k = {k}"
            )));
        }
        let raw = (coeffs.c0 + coeffs.c1 * t + coeffs.c2 * t * t) / den;
        running_max = running_max.max(raw.clamp(THRESHOLD_FLOOR, 1.0));
        a.push(running_max);
    }
    a.push(1.0);
    ThresholdVector::new(a)
}

/// Tunes the free denominator offset of the rational family by coarse
/// scan plus golden-section refinement, minimizing the closed-form
/// expected rank. Returns the tuned coefficients, the thresholds, and
/// the achieved expected rank.
pub fn tune_asc_offset(
    n: usize,
    c0: f64,
    c1: f64,
    c2: f64,
    c_lo: f64,
    c_hi: f64,
) -> Result<(AscCoefficients, ThresholdVector, f64)> {
    if c_lo.partial_cmp(&c_hi) != Some(std::cmp::Ordering::Less) || c_lo <= 0.0 {
        return Err(Error::input("offset search interval must satisfy 0 < lo < hi"));
    }
    let objective = |c: f64| -> f64 {
        let coeffs = AscCoefficients { c0, c1, c2, c };
        match asc_thresholds(n, &coeffs) {
            Ok(tv) => expected_rank(&tv),
            Err(_) => f64::INFINITY,
        }
    };
    // Coarse scan guards against multiple local minima before refining.
    const SCAN: usize = 64;
    let mut best_c = c_lo;
    let mut best_f = objective(c_lo);
    for i in 1..=SCAN {
        let c = c_lo + (c_hi - c_lo) * i as f64 / SCAN as f64;
        let f = objective(c);
        if f < best_f {
            best_c = c;
            best_f = f;
        }
    }
    let half_step = (c_hi - c_lo) / SCAN as f64;
    let (c, _) = golden_min(
        (best_c - half_step).max(c_lo),
        (best_c + half_step).min(c_hi),
        1e-9,
        objective,
    );
    let coeffs = AscCoefficients { c0, c1, c2, c };
    let tv = asc_thresholds(n, &coeffs)?;
    let value = expected_rank(&tv);
    Ok((coeffs, tv, value))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expected_rank_trivial_horizon() {
        let tv = ThresholdVector::new(vec![1.0]).unwrap();
        assert_eq!(expected_rank(&tv), 1.0);
    }

    #[test]
    fn expected_rank_n2_optimum() {
        let tv = ThresholdVector::new(vec![0.5, 1.0]).unwrap();
        assert_eq!(expected_rank(&tv), 1.25);
    }

    #[test]
    fn validation_rejects_bad_vectors() {
        assert!(ThresholdVector::new(vec![]).is_err());
        assert!(ThresholdVector::new(vec![0.0, 1.0]).is_err());
        assert!(ThresholdVector::new(vec![0.6, 0.5, 1.0]).is_err());
        assert!(ThresholdVector::new(vec![0.5, 0.9]).is_err());
    }

    #[test]
    fn all_ones_equals_stop_first() {
        for n in 1..=8 {
            let tv = ThresholdVector::new(vec![1.0; n]).unwrap();
            let v = expected_rank(&tv);
            assert!(
                (v - (n as f64 + 1.0) / 2.0).abs() < 1e-12,
                "n = {n}: {v}"
            );
        }
    }

    #[test]
    fn optimize_small_horizons_match_reference_values() {
        // n, value pairs from the memoryless optimum table.
        for (n, expected) in [(1, 1.0), (2, 1.25), (3, 1.4009), (4, 1.5065), (5, 1.5861)] {
            let (_, v) = optimize(n, 1e-9).unwrap();
            assert!((v - expected).abs() < 5e-4, "n = {n}: {v} vs {expected}");
        }
    }

    #[test]
    fn optimize_rejects_bad_inputs() {
        assert!(optimize(0, 1e-9).is_err());
        assert!(optimize(3, 0.0).is_err());
    }

    #[test]
    fn optimize_is_deterministic() {
        let (a, va) = optimize(6, 1e-9).unwrap();
        let (b, vb) = optimize(6, 1e-9).unwrap();
        assert_eq!(a.thresholds(), b.thresholds());
        assert_eq!(va, vb);
    }

    #[test]
    fn asc_direct_substitution() {
        let tv = asc_thresholds(
            2,
            &AscCoefficients {
                c0: 1.0,
                c1: 0.0,
                c2: 0.0,
                c: 1.0,
            },
        )
        .unwrap();
        assert_eq!(tv.thresholds(), &[0.5, 1.0]);
    }

    #[test]
    fn asc_saturated_thresholds_cost_like_stop_first() {
        let n = 10;
        let tv = asc_thresholds(
            n,
            &AscCoefficients {
                c0: 1e6,
                c1: 0.0,
                c2: 0.0,
                c: 1.0,
            },
        )
        .unwrap();
        assert!((expected_rank(&tv) - (n as f64 + 1.0) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn asc_rejects_nonpositive_denominator() {
        let coeffs = AscCoefficients {
            c0: 1.0,
            c1: 0.0,
            c2: 0.0,
            c: -1.0,
        };
        assert!(asc_thresholds(3, &coeffs).is_err());
    }

    #[test]
    fn expected_rank_is_pure() {
        let tv = ThresholdVector::new(vec![0.3, 0.4, 0.8, 1.0]).unwrap();
        let a = expected_rank(&tv);
        let b = expected_rank(&tv);
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
