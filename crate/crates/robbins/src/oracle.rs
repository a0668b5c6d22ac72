//! Independent numerical backward induction.
//!
//! Everything here recomputes thresholds and optimal values from the
//! stop-vs-continue comparison alone, by adaptive quadrature; nothing
//! uses the closed forms of [`crate::exact`]. That makes the module an
//! oracle against which the closed forms are verified.
//!
//! Indexing convention: `continuation_value(n, k, history)` is the value
//! of entering step `k` with `history` the `k - 1` observations already
//! seen and rejected. The game value is `continuation_value(n, 1, &[])`.

use crate::error::{Error, Result};
use crate::policy::check_unit_interval;

/// Adaptive-quadrature controls.
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_depth: 30,
        }
    }
}

impl QuadConfig {
    fn validate(&self) -> Result<()> {
        if self.rel_tol <= 0.0 || self.abs_tol <= 0.0 {
            return Err(Error::input("quadrature tolerances must be positive"));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------
// Adaptive Simpson with forced subdivision at known kinks
// ---------------------------------------------------------------------

struct Quad<'a, F: Fn(f64) -> f64> {
    f: &'a F,
    /// Residual error from panels that hit max_depth.
    overflow: f64,
}

impl<'a, F: Fn(f64) -> f64> Quad<'a, F> {
    fn simpson(&self, a: f64, fa: f64, fm: f64, b: f64, fb: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(
        &mut self,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let lm = (a + m) / 2.0;
        let rm = (m + b) / 2.0;
        let flm = (self.f)(lm);
        let frm = (self.f)(rm);
        let left = self.simpson(a, fa, flm, m, fm);
        let right = self.simpson(m, fm, frm, b, fb);
        let err = (left + right - whole) / 15.0;
        if err.abs() <= tol || b - a < 1e-14 {
            return left + right + err;
        }
        if depth == 0 {
            self.overflow += err.abs();
            return left + right + err;
        }
        self.refine(a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
            + self.refine(m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
    }

    fn integrate(&mut self, a: f64, b: f64, tol: f64, max_depth: u32) -> f64 {
        if b - a <= 0.0 {
            return 0.0;
        }
        let m = (a + b) / 2.0;
        let fa = (self.f)(a);
        let fm = (self.f)(m);
        let fb = (self.f)(b);
        let whole = self.simpson(a, fa, fm, b, fb);
        self.refine(a, fa, b, fb, m, fm, whole, tol, max_depth)
    }
}

/// Integrates `f` over [a, b], forcing subdivision at the interior
/// `kinks` so each adaptive panel sees a smooth integrand. Panels are
/// processed left to right so the result does not depend on scheduling.
pub fn integrate_with_kinks(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    kinks: &[f64],
    cfg: &QuadConfig,
) -> Result<f64> {
    cfg.validate()?;
    let mut cuts: Vec<f64> = kinks
        .iter()
        .copied()
        .filter(|&x| x > a && x < b)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut points = Vec::with_capacity(cuts.len() + 2);
    points.push(a);
    points.extend(cuts);
    points.push(b);

    // Rough magnitude estimate to convert the relative tolerance.
    let scale = points
        .windows(2)
        .map(|w| f((w[0] + w[1]) / 2.0).abs() * (w[1] - w[0]))
        .sum::<f64>()
        .max(1.0);
    let tol = (cfg.rel_tol * scale).max(cfg.abs_tol);

    let mut quad = Quad {
        f: &f,
        overflow: 0.0,
    };
    let mut total = 0.0;
    let per_panel = tol / points.len() as f64;
    for w in points.windows(2) {
        total += quad.integrate(w[0], w[1], per_panel, cfg.max_depth);
    }
    if quad.overflow > tol {
        return Err(Error::NoConvergence {
            context: "adaptive quadrature hit max depth".into(),
            best: total,
            achieved: quad.overflow,
        });
    }
    Ok(total)
}

// ---------------------------------------------------------------------
// Stop and continuation values
// ---------------------------------------------------------------------

fn check_history(n: usize, k: usize, history: &[f64]) -> Result<()> {
    if n < 1 || k < 1 || k > n {
        return Err(Error::InvalidInput(format!(
            "step k = {k} outside 1..={n}"
        )));
    }
    if history.len() != k - 1 {
        return Err(Error::InvalidInput(format!(
            "history has {} values, step {k} needs {}",
            history.len(),
            k - 1
        )));
    }
    for &h in history {
        check_unit_interval(h, "history value")?;
    }
    Ok(())
}

/// Expected final rank of stopping at step `k` on value `x`:
/// one, plus the past values at or below `x`, plus `(n - k) x` expected
/// smaller future arrivals.
pub fn stop_value(n: usize, k: usize, history: &[f64], x: f64) -> Result<f64> {
    check_history(n, k, history)?;
    check_unit_interval(x, "x")?;
    let below = history.iter().filter(|&&h| h <= x).count();
    Ok(1.0 + below as f64 + (n - k) as f64 * x)
}

/// Sorted copy of the history, the continuity cuts of the stop profile.
fn sorted_history(history: &[f64]) -> Vec<f64> {
    let mut s = history.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

/// Integral over [lo, hi] of min(a0 + u, b0 - u).
fn linear_min_integral(a0: f64, b0: f64, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let cross = (b0 - a0) / 2.0;
    let rising = |l: f64, h: f64| a0 * (h - l) + (h * h - l * l) / 2.0;
    let falling = |l: f64, h: f64| b0 * (h - l) - (h * h - l * l) / 2.0;
    if cross <= lo {
        falling(lo, hi)
    } else if cross >= hi {
        rising(lo, hi)
    } else {
        rising(lo, cross) + falling(cross, hi)
    }
}

/// Closed-form value of entering step `n - 1`: the integrand is the min
/// of the (piecewise-linear) stop profile and the forced-stop
/// continuation, so each continuity segment integrates exactly.
fn last_two_steps_value(n: usize, history: &[f64]) -> f64 {
    debug_assert_eq!(history.len(), n - 2);
    let past: f64 = history.iter().map(|&h| 1.0 - h).sum();
    // Stop on u: 1 + #{h <= u} + u. Continue: 1 + past + (1 - u).
    let b0 = 2.0 + past;
    let cuts = sorted_history(history);
    let mut total = 0.0;
    let mut lo = 0.0;
    let mut below = 0usize;
    for &c in &cuts {
        total += linear_min_integral(1.0 + below as f64, b0, lo, c);
        lo = c;
        below += 1;
    }
    total + linear_min_integral(1.0 + below as f64, b0, lo, 1.0)
}

/// Value of rejecting the observation at step `k` (so `x` joins the
/// history) and playing optimally from step `k + 1`.
fn reject_value(n: usize, k: usize, history: &[f64], x: f64, cfg: &QuadConfig) -> Result<f64> {
    let mut extended = history.to_vec();
    extended.push(x);
    // Tighten the child level so its quadrature noise stays well below
    // the tolerance the caller's own error estimator works against.
    let child = QuadConfig {
        rel_tol: cfg.rel_tol * 0.05,
        abs_tol: cfg.abs_tol * 0.05,
        max_depth: cfg.max_depth,
    };
    continuation_value(n, k + 1, &extended, &child)
}

/// Difference stop - continue at step `k` for observation `x`, the
/// function whose root is the optimal threshold.
fn indifference_gap(n: usize, k: usize, history: &[f64], x: f64, cfg: &QuadConfig) -> Result<f64> {
    Ok(stop_value(n, k, history, x)? - reject_value(n, k, history, x, cfg)?)
}

/// Expected final rank of entering step `k` with `history` (length
/// `k - 1`) and playing optimally: integrates the min of stop and
/// continuation values over the incoming observation.
///
/// The two innermost levels are evaluated in closed form (the last step
/// is forced; the next-to-last reduces to piecewise-linear minima), so
/// the quadrature recursion is two levels shallower than the horizon.
pub fn continuation_value(n: usize, k: usize, history: &[f64], cfg: &QuadConfig) -> Result<f64> {
    check_history(n, k, history)?;
    cfg.validate()?;
    if k == n {
        // Forced stop: integral of the stop profile.
        let past: f64 = history.iter().map(|&h| 1.0 - h).sum();
        return Ok(1.0 + past);
    }
    if k == n - 1 {
        return Ok(last_two_steps_value(n, history));
    }
    // The integrand min(stop, continue) is smooth except at history
    // values (stop jumps) and at the indifference point (min kink);
    // split there and integrate adaptively.
    let mut kinks = sorted_history(history);
    if let Some(t) = indifference_root(n, k, history, cfg, 1e-10)? {
        kinks.push(t);
    }
    let f = |u: f64| {
        let stop = stop_value(n, k, history, u).expect("u in range");
        let cont = reject_value(n, k, history, u, cfg).expect("u in range");
        stop.min(cont)
    };
    integrate_with_kinks(f, 0.0, 1.0, &kinks, cfg)
}

/// Scans the continuity segments of the stop profile in increasing order
/// and returns the first root of stop - continue, found by bisection.
/// Returns `None` when the gap never changes sign. A sign change exactly
/// at a history value (where the stop profile jumps) returns that value.
fn indifference_root(
    n: usize,
    k: usize,
    history: &[f64],
    cfg: &QuadConfig,
    xtol: f64,
) -> Result<Option<f64>> {
    let cuts = sorted_history(history);
    let mut points = vec![0.0];
    points.extend(cuts.iter().copied().filter(|&c| c > 0.0 && c < 1.0));
    points.push(1.0);
    points.dedup();

    const EDGE: f64 = 1e-13;
    let mut prev_right_sign: Option<bool> = None; // sign approaching the cut from the left
    for w in points.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        // One-sided evaluations just inside the segment.
        let lo_in = if lo == 0.0 { 0.0 } else { lo + EDGE };
        let hi_in = if hi == 1.0 { 1.0 } else { hi - EDGE };
        let g_lo = indifference_gap(n, k, history, lo_in, cfg)?;
        let g_hi = indifference_gap(n, k, history, hi_in, cfg)?;
        // Jump crossing at the segment's left cut: gap < 0 approaching
        // from the left, >= 0 entering from the right.
        if let Some(left_neg) = prev_right_sign {
            if left_neg && g_lo >= 0.0 {
                return Ok(Some(lo));
            }
        }
        if g_lo == 0.0 {
            return Ok(Some(lo_in));
        }
        if g_lo < 0.0 && g_hi >= 0.0 {
            // Root inside the segment.
            let (mut a, mut b) = (lo_in, hi_in);
            while b - a > xtol {
                let m = (a + b) / 2.0;
                if indifference_gap(n, k, history, m, cfg)? < 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            return Ok(Some((a + b) / 2.0));
        }
        prev_right_sign = Some(g_hi < 0.0);
    }
    Ok(None)
}

/// Optimal threshold at step `k` computed without any closed form: the
/// smallest `h` at which stopping on `h` and rejecting it are equally
/// good. Returns 1 when stopping is always at least as good, 0 when it
/// never is.
pub fn threshold_numeric(n: usize, k: usize, history: &[f64], cfg: &QuadConfig) -> Result<f64> {
    check_history(n, k, history)?;
    if k > n - 1 {
        return Err(Error::input("threshold is only defined before the last step"));
    }
    cfg.validate()?;
    match indifference_root(n, k, history, cfg, 1e-10)? {
        Some(t) => Ok(t),
        None => {
            // No crossing: the sign of the gap anywhere decides.
            let gap = indifference_gap(n, k, history, 0.5, cfg)?;
            Ok(if gap <= 0.0 { 1.0 } else { 0.0 })
        }
    }
}

/// Optimal expected rank `v(n)` by pure backward induction.
///
/// Horizons 2..=4 carry validated tolerances; 5 is exposed best-effort
/// (no reference value exists) and is noticeably slower.
pub fn value_v(n: usize, cfg: &QuadConfig) -> Result<f64> {
    if !(2..=5).contains(&n) {
        return Err(Error::input("value_v supports horizons 2..=5"));
    }
    continuation_value(n, 1, &[], cfg)
}
