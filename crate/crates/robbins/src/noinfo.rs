//! The classical no-information benchmark: only relative ranks are
//! observed, never values.
//!
//! At step k with relative rank r among the first k observations, the
//! conditional expected final rank of stopping is `r (n + 1) / (k + 1)`
//! (the standard conditional expectation of the final rank of the r-th
//! smallest of k under uniform arrivals). Backward induction over
//! (step, relative rank) gives the optimal value W(n).
//!
//! The inner minimum is taken against the continuation value `c_k`, and
//! because the stop payoff is linear in r the average over r collapses to
//! a closed partial sum; the recursion costs O(n) per horizon.

use crate::error::{Error, Result};

/// Optimal expected rank of the relative-rank-only stopping problem.
pub fn w_value(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::input("horizon must be at least 1"));
    }
    if n == 1 {
        return Ok(1.0);
    }
    let payoff_scale = (n + 1) as f64;
    // c_k = expected value of continuing past step k; at the last step
    // every relative rank r is the final rank, so c_{n-1} = (n + 1) / 2.
    let mut c = payoff_scale / 2.0;
    for k in (1..n).rev() {
        let q = payoff_scale / (k as f64 + 1.0);
        // Stopping wins at step k exactly for relative ranks r <= c/q.
        let r_star = ((c / q).floor() as usize).min(k);
        let stop_sum = q * (r_star * (r_star + 1)) as f64 / 2.0;
        c = (stop_sum + (k - r_star) as f64 * c) / k as f64;
    }
    // The first observation always has relative rank 1.
    Ok(c)
}

/// W(n) for every n in 1..=max_n.
pub fn w_table(max_n: usize) -> Result<Vec<(usize, f64)>> {
    if max_n == 0 {
        return Err(Error::input("max_n must be at least 1"));
    }
    (1..=max_n).map(|n| Ok((n, w_value(n)?))).collect()
}
