//! The cross-check suite behind `verify`: closed forms vs the backward-
//! induction oracle vs Monte Carlo, plus structural checks on the
//! piecewise thresholds. Each check is independently addressable by name.

use crate::exact;
use crate::memoryless;
use crate::montecarlo;
use crate::noinfo;
use crate::oracle::{self, QuadConfig};
use crate::rng::RandomStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

/// Outcome of one named check: `achieved <= required` means pass.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub required: f64,
    pub achieved: f64,
    pub pass: bool,
}

fn check(name: &'static str, achieved: f64, required: f64) -> Check {
    Check {
        name,
        required,
        achieved,
        pass: achieved <= required,
    }
}

/// Runs the suite. Quick stays within roughly a minute; full adds the
/// ten-million-trial simulations and the dense oracle-agreement sweeps.
pub fn run_checks(level: Level) -> Vec<Check> {
    let full = level == Level::Full;
    let cfg = QuadConfig::default();
    let mut out = Vec::new();

    // Closed-form constants against their printed decimals.
    out.push(check(
        "h1-n3-constant",
        (exact::h1_n3() - 0.348612).abs(),
        1e-5,
    ));
    out.push(check("v3-constant", (exact::v3() - 1.39155).abs(), 1e-5));
    out.push(check(
        "h1-n4-constant",
        (exact::h1_n4() - 0.27502).abs(),
        1e-5,
    ));
    let printed_betas = [0.12132, 0.23861, 0.44018, 0.52506, 0.90192];
    let beta_err = exact::betas()
        .iter()
        .zip(printed_betas)
        .map(|(b, p)| (b - p).abs())
        .fold(0.0, f64::max);
    out.push(check("beta-constants", beta_err, 5e-6));

    // Structure of the step-2 threshold curve.
    let curve = exact::h2_curve();
    out.push(check("h2-continuity", curve.max_continuity_gap(), 1e-12));
    let ddiff = [0, 3, 4]
        .iter()
        .map(|&i| curve.derivative_gap(i, 1e-7))
        .fold(0.0, f64::max);
    out.push(check("h2-differentiability", ddiff, 1e-5));
    out.push(check(
        "h2-endpoints",
        (exact::h2(0.0).unwrap() - exact::h1_n3())
            .abs()
            .max((exact::h2(1.0).unwrap() - exact::h1_n3()).abs()),
        1e-15,
    ));

    // Values: closed form vs oracle.
    out.push(check(
        "oracle-v2",
        (oracle::value_v(2, &cfg).unwrap() - 1.25).abs(),
        1e-8,
    ));
    out.push(check(
        "oracle-v3",
        (oracle::value_v(3, &cfg).unwrap() - exact::v3()).abs(),
        1e-6,
    ));
    out.push(check(
        "oracle-v4",
        (oracle::value_v(4, &cfg).unwrap() - 1.49329).abs(),
        1e-5,
    ));

    // Thresholds: closed form vs bisection on the indifference equation.
    out.push(check(
        "h1-n3-bisection",
        (oracle::threshold_numeric(3, 1, &[], &cfg).unwrap() - exact::h1_n3()).abs(),
        1e-8,
    ));
    let tight = QuadConfig {
        rel_tol: 1e-12,
        abs_tol: 1e-14,
        max_depth: 40,
    };
    out.push(check(
        "h1-n4-bisection",
        (oracle::threshold_numeric(4, 1, &[], &tight).unwrap() - exact::h1_n4()).abs(),
        1e-9,
    ));

    // h2 against the oracle on a grid.
    let h2_points = if full { 200 } else { 25 };
    let h2_err = (0..h2_points)
        .map(|i| {
            let x1 = (i as f64 + 0.5) / h2_points as f64;
            let numeric = oracle::threshold_numeric(4, 2, &[x1], &cfg).unwrap();
            (exact::h2(x1).unwrap() - numeric).abs()
        })
        .fold(0.0, f64::max);
    out.push(check("h2-oracle-grid", h2_err, 1e-6));

    // h3 against the oracle and against dense grid argmin.
    let stream = RandomStream::new(2024, 0);
    let h3_points = if full { 1000 } else { 100 };
    let h3_oracle_err = (0..h3_points as u64)
        .map(|i| {
            let x1 = stream.uniform(2 * i);
            let x2 = stream.uniform(2 * i + 1);
            let numeric = oracle::threshold_numeric(4, 3, &[x1, x2], &cfg).unwrap();
            (exact::h3(x1, x2).unwrap() - numeric).abs()
        })
        .fold(0.0, f64::max);
    out.push(check("h3-oracle-agreement", h3_oracle_err, 1e-6));

    let grid = if full { 512 } else { 128 };
    out.push(check(
        "region-raster-boundaries",
        region_raster_violations(grid) as f64,
        0.0,
    ));

    // Memoryless optima against the reference table.
    let table: &[(usize, f64)] = if full {
        &[(1, 1.0), (2, 1.25), (3, 1.4009), (4, 1.5065), (5, 1.5861), (20, 1.9890)]
    } else {
        &[(1, 1.0), (2, 1.25), (3, 1.4009), (4, 1.5065), (5, 1.5861)]
    };
    let table_err = table
        .iter()
        .map(|&(n, v)| (memoryless::optimize(n, 1e-9).unwrap().1 - v).abs())
        .fold(0.0, f64::max);
    out.push(check("memoryless-table", table_err, 5e-4));

    // Strict gap between the overall optimum and the memoryless optimum.
    let gap3 = memoryless::optimize(3, 1e-9).unwrap().1 - oracle::value_v(3, &cfg).unwrap();
    let gap4 = memoryless::optimize(4, 1e-9).unwrap().1 - oracle::value_v(4, &cfg).unwrap();
    out.push(check("memoryless-strict-gap", -gap3.min(gap4), -1e-3));

    // No-information benchmark.
    out.push(check(
        "noinfo-small-values",
        (noinfo::w_value(2).unwrap() - 1.5)
            .abs()
            .max((noinfo::w_value(3).unwrap() - 5.0 / 3.0).abs()),
        1e-12,
    ));
    out.push(check(
        "noinfo-limit",
        noinfo::w_value(10_000).unwrap() - 3.8695,
        1e-3,
    ));

    // Monte Carlo against the exact values (4 standard errors).
    let trials = if full { 10_000_000 } else { 1_000_000 };
    let sim3 = montecarlo::evaluate(&exact::policy3(), "exact3", trials, 424_242).unwrap();
    out.push(check(
        "mc-policy3",
        (sim3.mean - exact::v3()).abs(),
        4.0 * sim3.stderr,
    ));
    let sim4 = montecarlo::evaluate(&exact::policy4(), "exact4", trials, 424_243).unwrap();
    let v4 = oracle::value_v(4, &cfg).unwrap();
    out.push(check("mc-policy4", (sim4.mean - v4).abs(), 4.0 * sim4.stderr));

    if full {
        let (mem4, mem4_value) = memoryless::optimize(4, 1e-9).unwrap();
        let paired =
            montecarlo::compare_paired(&exact::policy4(), &mem4, trials, 424_244).unwrap();
        let expected_gap = v4 - mem4_value;
        out.push(check(
            "mc-paired-gap",
            (paired.mean_diff - expected_gap).abs(),
            4.0 * paired.stderr_diff,
        ));
    }

    out
}

/// Counts adjacent raster cells whose region labels differ without any
/// of the published boundary lines (or the diagonal separating the two
/// kink regions) passing between them.
pub fn region_raster_violations(grid: usize) -> usize {
    let boundaries: [fn(f64, f64) -> f64; 7] = [
        |x1, x2| x2 - (3.0 - x1) / 3.0,
        |x1, x2| x2 - (2.0 - x1) / 3.0,
        |x1, x2| x2 - (1.0 - x1) / 3.0,
        |x1, x2| x2 - (3.0 - 3.0 * x1),
        |x1, x2| x2 - (2.0 - 3.0 * x1),
        |x1, x2| x2 - (1.0 - 3.0 * x1),
        |x1, x2| x2 - x1,
    ];
    let cell = |i: usize| (i as f64 + 0.5) / grid as f64;
    let labels: Vec<Vec<exact::Region>> = (0..grid)
        .map(|i| {
            (0..grid)
                .map(|j| exact::classify_region(cell(i), cell(j)).unwrap())
                .collect()
        })
        .collect();
    let mut violations = 0;
    // A line separates two cells when it meets the closed segment
    // between their centers (cells sitting exactly on a line count).
    let separated = |a: (f64, f64), b: (f64, f64)| {
        boundaries
            .iter()
            .any(|f| f(a.0, a.1) * f(b.0, b.1) <= 0.0)
    };
    for i in 0..grid {
        for j in 0..grid {
            let here = ((cell(i)), cell(j));
            if i + 1 < grid
                && labels[i][j] != labels[i + 1][j]
                && !separated(here, (cell(i + 1), cell(j)))
            {
                violations += 1;
            }
            if j + 1 < grid
                && labels[i][j] != labels[i][j + 1]
                && !separated(here, (cell(i), cell(j + 1)))
            {
                violations += 1;
            }
        }
    }
    violations
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        let checks = run_checks(Level::Quick);
        let failures: Vec<_> = checks.iter().filter(|c| !c.pass).collect();
        assert!(failures.is_empty(), "failed checks: {failures:?}");
    }

    #[test]
    fn raster_respects_published_boundaries() {
        assert_eq!(region_raster_violations(128), 0);
    }

    #[test]
    fn continuity_gap_detects_a_jump() {
        let broken = exact::PiecewiseCurve::new(
            vec![0.5],
            vec![("left", |_x| 0.0), ("right", |_x| 1e-3)],
        )
        .unwrap();
        assert!(broken.max_continuity_gap() > 1e-4);
    }
}
