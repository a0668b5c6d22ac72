//! Closed-form optimal policies for horizons 2, 3 and 4.
//!
//! All constants are evaluated from their radical closed forms, never
//! stored as rounded decimals. The step-3 threshold for horizon 4 is the
//! argmin of a union of three parabolas with kinks at the past
//! observations; it is computed from a finite candidate set (each
//! parabola's vertex clamped to its validity interval, plus the kinks),
//! which also yields the region label as a byproduct.

use crate::error::{Error, Result};
use crate::policy::{check_unit_interval, Policy};

// ---------------------------------------------------------------------
// Constants
// ---------------------------------------------------------------------

/// Optimal first-step threshold for horizon 3: (5 - sqrt(13)) / 4.
pub fn h1_n3() -> f64 {
    (5.0 - 13f64.sqrt()) / 4.0
}

/// Optimal value for horizon 3: 341/144 - (13/48) sqrt(13).
pub fn v3() -> f64 {
    341.0 / 144.0 - 13.0 / 48.0 * 13f64.sqrt()
}

/// Optimal first-step threshold for horizon 4, from its radical closed
/// form; approximately 0.27502.
pub fn h1_n4() -> f64 {
    let t = (6.0 / 1849.0 * 123_199f64.sqrt() - 87_150.0 / 79_507.0).cbrt();
    t - 846.0 / 1849.0 / t + 53.0 / 43.0
}

/// The five abscissae where the closed form of the horizon-4 step-2
/// threshold changes, in increasing order.
pub fn betas() -> [f64; 5] {
    [
        1.5 * 2f64.sqrt() - 2.0,        // beta_1
        (30f64.sqrt() - 5.0) / 2.0,     // beta_2
        (7.0 - 19f64.sqrt()) / 6.0,     // beta_3
        (11.0 - 3.0 * 11f64.sqrt()) / 2.0, // beta_4
        (7.0 - 3.0 * 3f64.sqrt()) / 2.0,   // beta_5
    ]
}

// ---------------------------------------------------------------------
// Expected-rank curves (G functions)
// ---------------------------------------------------------------------

/// Expected rank for horizon 2 with first-step threshold `h`.
pub fn g2(h: f64) -> Result<f64> {
    check_unit_interval(h, "h")?;
    Ok(1.0 + h * h / 2.0 + (1.0 - h) * (1.0 - h) / 2.0)
}

/// Expected rank for horizon 3 given `X1 = x1`, playing from step 2 with
/// threshold `h` and optimally thereafter.
pub fn g3(x1: f64, h: f64) -> Result<f64> {
    check_unit_interval(x1, "x1")?;
    check_unit_interval(h, "h")?;
    Ok(1.5 + h * h - h + (1.0 - x1) * (1.0 - h) + (h - x1).max(0.0))
}

/// Minimizer over h in [0, 1] of `g3(x1, .)`.
pub fn argmin_g3(x1: f64) -> Result<f64> {
    check_unit_interval(x1, "x1")?;
    Ok(if x1 < 1.0 / 3.0 {
        (1.0 - x1) / 2.0
    } else if x1 < 2.0 / 3.0 {
        x1
    } else {
        1.0 - x1 / 2.0
    })
}

/// Expected rank for horizon 4 given `(X1, X2) = (x1, x2)`, playing from
/// step 3 with threshold `h` and keeping the last observation if reached.
pub fn g4(x1: f64, x2: f64, h: f64) -> Result<f64> {
    check_unit_interval(x1, "x1")?;
    check_unit_interval(x2, "x2")?;
    check_unit_interval(h, "h")?;
    Ok(1.5 + h * h - h
        + (2.0 - x1 - x2) * (1.0 - h)
        + (h - x1).max(0.0)
        + (h - x2).max(0.0))
}

// ---------------------------------------------------------------------
// Step-3 threshold for horizon 4: candidate argmin and region labels
// ---------------------------------------------------------------------

/// The five-way classification of a two-observation history, named by
/// which candidate attains the minimum of `g4`: the smaller or larger past
/// observation (A1, A2) or the vertex of the lower, middle or upper
/// parabola (B1, B2, B3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    A1,
    A2,
    B1,
    B2,
    B3,
}

impl Region {
    pub fn label(self) -> &'static str {
        match self {
            Region::A1 => "A1",
            Region::A2 => "A2",
            Region::B1 => "B1",
            Region::B2 => "B2",
            Region::B3 => "B3",
        }
    }
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

fn h3_candidates(x1: f64, x2: f64) -> (f64, Region) {
    let lo = x1.min(x2);
    let hi = x1.max(x2);
    let s = x1 + x2;
    // Candidate order matters only for ties: kinks win over clamped
    // vertices at equal h and value, and ties go to the smaller h.
    let candidates = [
        (lo, Region::A1),
        (hi, Region::A2),
        (((3.0 - s) / 2.0).clamp(0.0, lo), Region::B1),
        (((2.0 - s) / 2.0).clamp(lo, hi), Region::B2),
        (((1.0 - s) / 2.0).clamp(hi, 1.0), Region::B3),
    ];
    let mut best = candidates[0];
    let mut best_val = g4(x1, x2, best.0).expect("inputs validated");
    for &(h, region) in &candidates[1..] {
        let val = g4(x1, x2, h).expect("inputs validated");
        if val < best_val || (val == best_val && h < best.0) {
            best = (h, region);
            best_val = val;
        }
    }
    best
}

/// Which region's formula gives the step-3 threshold for history `(x1, x2)`.
pub fn classify_region(x1: f64, x2: f64) -> Result<Region> {
    check_unit_interval(x1, "x1")?;
    check_unit_interval(x2, "x2")?;
    Ok(h3_candidates(x1, x2).1)
}

/// Optimal step-3 threshold for horizon 4. Always equals the argmin of
/// `g4(x1, x2, .)` over [0, 1], and is symmetric in its arguments.
pub fn h3(x1: f64, x2: f64) -> Result<f64> {
    check_unit_interval(x1, "x1")?;
    check_unit_interval(x2, "x2")?;
    Ok(h3_candidates(x1, x2).0)
}

// ---------------------------------------------------------------------
// Step-2 threshold for horizon 4: six closed-form pieces
// ---------------------------------------------------------------------

fn h2_left_radical(x: f64) -> f64 {
    (5.0 - x - (x * x + 6.0 * x + 13.0).sqrt()) / 4.0
}

fn h2_left_sqrt(x: f64) -> f64 {
    (8.0 * x + 54.0).sqrt() - x - 7.0
}

fn h2_diagonal(x: f64) -> f64 {
    x
}

fn h2_rational(x: f64) -> f64 {
    -(4.0 * x * x - 6.0 * x + 5.0) / (2.0 * (x - 4.0))
}

fn h2_right_sqrt(x: f64) -> f64 {
    (12.0 * x + 42.0).sqrt() - 6.0 - x
}

fn h2_right_radical(x: f64) -> f64 {
    1.5 - (x + (x * x - 4.0 * x + 16.0).sqrt()) / 4.0
}

/// One closed-form piece: display name and evaluator.
pub type Piece = (&'static str, fn(f64) -> f64);

/// A function on [0, 1] defined by closed-form pieces between sorted
/// interior breakpoints. `pieces.len() == breakpoints.len() + 1`.
pub struct PiecewiseCurve {
    breakpoints: Vec<f64>,
    pieces: Vec<Piece>,
}

impl PiecewiseCurve {
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<Piece>) -> Result<Self> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(Error::input("piece count must be breakpoint count + 1"));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::input("breakpoints must be strictly increasing"));
        }
        if let (Some(&first), Some(&last)) = (breakpoints.first(), breakpoints.last()) {
            if first <= 0.0 || last >= 1.0 {
                return Err(Error::input("breakpoints must lie strictly inside (0, 1)"));
            }
        }
        Ok(PiecewiseCurve { breakpoints, pieces })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn piece_names(&self) -> Vec<&'static str> {
        self.pieces.iter().map(|&(name, _)| name).collect()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let idx = self.breakpoints.partition_point(|&b| b < x);
        (self.pieces[idx].1)(x)
    }

    /// Largest two-sided mismatch of adjacent pieces at the breakpoints.
    pub fn max_continuity_gap(&self) -> f64 {
        self.breakpoints
            .iter()
            .enumerate()
            .map(|(i, &b)| ((self.pieces[i].1)(b) - (self.pieces[i + 1].1)(b)).abs())
            .fold(0.0, f64::max)
    }

    /// Mismatch of one-sided difference quotients at breakpoint `i`,
    /// using step `dx`.
    pub fn derivative_gap(&self, i: usize, dx: f64) -> f64 {
        let b = self.breakpoints[i];
        let left = (self.pieces[i].1)(b) - (self.pieces[i].1)(b - dx);
        let right = (self.pieces[i + 1].1)(b + dx) - (self.pieces[i + 1].1)(b);
        (left / dx - right / dx).abs()
    }
}

/// The six-piece step-2 threshold for horizon 4 as a [`PiecewiseCurve`].
pub fn h2_curve() -> PiecewiseCurve {
    PiecewiseCurve::new(
        betas().to_vec(),
        vec![
            ("(5 - x - sqrt(x^2 + 6x + 13)) / 4", h2_left_radical),
            ("sqrt(8x + 54) - x - 7", h2_left_sqrt),
            ("x", h2_diagonal),
            ("-(4x^2 - 6x + 5) / (2(x - 4))", h2_rational),
            ("sqrt(12x + 42) - 6 - x", h2_right_sqrt),
            ("3/2 - (x + sqrt(x^2 - 4x + 16)) / 4", h2_right_radical),
        ],
    )
    .expect("static definition is well formed")
}

/// Optimal step-2 threshold for horizon 4.
pub fn h2(x1: f64) -> Result<f64> {
    check_unit_interval(x1, "x1")?;
    let b = betas();
    Ok(if x1 <= b[0] {
        h2_left_radical(x1)
    } else if x1 <= b[1] {
        h2_left_sqrt(x1)
    } else if x1 <= b[2] {
        h2_diagonal(x1)
    } else if x1 <= b[3] {
        h2_rational(x1)
    } else if x1 <= b[4] {
        h2_right_sqrt(x1)
    } else {
        h2_right_radical(x1)
    })
}

// ---------------------------------------------------------------------
// Policies
// ---------------------------------------------------------------------

/// Optimal policy for horizon 2: accept the first observation iff <= 1/2.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactPolicy2;

impl Policy for ExactPolicy2 {
    fn horizon(&self) -> usize {
        2
    }
    fn threshold(&self, step: usize, _history: &[f64]) -> f64 {
        match step {
            1 => 0.5,
            _ => 1.0,
        }
    }
}

/// Optimal policy for horizon 3.
///
/// The step-2 threshold below `h1` uses the unconstrained argmin formula
/// even though such histories never occur under optimal play (any
/// first observation at or below `h1` is accepted); the interface must
/// stay total.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactPolicy3;

impl Policy for ExactPolicy3 {
    fn horizon(&self) -> usize {
        3
    }
    fn threshold(&self, step: usize, history: &[f64]) -> f64 {
        match step {
            1 => h1_n3(),
            2 => {
                let x1 = history[0];
                if x1 < h1_n3() {
                    (1.0 - x1) / 2.0
                } else if x1 <= 2.0 / 3.0 {
                    x1
                } else {
                    1.0 - x1 / 2.0
                }
            }
            _ => 1.0,
        }
    }
}

/// Optimal policy for horizon 4.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactPolicy4;

impl Policy for ExactPolicy4 {
    fn horizon(&self) -> usize {
        4
    }
    fn threshold(&self, step: usize, history: &[f64]) -> f64 {
        match step {
            1 => h1_n4(),
            2 => h2(history[0]).expect("history values are in [0, 1]"),
            3 => h3(history[0], history[1]).expect("history values are in [0, 1]"),
            _ => 1.0,
        }
    }
}

pub fn policy2() -> ExactPolicy2 {
    ExactPolicy2
}

pub fn policy3() -> ExactPolicy3 {
    ExactPolicy3
}

pub fn policy4() -> ExactPolicy4 {
    ExactPolicy4
}
