//! The stopping-policy abstraction and the game itself.
//!
//! A policy for horizon `n` is a family of threshold functions
//! `h_k(x_1, ..., x_{k-1})`: the decision maker keeps the k-th observation
//! iff it is at or below the threshold for the current history. The
//! threshold at step `n` is always 1, so the last observation is kept
//! unconditionally.

use crate::error::{Error, Result};

/// Outcome of a single stop-or-continue decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Stop,
    Continue,
}

/// A stopping rule with threshold semantics.
///
/// Steps are 1-based; `history` holds the `step - 1` values already seen,
/// in arrival order. Ties at the threshold stop: bisection-found
/// indifference points then behave deterministically, and the event has
/// probability zero under the continuous model.
pub trait Policy: Sync {
    /// Number of observations in the game.
    fn horizon(&self) -> usize;

    /// Threshold in [0, 1] for accepting the observation at `step`.
    /// Must be 1 at `step == horizon()`.
    fn threshold(&self, step: usize, history: &[f64]) -> f64;

    fn decide(&self, step: usize, history: &[f64], x: f64) -> Decision {
        if x <= self.threshold(step, history) {
            Decision::Stop
        } else {
            Decision::Continue
        }
    }
}

impl<P: Policy + ?Sized> Policy for &P {
    fn horizon(&self) -> usize {
        (**self).horizon()
    }
    fn threshold(&self, step: usize, history: &[f64]) -> f64 {
        (**self).threshold(step, history)
    }
    fn decide(&self, step: usize, history: &[f64], x: f64) -> Decision {
        (**self).decide(step, history, x)
    }
}

/// Accepts the first observation regardless of value (threshold 1
/// everywhere). Its expected rank is (n+1)/2, a handy calibration rule.
#[derive(Debug, Clone, Copy)]
pub struct StopFirst {
    n: usize,
}

impl StopFirst {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::input("horizon must be at least 1"));
        }
        Ok(StopFirst { n })
    }
}

impl Policy for StopFirst {
    fn horizon(&self) -> usize {
        self.n
    }
    fn threshold(&self, _step: usize, _history: &[f64]) -> f64 {
        1.0
    }
}

pub(crate) fn check_unit_interval(x: f64, what: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidInput(format!("{what} = {x} is outside [0, 1]")));
    }
    Ok(())
}

/// Plays one full game: feeds `sequence` to `policy` and returns the
/// 1-based index of the selected observation together with its overall
/// rank `1 + #{i != k : x_i <= x_k}` over the whole sequence.
///
/// Selection is guaranteed: if the policy misbehaves at the last step the
/// final observation is kept anyway.
pub fn play(policy: &dyn Policy, sequence: &[f64]) -> Result<(usize, usize)> {
    let n = policy.horizon();
    if sequence.len() != n {
        return Err(Error::InvalidInput(format!(
            "sequence has {} values, policy horizon is {n}",
            sequence.len()
        )));
    }
    for &x in sequence {
        check_unit_interval(x, "observation")?;
    }
    let mut selected = n;
    for k in 1..=n {
        if policy.decide(k, &sequence[..k - 1], sequence[k - 1]) == Decision::Stop {
            selected = k;
            break;
        }
    }
    let x = sequence[selected - 1];
    let rank = 1 + sequence
        .iter()
        .enumerate()
        .filter(|&(i, &v)| i != selected - 1 && v <= x)
        .count();
    Ok((selected, rank))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn stop_first_selects_index_one() {
        let p = StopFirst::new(3).unwrap();
        let (idx, rank) = play(&p, &[0.7, 0.1, 0.9]).unwrap();
        assert_eq!(idx, 1);
        assert_eq!(rank, 2); // 0.1 <= 0.7 < 0.9
    }

    #[test]
    fn minimum_value_has_rank_one() {
        let p = StopFirst::new(4).unwrap();
        let (idx, rank) = play(&p, &[0.0, 0.3, 0.8, 0.5]).unwrap();
        assert_eq!(idx, 1);
        assert_eq!(rank, 1);
    }

    #[test]
    fn exact3_on_spec_sequence() {
        // 0.5 > h1 ~ 0.3486 -> continue; h2(0.5) = 0.5 so 0.6 > 0.5 ->
        // continue; forced stop on 0.2, which is the minimum.
        let p = crate::exact::policy3();
        let (idx, rank) = play(&p, &[0.5, 0.6, 0.2]).unwrap();
        assert_eq!(idx, 3);
        assert_eq!(rank, 1);
    }

    #[test]
    fn length_mismatch_is_an_input_error() {
        let p = StopFirst::new(3).unwrap();
        assert!(matches!(
            play(&p, &[0.1, 0.2]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn out_of_range_observation_is_an_input_error() {
        let p = StopFirst::new(2).unwrap();
        assert!(play(&p, &[0.1, 1.2]).is_err());
    }

    #[test]
    fn zero_horizon_rejected() {
        assert!(StopFirst::new(0).is_err());
    }

    proptest! {
        // play always selects some index <= n, and the rank is a valid one.
        #[test]
        fn play_is_total(seq in proptest::collection::vec(0f64..=1.0, 4)) {
            let p = crate::exact::policy4();
            let (idx, rank) = play(&p, &seq).unwrap();
            prop_assert!((1..=4).contains(&idx));
            prop_assert!((1..=4).contains(&rank));
        }

        // Threshold semantics: stopping is monotone in the observed value.
        #[test]
        fn decide_is_monotone_in_x(
            x in 0f64..=1.0,
            lower in 0f64..=1.0,
            hist in proptest::collection::vec(0f64..=1.0, 1),
        ) {
            let p = crate::exact::policy3();
            let x2 = lower * x; // x2 <= x
            if p.decide(2, &hist, x) == Decision::Stop {
                prop_assert_eq!(p.decide(2, &hist, x2), Decision::Stop);
            }
        }

        // The rank does not depend on policy behaviour after the selected
        // index: recomputing with a truncation-equivalent policy agrees.
        #[test]
        fn rank_ignores_post_selection_behaviour(seq in proptest::collection::vec(0f64..=1.0, 4)) {
            let p = crate::exact::policy4();
            let (idx, rank) = play(&p, &seq).unwrap();
            let x = seq[idx - 1];
            let expected = 1 + seq.iter().enumerate()
                .filter(|&(i, &v)| i != idx - 1 && v <= x)
                .count();
            prop_assert_eq!(rank, expected);
        }
    }
}
