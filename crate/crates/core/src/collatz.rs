//! The shortcut Collatz map `T(x)` and forward trajectories.
//!
//! `T(x) = x / 2` for even `x` and `(3x + 1) / 2` for odd `x`. The map is
//! total on the positive integers (`T(1) = 2`); stopping at 1 is a convention
//! applied by [`trajectory`], not by [`collatz_step`].

use std::fmt;
use std::num::NonZeroU64;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default bound on the number of `T` applications a single trajectory may take.
pub const DEFAULT_ITERATION_CAP: u64 = 1_000_000;

/// A positive 64-bit integer; a node value of the 3x+1 tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CollatzValue(NonZeroU64);

impl CollatzValue {
    pub const ONE: CollatzValue = CollatzValue(NonZeroU64::MIN);

    /// Returns `None` for zero.
    pub const fn new(value: u64) -> Option<Self> {
        match NonZeroU64::new(value) {
            Some(v) => Some(CollatzValue(v)),
            None => None,
        }
    }

    pub const fn get(self) -> u64 {
        self.0.get()
    }

    pub const fn is_even(self) -> bool {
        self.0.get() % 2 == 0
    }
}

impl fmt::Display for CollatzValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl TryFrom<u64> for CollatzValue {
    type Error = CollatzError;

    fn try_from(value: u64) -> Result<Self, Self::Error> {
        CollatzValue::new(value).ok_or(CollatzError::Zero)
    }
}

impl From<CollatzValue> for u64 {
    fn from(value: CollatzValue) -> u64 {
        value.get()
    }
}

impl FromStr for CollatzValue {
    type Err = CollatzError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let raw: u64 = s
            .trim()
            .parse()
            .map_err(|_| CollatzError::Parse(s.to_string()))?;
        raw.try_into()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CollatzError {
    #[error("value must be a positive integer")]
    Zero,
    #[error("not a positive integer: {0:?}")]
    Parse(String),
    /// `3x + 1` does not fit in 64 bits.
    #[error("3x+1 overflows 64 bits at x = {at}")]
    Overflow { at: u64 },
    /// The trajectory did not reach 1 within the configured number of steps.
    /// This witnesses only that the cap was hit, not divergence.
    #[error("trajectory from {start} did not reach 1 within {cap} steps")]
    IterationCap { start: u64, cap: u64 },
}

/// One application of `T` on raw integers. `x` must be positive.
#[inline]
pub(crate) fn step_u64(x: u64) -> Result<u64, CollatzError> {
    debug_assert!(x > 0);
    if x % 2 == 0 {
        Ok(x / 2)
    } else {
        x.checked_mul(3)
            .and_then(|t| t.checked_add(1))
            .map(|t| t / 2)
            .ok_or(CollatzError::Overflow { at: x })
    }
}

/// Applies the shortcut map once.
///
/// Overflow is reported when `3x + 1` exceeds `u64::MAX`, even though the
/// halved result might fit.
pub fn collatz_step(x: CollatzValue) -> Result<CollatzValue, CollatzError> {
    // T never maps a positive integer to zero.
    step_u64(x.get()).map(|v| CollatzValue::new(v).expect("T(x) > 0"))
}

/// The iterates from a start value down to 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trajectory {
    start: CollatzValue,
    steps: Vec<CollatzValue>,
    peak: CollatzValue,
}

impl Trajectory {
    pub fn start(&self) -> CollatzValue {
        self.start
    }

    /// Every iterate, first = start, last = 1.
    pub fn steps(&self) -> &[CollatzValue] {
        &self.steps
    }

    /// Number of `T` applications.
    pub fn length(&self) -> u64 {
        self.steps.len() as u64 - 1
    }

    /// Largest iterate, including the start.
    pub fn peak(&self) -> CollatzValue {
        self.peak
    }

    pub fn values(&self) -> impl Iterator<Item = u64> + '_ {
        self.steps.iter().map(|v| v.get())
    }
}

/// Iterates `T` from `x0` until 1 is produced, with the default step cap.
pub fn trajectory(x0: CollatzValue) -> Result<Trajectory, CollatzError> {
    trajectory_with_cap(x0, DEFAULT_ITERATION_CAP)
}

pub fn trajectory_with_cap(x0: CollatzValue, cap: u64) -> Result<Trajectory, CollatzError> {
    let mut steps = vec![x0];
    let mut peak = x0;
    let mut x = x0;
    while x != CollatzValue::ONE {
        if steps.len() as u64 > cap {
            return Err(CollatzError::IterationCap {
                start: x0.get(),
                cap,
            });
        }
        x = collatz_step(x)?;
        peak = peak.max(x);
        steps.push(x);
    }
    Ok(Trajectory {
        start: x0,
        steps,
        peak,
    })
}

/// Largest value visited by the trajectory of `x0`.
pub fn trajectory_peak(x0: CollatzValue) -> Result<CollatzValue, CollatzError> {
    trajectory(x0).map(|t| t.peak())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cv(v: u64) -> CollatzValue {
        CollatzValue::new(v).unwrap()
    }

    #[test]
    fn step_examples() {
        assert_eq!(collatz_step(cv(7)).unwrap(), cv(11));
        assert_eq!(collatz_step(cv(26)).unwrap(), cv(13));
        assert_eq!(collatz_step(cv(2)).unwrap(), cv(1));
        assert_eq!(collatz_step(cv(1)).unwrap(), cv(2));
    }

    #[test]
    fn step_overflow_is_reported() {
        let x = u64::MAX / 3 + 1;
        let x = if x % 2 == 0 { x + 1 } else { x };
        assert_eq!(collatz_step(cv(x)), Err(CollatzError::Overflow { at: x }));
        // Largest odd value whose 3x+1 still fits.
        let ok = (u64::MAX - 1) / 3;
        let ok = if ok % 2 == 0 { ok - 1 } else { ok };
        assert!(collatz_step(cv(ok)).is_ok());
        // Even values never overflow.
        assert_eq!(collatz_step(cv(u64::MAX - 1)).unwrap().get(), u64::MAX / 2);
    }

    #[test]
    fn seven_sequence() {
        let t = trajectory(cv(7)).unwrap();
        let got: Vec<u64> = t.values().collect();
        assert_eq!(got, vec![7, 11, 17, 26, 13, 20, 10, 5, 8, 4, 2, 1]);
        assert_eq!(t.length(), 11);
        assert_eq!(t.peak(), cv(26));
    }

    #[test]
    fn lengths_from_the_text() {
        assert_eq!(trajectory(cv(27)).unwrap().length(), 70);
        assert_eq!(trajectory(cv(1024)).unwrap().length(), 10);
        let one = trajectory(cv(1)).unwrap();
        assert_eq!(one.length(), 0);
        assert_eq!(one.values().collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn peaks() {
        assert_eq!(trajectory_peak(cv(7)).unwrap(), cv(26));
        assert_eq!(trajectory_peak(cv(1024)).unwrap(), cv(1024));
        // Oracle: direct iteration of T recorded 4616 as the largest iterate.
        assert_eq!(trajectory_peak(cv(27)).unwrap(), cv(4616));
    }

    #[test]
    fn iteration_cap_is_distinct_from_overflow() {
        assert_eq!(
            trajectory_with_cap(cv(27), 69),
            Err(CollatzError::IterationCap { start: 27, cap: 69 })
        );
        assert!(trajectory_with_cap(cv(27), 70).is_ok());
        assert_eq!(trajectory_with_cap(cv(1), 0).unwrap().length(), 0);
    }

    #[test]
    fn parse_rejects_zero_and_garbage() {
        assert_eq!("0".parse::<CollatzValue>(), Err(CollatzError::Zero));
        assert!(matches!(
            "x7".parse::<CollatzValue>(),
            Err(CollatzError::Parse(_))
        ));
        assert_eq!("27".parse::<CollatzValue>().unwrap(), cv(27));
    }

    #[test]
    fn step_and_trajectory_agree_up_to_1e5() {
        for x0 in 1..=100_000u64 {
            let t = trajectory(cv(x0)).unwrap();
            for pair in t.steps().windows(2) {
                assert_eq!(collatz_step(pair[0]).unwrap(), pair[1]);
            }
            assert_eq!(t.steps().iter().filter(|v| v.get() == 1).count(), 1);
            assert_eq!(t.peak(), *t.steps().iter().max().unwrap());
        }
    }

    #[test]
    fn parity_law_up_to_1e5() {
        for x in 2..=100_000u64 {
            let next = step_u64(x).unwrap();
            if x % 2 == 0 {
                assert!(next < x);
            } else {
                assert!(next > x);
            }
        }
    }

    #[test]
    fn powers_of_two_halve_straight_down() {
        for k in 0..=62u32 {
            let t = trajectory(cv(1u64 << k)).unwrap();
            assert_eq!(t.length(), u64::from(k));
        }
    }
}
