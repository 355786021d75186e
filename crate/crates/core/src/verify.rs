//! Exhaustive convergence checks over a range of starting values.
//!
//! Results are independent of chunking and of the memo table: every start is
//! resolved to the same exact `(length, peak)` pair or the same failure, and
//! ties are broken toward the smallest start.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::collatz::{step_u64, CollatzError, CollatzValue, DEFAULT_ITERATION_CAP};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyConfig {
    pub iteration_cap: u64,
    /// Starts below this bound get their `(length, peak)` memoized. 0 disables.
    pub memo_limit: u64,
    pub chunk_size: u64,
    pub parallel: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            iteration_cap: DEFAULT_ITERATION_CAP,
            memo_limit: 1 << 20,
            chunk_size: 1 << 16,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub value: u64,
    pub start: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    Overflow,
    IterationCap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RangeFailure {
    pub start: u64,
    pub reason: FailureReason,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RangeReport {
    pub lo: u64,
    pub hi: u64,
    pub all_converged: bool,
    /// Longest trajectory among converged starts.
    pub max_length: Record,
    /// Highest iterate among converged starts.
    pub max_peak: Record,
    /// Smallest start that failed, if any.
    pub failure: Option<RangeFailure>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("invalid range [{lo}, {hi}]: need 1 <= lo <= hi")]
    InvalidRange { lo: u64, hi: u64 },
}

pub fn verify_range(lo: CollatzValue, hi: CollatzValue) -> Result<RangeReport, VerifyError> {
    verify_range_with(lo, hi, &VerifyConfig::default())
}

pub fn verify_range_with(
    lo: CollatzValue,
    hi: CollatzValue,
    config: &VerifyConfig,
) -> Result<RangeReport, VerifyError> {
    let (lo, hi) = (lo.get(), hi.get());
    if lo > hi {
        return Err(VerifyError::InvalidRange { lo, hi });
    }
    let memo = Memo::build(
        config.memo_limit.min(hi.saturating_add(1)),
        config.iteration_cap,
    );
    let chunk = config.chunk_size.max(1);
    let chunks = (hi - lo) / chunk + 1;
    let run = |i: u64| {
        let a = lo + i * chunk;
        let b = a.saturating_add(chunk - 1).min(hi);
        summarize(a, b, &memo, config.iteration_cap)
    };
    let summary = if config.parallel {
        (0..chunks)
            .into_par_iter()
            .map(run)
            .reduce(Summary::empty, Summary::merge)
    } else {
        (0..chunks).map(run).fold(Summary::empty(), Summary::merge)
    };
    Ok(RangeReport {
        lo,
        hi,
        all_converged: summary.failure.is_none(),
        max_length: summary.max_length.unwrap_or(Record {
            value: 0,
            start: lo,
        }),
        max_peak: summary.max_peak.unwrap_or(Record {
            value: lo,
            start: lo,
        }),
        failure: summary.failure,
    })
}

#[derive(Debug, Clone, Copy)]
struct Outcome {
    length: u64,
    peak: u64,
}

/// Exact `(length, peak)` for every start below `limit`, built in ascending
/// order: a start's tail below itself is already in the table.
struct Memo {
    entries: Vec<Option<Outcome>>,
}

impl Memo {
    fn build(limit: u64, cap: u64) -> Memo {
        let mut entries: Vec<Option<Outcome>> = Vec::with_capacity(limit as usize);
        if limit > 0 {
            entries.push(None); // slot 0 is unused
        }
        for n in 1..limit {
            let resolved = if n == 1 {
                Some(Outcome { length: 0, peak: 1 })
            } else {
                Self::resolve_against(&entries, n, cap)
            };
            entries.push(resolved);
        }
        Memo { entries }
    }

    fn resolve_against(entries: &[Option<Outcome>], n: u64, cap: u64) -> Option<Outcome> {
        let mut x = n;
        let mut peak = n;
        let mut steps = 0u64;
        loop {
            x = step_u64(x).ok()?;
            steps += 1;
            peak = peak.max(x);
            if x < n {
                let tail = entries[x as usize]?;
                let length = steps + tail.length;
                return (length <= cap).then_some(Outcome {
                    length,
                    peak: peak.max(tail.peak),
                });
            }
            if steps >= cap {
                return None;
            }
        }
    }

    fn get(&self, x: u64) -> Option<Option<Outcome>> {
        self.entries.get(x as usize).copied()
    }
}

fn resolve(n: u64, memo: &Memo, cap: u64) -> Result<Outcome, CollatzError> {
    if let Some(Some(hit)) = memo.get(n) {
        return Ok(hit);
    }
    let mut x = n;
    let mut peak = n;
    let mut steps = 0u64;
    while x != 1 {
        if let Some(Some(tail)) = memo.get(x) {
            let length = steps + tail.length;
            if length > cap {
                break;
            }
            return Ok(Outcome {
                length,
                peak: peak.max(tail.peak),
            });
        }
        if steps >= cap {
            break;
        }
        x = step_u64(x)?;
        steps += 1;
        peak = peak.max(x);
    }
    if x == 1 {
        Ok(Outcome {
            length: steps,
            peak,
        })
    } else {
        Err(CollatzError::IterationCap { start: n, cap })
    }
}

#[derive(Debug, Clone, Copy)]
struct Summary {
    max_length: Option<Record>,
    max_peak: Option<Record>,
    failure: Option<RangeFailure>,
}

impl Summary {
    fn empty() -> Self {
        Summary {
            max_length: None,
            max_peak: None,
            failure: None,
        }
    }

    fn merge(self, other: Summary) -> Summary {
        Summary {
            max_length: better(self.max_length, other.max_length),
            max_peak: better(self.max_peak, other.max_peak),
            failure: match (self.failure, other.failure) {
                (Some(a), Some(b)) => Some(if a.start <= b.start { a } else { b }),
                (a, b) => a.or(b),
            },
        }
    }
}

/// Larger value wins; equal values go to the smaller start.
fn better(a: Option<Record>, b: Option<Record>) -> Option<Record> {
    match (a, b) {
        (Some(a), Some(b)) => Some(
            if (b.value, std::cmp::Reverse(b.start)) > (a.value, std::cmp::Reverse(a.start)) {
                b
            } else {
                a
            },
        ),
        (a, b) => a.or(b),
    }
}

fn summarize(a: u64, b: u64, memo: &Memo, cap: u64) -> Summary {
    let mut s = Summary::empty();
    for n in a..=b {
        match resolve(n, memo, cap) {
            Ok(o) => {
                s.max_length = better(
                    s.max_length,
                    Some(Record {
                        value: o.length,
                        start: n,
                    }),
                );
                s.max_peak = better(
                    s.max_peak,
                    Some(Record {
                        value: o.peak,
                        start: n,
                    }),
                );
            }
            Err(e) => {
                if s.failure.is_none() {
                    let reason = match e {
                        CollatzError::Overflow { .. } => FailureReason::Overflow,
                        _ => FailureReason::IterationCap,
                    };
                    s.failure = Some(RangeFailure { start: n, reason });
                }
            }
        }
    }
    s
}
