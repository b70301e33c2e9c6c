use serde::{Deserialize, Serialize};

/// A real interval with explicit open/closed flags on both ends.
///
/// The threshold recursion works on half-open intervals `(lo, hi]`; endpoint
/// membership is decided with exact comparisons so a support point equal to
/// a threshold is counted exactly once.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: f64, lo_closed: bool, hi: f64, hi_closed: bool) -> Interval {
        Interval { lo, hi, lo_closed, hi_closed }
    }

    /// `(lo, hi]`
    pub fn open_closed(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, false, hi, true)
    }

    /// `[lo, hi]`
    pub fn closed(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, true, hi, true)
    }

    /// `[lo, hi)`
    pub fn closed_open(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, true, hi, false)
    }

    /// `(-inf, hi]`
    pub fn at_most(hi: f64) -> Interval {
        Interval::new(f64::NEG_INFINITY, false, hi, true)
    }

    /// `(-inf, +inf)`
    pub fn everything() -> Interval {
        Interval::new(f64::NEG_INFINITY, false, f64::INFINITY, false)
    }

    /// Infimum of the interval, whether or not it is attained.
    pub fn inf(&self) -> f64 {
        self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    pub fn is_empty(&self) -> bool {
        if self.lo < self.hi {
            false
        } else if self.lo == self.hi {
            !(self.lo_closed && self.hi_closed)
        } else {
            true
        }
    }

    /// Index range of the points of an ascending slice that lie in the
    /// interval.
    pub(crate) fn index_range(&self, ascending: &[f64]) -> std::ops::Range<usize> {
        let start = if self.lo_closed {
            ascending.partition_point(|&x| x < self.lo)
        } else {
            ascending.partition_point(|&x| x <= self.lo)
        };
        let end = if self.hi_closed {
            ascending.partition_point(|&x| x <= self.hi)
        } else {
            ascending.partition_point(|&x| x < self.hi)
        };
        start..end.max(start)
    }
}
