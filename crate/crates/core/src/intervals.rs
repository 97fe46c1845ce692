//! Finite unions of open intervals of the real line.
//!
//! Unbounded sets use `±∞` endpoints, so complements of bounded sets and the
//! full line are representable and intersections with bounded sets come out
//! finite.

use alloc::vec::Vec;
use core::fmt;

/// Open interval `(lo, hi)` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpenInterval {
    pub lo: f64,
    pub hi: f64,
}

impl OpenInterval {
    /// `None` when the interval is empty (`lo >= hi`, or a NaN endpoint).
    pub fn new(lo: f64, hi: f64) -> Option<Self> {
        if lo < hi {
            Some(Self { lo, hi })
        } else {
            None
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        Self::new(self.lo.max(other.lo), self.hi.min(other.hi))
    }
}

impl fmt::Display for OpenInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

/// Sorted, pairwise disjoint open intervals. The empty list is `∅`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalUnion {
    intervals: Vec<OpenInterval>,
}

impl IntervalUnion {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn full() -> Self {
        Self::single(f64::NEG_INFINITY, f64::INFINITY)
    }

    /// `(lo, hi)`, empty when `lo >= hi`.
    pub fn single(lo: f64, hi: f64) -> Self {
        Self::from_intervals(OpenInterval::new(lo, hi))
    }

    /// Builds the union of arbitrary (possibly overlapping, possibly empty)
    /// pieces. Overlapping pieces are merged; pieces that only touch at an
    /// endpoint stay separate since that endpoint is not in the union.
    pub fn from_intervals<I: IntoIterator<Item = OpenInterval>>(pieces: I) -> Self {
        let mut v: Vec<OpenInterval> = pieces.into_iter().filter(|i| i.lo < i.hi).collect();
        v.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut out: Vec<OpenInterval> = Vec::with_capacity(v.len());
        for iv in v {
            match out.last_mut() {
                Some(last) if iv.lo < last.hi => last.hi = last.hi.max(iv.hi),
                _ => out.push(iv),
            }
        }
        Self { intervals: out }
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Self {
        Self::from_intervals(pairs.iter().filter_map(|&(lo, hi)| OpenInterval::new(lo, hi)))
    }

    pub fn intervals(&self) -> &[OpenInterval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_bounded(&self) -> bool {
        self.intervals.iter().all(OpenInterval::is_bounded)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|i| i.contains(x))
    }

    pub fn inf(&self) -> Option<f64> {
        self.intervals.first().map(|i| i.lo)
    }

    pub fn sup(&self) -> Option<f64> {
        self.intervals.last().map(|i| i.hi)
    }

    /// Lebesgue measure (may be infinite).
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(OpenInterval::length).sum()
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let (a, b) = (&self.intervals, &other.intervals);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            if let Some(iv) = a[i].intersect(&b[j]) {
                out.push(iv);
            }
            if a[i].hi < b[j].hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self { intervals: out }
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::from_intervals(self.intervals.iter().chain(other.intervals.iter()).copied())
    }

    /// Interior of the complement. Endpoints belong to neither set, so this is
    /// only the topological complement up to finitely many points.
    pub fn complement_interior(&self) -> Self {
        let mut out = Vec::with_capacity(self.intervals.len() + 1);
        let mut cursor = f64::NEG_INFINITY;
        for iv in &self.intervals {
            if let Some(gap) = OpenInterval::new(cursor, iv.lo) {
                out.push(gap);
            }
            cursor = iv.hi;
        }
        if let Some(gap) = OpenInterval::new(cursor, f64::INFINITY) {
            out.push(gap);
        }
        Self { intervals: out }
    }

    /// Endpoint-wise comparison with absolute tolerance; infinite endpoints
    /// must match exactly.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let close = |x: f64, y: f64| x == y || (x - y).abs() <= tol;
        self.intervals.len() == other.intervals.len()
            && self
                .intervals
                .iter()
                .zip(&other.intervals)
                .all(|(a, b)| close(a.lo, b.lo) && close(a.hi, b.hi))
    }
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return f.write_str("∅");
        }
        for (k, iv) in self.intervals.iter().enumerate() {
            if k > 0 {
                f.write_str(" ∪ ")?;
            }
            write!(f, "{iv}")?;
        }
        Ok(())
    }
}
