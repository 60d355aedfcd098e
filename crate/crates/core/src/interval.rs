//! Finite unions of closed intervals with exact rational endpoints.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number; numerator and denominator are kept in lowest terms
/// with a positive denominator by `num_rational`.
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Parses `a/b`, an integer, or a finite decimal such as `0.125` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidParameter(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.trim_start().starts_with('-');
        let int_part = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            BigInt::from_str(int).map_err(|_| bad())?
        };
        let frac_part = BigInt::from_str(frac).map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let mag = int_part.abs() * &scale + frac_part;
        let num = if negative { -mag } else { mag };
        return Ok(Rational::new(num, scale));
    }
    BigInt::from_str(s).map(Rational::from_integer).map_err(|_| bad())
}

/// Canonical `num/den` rendering (the denominator is always written).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // ratio of huge integers: scale down both before converting
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Closed interval `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidParameter(format!(
                "interval with lo {} > hi {}",
                format_rational(&lo),
                format_rational(&hi)
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Closed intervals meet if they share at least one point.
    pub fn meets(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn center(&self) -> Rational {
        (&self.lo + &self.hi) / rat_int(2)
    }

    /// Concentric interval scaled by `factor` (e.g. 1/2 for the half-length core).
    pub fn concentric(&self, factor: &Rational) -> Interval {
        let c = self.center();
        let half = self.length() * factor / rat_int(2);
        Interval {
            lo: &c - &half,
            hi: &c + &half,
        }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (to_f64(&self.lo), to_f64(&self.hi))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", format_rational(&self.lo), format_rational(&self.hi))
    }
}

/// Finite union of pairwise disjoint closed intervals, sorted by left endpoint.
/// Overlapping or touching intervals are merged on construction, so consecutive
/// members are separated by an open gap of positive length.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
}

pub const TEXT_HEADER: &str = "intervalset v1";

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet::default()
    }

    pub fn from_intervals(mut intervals: Vec<Interval>) -> Self {
        intervals.sort_by(|a, b| a.lo.cmp(&b.lo).then_with(|| a.hi.cmp(&b.hi)));
        let mut merged: Vec<Interval> = Vec::with_capacity(intervals.len());
        for iv in intervals {
            match merged.last_mut() {
                Some(last) if iv.lo <= last.hi => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => merged.push(iv),
            }
        }
        IntervalSet { intervals: merged }
    }

    pub fn single(lo: Rational, hi: Rational) -> Result<Self> {
        Ok(IntervalSet {
            intervals: vec![Interval::new(lo, hi)?],
        })
    }

    pub fn unit() -> Self {
        IntervalSet {
            intervals: vec![Interval {
                lo: Rational::zero(),
                hi: Rational::one(),
            }],
        }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn measure(&self) -> Rational {
        self.intervals
            .iter()
            .fold(Rational::zero(), |acc, iv| acc + iv.length())
    }

    pub fn bounding_box(&self) -> Option<Interval> {
        let first = self.intervals.first()?;
        let last = self.intervals.last()?;
        Some(Interval {
            lo: first.lo.clone(),
            hi: last.hi.clone(),
        })
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let idx = self.intervals.partition_point(|iv| &iv.hi < x);
        self.intervals.get(idx).is_some_and(|iv| iv.contains(x))
    }

    /// True if the closed interval `iv` shares a point with the set.
    pub fn meets(&self, iv: &Interval) -> bool {
        let idx = self.intervals.partition_point(|m| m.hi < iv.lo);
        self.intervals.get(idx).is_some_and(|m| m.lo <= iv.hi)
    }

    /// True if the open interval `(lo, hi)` shares a point with the set.
    pub fn meets_open(&self, lo: &Rational, hi: &Rational) -> bool {
        if lo >= hi {
            return false;
        }
        let idx = self.intervals.partition_point(|m| &m.hi <= lo);
        self.intervals.get(idx).is_some_and(|m| &m.lo < hi)
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let (a, b) = (&self.intervals, &other.intervals);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            let lo = std::cmp::max(&a[i].lo, &b[j].lo);
            let hi = std::cmp::min(&a[i].hi, &b[j].hi);
            if lo <= hi {
                out.push(Interval {
                    lo: lo.clone(),
                    hi: hi.clone(),
                });
            }
            if a[i].hi < b[j].hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalSet::from_intervals(out)
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut all = self.intervals.clone();
        all.extend(other.intervals.iter().cloned());
        IntervalSet::from_intervals(all)
    }

    /// Closure of `window ∖ self`: the complementary gaps inside the window, closed.
    pub fn complement_within(&self, window: &Interval) -> IntervalSet {
        let mut out = Vec::new();
        let mut cursor = window.lo.clone();
        for iv in &self.intervals {
            if iv.hi < window.lo {
                continue;
            }
            if iv.lo > window.hi {
                break;
            }
            if iv.lo > cursor {
                out.push(Interval {
                    lo: cursor.clone(),
                    hi: iv.lo.clone(),
                });
            }
            if iv.hi > cursor {
                cursor = iv.hi.clone();
            }
        }
        if cursor < window.hi {
            out.push(Interval {
                lo: cursor,
                hi: window.hi.clone(),
            });
        }
        IntervalSet { intervals: out }
    }

    /// Exact image under `x ↦ factor·x`.
    pub fn dilate(&self, factor: &Rational) -> Result<IntervalSet> {
        if !factor.is_positive() {
            return Err(Error::InvalidParameter("dilation factor must be positive".into()));
        }
        Ok(IntervalSet {
            intervals: self
                .intervals
                .iter()
                .map(|iv| Interval {
                    lo: &iv.lo * factor,
                    hi: &iv.hi * factor,
                })
                .collect(),
        })
    }

    /// Exact image under `x ↦ x + shift`.
    pub fn translate(&self, shift: &Rational) -> IntervalSet {
        IntervalSet {
            intervals: self
                .intervals
                .iter()
                .map(|iv| Interval {
                    lo: &iv.lo + shift,
                    hi: &iv.hi + shift,
                })
                .collect(),
        }
    }

    pub fn to_f64_pairs(&self) -> Vec<(f64, f64)> {
        self.intervals.iter().map(Interval::to_f64).collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from(TEXT_HEADER);
        s.push('\n');
        for iv in &self.intervals {
            s.push_str(&format_rational(&iv.lo));
            s.push(' ');
            s.push_str(&format_rational(&iv.hi));
            s.push('\n');
        }
        s
    }

    /// Reads the `intervalset v1` text format. Intervals may appear in any order;
    /// overlapping entries are merged.
    pub fn from_text(text: &str) -> Result<IntervalSet> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == TEXT_HEADER => {}
            _ => {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("expected header {TEXT_HEADER:?}"),
                })
            }
        }
        let mut out = Vec::new();
        for (idx, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse { line: idx + 1, message };
            let mut parts = line.split_whitespace();
            let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(err("expected two endpoints".into()));
            };
            let lo = parse_rational(a).map_err(|e| err(e.to_string()))?;
            let hi = parse_rational(b).map_err(|e| err(e.to_string()))?;
            out.push(Interval::new(lo, hi).map_err(|e| err(e.to_string()))?);
        }
        Ok(IntervalSet::from_intervals(out))
    }
}
