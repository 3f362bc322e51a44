//! Bounded intervals with per-endpoint open/closed flags, and canonical
//! finite unions of them.
//!
//! An [`IntervalSet`] is always stored in canonical form: parts sorted by
//! their lower endpoint, pairwise disjoint, and no two adjacent parts whose
//! union is itself an interval. Two sets are therefore equal as point sets
//! exactly when their `parts` vectors are equal.
//!
//! `(a,b) ∪ [b,c)` merges into `(a,c)`, while `(a,b) ∪ (b,c)` stays as two
//! parts because the point `b` is missing.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IntervalError {
    #[error("invalid interval: lower endpoint {lo} exceeds upper endpoint {hi}")]
    Reversed { lo: Rational, hi: Rational },
    #[error("invalid interval: degenerate endpoint {at} must be closed on both sides")]
    EmptyDegenerate { at: Rational },
    #[error("affine map with zero scale")]
    ZeroScale,
    #[error("neighbourhood radius must be positive, got {0}")]
    NonPositiveRadius(Rational),
    #[error("star requires parts with disjoint closures; parts touch at {0}")]
    TouchingClosures(Rational),
    #[error("star requires nondegenerate parts; found the point {0}")]
    DegeneratePart(Rational),
    #[error("malformed interval `{0}`")]
    Parse(String),
}

/// A nonempty bounded interval.
///
/// Either `lo < hi`, or `lo == hi` with both endpoints closed (a single
/// point). Construction goes through [`Interval::new`] or the shape helpers,
/// all of which reject anything else.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
    lo_closed: bool,
    hi_closed: bool,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational, lo_closed: bool, hi_closed: bool) -> Result<Self, IntervalError> {
        match lo.cmp(&hi) {
            Ordering::Greater => Err(IntervalError::Reversed { lo, hi }),
            Ordering::Equal if !(lo_closed && hi_closed) => Err(IntervalError::EmptyDegenerate { at: lo }),
            _ => Ok(Interval { lo, hi, lo_closed, hi_closed }),
        }
    }

    /// Like [`Interval::new`] but returns `None` for empty shapes.
    pub fn try_nonempty(lo: Rational, hi: Rational, lo_closed: bool, hi_closed: bool) -> Option<Self> {
        Interval::new(lo, hi, lo_closed, hi_closed).ok()
    }

    /// `(lo, hi)`; requires `lo < hi`.
    pub fn open(lo: Rational, hi: Rational) -> Result<Self, IntervalError> {
        if lo >= hi {
            return Err(IntervalError::Reversed { lo, hi });
        }
        Interval::new(lo, hi, false, false)
    }

    /// `[lo, hi]`; requires `lo <= hi`.
    pub fn closed(lo: Rational, hi: Rational) -> Result<Self, IntervalError> {
        Interval::new(lo, hi, true, true)
    }

    /// `[lo, hi)`; requires `lo < hi`.
    pub fn closed_open(lo: Rational, hi: Rational) -> Result<Self, IntervalError> {
        if lo >= hi {
            return Err(IntervalError::Reversed { lo, hi });
        }
        Interval::new(lo, hi, true, false)
    }

    /// `(lo, hi]`; requires `lo < hi`.
    pub fn open_closed(lo: Rational, hi: Rational) -> Result<Self, IntervalError> {
        if lo >= hi {
            return Err(IntervalError::Reversed { lo, hi });
        }
        Interval::new(lo, hi, false, true)
    }

    pub fn point(at: Rational) -> Self {
        Interval { lo: at.clone(), hi: at, lo_closed: true, hi_closed: true }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    pub fn is_open(&self) -> bool {
        !self.lo_closed && !self.hi_closed
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        self.lo.midpoint(&self.hi)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let above = match x.cmp(&self.lo) {
            Ordering::Greater => true,
            Ordering::Equal => self.lo_closed,
            Ordering::Less => false,
        };
        above
            && match x.cmp(&self.hi) {
                Ordering::Less => true,
                Ordering::Equal => self.hi_closed,
                Ordering::Greater => false,
            }
    }

    /// Whether every point of `other` lies in `self`.
    pub fn contains_interval(&self, other: &Interval) -> bool {
        cmp_lower(self, other) != Ordering::Greater && cmp_upper(self, other) != Ordering::Less
    }

    /// Closure `[lo, hi]`.
    pub fn closure(&self) -> Interval {
        Interval { lo: self.lo.clone(), hi: self.hi.clone(), lo_closed: true, hi_closed: true }
    }

    /// The same endpoints with the given flags, if that shape is nonempty.
    pub fn with_flags(&self, lo_closed: bool, hi_closed: bool) -> Option<Interval> {
        Interval::try_nonempty(self.lo.clone(), self.hi.clone(), lo_closed, hi_closed)
    }

    /// Closed middle third `[lo + |I|/3, lo + 2|I|/3]`.
    pub fn closed_middle_third(&self) -> Interval {
        let third = self.length() / Rational::integer(3);
        let a = &self.lo + &third;
        let b = &a + &third;
        Interval { lo: a, hi: b, lo_closed: true, hi_closed: true }
    }

    pub fn translate(&self, shift: &Rational) -> Interval {
        Interval {
            lo: &self.lo + shift,
            hi: &self.hi + shift,
            lo_closed: self.lo_closed,
            hi_closed: self.hi_closed,
        }
    }

    /// Image under `x ↦ scale·x + shift`. Endpoint order and flags swap when
    /// `scale < 0`.
    pub fn affine(&self, scale: &Rational, shift: &Rational) -> Result<Interval, IntervalError> {
        if scale.is_zero() {
            return Err(IntervalError::ZeroScale);
        }
        let a = scale * &self.lo + shift;
        let b = scale * &self.hi + shift;
        Ok(if scale.is_positive() {
            Interval { lo: a, hi: b, lo_closed: self.lo_closed, hi_closed: self.hi_closed }
        } else {
            Interval { lo: b, hi: a, lo_closed: self.hi_closed, hi_closed: self.lo_closed }
        })
    }

    /// Intersection of two intervals, if nonempty.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let (lo, lo_closed) = match self.lo.cmp(&other.lo) {
            Ordering::Greater => (&self.lo, self.lo_closed),
            Ordering::Less => (&other.lo, other.lo_closed),
            Ordering::Equal => (&self.lo, self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp(&other.hi) {
            Ordering::Less => (&self.hi, self.hi_closed),
            Ordering::Greater => (&other.hi, other.hi_closed),
            Ordering::Equal => (&self.hi, self.hi_closed && other.hi_closed),
        };
        Interval::try_nonempty(lo.clone(), hi.clone(), lo_closed, hi_closed)
    }
}

/// Order on lower bounds: smaller value first, and at equal value a closed
/// bound (which includes the point) first.
fn cmp_lower(a: &Interval, b: &Interval) -> Ordering {
    a.lo.cmp(&b.lo).then_with(|| b.lo_closed.cmp(&a.lo_closed))
}

/// Order on upper bounds: at equal value an open bound comes first.
fn cmp_upper(a: &Interval, b: &Interval) -> Ordering {
    a.hi.cmp(&b.hi).then_with(|| a.hi_closed.cmp(&b.hi_closed))
}

/// Whether `next` (with `cmp_lower(cur, next) != Greater`) overlaps or abuts
/// `cur` so that their union is a single interval.
fn joins(cur: &Interval, next: &Interval) -> bool {
    match next.lo.cmp(&cur.hi) {
        Ordering::Less => true,
        Ordering::Equal => cur.hi_closed || next.lo_closed,
        Ordering::Greater => false,
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{},{}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Interval {
    type Err = IntervalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || IntervalError::Parse(s.to_string());
        let t = s.trim();
        if t.len() < 5 {
            return Err(err());
        }
        let lo_closed = match t.as_bytes()[0] {
            b'[' => true,
            b'(' => false,
            _ => return Err(err()),
        };
        let hi_closed = match t.as_bytes()[t.len() - 1] {
            b']' => true,
            b')' => false,
            _ => return Err(err()),
        };
        let inner = &t[1..t.len() - 1];
        let (a, b) = inner.split_once(',').ok_or_else(err)?;
        let lo: Rational = a.parse().map_err(|_| err())?;
        let hi: Rational = b.parse().map_err(|_| err())?;
        Interval::new(lo, hi, lo_closed, hi_closed)
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A canonical finite union of intervals.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntervalSet {
    parts: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { parts: Vec::new() }
    }

    /// Canonical union of arbitrary intervals. Intervals are valid by
    /// construction, so this cannot fail.
    pub fn normalize(mut intervals: Vec<Interval>) -> Self {
        intervals.sort_by(cmp_lower);
        let mut parts: Vec<Interval> = Vec::with_capacity(intervals.len());
        for iv in intervals {
            match parts.last_mut() {
                Some(cur) if joins(cur, &iv) => {
                    if cmp_upper(&iv, cur) == Ordering::Greater {
                        cur.hi = iv.hi;
                        cur.hi_closed = iv.hi_closed;
                    }
                }
                _ => parts.push(iv),
            }
        }
        IntervalSet { parts }
    }

    pub fn from_interval(iv: Interval) -> Self {
        IntervalSet { parts: vec![iv] }
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn into_parts(self) -> Vec<Interval> {
        self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    /// Total length; endpoint flags and isolated points contribute nothing.
    pub fn measure(&self) -> Rational {
        self.parts.iter().map(Interval::length).sum()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        // first part whose upper end is not below x
        let idx = self.parts.partition_point(|p| match p.hi.cmp(x) {
            Ordering::Less => true,
            Ordering::Equal => !p.hi_closed,
            Ordering::Greater => false,
        });
        self.parts.get(idx).is_some_and(|p| p.contains(x))
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut all = Vec::with_capacity(self.parts.len() + other.parts.len());
        all.extend(self.parts.iter().cloned());
        all.extend(other.parts.iter().cloned());
        IntervalSet::normalize(all)
    }

    pub fn union_all<'a>(sets: impl IntoIterator<Item = &'a IntervalSet>) -> IntervalSet {
        let all: Vec<Interval> = sets.into_iter().flat_map(|s| s.parts.iter().cloned()).collect();
        IntervalSet::normalize(all)
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let (mut i, mut k) = (0, 0);
        let mut out = Vec::new();
        while i < self.parts.len() && k < other.parts.len() {
            let (a, b) = (&self.parts[i], &other.parts[k]);
            if let Some(c) = a.intersect(b) {
                out.push(c);
            }
            if cmp_upper(a, b) == Ordering::Less {
                i += 1;
            } else {
                k += 1;
            }
        }
        IntervalSet::normalize(out)
    }

    /// `window \ self`.
    pub fn complement_within(&self, window: &Interval) -> IntervalSet {
        let mut out = Vec::new();
        let mut cursor = window.lo.clone();
        let mut cursor_closed = window.lo_closed;
        for p in &self.parts {
            let Some(p) = p.intersect(window) else { continue };
            if let Some(g) = Interval::try_nonempty(cursor.clone(), p.lo.clone(), cursor_closed, !p.lo_closed) {
                out.push(g);
            }
            cursor = p.hi.clone();
            cursor_closed = !p.hi_closed;
        }
        if let Some(g) = Interval::try_nonempty(cursor, window.hi.clone(), cursor_closed, window.hi_closed) {
            out.push(g);
        }
        IntervalSet::normalize(out)
    }

    /// `self \ other`.
    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        let (Some(first), Some(last)) = (self.parts.first(), self.parts.last()) else {
            return IntervalSet::empty();
        };
        let hull = Interval { lo: first.lo.clone(), hi: last.hi.clone(), lo_closed: true, hi_closed: true };
        self.intersect(&other.complement_within(&hull))
    }

    pub fn is_subset_of(&self, other: &IntervalSet) -> bool {
        self.difference(other).is_empty()
    }

    /// Image under `x ↦ scale·x + shift`.
    pub fn affine(&self, scale: &Rational, shift: &Rational) -> Result<IntervalSet, IntervalError> {
        let parts = self
            .parts
            .iter()
            .map(|p| p.affine(scale, shift))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(IntervalSet::normalize(parts))
    }

    pub fn translate(&self, shift: &Rational) -> IntervalSet {
        IntervalSet { parts: self.parts.iter().map(|p| p.translate(shift)).collect() }
    }

    /// Left `r`-neighbourhood `{x - t : x ∈ self, 0 <= t < r}`.
    ///
    /// Each part `⟨a,b⟩` maps to `(a - r, b⟩`: the left end is never attained
    /// and the right end keeps its flag. For open parts this is `(a - r, b)`.
    pub fn left_neighborhood(&self, r: &Rational) -> Result<IntervalSet, IntervalError> {
        if !r.is_positive() {
            return Err(IntervalError::NonPositiveRadius(r.clone()));
        }
        let parts = self
            .parts
            .iter()
            .map(|p| Interval {
                lo: &p.lo - r,
                hi: p.hi.clone(),
                lo_closed: false,
                hi_closed: p.hi_closed,
            })
            .collect();
        Ok(IntervalSet::normalize(parts))
    }

    /// Replace every part `⟨a,b⟩` by `[a,b)`. Parts must be nondegenerate
    /// with pairwise disjoint closures.
    pub fn star(&self) -> Result<IntervalSet, IntervalError> {
        for w in self.parts.windows(2) {
            if w[0].hi == w[1].lo {
                return Err(IntervalError::TouchingClosures(w[0].hi.clone()));
            }
        }
        let parts = self
            .parts
            .iter()
            .map(|p| {
                if p.is_degenerate() {
                    Err(IntervalError::DegeneratePart(p.lo.clone()))
                } else {
                    Ok(Interval { lo: p.lo.clone(), hi: p.hi.clone(), lo_closed: true, hi_closed: false })
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(IntervalSet { parts })
    }

    /// Drop isolated points.
    pub fn without_points(&self) -> IntervalSet {
        IntervalSet { parts: self.parts.iter().filter(|p| !p.is_degenerate()).cloned().collect() }
    }

    /// Longest part, leftmost on ties.
    pub fn longest_part(&self) -> Option<&Interval> {
        let mut best: Option<&Interval> = None;
        for p in &self.parts {
            if best.is_none_or(|b| p.length() > b.length()) {
                best = Some(p);
            }
        }
        best
    }
}

impl FromIterator<Interval> for IntervalSet {
    fn from_iter<T: IntoIterator<Item = Interval>>(iter: T) -> Self {
        IntervalSet::normalize(iter.into_iter().collect())
    }
}

impl From<Interval> for IntervalSet {
    fn from(iv: Interval) -> Self {
        IntervalSet::from_interval(iv)
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "∅");
        }
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for IntervalSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.parts.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntervalSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let parts = Vec::<Interval>::deserialize(deserializer)?;
        Ok(IntervalSet::normalize(parts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn iv(s: &str) -> Interval {
        s.parse().unwrap()
    }

    fn set(parts: &[&str]) -> IntervalSet {
        IntervalSet::normalize(parts.iter().map(|s| iv(s)).collect())
    }

    #[test]
    fn interval_validation() {
        assert!(Interval::open(q(1, 2), q(1, 2)).is_err());
        assert!(Interval::closed(q(1, 2), q(1, 3)).is_err());
        assert!(Interval::new(q(1, 2), q(1, 2), true, false).is_err());
        assert!(Interval::closed(q(1, 2), q(1, 2)).is_ok());
        assert!("[1/2,1/3]".parse::<Interval>().is_err());
        assert!("<0,1)".parse::<Interval>().is_err());
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(set(&["(0,1/2)", "(1/4,3/4)"]), set(&["(0,3/4)"]));
        assert_eq!(set(&["(0,1/2)", "[1/2,1)"]).parts(), &[iv("(0,1)")]);
        assert_eq!(set(&["(0,1/2)", "(1/2,1)"]).len(), 2);
        // contained part and equal lower ends with differing flags
        assert_eq!(set(&["(0,1)", "[0,1/2]"]).parts(), &[iv("[0,1)")]);
        assert_eq!(set(&["[1,1]", "(0,1)"]).parts(), &[iv("(0,1]")]);
    }

    #[test]
    fn affine_examples() {
        let one = q(1, 1);
        assert_eq!(set(&["(1/3,2/3)"]).affine(&one, &q(-1, 3)).unwrap(), set(&["(0,1/3)"]));
        assert_eq!(set(&["(0,1)"]).affine(&q(-1, 1), &q(0, 1)).unwrap(), set(&["(-1,0)"]));
        assert_eq!(
            set(&["[0,1/4)", "(1/2,1)"]).affine(&q(2, 1), &one).unwrap(),
            set(&["[1,3/2)", "(2,3)"])
        );
        assert_eq!(
            set(&["[0,1/4)"]).affine(&q(-1, 1), &q(0, 1)).unwrap().parts(),
            &[iv("(-1/4,0]")]
        );
        assert_eq!(set(&["(0,1)"]).affine(&q(0, 1), &one), Err(IntervalError::ZeroScale));
    }

    #[test]
    fn boolean_examples() {
        let w = iv("[0,1]");
        assert_eq!(set(&["(4/9,5/9)"]).complement_within(&w), set(&["[0,4/9]", "[5/9,1]"]));
        assert_eq!(set(&["(0,1/2)"]).intersect(&set(&["(1/4,1)"])), set(&["(1/4,1/2)"]));
        assert_eq!(IntervalSet::empty().union(&set(&["[1/3,2/3]"])), set(&["[1/3,2/3]"]));
        // complement at window edges produces degenerate points
        assert_eq!(set(&["(0,1)"]).complement_within(&w), set(&["[0,0]", "[1,1]"]));
        assert_eq!(set(&["[0,1]"]).complement_within(&w), IntervalSet::empty());
        assert_eq!(set(&["[0,1/2)"]).complement_within(&iv("[0,1)")), set(&["[1/2,1)"]));
        assert_eq!(set(&["[-1,2]"]).complement_within(&w), IntervalSet::empty());
    }

    #[test]
    fn difference_and_subset() {
        let a = set(&["[0,1]"]);
        let b = set(&["(1/4,1/2)", "[3/4,1]"]);
        assert_eq!(a.difference(&b), set(&["[0,1/4]", "[1/2,3/4)"]));
        assert!(b.is_subset_of(&a));
        assert!(!a.is_subset_of(&b));
    }

    #[test]
    fn measure_examples() {
        assert_eq!(set(&["(0,1/2)", "[1/2,1)"]).measure(), q(1, 1));
        assert_eq!(IntervalSet::empty().measure(), q(0, 1));
        assert_eq!(set(&["[0,4/9]", "[5/9,1]"]).measure(), q(8, 9));
    }

    #[test]
    fn left_neighborhood_examples() {
        let s = set(&["(1/3,2/3)"]);
        assert_eq!(s.left_neighborhood(&q(1, 6)).unwrap(), set(&["(1/6,2/3)"]));
        let s = set(&["(0,1/4)", "(1/2,3/4)"]);
        assert_eq!(s.left_neighborhood(&q(1, 8)).unwrap(), set(&["(-1/8,1/4)", "(3/8,3/4)"]));
        assert!(s.left_neighborhood(&q(0, 1)).is_err());
        assert!(s.left_neighborhood(&q(-1, 2)).is_err());
    }

    #[test]
    fn star_examples() {
        assert_eq!(set(&["(1/3,2/3)"]).star().unwrap(), set(&["[1/3,2/3)"]));
        assert_eq!(set(&["(0,1/4)", "(1/2,1)"]).star().unwrap(), set(&["[0,1/4)", "[1/2,1)"]));
        assert_eq!(
            set(&["(0,1/2)", "(1/2,1]"]).star(),
            Err(IntervalError::TouchingClosures(q(1, 2)))
        );
        assert!(set(&["[1,1]"]).star().is_err());
    }

    #[test]
    fn membership() {
        let s = set(&["(0,1/2)", "[3/4,1]", "[2,2]"]);
        assert!(!s.contains(&q(0, 1)));
        assert!(s.contains(&q(1, 4)));
        assert!(!s.contains(&q(1, 2)));
        assert!(s.contains(&q(3, 4)));
        assert!(s.contains(&q(1, 1)));
        assert!(s.contains(&q(2, 1)));
        assert!(!s.contains(&q(3, 2)));
    }

    #[test]
    fn json_form() {
        let s = set(&["(0,1/2)", "[3/4,1]"]);
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"["(0,1/2)","[3/4,1]"]"#);
        let back: IntervalSet = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<IntervalSet>(r#"["(1,0)"]"#).is_err());
    }
}
