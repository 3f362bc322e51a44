//! Rational sequences indexed from 1, named presets, and the threshold
//! search shared by the slow-sequence and avoider modules.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SequenceError {
    #[error("index {m} is outside the sequence horizon {horizon}")]
    OutOfHorizon { m: u64, horizon: u64 },
    #[error("horizon exhausted while searching for {what}")]
    HorizonExhausted { what: String },
    #[error("sequence is not strictly decreasing at index {m}")]
    NotStrictlyDecreasing { m: u64 },
    #[error("sequence is not positive at index {m}")]
    NotPositive { m: u64 },
    #[error("consecutive gaps increase at index {m}")]
    GapsIncrease { m: u64 },
    #[error("unknown or malformed sequence preset `{0}`")]
    BadPreset(String),
    #[error("sequence indices start at 1")]
    ZeroIndex,
}

/// A sequence `s_1, s_2, …` with terms available up to `horizon()`.
pub trait Sequence {
    fn term(&self, m: u64) -> Result<Rational, SequenceError>;

    /// Largest index whose term can be produced.
    fn horizon(&self) -> u64;

    /// `s_m - s_{m+1}`.
    fn gap(&self, m: u64) -> Result<Rational, SequenceError> {
        Ok(self.term(m)? - self.term(m + 1)?)
    }

    /// Strictly decreasing, positive, with non-increasing gaps on `[from, to]`.
    /// Sequences with a block structure may decide this without visiting
    /// every index.
    fn check_convex(&self, from: u64, to: u64) -> Result<(), SequenceError> {
        check_convex_decreasing(self, from, to)
    }
}

impl<S: Sequence + ?Sized> Sequence for &S {
    fn term(&self, m: u64) -> Result<Rational, SequenceError> {
        (**self).term(m)
    }
    fn horizon(&self) -> u64 {
        (**self).horizon()
    }
    fn gap(&self, m: u64) -> Result<Rational, SequenceError> {
        (**self).gap(m)
    }
    fn check_convex(&self, from: u64, to: u64) -> Result<(), SequenceError> {
        (**self).check_convex(from, to)
    }
}

/// Closed-form sequences used as decay classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Preset {
    /// `1/m`
    Harmonic,
    /// `1/(m+1)`
    ShiftedHarmonic,
    /// `r^m` for `0 < r < 1`
    Geometric(Rational),
    /// `(m+1)^-s` for a positive integer `s`
    Polynomial(u32),
    /// `1/(L_d(m) + 1) + 1/(m+1)`, where `L_0(m) = m` and `L_{k+1}` is the
    /// binary length of `L_k`; a rational stand-in for the `d`-fold
    /// iterated logarithm.
    IterLog(u32),
}

impl Preset {
    pub fn term(&self, m: u64) -> Rational {
        match self {
            Preset::Harmonic => Rational::unit_fraction(m),
            Preset::ShiftedHarmonic => Rational::unit_fraction(m + 1),
            Preset::Geometric(r) => {
                let e = i32::try_from(m).expect("geometric exponent too large");
                r.pow(e)
            }
            Preset::Polynomial(s) => Rational::new(1, BigInt::from(m + 1).pow(*s)),
            Preset::IterLog(d) => {
                let mut v = m;
                for _ in 0..*d {
                    v = u64::from(64 - v.leading_zeros());
                }
                Rational::unit_fraction(v + 1) + Rational::unit_fraction(m + 1)
            }
        }
    }

    /// Whether `s_m - s_{m+1}` is non-increasing for every `m`.
    pub fn is_convex(&self) -> bool {
        !matches!(self, Preset::IterLog(_))
    }

    fn horizon(&self) -> u64 {
        match self {
            Preset::Geometric(_) => i32::MAX as u64 - 1,
            _ => u64::MAX - 2,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preset::Harmonic => write!(f, "harmonic"),
            Preset::ShiftedHarmonic => write!(f, "shifted-harmonic"),
            Preset::Geometric(r) => write!(f, "geometric:{r}"),
            Preset::Polynomial(s) => write!(f, "polynomial:{s}"),
            Preset::IterLog(d) => write!(f, "iterlog:{d}"),
        }
    }
}

impl FromStr for Preset {
    type Err = SequenceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SequenceError::BadPreset(s.to_string());
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        match (name, arg) {
            ("harmonic", None) => Ok(Preset::Harmonic),
            ("shifted-harmonic", None) => Ok(Preset::ShiftedHarmonic),
            ("geometric", Some(a)) => {
                let r: Rational = a.parse().map_err(|_| bad())?;
                if !r.is_positive() || r >= Rational::one() {
                    return Err(bad());
                }
                Ok(Preset::Geometric(r))
            }
            ("polynomial", Some(a)) => match a.parse::<u32>() {
                Ok(s) if s >= 1 => Ok(Preset::Polynomial(s)),
                _ => Err(bad()),
            },
            ("iterlog", Some(a)) => match a.parse::<u32>() {
                Ok(d) if d >= 1 => Ok(Preset::IterLog(d)),
                _ => Err(bad()),
            },
            _ => Err(bad()),
        }
    }
}

/// A named preset or an explicit finite table of terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SequenceSource {
    Preset(Preset),
    Table(Vec<Rational>),
}

impl SequenceSource {
    /// Convexity known for every index, including beyond the horizon.
    pub fn is_convex(&self) -> bool {
        match self {
            SequenceSource::Preset(p) => p.is_convex(),
            SequenceSource::Table(_) => false,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            SequenceSource::Preset(p) => p.to_string(),
            SequenceSource::Table(t) => format!("table[{}]", t.len()),
        }
    }

    /// The first `len` terms.
    pub fn prefix(&self, len: u64) -> Result<Vec<Rational>, SequenceError> {
        (1..=len).map(|m| self.term(m)).collect()
    }
}

impl Sequence for SequenceSource {
    fn term(&self, m: u64) -> Result<Rational, SequenceError> {
        if m == 0 {
            return Err(SequenceError::ZeroIndex);
        }
        match self {
            SequenceSource::Preset(p) => {
                if m > p.horizon() {
                    return Err(SequenceError::OutOfHorizon { m, horizon: p.horizon() });
                }
                Ok(p.term(m))
            }
            SequenceSource::Table(t) => t
                .get((m - 1) as usize)
                .cloned()
                .ok_or(SequenceError::OutOfHorizon { m, horizon: t.len() as u64 }),
        }
    }

    fn horizon(&self) -> u64 {
        match self {
            SequenceSource::Preset(p) => p.horizon(),
            SequenceSource::Table(t) => t.len() as u64,
        }
    }
}

/// Least `m >= m0` with `delta · gap(m) < l`, where `gap` is non-increasing
/// and defined for `m <= last`.
///
/// Monotonicity of `gap` makes the predicate monotone, so the search gallops
/// forward from `m0` and then bisects.
pub fn threshold_index<F>(
    gap: F,
    delta: &Rational,
    m0: u64,
    l: &Rational,
    last: u64,
) -> Result<u64, SequenceError>
where
    F: Fn(u64) -> Result<Rational, SequenceError>,
{
    first_index_where(|m| Ok(delta * gap(m)? < *l), m0.max(1), last, "threshold index")
}

/// Least `m` in `[start, last]` with `pred(m)`, for a predicate that stays
/// true once it becomes true.
pub fn first_index_where<P>(pred: P, start: u64, last: u64, what: &str) -> Result<u64, SequenceError>
where
    P: Fn(u64) -> Result<bool, SequenceError>,
{
    let exhausted = || SequenceError::HorizonExhausted { what: what.to_string() };
    if start > last {
        return Err(exhausted());
    }
    if pred(start)? {
        return Ok(start);
    }
    // invariant: pred(lo) is false
    let mut lo = start;
    let mut step: u64 = 1;
    let hi = loop {
        let cand = start.saturating_add(step).min(last);
        if pred(cand)? {
            break cand;
        }
        if cand == last {
            return Err(exhausted());
        }
        lo = cand;
        step = step.saturating_mul(2);
    };
    let mut hi = hi;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Checks that `s` is positive, strictly decreasing and has non-increasing
/// gaps on `[from, to]`.
pub fn check_convex_decreasing<S: Sequence + ?Sized>(s: &S, from: u64, to: u64) -> Result<(), SequenceError> {
    let mut prev_gap: Option<Rational> = None;
    let mut prev = s.term(from)?;
    if !prev.is_positive() {
        return Err(SequenceError::NotPositive { m: from });
    }
    for m in from + 1..=to {
        let cur = s.term(m)?;
        if cur >= prev {
            return Err(SequenceError::NotStrictlyDecreasing { m: m - 1 });
        }
        if !cur.is_positive() {
            return Err(SequenceError::NotPositive { m });
        }
        let g = &prev - &cur;
        if let Some(pg) = &prev_gap {
            if &g > pg {
                return Err(SequenceError::GapsIncrease { m: m - 1 });
            }
        }
        prev_gap = Some(g);
        prev = cur;
    }
    Ok(())
}
