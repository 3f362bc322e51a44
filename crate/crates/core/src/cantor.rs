//! The middle-third gap ladder.
//!
//! Starting from `[0,1]`, every level removes one open gap from the closed
//! middle third of each surviving closed interval. All gaps of a level share
//! one length `l_n = 1/m`, and each level's length is at most half the
//! previous one. The gaps of level `n` are `O_n = ∪_j I_{n,j}`; the closed
//! survivors are `K_{n,j}`, numbered left to right, and the children of
//! `K_{n,j}` are `K_{n+1,2j-1}` and `K_{n+1,2j}`.
//!
//! Where the gaps sit is delegated to a [`GapOracle`]. Three oracles are
//! built in: a plain splitter with no target set, one that avoids the
//! classical ternary Cantor set, and one that avoids a finite point set.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::interval::{Interval, IntervalError, IntervalSet};
use crate::rational::Rational;

/// Deepest ladder this module will materialize (the last level alone holds
/// `2^depth` intervals).
pub const MAX_DEPTH: u32 = 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CantorError {
    #[error("oracle failed at level {n}, interval {j}: {reason}")]
    Oracle { n: u32, j: u64, reason: String },
    #[error("oracle gap {gap} at level {n}, interval {j} is not inside the closed middle third of {parent}")]
    OutsideMiddleThird { n: u32, j: u64, gap: Interval, parent: Interval },
    #[error("oracle gap {gap} at level {n}, interval {j} meets the target set")]
    MeetsTarget { n: u32, j: u64, gap: Interval },
    #[error("depth must be between 1 and {MAX_DEPTH}, got {0}")]
    BadDepth(u32),
    #[error("{0}")]
    Parameters(String),
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

/// Chooses where to cut a closed interval.
pub trait GapOracle {
    /// An open interval inside the closed middle third of `k` that misses
    /// the target set. The same `k` must always give the same answer.
    fn gap(&self, k: &Interval) -> Result<Interval, String>;

    /// Whether `i` misses the target set: `None` when the target is not
    /// checkable.
    fn misses_target(&self, i: &Interval) -> Option<bool>;

    fn name(&self) -> String;
}

/// Open middle third of the closed middle third; the target set is empty.
#[derive(Debug, Clone, Copy, Default)]
pub struct MiddleThird;

impl GapOracle for MiddleThird {
    fn gap(&self, k: &Interval) -> Result<Interval, String> {
        let inner = k.closed_middle_third().closed_middle_third();
        inner.with_flags(false, false).ok_or_else(|| format!("{k} is degenerate"))
    }

    fn misses_target(&self, _i: &Interval) -> Option<bool> {
        Some(true)
    }

    fn name(&self) -> String {
        "middle-third".into()
    }
}

/// Avoids the classical ternary Cantor set: the gap is the longest piece of
/// a removed ternary interval inside the open middle third, taken at the
/// coarsest ternary level that reaches it.
#[derive(Debug, Clone, Copy, Default)]
pub struct TernaryCantor;

/// Ternary levels searched before giving up.
const TERNARY_LEVELS: u32 = 400;

impl TernaryCantor {
    /// The open complementary component of the Cantor set that contains `x`
    /// when `x ∈ (0,1)`, or `Ok(None)` when `x` is in the Cantor set.
    fn component(x: &Rational) -> Result<Option<Interval>, String> {
        let three = Rational::integer(3);
        let mut prefix = Rational::zero();
        let mut scale = Rational::one();
        let mut frac = x.clone();
        let mut seen = HashSet::new();
        for _ in 0..10_000 {
            if frac.is_zero() {
                return Ok(None);
            }
            if !seen.insert(frac.clone()) {
                // periodic expansion avoiding the digit 1
                return Ok(None);
            }
            scale = scale / &three;
            let (d, rest) = (&frac * &three).split_floor();
            if d.is_one() {
                if rest.is_zero() {
                    return Ok(None);
                }
                let lo = &prefix + &scale;
                let hi = &lo + &scale;
                return Ok(Some(Interval::open(lo, hi).map_err(|e| e.to_string())?));
            }
            prefix += Rational::from(d) * &scale;
            frac = rest;
        }
        Err(format!("ternary expansion of {x} did not resolve"))
    }

    fn has_no_digit_one(mut t: BigInt) -> bool {
        let three = BigInt::from(3);
        while !t.is_zero() {
            if (&t % &three).is_one() {
                return false;
            }
            t /= &three;
        }
        true
    }
}

impl GapOracle for TernaryCantor {
    fn gap(&self, k: &Interval) -> Result<Interval, String> {
        let m = k.closed_middle_third();
        let window = m.with_flags(false, false).ok_or_else(|| format!("{k} is degenerate"))?;
        let (a, b) = (window.lo().clone(), window.hi().clone());
        // parts of the window outside [0,1] miss the Cantor set outright
        if a < Rational::zero() || b > Rational::one() {
            let outside = IntervalSet::from(window.clone())
                .difference(&IntervalSet::from(Interval::closed(Rational::zero(), Rational::one()).unwrap()));
            if let Some(p) = outside.longest_part() {
                return Ok(p.with_flags(false, false).expect("nondegenerate"));
            }
        }
        let mut pow = BigInt::one(); // 3^(level-1)
        for _ in 0..TERNARY_LEVELS {
            let denom: BigInt = &pow * 3;
            let t_lo: BigInt = (&a * Rational::from(pow.clone())).floor() - 1;
            let t_hi = (&b * Rational::from(pow.clone())).ceil();
            let mut t = t_lo.max(BigInt::zero());
            let t_end = t_hi.min(&pow - 1u32);
            let mut best: Option<Interval> = None;
            while t <= t_end {
                if Self::has_no_digit_one(t.clone()) {
                    let lo = Rational::new(&t * 3u32 + 1u32, denom.clone());
                    let hi = Rational::new(&t * 3u32 + 2u32, denom.clone());
                    let removed = Interval::open(lo, hi).expect("ordered");
                    if let Some(piece) = removed.intersect(&window) {
                        if best.as_ref().is_none_or(|cur| piece.length() > cur.length()) {
                            best = Some(piece);
                        }
                    }
                }
                t += 1u32;
            }
            if let Some(g) = best {
                return Ok(g);
            }
            pow *= 3u32;
        }
        Err(format!("no removed ternary interval found inside {window}"))
    }

    fn misses_target(&self, i: &Interval) -> Option<bool> {
        let unit = Interval::closed(Rational::zero(), Rational::one()).unwrap();
        let Some(j) = i.intersect(&unit) else { return Some(true) };
        if j.contains(&Rational::zero()) || j.contains(&Rational::one()) {
            return Some(false);
        }
        match Self::component(&j.midpoint()) {
            Ok(Some(g)) => Some(g.contains_interval(&j)),
            Ok(None) => Some(false),
            Err(_) => None,
        }
    }

    fn name(&self) -> String {
        "ternary-cantor".into()
    }
}

/// Avoids a finite set of points: the gap is the longest piece of the open
/// middle third that contains none of them, leftmost on ties.
#[derive(Debug, Clone, Default)]
pub struct FinitePoints {
    points: Vec<Rational>,
}

impl FinitePoints {
    pub fn new(mut points: Vec<Rational>) -> Self {
        points.sort();
        points.dedup();
        FinitePoints { points }
    }

    pub fn points(&self) -> &[Rational] {
        &self.points
    }
}

impl GapOracle for FinitePoints {
    fn gap(&self, k: &Interval) -> Result<Interval, String> {
        let window = k.closed_middle_third().with_flags(false, false).ok_or_else(|| format!("{k} is degenerate"))?;
        let holes: IntervalSet = self.points.iter().cloned().map(Interval::point).collect();
        let free = IntervalSet::from(window.clone()).difference(&holes);
        free.longest_part().cloned().ok_or_else(|| format!("no free piece inside {window}"))
    }

    fn misses_target(&self, i: &Interval) -> Option<bool> {
        Some(!self.points.iter().any(|p| i.contains(p)))
    }

    fn name(&self) -> String {
        "points".into()
    }
}

/// The built-in oracles behind one type, with a text form for the CLI:
/// `middle-third`, `ternary-cantor`, or `points:p1,p2,…`.
#[derive(Debug, Clone, Default)]
pub enum BuiltinOracle {
    #[default]
    MiddleThird,
    TernaryCantor,
    Points(FinitePoints),
}

impl BuiltinOracle {
    fn inner(&self) -> &dyn GapOracle {
        match self {
            BuiltinOracle::MiddleThird => &MiddleThird,
            BuiltinOracle::TernaryCantor => &TernaryCantor,
            BuiltinOracle::Points(p) => p,
        }
    }
}

impl GapOracle for BuiltinOracle {
    fn gap(&self, k: &Interval) -> Result<Interval, String> {
        self.inner().gap(k)
    }
    fn misses_target(&self, i: &Interval) -> Option<bool> {
        self.inner().misses_target(i)
    }
    fn name(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for BuiltinOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuiltinOracle::MiddleThird => write!(f, "middle-third"),
            BuiltinOracle::TernaryCantor => write!(f, "ternary-cantor"),
            BuiltinOracle::Points(p) => {
                let pts: Vec<String> = p.points.iter().map(|x| x.to_string()).collect();
                write!(f, "points:{}", pts.join(","))
            }
        }
    }
}

impl FromStr for BuiltinOracle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "middle-third" => Ok(BuiltinOracle::MiddleThird),
            "ternary-cantor" => Ok(BuiltinOracle::TernaryCantor),
            _ => {
                let list = s.strip_prefix("points:").ok_or_else(|| format!("unknown oracle `{s}`"))?;
                let pts = list
                    .split(',')
                    .filter(|t| !t.trim().is_empty())
                    .map(|t| t.parse::<Rational>().map_err(|e| e.to_string()))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(BuiltinOracle::Points(FinitePoints::new(pts)))
            }
        }
    }
}

/// One level of the ladder.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Level {
    pub n: u32,
    /// Common gap length `l_n`.
    pub l: Rational,
    /// `I_{n,1}, …, I_{n,2^(n-1)}`, left to right.
    pub gaps: Vec<Interval>,
    /// `K_{n,1}, …, K_{n,2^n}`, left to right.
    pub remnants: Vec<Interval>,
}

/// A finite-depth ladder. The fields are public so that a construction can
/// be loaded or perturbed; [`verify_cantor`] re-checks every invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CantorConstruction {
    pub depth: u32,
    pub levels: Vec<Level>,
}

fn unit_interval() -> Interval {
    Interval::closed(Rational::zero(), Rational::one()).unwrap()
}

fn two_thirds_pow(n: u32) -> Rational {
    Rational::new(2, 3).pow(n as i32)
}

pub fn build_cantor(oracle: &dyn GapOracle, depth: u32) -> Result<CantorConstruction, CantorError> {
    if depth == 0 || depth > MAX_DEPTH {
        return Err(CantorError::BadDepth(depth));
    }
    let mut levels: Vec<Level> = Vec::with_capacity(depth as usize);
    let mut parents = vec![unit_interval()];
    let mut prev_l: Option<Rational> = None;
    for n in 1..=depth {
        let mut raw = Vec::with_capacity(parents.len());
        for (idx, parent) in parents.iter().enumerate() {
            let j = idx as u64 + 1;
            let g = oracle.gap(parent).map_err(|reason| CantorError::Oracle { n, j, reason })?;
            if g.is_degenerate() || !parent.closed_middle_third().contains_interval(&g.closure()) {
                return Err(CantorError::OutsideMiddleThird { n, j, gap: g, parent: parent.clone() });
            }
            if oracle.misses_target(&g) == Some(false) {
                return Err(CantorError::MeetsTarget { n, j, gap: g });
            }
            raw.push(g);
        }
        let shortest = raw.iter().map(Interval::length).min().expect("at least one gap");
        let bound = match &prev_l {
            Some(p) => shortest.min(p / Rational::integer(2)),
            None => shortest,
        };
        let l = bound.largest_unit_fraction_below();
        let half = &l / Rational::integer(2);
        let mut gaps = Vec::with_capacity(raw.len());
        let mut remnants = Vec::with_capacity(2 * raw.len());
        for (parent, g) in parents.iter().zip(&raw) {
            let c = g.midpoint();
            let gap = Interval::open(&c - &half, &c + &half)?;
            remnants.push(Interval::closed(parent.lo().clone(), gap.lo().clone())?);
            remnants.push(Interval::closed(gap.hi().clone(), parent.hi().clone())?);
            gaps.push(gap);
        }
        prev_l = Some(l.clone());
        parents = remnants.clone();
        levels.push(Level { n, l, gaps, remnants });
    }
    Ok(CantorConstruction { depth, levels })
}

impl CantorConstruction {
    pub fn level(&self, n: u32) -> &Level {
        &self.levels[n as usize - 1]
    }

    /// `l_n`.
    pub fn gap_length(&self, n: u32) -> &Rational {
        &self.level(n).l
    }

    /// `I_{n,j}`, `1 <= j <= 2^(n-1)`.
    pub fn gap(&self, n: u32, j: u64) -> &Interval {
        &self.level(n).gaps[j as usize - 1]
    }

    /// `K_{n,j}`, `1 <= j <= 2^n`; `K_{0,1} = [0,1]`.
    pub fn remnant(&self, n: u32, j: u64) -> Interval {
        if n == 0 {
            assert_eq!(j, 1, "level 0 has a single remnant");
            return unit_interval();
        }
        self.level(n).remnants[j as usize - 1].clone()
    }

    /// `O_n`.
    pub fn gap_set(&self, n: u32) -> IntervalSet {
        IntervalSet::normalize(self.level(n).gaps.clone())
    }

    /// `∪_j K_{n,j}`.
    pub fn remnant_set(&self, n: u32) -> IntervalSet {
        if n == 0 {
            return IntervalSet::from(unit_interval());
        }
        IntervalSet::normalize(self.level(n).remnants.clone())
    }

    /// `∪_{i=1..k} B₋(I_{n+i,2^(i-1)j}, (2/3)|K_{n+i-1,2^(i-1)j}|)`: the cover of
    /// the left part of `K_{n,j}` by the gaps along its rightmost descent.
    pub fn telescoping_cover(&self, n: u32, j: u64, k: u32) -> Result<IntervalSet, CantorError> {
        if n + k > self.depth {
            return Err(CantorError::Parameters(format!("n + k = {} exceeds depth {}", n + k, self.depth)));
        }
        let two_thirds = Rational::new(2, 3);
        let mut parts = Vec::new();
        for i in 1..=k {
            let idx = j << (i - 1);
            let parent = self.remnant(n + i - 1, idx);
            let r = &two_thirds * parent.length();
            parts.extend(IntervalSet::from(self.gap(n + i, idx).clone()).left_neighborhood(&r)?.into_parts());
        }
        Ok(IntervalSet::normalize(parts))
    }
}

/// A failed assertion with the level and index it concerns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub check: String,
    pub n: u32,
    pub j: u64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub depth: u32,
    pub k_max: u32,
    /// Number of individual assertions evaluated.
    pub checks: u64,
    pub violations: Vec<Violation>,
    pub pass: bool,
}

struct Recorder {
    checks: u64,
    violations: Vec<Violation>,
}

impl Recorder {
    fn check(&mut self, ok: bool, check: &str, n: u32, j: u64, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations.push(Violation { check: check.into(), n, j, detail: detail() });
        }
    }
}

/// Re-checks the structural invariants of `c`, the nested right-descent
/// infima for `1 <= k <= k_max`, and the left-cover inequality
/// `B₋(I, (2/3)|K|) ⊇ [inf K, sup I)` for every parent `K` and its gap `I`.
pub fn verify_cantor(c: &CantorConstruction, k_max: u32) -> InvariantReport {
    let mut rec = Recorder { checks: 0, violations: Vec::new() };
    let two_thirds = Rational::new(2, 3);
    let shape_ok = c.levels.len() == c.depth as usize
        && c.levels.iter().enumerate().all(|(i, lv)| {
            lv.n as usize == i + 1 && lv.gaps.len() == 1 << i && lv.remnants.len() == 2 << i
        });
    rec.check(shape_ok, "shape", 0, 0, || "level count or interval counts do not match the depth".into());
    if !shape_ok {
        return finish(c, k_max, rec);
    }

    let mut removed = IntervalSet::empty();
    let mut all_closures: Vec<(Interval, u32, u64)> = Vec::new();
    for n in 1..=c.depth {
        let lv = c.level(n);
        rec.check(lv.l.is_unit_fraction(), "unit-length", n, 0, || format!("l = {} is not 1/m", lv.l));
        if n > 1 {
            let prev = c.gap_length(n - 1);
            rec.check(lv.l <= prev / Rational::integer(2), "length-halving", n, 0, || {
                format!("l = {} exceeds half of {prev}", lv.l)
            });
        }
        let bound = two_thirds_pow(n);
        for (idx, gap) in lv.gaps.iter().enumerate() {
            let j = idx as u64 + 1;
            let parent = c.remnant(n - 1, j);
            rec.check(gap.is_open(), "gap-open", n, j, || format!("{gap} is not open"));
            rec.check(gap.length() == lv.l, "gap-length", n, j, || format!("|{gap}| != {}", lv.l));
            rec.check(
                parent.closed_middle_third().contains_interval(&gap.closure()),
                "middle-third",
                n,
                j,
                || format!("{gap} is not inside the closed middle third of {parent}"),
            );
            let left = &lv.remnants[2 * idx];
            let right = &lv.remnants[2 * idx + 1];
            let children_ok = left.lo_closed()
                && left.hi_closed()
                && right.lo_closed()
                && right.hi_closed()
                && left.lo() == parent.lo()
                && left.hi() == gap.lo()
                && right.lo() == gap.hi()
                && right.hi() == parent.hi();
            rec.check(children_ok, "children", n, j, || {
                format!("{left} and {right} are not the pieces of {parent} around {gap}")
            });
            rec.check(right.contains(parent.hi()), "right-endpoint", n, j, || {
                format!("sup of {parent} is not in its right child {right}")
            });
            all_closures.push((gap.closure(), n, j));
            // the left-cover inequality
            let r = &two_thirds * parent.length();
            let cover = IntervalSet::from(gap.clone()).left_neighborhood(&r);
            let target = Interval::closed_open(parent.lo().clone(), gap.hi().clone());
            let ok = match (cover, target) {
                (Ok(cov), Ok(t)) => IntervalSet::from(t).is_subset_of(&cov),
                _ => false,
            };
            rec.check(ok, "left-cover", n, j, || {
                format!("B-({gap}, {r}) does not contain [{}, {})", parent.lo(), gap.hi())
            });
        }
        for (idx, k) in lv.remnants.iter().enumerate() {
            rec.check(k.length() < bound, "remnant-length", n, idx as u64 + 1, || {
                format!("|{k}| = {} is not below {bound}", k.length())
            });
        }
        removed = removed.union(&c.gap_set(n));
        let survivors = removed.complement_within(&unit_interval());
        rec.check(survivors == c.remnant_set(n), "complement", n, 0, || {
            "[0,1] minus the gaps up to this level is not the union of the remnants".into()
        });
    }

    all_closures.sort_by(|a, b| a.0.lo().cmp(b.0.lo()));
    for w in all_closures.windows(2) {
        let ((a, n, j), (b, ..)) = (&w[0], &w[1]);
        rec.check(a.hi() < b.lo(), "closure-disjoint", *n, *j, || format!("closures of {a} and {b} meet"));
    }

    // nested infima along the rightmost descent
    for n in 1..c.depth {
        let kk = k_max.min(c.depth - n);
        for j in 1..=(1u64 << n) {
            let base = c.remnant(n, j);
            let mut prev = base.lo().clone();
            for k in 1..=kk {
                let inf = c.remnant(n + k, j << k).lo().clone();
                rec.check(inf >= prev, "nested-infimum", n, j, || {
                    format!("inf K at k = {k} is {inf}, below {prev}")
                });
                let bound = two_thirds_pow(n + k);
                let dist = base.hi() - &inf;
                rec.check(dist < bound, "infimum-gap", n, j, || {
                    format!("sup K - inf K' = {dist} at k = {k} is not below {bound}")
                });
                prev = inf;
            }
        }
    }
    finish(c, k_max, rec)
}

fn finish(c: &CantorConstruction, k_max: u32, rec: Recorder) -> InvariantReport {
    let pass = rec.violations.is_empty();
    InvariantReport { depth: c.depth, k_max, checks: rec.checks, violations: rec.violations, pass }
}

/// Gaps that meet the oracle's target set, when that set is checkable.
pub fn check_avoidance(c: &CantorConstruction, oracle: &dyn GapOracle) -> Vec<Violation> {
    let mut out = Vec::new();
    for lv in &c.levels {
        for (idx, gap) in lv.gaps.iter().enumerate() {
            if oracle.misses_target(gap) == Some(false) {
                out.push(Violation {
                    check: "avoidance".into(),
                    n: lv.n,
                    j: idx as u64 + 1,
                    detail: format!("{gap} meets the target of {}", oracle.name()),
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverReport {
    #[serde(rename = "N")]
    pub n: u32,
    pub k_max: u32,
    /// `∪_j star(K_{N,j})` minus the left neighbourhoods of levels `N+1..=N+k_max`.
    pub uncovered: IntervalSet,
    pub uncovered_measure: Rational,
    /// `2^N (2/3)^(N+k_max)`.
    pub bound: Rational,
    /// Whether the uncovered part sits inside the right tails
    /// `[inf K_{N+k_max,2^k_max j}, sup K_{N,j})`.
    pub within_tails: bool,
    pub pass: bool,
}

pub fn truncated_union_cover(c: &CantorConstruction, n: u32, k_max: u32) -> Result<CoverReport, CantorError> {
    if n == 0 || k_max == 0 {
        return Err(CantorError::Parameters("N and k_max must be positive".into()));
    }
    if n + k_max > c.depth {
        return Err(CantorError::Parameters(format!(
            "N + k_max = {} exceeds the construction depth {}",
            n + k_max,
            c.depth
        )));
    }
    let mut pieces = Vec::new();
    for m in n + 1..=n + k_max {
        pieces.extend(c.gap_set(m).left_neighborhood(&two_thirds_pow(m))?.into_parts());
    }
    let covered = IntervalSet::normalize(pieces);
    let target = c.remnant_set(n).star()?;
    let uncovered = target.difference(&covered);
    let tails: IntervalSet = (1..=(1u64 << n))
        .filter_map(|j| {
            let inf = c.remnant(n + k_max, j << k_max).lo().clone();
            Interval::try_nonempty(inf, c.remnant(n, j).hi().clone(), true, false)
        })
        .collect();
    let within_tails = uncovered.is_subset_of(&tails);
    let bound = Rational::integer(BigInt::one() << n) * two_thirds_pow(n + k_max);
    let uncovered_measure = uncovered.measure();
    let pass = within_tails && uncovered_measure < bound;
    Ok(CoverReport { n, k_max, uncovered, uncovered_measure, bound, within_tails, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn iv(s: &str) -> Interval {
        s.parse().unwrap()
    }

    #[test]
    fn depth_one_default() {
        let c = build_cantor(&MiddleThird, 1).unwrap();
        assert_eq!(c.gap(1, 1), &iv("(4/9,5/9)"));
        assert_eq!(c.gap_length(1), &q(1, 9));
        assert_eq!(c.remnant(1, 1), iv("[0,4/9]"));
        assert_eq!(c.remnant(1, 2), iv("[5/9,1]"));
    }

    #[test]
    fn second_level_length() {
        let c = build_cantor(&MiddleThird, 2).unwrap();
        assert_eq!(c.gap_length(2), &q(1, 21));
    }

    #[test]
    fn depth_bounds() {
        assert_eq!(build_cantor(&MiddleThird, 0), Err(CantorError::BadDepth(0)));
        assert!(build_cantor(&MiddleThird, MAX_DEPTH + 1).is_err());
    }

    #[test]
    fn ternary_component() {
        assert_eq!(TernaryCantor::component(&q(1, 2)).unwrap(), Some(iv("(1/3,2/3)")));
        assert_eq!(TernaryCantor::component(&q(1, 4)).unwrap(), None);
        assert_eq!(TernaryCantor::component(&q(1, 3)).unwrap(), None);
        assert_eq!(TernaryCantor::component(&q(2, 9)).unwrap(), None);
        assert_eq!(TernaryCantor::component(&q(5, 27)).unwrap(), Some(iv("(1/9,2/9)")));
    }

    #[test]
    fn ternary_misses() {
        let o = TernaryCantor;
        assert_eq!(o.misses_target(&iv("(1/3,2/3)")), Some(true));
        assert_eq!(o.misses_target(&iv("[1/3,2/3)")), Some(false));
        assert_eq!(o.misses_target(&iv("(1/4,1/2)")), Some(false));
        assert_eq!(o.misses_target(&iv("(-1,0)")), Some(true));
        assert_eq!(o.misses_target(&iv("(-1,1/3)")), Some(false));
    }

    #[test]
    fn oracle_text_forms() {
        for s in ["middle-third", "ternary-cantor", "points:1/3,1/2"] {
            assert_eq!(s.parse::<BuiltinOracle>().unwrap().to_string(), s);
        }
        assert!("bogus".parse::<BuiltinOracle>().is_err());
    }

    #[test]
    fn finite_points_gap_skips_points() {
        let o = FinitePoints::new(vec![q(1, 2)]);
        let g = o.gap(&iv("[0,1]")).unwrap();
        assert!(!g.contains(&q(1, 2)));
        assert_eq!(g, iv("(1/3,1/2)"));
    }
}
