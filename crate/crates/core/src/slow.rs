//! The slowly decreasing interpolated sequence and the structure of unions
//! of its translates.
//!
//! From gap-length tables `l^(k)` the sequence `μ_n = min{l_n^(k) : |k| <= n}`
//! fixes block lengths `1/μ_n`; inside block `n` the sequence `α` steps
//! linearly from `1/n` down to `1/(n+1)`. Left translates `I - δα_m` of an
//! interval of length `l` are disjoint while the step `δ(α_m - α_{m+1})` is at
//! least `l` and overlap into a single interval afterwards.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cantor::{truncated_union_cover, CantorConstruction, CantorError};
use crate::interval::{Interval, IntervalError, IntervalSet};
use crate::rational::Rational;
use crate::sequence::{Sequence, SequenceError};

pub use crate::sequence::threshold_index;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SlowError {
    #[error("gap table {k}: {reason}")]
    Table { k: i64, reason: String },
    #[error("{0}")]
    Parameters(String),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Interval(#[from] IntervalError),
    #[error(transparent)]
    Cantor(#[from] CantorError),
}

/// `μ_1..μ_H` with breakpoints `N_0 = 0, N_n = N_{n-1} + 1/μ_n`.
///
/// `α_m` is available for `m <= N_H + 1`, and `α_{N_H+1} = 1/(H+1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlowSequence {
    mu: Vec<Rational>,
    breakpoints: Vec<u64>,
    horizon: u64,
}

impl SlowSequence {
    /// From an explicit strictly decreasing list of unit fractions.
    pub fn from_mu(mu: Vec<Rational>) -> Result<Self, SlowError> {
        if mu.is_empty() {
            return Err(SlowError::Parameters("at least one block is required".into()));
        }
        let mut breakpoints = vec![0u64];
        for (i, m) in mu.iter().enumerate() {
            if !m.is_unit_fraction() {
                return Err(SlowError::Parameters(format!("mu_{} = {m} is not 1/m", i + 1)));
            }
            if i > 0 && m >= &mu[i - 1] {
                return Err(SlowError::Parameters(format!("mu is not strictly decreasing at {}", i + 1)));
            }
            let len = u64::try_from(m.denom()).map_err(|_| SlowError::Parameters("block too long".into()))?;
            let next = breakpoints[i]
                .checked_add(len)
                .ok_or_else(|| SlowError::Parameters("breakpoints overflow".into()))?;
            breakpoints.push(next);
        }
        let horizon = breakpoints[mu.len()] + 1;
        Ok(SlowSequence { mu, breakpoints, horizon })
    }

    /// Number of blocks `H`.
    pub fn blocks(&self) -> u32 {
        self.mu.len() as u32
    }

    /// `μ_n`, `1 <= n <= H`.
    pub fn mu(&self, n: u32) -> &Rational {
        &self.mu[n as usize - 1]
    }

    pub fn mus(&self) -> &[Rational] {
        &self.mu
    }

    /// `N_n`, `0 <= n <= H`.
    pub fn breakpoint(&self, n: u32) -> u64 {
        self.breakpoints[n as usize]
    }

    /// Block `n` containing `m`, i.e. `N_{n-1} < m <= N_n`; `H + 1` for
    /// `m = N_H + 1`.
    fn block_of(&self, m: u64) -> u32 {
        self.breakpoints.partition_point(|&b| b < m) as u32
    }

    pub fn alpha_at(&self, m: u64) -> Result<Rational, SlowError> {
        if m == 0 {
            return Err(SequenceError::ZeroIndex.into());
        }
        if m > self.horizon {
            return Err(SequenceError::OutOfHorizon { m, horizon: self.horizon }.into());
        }
        let n = self.block_of(m);
        if n > self.blocks() {
            return Ok(Rational::unit_fraction(n));
        }
        // 1/n - (m - N_{n-1} - 1)/(n(n+1) len), over one common denominator
        let start = self.breakpoint(n - 1);
        let len = u128::from(self.breakpoint(n) - start);
        let n = u128::from(n);
        let k = u128::from(m - start - 1);
        Ok(Rational::new((n + 1) * len - k, n * (n + 1) * len))
    }

    /// `α_m - α_{m+1} = μ_n / (n(n+1))` on block `n`.
    pub fn alpha_gap(&self, m: u64) -> Result<Rational, SlowError> {
        if m == 0 {
            return Err(SequenceError::ZeroIndex.into());
        }
        if m >= self.horizon {
            return Err(SequenceError::OutOfHorizon { m: m + 1, horizon: self.horizon }.into());
        }
        let n = self.block_of(m);
        Ok(self.mu(n) / Rational::from(u64::from(n) * u64::from(n + 1)))
    }
}

impl Sequence for SlowSequence {
    fn term(&self, m: u64) -> Result<Rational, SequenceError> {
        self.alpha_at(m).map_err(|e| match e {
            SlowError::Sequence(s) => s,
            other => unreachable!("alpha_at only fails on indices: {other}"),
        })
    }

    fn horizon(&self) -> u64 {
        self.horizon
    }

    fn gap(&self, m: u64) -> Result<Rational, SequenceError> {
        self.alpha_gap(m).map_err(|e| match e {
            SlowError::Sequence(s) => s,
            other => unreachable!("alpha_gap only fails on indices: {other}"),
        })
    }

    /// The gap is constant on each block, so checking one gap per block
    /// covers every index in `[from, to]`.
    fn check_convex(&self, from: u64, to: u64) -> Result<(), SequenceError> {
        if from == 0 {
            return Err(SequenceError::ZeroIndex);
        }
        if to > self.horizon {
            return Err(SequenceError::OutOfHorizon { m: to, horizon: self.horizon });
        }
        if !self.term(to)?.is_positive() {
            return Err(SequenceError::NotPositive { m: to });
        }
        if to <= from {
            return Ok(());
        }
        let mut prev: Option<Rational> = None;
        for n in self.block_of(from)..=self.block_of(to - 1) {
            let m = (self.breakpoint(n - 1) + 1).max(from);
            let g = self.gap(m)?;
            if !g.is_positive() {
                return Err(SequenceError::NotStrictlyDecreasing { m });
            }
            if prev.as_ref().is_some_and(|p| &g > p) {
                return Err(SequenceError::GapsIncrease { m: m - 1 });
            }
            prev = Some(g);
        }
        Ok(())
    }
}

/// The gap lengths `l_1, …, l_depth` of a construction, as a table.
pub fn gap_table(c: &CantorConstruction) -> Vec<Rational> {
    c.levels.iter().map(|l| l.l.clone()).collect()
}

/// `μ_n = min{l_n^(k) : |k| <= n}` for `n <= horizon`.
///
/// Every table with `|k| <= horizon` must be strictly decreasing, consist of
/// unit fractions and reach `horizon`; tables with larger `|k|` never enter
/// the minimum and are ignored.
pub fn build_mu(gap_tables: &BTreeMap<i64, Vec<Rational>>, horizon: u32) -> Result<SlowSequence, SlowError> {
    if horizon == 0 {
        return Err(SlowError::Parameters("horizon must be positive".into()));
    }
    for (&k, table) in gap_tables {
        if k.unsigned_abs() > u64::from(horizon) {
            continue;
        }
        let bad = |reason: String| SlowError::Table { k, reason };
        if table.len() < horizon as usize {
            return Err(bad(format!("has {} terms, {horizon} needed", table.len())));
        }
        for (i, l) in table.iter().enumerate() {
            if !l.is_unit_fraction() {
                return Err(bad(format!("term {} = {l} is not 1/m", i + 1)));
            }
            if i > 0 && l >= &table[i - 1] {
                return Err(bad(format!("not strictly decreasing at term {}", i + 1)));
            }
        }
    }
    let mut mu = Vec::with_capacity(horizon as usize);
    for n in 1..=horizon {
        let best = gap_tables
            .iter()
            .filter(|(k, _)| k.unsigned_abs() <= u64::from(n))
            .map(|(_, t)| &t[n as usize - 1])
            .min()
            .ok_or_else(|| SlowError::Parameters(format!("no table with |k| <= {n}")))?;
        mu.push(best.clone());
    }
    SlowSequence::from_mu(mu)
}

/// `∪_{m0 <= m <= M_h} (I - δ s_m)` split at the threshold `M`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslateDecomposition {
    pub threshold: u64,
    pub m0: u64,
    pub horizon: u64,
    /// `∪_{m0 <= m < M} (I - δ s_m)`, pairwise disjoint.
    pub disjoint_part: IntervalSet,
    /// `(inf I - δ s_M, sup I)`, the overlapping part over all `m >= M`.
    pub overlap_part: Interval,
    /// `(inf I - δ s_M, sup I - δ s_{M_h})`, the overlapping part up to the horizon.
    pub truncated_overlap: Interval,
}

impl TranslateDecomposition {
    /// `U₁ ∪` truncated `U₂`.
    pub fn truncated_union(&self) -> IntervalSet {
        self.disjoint_part.union(&IntervalSet::from(self.truncated_overlap.clone()))
    }
}

fn check_positive(delta: &Rational, m0: u64) -> Result<(), SlowError> {
    if !delta.is_positive() {
        return Err(SlowError::Parameters(format!("delta must be positive, got {delta}")));
    }
    if m0 == 0 {
        return Err(SlowError::Parameters("m0 must be at least 1".into()));
    }
    Ok(())
}

/// Splits the union of left translates of the open interval `i` at the first
/// index where the step falls below `|i|`. The sequence must be strictly
/// decreasing with non-increasing gaps on `[m0, horizon]`; this is checked.
pub fn decompose_translates(
    i: &Interval,
    seq: &impl Sequence,
    delta: &Rational,
    m0: u64,
    horizon: u64,
) -> Result<TranslateDecomposition, SlowError> {
    check_positive(delta, m0)?;
    if !i.is_open() || i.is_degenerate() {
        return Err(SlowError::Parameters(format!("{i} is not a nonempty open interval")));
    }
    if horizon < m0 {
        return Err(SlowError::Parameters(format!("horizon {horizon} is below m0 = {m0}")));
    }
    seq.check_convex(m0, (horizon + 1).min(seq.horizon()))?;
    let l = i.length();
    let last = horizon.min(seq.horizon().saturating_sub(1));
    let threshold = threshold_index(|m| seq.gap(m), delta, m0, &l, last)?;
    split_at(i, seq, delta, m0, horizon, threshold)
}

fn split_at(
    i: &Interval,
    seq: &impl Sequence,
    delta: &Rational,
    m0: u64,
    horizon: u64,
    threshold: u64,
) -> Result<TranslateDecomposition, SlowError> {
    let mut parts = Vec::with_capacity((threshold - m0) as usize);
    for m in m0..threshold {
        parts.push(i.translate(&-(delta * seq.term(m)?)));
    }
    let disjoint_part = IntervalSet::normalize(parts);
    let shift_m = delta * seq.term(threshold)?;
    let lo = i.lo() - &shift_m;
    let overlap_part = Interval::open(lo.clone(), i.hi().clone())?;
    let truncated_overlap = Interval::open(lo, i.hi() - delta * seq.term(horizon)?)?;
    Ok(TranslateDecomposition { threshold, m0, horizon, disjoint_part, overlap_part, truncated_overlap })
}

/// `M(n) = min{m >= m0 : δ(α_m - α_{m+1}) < l_n}`.
pub fn threshold_for(s: &SlowSequence, delta: &Rational, m0: u64, l: &Rational) -> Result<u64, SlowError> {
    Ok(threshold_index(|m| s.gap(m), delta, m0, l, s.horizon() - 1)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DddRow {
    pub n: u32,
    #[serde(rename = "M")]
    pub threshold: Option<u64>,
    #[serde(rename = "N_n")]
    pub breakpoint: u64,
    pub alpha_at_threshold: Option<Rational>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DddReport {
    pub delta: Rational,
    pub m0: u64,
    pub k: i64,
    pub n1: u32,
    pub n0: u32,
    pub rows: Vec<DddRow>,
    pub pass: bool,
}

/// Least `n` with `N_n >= m0`, and the start of the range where the
/// threshold sits inside block `n`: the least integer exceeding
/// `max{1/δ, δ, |k|, n1}`.
///
/// The inequality `δμ_n/(n(n+1)) < μ_n` needs `n(n+1) > δ`; for `δ >= 2`
/// the condition `n > 1/δ` alone does not give that, so `δ` itself is part
/// of the maximum.
pub fn start_index(s: &SlowSequence, delta: &Rational, m0: u64, k: i64) -> Result<(u32, u32), SlowError> {
    let n1 = (1..=s.blocks())
        .find(|&n| s.breakpoint(n) >= m0)
        .ok_or_else(|| SlowError::Parameters(format!("no breakpoint reaches m0 = {m0}")))?;
    let floor_max = [delta.recip(), delta.clone(), Rational::from(k.unsigned_abs()), Rational::from(u64::from(n1))]
        .into_iter()
        .max()
        .expect("nonempty")
        .floor();
    let n0 = u32::try_from(floor_max + 1u32).map_err(|_| SlowError::Parameters("n0 too large".into()))?;
    Ok((n1, n0))
}

/// Checks `M(n) <= N_n` and `α_{M(n)} >= 1/(n+1)` for every `n` in
/// `n_lo..=n_hi` with `n >= n0`, where `M(n)` uses the construction's `l_n`.
pub fn verify_ddd(
    c: &CantorConstruction,
    s: &SlowSequence,
    delta: &Rational,
    m0: u64,
    k: i64,
    n_lo: u32,
    n_hi: u32,
) -> Result<DddReport, SlowError> {
    check_positive(delta, m0)?;
    if n_hi > c.depth || n_hi > s.blocks() {
        return Err(SlowError::Parameters(format!(
            "range end {n_hi} exceeds depth {} or blocks {}",
            c.depth,
            s.blocks()
        )));
    }
    let (n1, n0) = start_index(s, delta, m0, k)?;
    let mut rows = Vec::new();
    for n in n_lo.max(n0).max(1)..=n_hi {
        let l = c.gap_length(n);
        let breakpoint = s.breakpoint(n);
        let row = match threshold_for(s, delta, m0, l) {
            Ok(m) => {
                let a = s.alpha_at(m)?;
                let within = m <= breakpoint;
                let big = a >= Rational::unit_fraction(n + 1);
                let mut detail = Vec::new();
                if s.mu(n) > l {
                    detail.push(format!("mu_{n} = {} exceeds l_{n} = {l}", s.mu(n)));
                }
                if !within {
                    detail.push(format!("M = {m} exceeds N_n = {breakpoint}"));
                }
                if !big {
                    detail.push(format!("alpha_M = {a} is below 1/{}", n + 1));
                }
                DddRow {
                    n,
                    threshold: Some(m),
                    breakpoint,
                    alpha_at_threshold: Some(a),
                    pass: detail.is_empty(),
                    detail: (!detail.is_empty()).then(|| detail.join("; ")),
                }
            }
            Err(e) => DddRow {
                n,
                threshold: None,
                breakpoint,
                alpha_at_threshold: None,
                pass: false,
                detail: Some(e.to_string()),
            },
        };
        rows.push(row);
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(DddReport { delta: delta.clone(), m0, k, n1, n0, rows, pass })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeficitReport {
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "M")]
    pub m: u64,
    pub delta: Rational,
    pub m0: u64,
    /// `|[0,1) \ C|`.
    pub uncovered_measure: Rational,
    /// Measure of `[0,1) ∩ ⋂_m (R_N - δα_m)`, with `R_N` the survivors at level `N`.
    pub residual_measure: Rational,
    /// A certified upper bound for the uncovered measure (1 when no
    /// truncation applies).
    pub bound: Rational,
    /// The level `N'` whose truncated cover produced `bound`.
    pub split: Option<u32>,
    pub pass: bool,
}

/// `∪_{n <= N} ∪_{m0 <= m <= M} (O_n - δα_m)` together with the per-level thresholds.
pub fn translate_cover(
    c: &CantorConstruction,
    s: &SlowSequence,
    delta: &Rational,
    m0: u64,
    n_max: u32,
    m_max: u64,
) -> Result<(IntervalSet, Vec<Option<u64>>), SlowError> {
    let mut parts = Vec::new();
    let mut thresholds = Vec::new();
    for n in 1..=n_max {
        let l = c.gap_length(n);
        let threshold = threshold_for(s, delta, m0, l).ok().filter(|&t| t <= m_max);
        thresholds.push(threshold);
        for gap in &c.level(n).gaps {
            match threshold {
                Some(t) => {
                    let d = split_at(gap, s, delta, m0, m_max, t)?;
                    parts.extend(d.disjoint_part.into_parts());
                    parts.push(d.truncated_overlap);
                }
                None => {
                    for m in m0..=m_max {
                        parts.push(gap.translate(&-(delta * s.alpha_at(m)?)));
                    }
                }
            }
        }
    }
    Ok((IntervalSet::normalize(parts), thresholds))
}

/// The finite coverage check: how much of `[0,1)` the first `N` gap levels,
/// translated left by `δα_m` for `m0 <= m <= M`, leave uncovered.
pub fn coverage01(
    c: &CantorConstruction,
    s: &SlowSequence,
    delta: &Rational,
    m0: u64,
    n_max: u32,
    m_max: u64,
) -> Result<DeficitReport, SlowError> {
    check_positive(delta, m0)?;
    if n_max == 0 || n_max > c.depth {
        return Err(SlowError::Parameters(format!("N = {n_max} must lie in 1..={}", c.depth)));
    }
    if m_max < m0 || m_max > s.horizon() {
        return Err(SlowError::Parameters(format!(
            "M = {m_max} must lie in {m0}..={}",
            s.horizon()
        )));
    }
    let unit = Interval::closed_open(Rational::zero(), Rational::one())?;
    let (cover, thresholds) = translate_cover(c, s, delta, m0, n_max, m_max)?;
    let uncovered = cover.complement_within(&unit);
    let uncovered_measure = uncovered.measure();

    // ⋂_m (R_N - δα_m) misses exactly ∪_m (R_N^c - δα_m); inside [0,1) the
    // translates of (1,∞) leave only [0, 1 - δα_{m0}].
    let top = Rational::one() - delta * s.alpha_at(m0)?;
    let residual = match Interval::try_nonempty(Rational::zero(), top.clone(), true, true) {
        Some(w) => cover.complement_within(&w).intersect(&IntervalSet::from(unit.clone())),
        None => IntervalSet::empty(),
    };
    let residual_measure = residual.measure();

    let (bound, split) = certified_bound(c, s, delta, m_max, n_max, &thresholds)?;
    let pass = uncovered_measure <= bound && residual_measure <= uncovered_measure;
    Ok(DeficitReport {
        n: n_max,
        m: m_max,
        delta: delta.clone(),
        m0,
        uncovered_measure,
        residual_measure,
        bound,
        split,
        pass,
    })
}

/// Once `M >= M(n)` for every level, level `n` covers `B₋(O_n, δα_{M(n)})`
/// except the slivers `[sup I - δα_M, sup I)`. For a split `N'` where every
/// level above it has `δα_{M(n)} >= (2/3)^n`, the uncovered part lies in the
/// truncated-cover remainder at `N'` together with those slivers.
fn certified_bound(
    c: &CantorConstruction,
    s: &SlowSequence,
    delta: &Rational,
    m_max: u64,
    n_max: u32,
    thresholds: &[Option<u64>],
) -> Result<(Rational, Option<u32>), SlowError> {
    let mut best = (Rational::one(), None);
    let Some(thresholds) = thresholds.iter().copied().collect::<Option<Vec<u64>>>() else {
        return Ok(best);
    };
    let tail = delta * s.alpha_at(m_max)?;
    let mut slivers = Vec::new();
    for n in 1..=n_max {
        for gap in &c.level(n).gaps {
            slivers.push(Interval::closed_open(gap.hi() - &tail, gap.hi().clone())?);
        }
    }
    let slivers = IntervalSet::normalize(slivers);
    let two_thirds = Rational::new(2, 3);
    // levels n in (N', N] must each reach (2/3)^n
    let mut reaches = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let reach = delta * s.alpha_at(thresholds[n as usize - 1])?;
        reaches.push(reach >= two_thirds.pow(n as i32));
    }
    for split in (1..=n_max).rev() {
        if split < n_max && !reaches[split as usize] {
            break;
        }
        let remainder = if split == n_max {
            c.remnant_set(split).star()?
        } else {
            truncated_union_cover(c, split, n_max - split)?.uncovered
        };
        let m = remainder.union(&slivers).measure();
        if m < best.0 {
            best = (m, Some(split));
        }
    }
    Ok(best)
}
