//! A closed nowhere-dense subset of `[0,1]` that still contains an affine
//! copy of every sequence decaying at a prescribed rate.
//!
//! A strictly decreasing `β` is lifted to a threshold sequence `η >= β`
//! (strictly decreasing, non-increasing gaps). Holes `J_n` of length `λ_n` are
//! cut from a base `V_n` of `(0,1)`; `λ_n` is small enough that the union of
//! the `η`-translates of every hole has summable measure. For a sequence
//! `α` with `|α_m| <= η_m/(2δ₀)`, a small `δ` then leaves a set of positive
//! measure of `t` with `t + δα_m` in the avoider for every `m`.
//!
//! Everything is truncated at a finite depth `N`. The truncated set contains
//! the infinite one, so an embedding found here is a depth-`N` certificate
//! only.

use serde::{Deserialize, Serialize};

use crate::interval::{Interval, IntervalError, IntervalSet};
use crate::rational::Rational;
use crate::sequence::{first_index_where, threshold_index, Sequence, SequenceError, SequenceSource};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AvoiderError {
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Interval(#[from] IntervalError),
    #[error("{0}")]
    Parameters(String),
    #[error("budget for level {n}: {reason}")]
    Budget { n: u32, reason: String },
    #[error("no δ = δ₀·2^-i with 1 <= i <= {i_max} leaves a set of positive measure")]
    NoEmbedding { i_max: u32, trace: Vec<LadderStep> },
    #[error("witness check failed: {0}")]
    Witness(String),
}

/// `η_1 = β_1`, `η_2 = β_2`, `η_m = max{β_m, 2η_{m-1} - η_{m-2}}`.
///
/// Terms are materialized up to the horizon. When `β` is a preset known to
/// have non-increasing gaps and the last two materialized terms coincide
/// with `β`, the recurrence returns `β_m` for every later `m` as well, and
/// the sequence reads `β` directly beyond the horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdSequence {
    beta: SequenceSource,
    eta: Vec<Rational>,
    convex_tail: bool,
}

pub fn thresholdize(beta: SequenceSource, horizon: u64) -> Result<ThresholdSequence, AvoiderError> {
    if horizon < 2 {
        return Err(AvoiderError::Parameters("threshold horizon must be at least 2".into()));
    }
    let b = beta.prefix(horizon)?;
    for (i, w) in b.windows(2).enumerate() {
        if w[1] >= w[0] {
            return Err(SequenceError::NotStrictlyDecreasing { m: i as u64 + 1 }.into());
        }
    }
    if let Some(i) = b.iter().position(|x| !x.is_positive()) {
        return Err(SequenceError::NotPositive { m: i as u64 + 1 }.into());
    }
    let mut eta: Vec<Rational> = Vec::with_capacity(b.len());
    for (i, bm) in b.iter().enumerate() {
        let next = if i < 2 {
            bm.clone()
        } else {
            let line = Rational::integer(2) * &eta[i - 1] - &eta[i - 2];
            bm.clone().max(line)
        };
        eta.push(next);
    }
    let h = b.len();
    let convex_tail = beta.is_convex() && eta[h - 1] == b[h - 1] && eta[h - 2] == b[h - 2];
    Ok(ThresholdSequence { beta, eta, convex_tail })
}

impl ThresholdSequence {
    pub fn beta(&self) -> &SequenceSource {
        &self.beta
    }

    /// Terms computed by the recurrence.
    pub fn materialized(&self) -> &[Rational] {
        &self.eta
    }

    pub fn has_convex_tail(&self) -> bool {
        self.convex_tail
    }

    /// Re-checks `η >= β`, strict decrease and non-increasing gaps on the
    /// materialized prefix.
    pub fn check_invariants(&self) -> Result<(), SequenceError> {
        for (i, e) in self.eta.iter().enumerate() {
            let m = i as u64 + 1;
            if e < &self.beta.term(m)? {
                return Err(SequenceError::NotPositive { m });
            }
        }
        crate::sequence::check_convex_decreasing(self, 1, self.eta.len() as u64)
    }
}

impl Sequence for ThresholdSequence {
    fn term(&self, m: u64) -> Result<Rational, SequenceError> {
        if m == 0 {
            return Err(SequenceError::ZeroIndex);
        }
        if let Some(e) = self.eta.get(m as usize - 1) {
            return Ok(e.clone());
        }
        if self.convex_tail {
            return self.beta.term(m);
        }
        Err(SequenceError::OutOfHorizon { m, horizon: self.eta.len() as u64 })
    }

    fn horizon(&self) -> u64 {
        if self.convex_tail {
            self.beta.horizon()
        } else {
            self.eta.len() as u64
        }
    }
}

/// What the finite prefix says about `η_m → 0`.
///
/// Either `η` meets `β` again in the last tenth of the horizon, or it has
/// been an arithmetic progression since `last_touch`, in which case that
/// progression would reach zero at `extrapolated_zero`; from that index on,
/// `β` must take over again. Neither case certifies the limit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub horizon: u64,
    pub last_touch: u64,
    pub late_touch: bool,
    pub final_gap: Rational,
    pub extrapolated_zero: Option<u64>,
}

pub fn convergence_report(t: &ThresholdSequence) -> Result<ConvergenceReport, AvoiderError> {
    let h = t.eta.len() as u64;
    let mut last_touch = 1;
    for m in 1..=h {
        if t.eta[m as usize - 1] == t.beta.term(m)? {
            last_touch = m;
        }
    }
    let late_touch = last_touch * 10 >= h * 9;
    let final_gap = &t.eta[h as usize - 2] - &t.eta[h as usize - 1];
    let extrapolated_zero = if late_touch {
        None
    } else {
        let steps = (&t.eta[h as usize - 1] / &final_gap).ceil();
        u64::try_from(steps).ok().and_then(|s| s.checked_add(h))
    };
    Ok(ConvergenceReport { horizon: h, last_touch, late_touch, final_gap, extrapolated_zero })
}

/// `V_n`: dyadic level `L` contributes the intervals centred at `i/2^L`,
/// `0 < i < 2^L`, of radius `2^-(L+1)`, ordered by `(L, i)`.
pub fn enumerate_base(n: u64) -> Interval {
    assert!(n >= 1, "base index starts at 1");
    let (level, i) = base_position(n);
    let centre = Rational::new(i, num_bigint::BigInt::from(1u8) << level);
    let radius = Rational::pow2_neg(level + 1);
    Interval::open(&centre - &radius, &centre + &radius).expect("positive radius")
}

/// `(L, i)` of the `n`-th base interval.
fn base_position(n: u64) -> (u32, u64) {
    let mut rest = n;
    let mut level = 1u32;
    loop {
        let count = (1u64 << level) - 1;
        if rest <= count {
            return (level, rest);
        }
        rest -= count;
        level += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub n: u32,
    #[serde(rename = "K")]
    pub k: u64,
    pub lambda: Rational,
    #[serde(rename = "T")]
    pub t: u64,
}

/// `K(n) = 2 min{m : η_m < n^-2}`, `λ_n = min{|V_n|, 2^-n, η_K - η_{K+1}}` and
/// `T(n) = min{m : η_m - η_{m+1} < λ_n}`.
pub fn plan_budget(t: &ThresholdSequence, n: u32) -> Result<Budget, AvoiderError> {
    if n == 0 {
        return Err(AvoiderError::Parameters("levels start at 1".into()));
    }
    let budget_err = |e: SequenceError| AvoiderError::Budget { n, reason: e.to_string() };
    let inv_sq = Rational::new(1, u64::from(n) * u64::from(n));
    let last = t.horizon();
    let half_k = first_index_where(|m| Ok(t.term(m)? < inv_sq), 1, last, "K(n)").map_err(budget_err)?;
    let k = 2 * half_k;
    let v = enumerate_base(u64::from(n));
    let step = t.gap(k).map_err(budget_err)?;
    let lambda = v.length().min(Rational::pow2_neg(n)).min(step);
    let t_n = threshold_index(|m| t.gap(m), &Rational::one(), 1, &lambda, last.saturating_sub(1)).map_err(budget_err)?;
    if t_n <= k {
        return Err(AvoiderError::Budget { n, reason: format!("T = {t_n} does not exceed K = {k}") });
    }
    Ok(Budget { n, k, lambda, t: t_n })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hole {
    pub n: u32,
    #[serde(rename = "V")]
    pub v: Interval,
    #[serde(rename = "J")]
    pub j: Interval,
    pub lambda: Rational,
    #[serde(rename = "K")]
    pub k: u64,
    #[serde(rename = "T")]
    pub t: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AvoiderConstruction {
    pub depth: u32,
    pub holes: Vec<Hole>,
    /// `A_N = [0,1] \ ∪_{n<=N} J_n`.
    pub avoider: IntervalSet,
}

fn unit_interval() -> Interval {
    Interval::closed(Rational::zero(), Rational::one()).unwrap()
}

pub fn build_avoider(t: &ThresholdSequence, depth: u32) -> Result<AvoiderConstruction, AvoiderError> {
    let mut holes = Vec::with_capacity(depth as usize);
    for n in 1..=depth {
        let b = plan_budget(t, n)?;
        let v = enumerate_base(u64::from(n));
        let c = v.midpoint();
        let half = &b.lambda / Rational::integer(2);
        let j = Interval::open(&c - &half, &c + &half)?;
        holes.push(Hole { n, v, j, lambda: b.lambda, k: b.k, t: b.t });
    }
    let removed: IntervalSet = holes.iter().map(|h| h.j.clone()).collect();
    let avoider = removed.complement_within(&unit_interval());
    Ok(AvoiderConstruction { depth, holes, avoider })
}

impl AvoiderConstruction {
    pub fn contains(&self, x: &Rational) -> bool {
        self.avoider.contains(x)
    }
}

/// Measure of `∪_{m<=M} (J - η_m)` and its closed form `Tλ + η_T - η_M`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnionMeasure {
    #[serde(rename = "T")]
    pub threshold: u64,
    #[serde(rename = "M")]
    pub m: u64,
    pub measure: Rational,
    pub closed_form: Rational,
    /// `Tλ + η_T`, the value over all `m`.
    pub limit: Rational,
    pub identity_holds: bool,
}

pub fn measure_union_translates(j: &Interval, t: &ThresholdSequence, m: u64) -> Result<UnionMeasure, AvoiderError> {
    if !j.is_open() || j.is_degenerate() {
        return Err(AvoiderError::Parameters(format!("{j} is not a nonempty open interval")));
    }
    let lambda = j.length();
    let threshold = threshold_index(|k| t.gap(k), &Rational::one(), 1, &lambda, t.horizon().saturating_sub(1))?;
    if m < threshold {
        return Err(AvoiderError::Parameters(format!("M = {m} is below the threshold T = {threshold}")));
    }
    let union: IntervalSet = (1..=m)
        .map(|k| t.term(k).map(|e| j.translate(&-e)))
        .collect::<Result<_, _>>()?;
    let measure = union.measure();
    let eta_t = t.term(threshold)?;
    let limit = Rational::from(threshold) * &lambda + &eta_t;
    let closed_form = &limit - t.term(m)?;
    let identity_holds = measure == closed_form;
    Ok(UnionMeasure { threshold, m, measure, closed_form, limit, identity_holds })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummabilityRow {
    pub n: u32,
    #[serde(rename = "K")]
    pub k: u64,
    #[serde(rename = "T")]
    pub t: u64,
    pub lambda: Rational,
    /// `η_{⌊T/2⌋}`
    pub eta_half_t: Rational,
    /// `η_{K/2}`
    pub eta_half_k: Rational,
    /// `Tλ + η_T`
    pub union_measure: Rational,
    /// `2η_{⌊T/2⌋} - 2η_T`
    pub telescoped: Rational,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummabilityReport {
    pub depth: u32,
    pub rows: Vec<SummabilityRow>,
    pub sum_eta_half_t: Rational,
    pub sum_inverse_squares: Rational,
    pub sum_union_measure: Rational,
    pub pass: bool,
}

/// Per level: `η_{⌊T/2⌋} <= η_{K/2} < n^-2` and `Tλ <= 2η_{⌊T/2⌋} - 2η_T`.
pub fn summability_report(t: &ThresholdSequence, depth: u32) -> Result<SummabilityReport, AvoiderError> {
    let mut rows = Vec::with_capacity(depth as usize);
    for n in 1..=depth {
        let b = plan_budget(t, n)?;
        let eta_half_t = t.term(b.t / 2)?;
        let eta_half_k = t.term(b.k / 2)?;
        let eta_t = t.term(b.t)?;
        let t_lambda = Rational::from(b.t) * &b.lambda;
        let telescoped = Rational::integer(2) * (&eta_half_t - &eta_t);
        let inv_sq = Rational::new(1, u64::from(n) * u64::from(n));
        let pass = b.k % 2 == 0 && eta_half_t <= eta_half_k && eta_half_k < inv_sq && t_lambda <= telescoped;
        rows.push(SummabilityRow {
            n,
            k: b.k,
            t: b.t,
            lambda: b.lambda,
            eta_half_t,
            eta_half_k,
            union_measure: t_lambda + eta_t,
            telescoped,
            pass,
        });
    }
    let sum_eta_half_t = rows.iter().map(|r| &r.eta_half_t).sum();
    let sum_inverse_squares = (1..=depth).map(|n| Rational::new(1, u64::from(n) * u64::from(n))).sum();
    let sum_union_measure = rows.iter().map(|r| &r.union_measure).sum();
    let pass = rows.iter().all(|r| r.pass);
    Ok(SummabilityReport { depth, rows, sum_eta_half_t, sum_inverse_squares, sum_union_measure, pass })
}

/// `min_m η_m / (2|α_m|)` over the nonzero `α_m`; `None` when every `α_m` is zero.
pub fn delta0_of(alpha: &[Rational], t: &ThresholdSequence) -> Result<Option<Rational>, AvoiderError> {
    let mut best: Option<Rational> = None;
    for (i, a) in alpha.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let v = t.term(i as u64 + 1)? / (Rational::integer(2) * a.abs());
        best = Some(match best {
            Some(b) => b.min(v),
            None => v,
        });
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LadderStep {
    pub i: u32,
    pub delta: Rational,
    pub measure: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingCertificate {
    pub delta: Rational,
    pub t: Rational,
    pub checked_points: u64,
    /// Measure of the set of admissible `t` at `delta`.
    pub residual_measure: Rational,
    pub delta0: Option<Rational>,
    pub i: u32,
    pub depth: u32,
    pub certificate: String,
}

/// `[0,1] ∩ ⋂_m (A_N - δα_m)`.
pub fn admissible_shifts(a: &AvoiderConstruction, alpha: &[Rational], delta: &Rational) -> IntervalSet {
    let Some(lo_a) = alpha.iter().min() else {
        return IntervalSet::from(unit_interval());
    };
    let hi_a = alpha.iter().max().expect("nonempty");
    let lo = (-(delta * lo_a)).max(Rational::zero());
    let hi = (Rational::one() - delta * hi_a).min(Rational::one());
    let Some(window) = Interval::try_nonempty(lo, hi, true, true) else {
        return IntervalSet::empty();
    };
    let shifted: IntervalSet = alpha
        .iter()
        .flat_map(|am| {
            let s = -(delta * am);
            a.holes.iter().map(move |h| h.j.translate(&s))
        })
        .collect();
    shifted.complement_within(&window)
}

/// Searches `δ = δ₀·2^-i` for the smallest `i >= 1` with `δ < min(1, δ₀)` and
/// a set of admissible shifts of positive measure, then returns the midpoint
/// of its longest component after checking every `t + δα_m` exactly.
pub fn find_embedding(
    a: &AvoiderConstruction,
    alpha: &[Rational],
    t: &ThresholdSequence,
    i_max: u32,
) -> Result<EmbeddingCertificate, AvoiderError> {
    if alpha.is_empty() {
        return Err(AvoiderError::Parameters("alpha must have at least one term".into()));
    }
    let delta0 = delta0_of(alpha, t)?;
    let base = delta0.clone().unwrap_or_else(Rational::one);
    let cap = base.clone().min(Rational::one());
    let mut trace = Vec::new();
    for i in 1..=i_max {
        let delta = &base * Rational::pow2_neg(i);
        if delta >= cap {
            continue;
        }
        let s = admissible_shifts(a, alpha, &delta);
        let measure = s.measure();
        trace.push(LadderStep { i, delta: delta.clone(), measure: measure.clone() });
        if !measure.is_positive() {
            continue;
        }
        let best = s.longest_part().expect("positive measure");
        let t_star = best.midpoint();
        for (k, am) in alpha.iter().enumerate() {
            let x = &t_star + &delta * am;
            if !a.contains(&x) {
                return Err(AvoiderError::Witness(format!("t + δα_{} = {x} is not in the avoider", k + 1)));
            }
        }
        return Ok(EmbeddingCertificate {
            delta,
            t: t_star,
            checked_points: alpha.len() as u64,
            residual_measure: measure,
            delta0,
            i,
            depth: a.depth,
            certificate: format!("depth-{} certificate", a.depth),
        });
    }
    Err(AvoiderError::NoEmbedding { i_max, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::sequence::Preset;

    fn harmonic(h: u64) -> ThresholdSequence {
        thresholdize(SequenceSource::Preset(Preset::Harmonic), h).unwrap()
    }

    #[test]
    fn recurrence_example() {
        let b = SequenceSource::Table(vec![q(1, 1), q(9, 10), q(1, 5), q(1, 10), q(1, 20)]);
        let t = thresholdize(b, 5).unwrap();
        assert_eq!(t.materialized(), &[q(1, 1), q(9, 10), q(4, 5), q(7, 10), q(3, 5)]);
        assert!(!t.has_convex_tail());
        assert!(t.term(6).is_err());
        t.check_invariants().unwrap();
    }

    #[test]
    fn convex_beta_is_kept() {
        let t = harmonic(50);
        for m in 1..=50 {
            assert_eq!(t.term(m).unwrap(), Rational::unit_fraction(m));
        }
        assert!(t.has_convex_tail());
        assert_eq!(t.term(1 << 40).unwrap(), Rational::unit_fraction(1u64 << 40));
    }

    #[test]
    fn rejects_non_monotone_beta() {
        let b = SequenceSource::Table(vec![q(1, 1), q(1, 2), q(1, 2)]);
        assert!(thresholdize(b, 3).is_err());
    }

    #[test]
    fn base_enumeration() {
        assert_eq!(enumerate_base(1), "(1/4,3/4)".parse().unwrap());
        assert_eq!(enumerate_base(2), "(1/8,3/8)".parse().unwrap());
        assert_eq!(enumerate_base(4), "(5/8,7/8)".parse().unwrap());
        assert_eq!(enumerate_base(5), "(1/16,3/16)".parse().unwrap());
        assert_eq!(base_position(11), (3, 7));
        assert_eq!(base_position(12), (4, 1));
    }

    #[test]
    fn harmonic_budget_level_two() {
        let b = plan_budget(&harmonic(100), 2).unwrap();
        assert_eq!((b.k, b.lambda.clone(), b.t), (10, q(1, 110), 11));
    }

    #[test]
    fn delta0_examples() {
        let t = harmonic(20);
        let alpha: Vec<_> = (1..=10).map(Rational::pow2_neg).collect();
        assert_eq!(delta0_of(&alpha, &t).unwrap(), Some(q(1, 1)));
        let half: Vec<_> = (1..=10).map(|m| Rational::new(1, 2 * m)).collect();
        assert_eq!(delta0_of(&half, &t).unwrap(), Some(q(1, 1)));
        let tripled: Vec<_> = alpha.iter().map(|a| a * Rational::integer(3)).collect();
        assert_eq!(delta0_of(&tripled, &t).unwrap(), Some(q(1, 3)));
        assert_eq!(delta0_of(&[Rational::zero(), Rational::zero()], &t).unwrap(), None);
    }

    #[test]
    fn measure_example() {
        let j = Interval::open(q(0, 1), q(1, 10)).unwrap();
        let r = measure_union_translates(&j, &harmonic(100), 10).unwrap();
        assert_eq!(r.threshold, 3);
        assert_eq!(r.measure, q(8, 15));
        assert!(r.identity_holds);
        assert!(measure_union_translates(&j, &harmonic(100), 2).is_err());
    }
}
