//! Mixed-radix construction of a small set meeting every translate pattern.
//!
//! With even radices `M_n >= 4` and `P_n = M_1⋯M_n`, `F_n` is the set of
//! reals whose `n`-th digit is `0` or `M_n/2`. Grouping the levels by the
//! 2-adic valuation of `n` gives closed sets `K_j` whose union is null for
//! `h(x) = -1/ln x` once `h(1/P_n) <= 1/P_{n-1}`, which is `P_n >= e^{P_{n-1}}`.
//!
//! The geometry needs only even, non-decreasing radices. The `h`-condition is
//! certified separately with interval bounds on `e^x`, and only where the
//! numbers stay within [`EXP_BUDGET`].

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::interval::{Interval, IntervalError};
use crate::rational::Rational;

/// Largest exponent `x` for which `e^x` is bounded.
pub const EXP_BUDGET: u64 = 65_536;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AppendixError {
    #[error("invalid radix schedule: {0}")]
    Schedule(String),
    #[error("schedule has {have} levels, {needed} needed")]
    TooShort { needed: u64, have: usize },
    #[error("{0}")]
    Parameters(String),
    #[error("internal check failed: {0}")]
    Check(String),
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HStatus {
    Holds,
    Fails,
    Infeasible,
}

/// Bounds `lo <= e^x <= hi` with denominator `2^precision`.
pub fn exp_bounds(x: u64, precision: u32) -> (Rational, Rational) {
    let (lo, hi) = exp_fixed(x, precision);
    let scale = BigInt::one() << precision;
    (Rational::new(BigInt::from(lo), scale.clone()), Rational::new(BigInt::from(hi), scale))
}

/// `e` from its series, truncated where the tail `3/(K+1)!` drops below
/// `2^-precision`, then raised to `x` by squaring. Every product is rounded
/// outward, so the pair stays a bracket.
fn exp_fixed(x: u64, precision: u32) -> (BigUint, BigUint) {
    let one = BigUint::one() << precision;
    let mut lo = BigUint::zero();
    let mut hi = BigUint::zero();
    let mut fact = BigUint::one();
    let mut k = 0u32;
    loop {
        if k > 0 {
            fact *= k;
        }
        let (q, r) = one.div_rem(&fact);
        hi += if r.is_zero() { q.clone() } else { &q + 1u32 };
        lo += q;
        // 3/(k+1)! bounds the tail after term k
        if &fact * (k + 1) > (&one * 3u32) {
            hi += 1u32;
            break;
        }
        k += 1;
    }
    let mul_lo = |a: &BigUint, b: &BigUint| (a * b) >> precision;
    let mul_hi = |a: &BigUint, b: &BigUint| {
        let p = a * b;
        let q = &p >> precision;
        if (&q << precision) == p {
            q
        } else {
            q + 1u32
        }
    };
    let (mut rlo, mut rhi) = (one.clone(), one);
    let (mut blo, mut bhi) = (lo, hi);
    let mut e = x;
    while e > 0 {
        if e & 1 == 1 {
            rlo = mul_lo(&rlo, &blo);
            rhi = mul_hi(&rhi, &bhi);
        }
        e >>= 1;
        if e > 0 {
            blo = mul_lo(&blo, &blo);
            bhi = mul_hi(&bhi, &bhi);
        }
    }
    (rlo, rhi)
}

/// Fraction bits that keep the absolute error of `e^x` well below one.
fn precision_for(x: u64) -> u32 {
    let x = u32::try_from(x).expect("exponent within budget");
    64 + 2 * (32 - x.leading_zeros()) + x + x / 2
}

/// Decides `p >= e^x`, refining precision a few times before giving up.
fn compare_exp(p: &BigUint, x: u64) -> HStatus {
    if x > EXP_BUDGET {
        return HStatus::Infeasible;
    }
    let mut precision = precision_for(x);
    for _ in 0..4 {
        let (lo, hi) = exp_fixed(x, precision);
        let scaled = p << precision;
        if scaled >= hi {
            return HStatus::Holds;
        }
        if scaled < lo {
            return HStatus::Fails;
        }
        precision *= 2;
    }
    HStatus::Infeasible
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedRadixSystem {
    radices: Vec<BigUint>,
    /// `P_0 = 1, P_1, …, P_n`
    products: Vec<BigUint>,
    h_status: Vec<HStatus>,
}

impl MixedRadixSystem {
    pub fn new(radices: Vec<BigUint>) -> Result<Self, AppendixError> {
        if radices.is_empty() {
            return Err(AppendixError::Schedule("at least one radix is required".into()));
        }
        if radices[0] < BigUint::from(4u32) {
            return Err(AppendixError::Schedule(format!("M_1 = {} is below 4", radices[0])));
        }
        for (i, m) in radices.iter().enumerate() {
            if m.is_odd() {
                return Err(AppendixError::Schedule(format!("M_{} = {m} is odd", i + 1)));
            }
            if i > 0 && m < &radices[i - 1] {
                return Err(AppendixError::Schedule(format!("M_{} = {m} is smaller than M_{}", i + 1, i)));
            }
        }
        let mut products = vec![BigUint::one()];
        for m in &radices {
            let next = products.last().unwrap() * m;
            products.push(next);
        }
        let h_status = (1..=radices.len()).map(|n| h_status_of(&products, n)).collect();
        Ok(MixedRadixSystem { radices, products, h_status })
    }

    pub fn from_u64(radices: &[u64]) -> Result<Self, AppendixError> {
        Self::new(radices.iter().map(|&m| BigUint::from(m)).collect())
    }

    pub fn depth(&self) -> usize {
        self.radices.len()
    }

    /// `M_n`, `n >= 1`.
    pub fn radix(&self, n: usize) -> &BigUint {
        &self.radices[n - 1]
    }

    pub fn radices(&self) -> &[BigUint] {
        &self.radices
    }

    /// `P_n`, with `P_0 = 1`.
    pub fn product(&self, n: usize) -> &BigUint {
        &self.products[n]
    }

    pub fn h_status(&self, n: usize) -> HStatus {
        self.h_status[n - 1]
    }

    pub fn h_verified(&self) -> Vec<bool> {
        self.h_status.iter().map(|s| *s == HStatus::Holds).collect()
    }

    fn need(&self, n: u64) -> Result<usize, AppendixError> {
        if n as usize > self.depth() || n == 0 {
            return Err(AppendixError::TooShort { needed: n, have: self.depth() });
        }
        Ok(n as usize)
    }
}

fn h_status_of(products: &[BigUint], n: usize) -> HStatus {
    match products[n - 1].to_u64() {
        Some(x) => compare_exp(&products[n], x),
        None => HStatus::Infeasible,
    }
}

/// `h(1/P_n) <= 1/P_{n-1}`, i.e. `P_n >= e^{P_{n-1}}`. Level 1 compares `P_1`
/// with `e`.
pub fn check_h_condition(sys: &MixedRadixSystem, n: usize) -> Result<HStatus, AppendixError> {
    sys.need(n as u64)?;
    Ok(sys.h_status(n))
}

/// `M_1 = 4`, then the smallest even `M_n >= M_{n-1}` with
/// `P_{n-1} M_n >=` a certified upper bound for `e^{P_{n-1}}`. Once
/// `P_{n-1}` leaves the budget the radix just doubles and the level stays
/// uncertified.
pub fn default_schedule(depth: usize) -> Result<MixedRadixSystem, AppendixError> {
    if depth == 0 {
        return Err(AppendixError::Parameters("schedule depth must be at least 1".into()));
    }
    let mut radices = vec![BigUint::from(4u32)];
    let mut p = BigUint::from(4u32);
    while radices.len() < depth {
        let prev = radices.last().unwrap().clone();
        let m = match p.to_u64().filter(|&x| x <= EXP_BUDGET) {
            Some(x) => {
                let precision = precision_for(x);
                let (_, hi) = exp_fixed(x, precision);
                let denom = &p << precision;
                let (mut m, r) = hi.div_rem(&denom);
                if !r.is_zero() {
                    m += 1u32;
                }
                if m.is_odd() {
                    m += 1u32;
                }
                m.max(prev)
            }
            None => prev * 2u32,
        };
        p *= &m;
        radices.push(m);
    }
    MixedRadixSystem::new(radices)
}

/// Radices print as JSON numbers while they fit in `u64`.
#[derive(Debug, Clone)]
struct Radix(BigUint);

impl Serialize for Radix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_u64() {
            Some(v) => s.serialize_u64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Radix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Radix(BigUint::from(v))),
            Raw::Text(t) => t.parse().map(Radix).map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SystemJson {
    radices: Vec<Radix>,
    h_verified: Vec<bool>,
    h_status: Vec<HStatus>,
}

impl Serialize for MixedRadixSystem {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SystemJson {
            radices: self.radices.iter().cloned().map(Radix).collect(),
            h_verified: self.h_verified(),
            h_status: self.h_status.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MixedRadixSystem {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = SystemJson::deserialize(d)?;
        // the certification is recomputed, never trusted
        MixedRadixSystem::new(raw.radices.into_iter().map(|r| r.0).collect()).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for MixedRadixSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.radices.iter().map(|m| m.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Parses `4,14,40`.
pub fn parse_schedule(s: &str) -> Result<MixedRadixSystem, AppendixError> {
    let radices = s
        .split(',')
        .map(|t| t.trim().parse::<BigUint>().map_err(|_| AppendixError::Schedule(format!("bad radix {t:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    MixedRadixSystem::new(radices)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitVector {
    pub integer_part: BigInt,
    pub digits: Vec<BigUint>,
    /// The expansion terminated within the computed digits.
    pub exact: bool,
    /// The other expansion of a terminating `x`, ending in `M_n - 1` digits.
    pub alternative: Option<(BigInt, Vec<BigUint>)>,
}

impl DigitVector {
    /// `[x] + Σ x^(n)/P_n`.
    pub fn value(&self, sys: &MixedRadixSystem) -> Rational {
        reconstruct(&self.integer_part, &self.digits, sys)
    }
}

fn reconstruct(int: &BigInt, digits: &[BigUint], sys: &MixedRadixSystem) -> Rational {
    let mut v = Rational::from(int.clone());
    for (i, d) in digits.iter().enumerate() {
        v += &Rational::new(BigInt::from(d.clone()), BigInt::from(sys.product(i + 1).clone()));
    }
    v
}

/// Greedy digits of `x` to the given depth.
pub fn digits_of(x: &Rational, sys: &MixedRadixSystem, depth: usize) -> Result<DigitVector, AppendixError> {
    sys.need(depth as u64)?;
    let (integer_part, mut frac) = x.split_floor();
    let mut digits = Vec::with_capacity(depth);
    for n in 1..=depth {
        let v = frac * Rational::from(sys.radix(n).clone());
        let (d, rest) = v.split_floor();
        digits.push(d.to_biguint().expect("digit is non-negative"));
        frac = rest;
    }
    let exact = frac.is_zero();
    let alternative = exact.then(|| {
        let mut alt = digits.clone();
        match alt.iter().rposition(|d| !d.is_zero()) {
            Some(r) => {
                alt[r] -= 1u32;
                for (n, d) in alt.iter_mut().enumerate().skip(r + 1) {
                    *d = sys.radix(n + 1) - 1u32;
                }
                (integer_part.clone(), alt)
            }
            None => {
                for (n, d) in alt.iter_mut().enumerate() {
                    *d = sys.radix(n + 1) - 1u32;
                }
                (&integer_part - 1, alt)
            }
        }
    });
    Ok(DigitVector { integer_part, digits, exact, alternative })
}

/// Whether `x ∈ F_n`, either expansion counting.
///
/// With `y = frac(x P_{n-1}) M_n`, the greedy digit is `⌊y⌋`. A second
/// expansion changes digit `n` only when `x P_n` is an integer and
/// `x P_{n-1}` is not, and then lowers it by one. So `x ∈ F_n` exactly when
/// `y ∈ [0,1] ∪ [M_n/2, M_n/2 + 1]`.
pub fn f_membership(x: &Rational, n: usize, sys: &MixedRadixSystem) -> Result<bool, AppendixError> {
    sys.need(n as u64)?;
    let (_, frac) = (x * Rational::from(sys.product(n - 1).clone())).split_floor();
    let m = Rational::from(sys.radix(n).clone());
    let y = frac * &m;
    let half = m / Rational::integer(2);
    let one = Rational::one();
    Ok(y <= one || (y >= half && y <= half + one))
}

/// `j_u`: the greatest `v` with `2^{v-1} | u`.
pub fn branch_index(u: u64) -> u32 {
    assert!(u >= 1, "branch index starts at u = 1");
    u.trailing_zeros() + 1
}

/// The intervals of `F_n` meeting `[lo, hi]`, found by enumeration.
pub fn f_intervals(sys: &MixedRadixSystem, n: usize, lo: &Rational, hi: &Rational) -> Result<Vec<Interval>, AppendixError> {
    sys.need(n as u64)?;
    let block = Rational::new(1, BigInt::from(sys.product(n - 1).clone()));
    let len = Rational::new(1, BigInt::from(sys.product(n).clone()));
    let half = &block / Rational::integer(2);
    let mut k: BigInt = (lo / &block).floor() - 1;
    let mut out = Vec::new();
    loop {
        let base = Rational::from(k.clone()) * &block;
        if &base > hi {
            break;
        }
        for start in [base.clone(), &base + &half] {
            let end = &start + &len;
            if &end >= lo && &start <= hi {
                out.push(Interval::closed(start, end)?);
            }
        }
        k += 1;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainStep {
    pub u: u64,
    pub j: u32,
    /// `C_u`, an interval of `F_u`.
    pub c: Interval,
    pub alpha: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NestedChain {
    #[serde(rename = "U")]
    pub depth: u64,
    /// `C_U + α_{j_U}`
    pub interval: Interval,
    pub alphas: Vec<Rational>,
    pub branch: Vec<u32>,
    pub steps: Vec<ChainStep>,
}

/// Starts at `C_1 = [0, 1/M_1]` and, at step `u`, takes the leftmost interval
/// of `F_u` inside `C_{u-1} + α_{j_{u-1}} - α_{j_u}`. The starts of `F_u`
/// intervals are spaced `1/(2P_{u-1})` apart and each has length at most
/// `1/(4P_{u-1})`, so the window of length `1/P_{u-1}` always holds one.
pub fn nested_intersect(alpha: &[Rational], sys: &MixedRadixSystem, depth: u64) -> Result<NestedChain, AppendixError> {
    let u_max = sys.need(depth)?;
    let needed = (1..=depth).map(branch_index).max().unwrap_or(1) as usize;
    if alpha.len() < needed {
        return Err(AppendixError::Parameters(format!(
            "{needed} offsets needed for U = {depth}, {} given",
            alpha.len()
        )));
    }
    let mut steps: Vec<ChainStep> = Vec::with_capacity(u_max);
    let c1 = Interval::closed(Rational::zero(), Rational::new(1, BigInt::from(sys.radix(1).clone())))?;
    steps.push(ChainStep { u: 1, j: 1, c: c1, alpha: alpha[0].clone() });
    for u in 2..=u_max {
        let j = branch_index(u as u64);
        let a = alpha[j as usize - 1].clone();
        let prev = steps.last().unwrap();
        let window = prev.c.translate(&(&prev.alpha - &a));
        let spacing: BigInt = BigInt::from(sys.product(u - 1).clone()) * 2;
        let start = Rational::new((window.lo() * Rational::from(spacing.clone())).ceil(), spacing);
        let end = &start + Rational::new(1, BigInt::from(sys.product(u).clone()));
        let c = Interval::closed(start, end)?;
        if !window.contains_interval(&c) {
            return Err(AppendixError::Check(format!("no interval of F_{u} fits in {window}")));
        }
        steps.push(ChainStep { u: u as u64, j, c, alpha: a });
    }
    let last = steps.last().unwrap();
    let interval = last.c.translate(&last.alpha);
    let chain = NestedChain {
        depth,
        interval,
        alphas: alpha[..needed].to_vec(),
        branch: steps.iter().map(|s| s.j).collect(),
        steps,
    };
    verify_chain(&chain, sys)?;
    Ok(chain)
}

/// Nesting, lengths and membership of the endpoints and midpoint at every level.
pub fn verify_chain(chain: &NestedChain, sys: &MixedRadixSystem) -> Result<(), AppendixError> {
    for (i, s) in chain.steps.iter().enumerate() {
        let u = s.u as usize;
        if s.c.length() != Rational::new(1, BigInt::from(sys.product(u).clone())) {
            return Err(AppendixError::Check(format!("C_{u} has length {}", s.c.length())));
        }
        if i > 0 {
            let p = &chain.steps[i - 1];
            if !p.c.translate(&p.alpha).contains_interval(&s.c.translate(&s.alpha)) {
                return Err(AppendixError::Check(format!("C_{u} + α is not nested in step {}", u - 1)));
            }
        }
        for x in [chain.interval.lo(), &chain.interval.midpoint(), chain.interval.hi()] {
            if !f_membership(&(x - &s.alpha), u, sys)? {
                return Err(AppendixError::Check(format!("{x} - α_{} is not in F_{u}", s.j)));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PremeasureReport {
    pub j: u32,
    pub k: u32,
    /// `(2k-1) 2^{j-1}`
    pub level: u64,
    pub cover_count: String,
    pub length: Rational,
    /// `count / P_{level-1}`, the bound after applying the `h`-condition.
    pub bound: Rational,
    /// `2 / Π_{l<k} (M_{(2l-1)2^{j-1}}/2)`
    pub simplified: Rational,
    /// `1/2^{k-2}`
    pub target: Rational,
    pub meets_target: bool,
    pub certified: bool,
}

pub fn premeasure_bound(sys: &MixedRadixSystem, j: u32, k: u32) -> Result<PremeasureReport, AppendixError> {
    if j == 0 || k == 0 || j > 63 {
        return Err(AppendixError::Parameters("j and k start at 1".into()));
    }
    let level_of = |l: u64| (2 * l - 1) << (j - 1);
    let level = level_of(u64::from(k));
    let lv = sys.need(level)?;
    let halves: Vec<BigUint> = (1..=u64::from(k)).map(|l| sys.radix(level_of(l) as usize) / 2u32).collect();
    let denom: BigUint = halves.iter().product();
    let (count, rest) = sys.product(lv).div_rem(&denom);
    if !rest.is_zero() {
        return Err(AppendixError::Check("cover count is not an integer".into()));
    }
    let bound = Rational::new(BigInt::from(count.clone()), BigInt::from(sys.product(lv - 1).clone()));
    let head: BigUint = halves[..halves.len() - 1].iter().product();
    let simplified = Rational::new(2, BigInt::from(head));
    if bound != simplified {
        return Err(AppendixError::Check(format!("{bound} differs from {simplified}")));
    }
    let target = Rational::integer(2).pow(2 - k as i32);
    Ok(PremeasureReport {
        j,
        k,
        level,
        cover_count: count.to_string(),
        length: Rational::new(1, BigInt::from(sys.product(lv).clone())),
        meets_target: bound <= target,
        bound,
        simplified,
        target,
        certified: sys.h_status(lv) == HStatus::Holds,
    })
}
