//! Seeded randomized checks of the interval kernel.
//!
//! Each property draws its own `ChaCha8` stream from the suite seed, so a
//! report is a pure function of `(seed, cases)`. Set identities are compared
//! structurally (canonical forms are unique) and, where it matters, against
//! a pointwise oracle that never calls the kernel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::interval::{Interval, IntervalSet};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyOutcome {
    pub name: String,
    pub cases: u32,
    pub failures: u32,
    pub first_failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub cases: u32,
    pub properties: Vec<PropertyOutcome>,
    pub pass: bool,
}

type Check = fn(&mut ChaCha8Rng) -> Result<(), String>;

const PROPERTIES: &[(&str, Check)] = &[
    ("normalize-idempotent", normalize_idempotent),
    ("normalize-pointwise", normalize_pointwise),
    ("translate-complement", translate_complement),
    ("translate-distributes", translate_distributes),
    ("reflect-distributes", reflect_distributes),
    ("measure-additive", measure_additive),
    ("union-intersect-pointwise", union_intersect_pointwise),
    ("left-neighborhood-interval", left_neighborhood_interval),
    ("left-neighborhood-union", left_neighborhood_union),
    ("left-neighborhood-contains-star", left_neighborhood_contains_star),
    ("left-neighborhood-monotone-set", left_neighborhood_monotone_set),
    ("left-neighborhood-monotone-radius", left_neighborhood_monotone_radius),
    ("left-neighborhood-pointwise", left_neighborhood_pointwise),
];

pub fn property_names() -> Vec<&'static str> {
    PROPERTIES.iter().map(|(n, _)| *n).collect()
}

pub fn run_suite(seed: u64, cases: u32) -> SuiteReport {
    let properties: Vec<PropertyOutcome> = PROPERTIES
        .iter()
        .enumerate()
        .map(|(i, (name, check))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut failures = 0;
            let mut first_failure = None;
            for case in 0..cases {
                if let Err(msg) = check(&mut rng) {
                    failures += 1;
                    first_failure.get_or_insert_with(|| format!("case {case}: {msg}"));
                }
            }
            PropertyOutcome { name: name.to_string(), cases, failures, first_failure }
        })
        .collect();
    let pass = properties.iter().all(|p| p.failures == 0);
    SuiteReport { seed, cases, properties, pass }
}

fn rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(rng.gen_range(-60i64..=60), rng.gen_range(1i64..=12))
}

fn positive(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(rng.gen_range(1i64..=40), rng.gen_range(1i64..=12))
}

fn interval(rng: &mut ChaCha8Rng) -> Interval {
    loop {
        let (a, b) = (rational(rng), rational(rng));
        if a == b {
            continue;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        return Interval::new(lo, hi, rng.gen(), rng.gen()).expect("ordered endpoints");
    }
}

fn raw_list(rng: &mut ChaCha8Rng) -> Vec<Interval> {
    let n = rng.gen_range(0..6);
    (0..n).map(|_| interval(rng)).collect()
}

fn set(rng: &mut ChaCha8Rng) -> IntervalSet {
    IntervalSet::normalize(raw_list(rng))
}

/// Open parts with pairwise disjoint closures.
fn separated_open(rng: &mut ChaCha8Rng) -> IntervalSet {
    let k = rng.gen_range(0..5);
    let mut pts: Vec<Rational> = (0..2 * k).map(|_| rational(rng)).collect();
    pts.sort();
    pts.dedup();
    pts.chunks_exact(2).map(|w| Interval::open(w[0].clone(), w[1].clone()).unwrap()).collect()
}

/// Every endpoint, the midpoints between consecutive ones, and a point
/// beyond each end. Membership is constant between consecutive samples.
fn samples(sets: &[&[Interval]]) -> Vec<Rational> {
    let mut ends: Vec<Rational> = sets
        .iter()
        .flat_map(|s| s.iter().flat_map(|i| [i.lo().clone(), i.hi().clone()]))
        .collect();
    ends.sort();
    ends.dedup();
    let mut out = Vec::with_capacity(2 * ends.len() + 2);
    if let (Some(first), Some(last)) = (ends.first(), ends.last()) {
        out.push(first - Rational::one());
        out.push(last + Rational::one());
    }
    for w in ends.windows(2) {
        out.push(w[0].midpoint(&w[1]));
    }
    out.extend(ends);
    out
}

fn raw_contains(parts: &[Interval], x: &Rational) -> bool {
    parts.iter().any(|p| {
        let above = if p.lo_closed() { x >= p.lo() } else { x > p.lo() };
        let below = if p.hi_closed() { x <= p.hi() } else { x < p.hi() };
        above && below
    })
}

/// `x ∈ B₋(S, r)` iff some part of `S` meets `[x, x + r)`.
fn oracle_left_neighborhood(parts: &[Interval], r: &Rational, x: &Rational) -> bool {
    let end = x + r;
    parts.iter().any(|p| {
        let (lo, lo_in) = if p.lo() > x { (p.lo(), p.lo_closed()) } else { (x, x != p.lo() || p.lo_closed()) };
        let (hi, hi_in) = if p.hi() < &end { (p.hi(), p.hi_closed()) } else { (&end, false) };
        lo < hi || (lo == hi && lo_in && hi_in)
    })
}

fn expect(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn normalize_idempotent(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let s = set(rng);
    let again = IntervalSet::normalize(s.parts().to_vec());
    expect(again == s, || format!("{s} renormalizes to {again}"))
}

fn normalize_pointwise(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let raw = raw_list(rng);
    let s = IntervalSet::normalize(raw.clone());
    for x in samples(&[&raw]) {
        if s.contains(&x) != raw_contains(&raw, &x) {
            return Err(format!("{s} disagrees with its input at {x}"));
        }
    }
    let disjoint = s.parts().windows(2).all(|w| {
        w[0].hi() < w[1].lo() || (w[0].hi() == w[1].lo() && !w[0].hi_closed() && !w[1].lo_closed())
    });
    expect(disjoint, || format!("{s} is not canonical"))
}

fn translate_complement(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let a = set(rng);
    let w = interval(rng);
    let t = rational(rng);
    let left = a.complement_within(&w).translate(&t);
    let right = a.translate(&t).complement_within(&w.translate(&t));
    expect(left == right, || format!("A = {a}, W = {w}, t = {t}: {left} vs {right}"))
}

fn translate_distributes(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let (a, b, t) = (set(rng), set(rng), rational(rng));
    let u = a.union(&b).translate(&t) == a.translate(&t).union(&b.translate(&t));
    let i = a.intersect(&b).translate(&t) == a.translate(&t).intersect(&b.translate(&t));
    let m = a.translate(&t).measure() == a.measure();
    expect(u && i && m, || format!("A = {a}, B = {b}, t = {t}"))
}

fn reflect_distributes(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let (a, b, t) = (set(rng), set(rng), rational(rng));
    let minus = -Rational::one();
    let f = |s: &IntervalSet| s.affine(&minus, &t).expect("nonzero scale");
    let u = f(&a.union(&b)) == f(&a).union(&f(&b));
    let i = f(&a.intersect(&b)) == f(&a).intersect(&f(&b));
    let back = f(&f(&a).translate(&(-&t))).translate(&(-&t)) == a;
    let m = f(&a).measure() == a.measure();
    expect(u && i && back && m, || format!("A = {a}, B = {b}, t = {t}"))
}

fn measure_additive(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let (a, b) = (set(rng), set(rng));
    let rest = b.difference(&a);
    let additive = a.union(&rest).measure() == a.measure() + rest.measure();
    let incl_excl = a.union(&b).measure() + a.intersect(&b).measure() == a.measure() + b.measure();
    let by_parts: Rational = a.parts().iter().map(|p| p.length()).sum();
    expect(additive && incl_excl && by_parts == a.measure(), || format!("A = {a}, B = {b}"))
}

fn union_intersect_pointwise(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let (a, b) = (set(rng), set(rng));
    let w = interval(rng);
    let (u, i, c) = (a.union(&b), a.intersect(&b), a.complement_within(&w));
    for x in samples(&[a.parts(), b.parts(), std::slice::from_ref(&w)]) {
        let (ia, ib) = (raw_contains(a.parts(), &x), raw_contains(b.parts(), &x));
        let ok = u.contains(&x) == (ia || ib)
            && i.contains(&x) == (ia && ib)
            && c.contains(&x) == (w.contains(&x) && !ia);
        if !ok {
            return Err(format!("A = {a}, B = {b}, W = {w} at {x}"));
        }
    }
    Ok(())
}

fn left_neighborhood_interval(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let iv = interval(rng);
    let open = Interval::open(iv.lo().clone(), iv.hi().clone()).unwrap();
    let r = positive(rng);
    let got = IntervalSet::from(open.clone()).left_neighborhood(&r).map_err(|e| e.to_string())?;
    let want = IntervalSet::from(Interval::open(iv.lo() - &r, iv.hi().clone()).unwrap());
    expect(got == want, || format!("B₋({open}, {r}) = {got}"))
}

fn left_neighborhood_union(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let (a, b, r) = (set(rng), set(rng), positive(rng));
    let lhs = a.union(&b).left_neighborhood(&r).map_err(|e| e.to_string())?;
    let rhs = a.left_neighborhood(&r).unwrap().union(&b.left_neighborhood(&r).unwrap());
    expect(lhs == rhs, || format!("A = {a}, B = {b}, r = {r}"))
}

fn left_neighborhood_contains_star(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let (s, r) = (separated_open(rng), positive(rng));
    let star = s.star().map_err(|e| e.to_string())?;
    let b = s.left_neighborhood(&r).unwrap();
    expect(star.is_subset_of(&b), || format!("S = {s}, r = {r}: {star} ⊄ {b}"))
}

fn left_neighborhood_monotone_set(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let (s, extra, r) = (set(rng), set(rng), positive(rng));
    let t = s.union(&extra);
    let (bs, bt) = (s.left_neighborhood(&r).unwrap(), t.left_neighborhood(&r).unwrap());
    expect(bs.is_subset_of(&bt), || format!("S = {s}, T = {t}, r = {r}"))
}

fn left_neighborhood_monotone_radius(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let (s, r, more) = (set(rng), positive(rng), positive(rng));
    let r2 = &r + &more;
    let (b1, b2) = (s.left_neighborhood(&r).unwrap(), s.left_neighborhood(&r2).unwrap());
    expect(b1.is_subset_of(&b2), || format!("S = {s}, r = {r} < {r2}"))
}

fn left_neighborhood_pointwise(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let (s, r) = (set(rng), positive(rng));
    let b = s.left_neighborhood(&r).unwrap();
    let shifted: Vec<Interval> = s.parts().iter().map(|p| p.translate(&(-&r))).collect();
    for x in samples(&[s.parts(), &shifted]) {
        if b.contains(&x) != oracle_left_neighborhood(s.parts(), &r, &x) {
            return Err(format!("S = {s}, r = {r} at {x}"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes_and_repeats() {
        let a = run_suite(7, 50);
        assert!(a.pass, "{:?}", a.properties);
        assert_eq!(a, run_suite(7, 50));
        assert_ne!(a.properties.len(), 0);
    }

    #[test]
    fn oracle_left_neighborhood_by_hand() {
        let s = [Interval::open(Rational::new(1, 3), Rational::new(2, 3)).unwrap()];
        let r = Rational::new(1, 6);
        assert!(oracle_left_neighborhood(&s, &r, &Rational::new(1, 5)));
        assert!(!oracle_left_neighborhood(&s, &r, &Rational::new(1, 6)));
        assert!(!oracle_left_neighborhood(&s, &r, &Rational::new(2, 3)));
    }
}
