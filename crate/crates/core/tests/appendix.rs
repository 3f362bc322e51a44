use affine_copies::appendix::{
    branch_index, check_h_condition, default_schedule, digits_of, f_intervals, f_membership, nested_intersect,
    parse_schedule, premeasure_bound, HStatus, MixedRadixSystem,
};
use affine_copies::{q, Interval, Rational};
use num_bigint::BigUint;
use proptest::prelude::*;

fn geometry() -> MixedRadixSystem {
    MixedRadixSystem::from_u64(&[4, 14, 40, 120, 360, 1080]).unwrap()
}

#[test]
fn h_condition_at_level_two() {
    let good = parse_schedule("4,14").unwrap();
    assert_eq!(check_h_condition(&good, 2).unwrap(), HStatus::Holds);
    let bad = parse_schedule("4,12").unwrap();
    assert_eq!(check_h_condition(&bad, 2).unwrap(), HStatus::Fails);
    // 4 >= e
    assert_eq!(check_h_condition(&good, 1).unwrap(), HStatus::Holds);
    assert!(check_h_condition(&good, 3).is_err());
}

#[test]
fn default_schedule_certifies_while_feasible() {
    let s = default_schedule(5).unwrap();
    assert_eq!(s.radix(1), &BigUint::from(4u32));
    assert_eq!(s.radix(2), &BigUint::from(14u32));
    // M_3 ≈ e^56/56, far beyond 64 bits
    assert!(s.radix(3).bits() > 70);
    assert_eq!(s.h_verified(), vec![true, true, true, false, false]);
    assert_eq!(s.h_status(4), HStatus::Infeasible);
    assert_eq!(s.radix(4), &(s.radix(3) * 2u32));
    // the bound used for M_3 is tight: one even step lower fails
    let mut lower: Vec<BigUint> = s.radices()[..3].to_vec();
    lower[2] -= 2u32;
    assert_eq!(MixedRadixSystem::new(lower).unwrap().h_status(3), HStatus::Fails);
}

#[test]
fn geometry_schedule_uncertified_beyond_two() {
    let s = geometry();
    assert_eq!(s.h_verified(), vec![true, true, false, false, false, false]);
    assert_eq!(s.h_status(5), HStatus::Infeasible);
}

#[test]
fn schedule_json_round_trip() {
    let s = default_schedule(4).unwrap();
    let v = serde_json::to_value(&s).unwrap();
    assert_eq!(v["radices"][0], 4);
    assert_eq!(v["radices"][1], 14);
    assert!(v["radices"][2].is_string());
    assert_eq!(v["h_verified"], serde_json::json!([true, true, true, false]));
    let back: MixedRadixSystem = serde_json::from_value(v).unwrap();
    assert_eq!(back, s);
}

#[test]
fn zero_and_integers_have_zero_digits() {
    let s = geometry();
    for x in [q(0, 1), q(3, 1), q(-2, 1)] {
        let d = digits_of(&x, &s, 6).unwrap();
        assert!(d.digits.iter().all(|g| g == &BigUint::from(0u32)));
        assert!(d.exact);
        assert_eq!(d.value(&s), x);
    }
}

#[test]
fn half_is_in_f1() {
    let s = geometry();
    assert!(f_membership(&q(1, 2), 1, &s).unwrap());
    assert!(!f_membership(&q(3, 8), 1, &s).unwrap());
    // right end of [0,1/4] has digit 1 but also the expansion 0,13,…
    assert!(f_membership(&q(1, 4), 1, &s).unwrap());
}

#[test]
fn f_geometry_by_enumeration() {
    let s = geometry();
    for n in 1..=3usize {
        let block = Rational::new(1, s.product(n - 1).clone());
        let len = Rational::new(1, s.product(n).clone());
        let ivs = f_intervals(&s, n, &q(0, 1), &block).unwrap();
        assert!(ivs.iter().all(|i| i.length() == len));
        let starts: Vec<_> = ivs.iter().filter(|i| i.lo() < &block).map(|i| i.lo().clone()).collect();
        assert_eq!(starts, vec![q(0, 1), &block / Rational::integer(2)]);
        // digit scan over a fine grid agrees with the intervals
        let m = s.radix(n).clone();
        let fine = s.product(n).clone() * 4u32;
        let steps: u64 = (&fine / s.product(n - 1)).try_into().unwrap();
        for i in 0..=steps {
            let x = Rational::new(i, fine.clone());
            let inside = ivs.iter().any(|iv| iv.contains(&x));
            assert_eq!(f_membership(&x, n, &s).unwrap(), inside, "n={n} x={x} M={m}");
        }
    }
}

#[test]
fn branch_partition() {
    for u in 1..2000u64 {
        let j = branch_index(u);
        let odd = u >> (j - 1);
        assert_eq!(odd % 2, 1);
        assert_eq!(u, odd << (j - 1));
    }
}

#[test]
fn nested_zero_offsets() {
    let s = parse_schedule("4,14").unwrap();
    let c = nested_intersect(&[q(0, 1), q(0, 1)], &s, 2).unwrap();
    assert_eq!(c.interval, Interval::closed(q(0, 1), q(1, 56)).unwrap());
    assert_eq!(c.branch, vec![1, 2]);
}

#[test]
fn nested_single_step_is_shifted_start() {
    let s = geometry();
    let c = nested_intersect(&[q(7, 3)], &s, 1).unwrap();
    assert_eq!(c.interval, Interval::closed(q(7, 3), q(7, 3) + q(1, 4)).unwrap());
}

#[test]
fn nested_needs_enough_offsets() {
    let s = geometry();
    assert!(nested_intersect(&[q(0, 1), q(1, 2)], &s, 4).is_err());
    assert!(nested_intersect(&vec![q(0, 1); 3], &s, 7).is_err());
}

#[test]
fn chain_json_fields() {
    let c = nested_intersect(&[q(1, 3), q(-2, 7), q(5, 11)], &geometry(), 4).unwrap();
    let v = serde_json::to_value(&c).unwrap();
    assert_eq!(v["U"], 4);
    assert_eq!(v["branch"], serde_json::json!([1, 2, 1, 3]));
    assert!(v["interval"].as_str().unwrap().starts_with('['));
    assert_eq!(v["alphas"].as_array().unwrap().len(), 3);
}

#[test]
fn premeasure_first_case_is_equality() {
    let s = parse_schedule("4,14").unwrap();
    let r = premeasure_bound(&s, 1, 1).unwrap();
    assert_eq!(r.cover_count, "2");
    assert_eq!(r.bound, q(2, 1));
    assert_eq!(r.target, q(2, 1));
    assert!(r.meets_target && r.certified);
}

#[test]
fn premeasure_second_case() {
    let s = default_schedule(3).unwrap();
    let r = premeasure_bound(&s, 1, 2).unwrap();
    assert_eq!(r.level, 3);
    assert_eq!(r.bound, q(1, 1));
    assert_eq!(r.target, q(1, 1));
    assert!(r.meets_target && r.certified);
}

#[test]
fn premeasure_uncertified_and_short() {
    let s = geometry();
    let r = premeasure_bound(&s, 1, 2).unwrap();
    assert!(!r.certified);
    assert!(r.meets_target);
    let r = premeasure_bound(&s, 2, 1).unwrap();
    assert_eq!(r.level, 2);
    assert!(r.certified);
    assert!(premeasure_bound(&s, 1, 4).is_err());
    assert!(premeasure_bound(&s, 3, 1).unwrap().level == 4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn nested_chain_random_offsets(raw in prop::collection::vec((-500i64..500, 1i64..97), 3)) {
        let s = geometry();
        let alpha: Vec<Rational> = raw.iter().map(|&(a, b)| q(a, b)).collect();
        let c = nested_intersect(&alpha, &s, 6).unwrap();
        prop_assert_eq!(c.interval.length(), Rational::new(1, s.product(6).clone()));
        for w in c.steps.windows(2) {
            let outer = w[0].c.translate(&w[0].alpha);
            prop_assert!(outer.contains_interval(&w[1].c.translate(&w[1].alpha)));
        }
        for i in 0..=8 {
            let x = c.interval.lo() + c.interval.length() * q(i, 8);
            for (u, step) in c.steps.iter().enumerate() {
                prop_assert!(f_membership(&(&x - &step.alpha), u + 1, &s).unwrap());
            }
        }
    }

    #[test]
    fn digits_reconstruct(num in -100_000i64..100_000, k in 0u32..4) {
        let s = geometry();
        let denom = [1u64, 56, 2240, 268_800][k as usize];
        let x = Rational::new(num, denom);
        let d = digits_of(&x, &s, 6).unwrap();
        prop_assert!(d.exact);
        prop_assert_eq!(d.value(&s), x.clone());
        for (n, g) in d.digits.iter().enumerate() {
            prop_assert!(g < s.radix(n + 1));
        }
        if let Some((int, alt)) = &d.alternative {
            // the alternative agrees with x up to the last-digit tail 1/P_6
            let tail = Rational::new(1, s.product(6).clone());
            let mut v = Rational::from(int.clone());
            for (n, g) in alt.iter().enumerate() {
                v += &Rational::new(g.clone(), s.product(n + 1).clone());
            }
            prop_assert_eq!(v + tail, x);
        }
    }
}
