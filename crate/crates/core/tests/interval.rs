use affine_copies::props::run_suite;
use affine_copies::{q, Interval, IntervalSet, Rational};
use proptest::prelude::*;

fn set(s: &str) -> IntervalSet {
    serde_json::from_str(s).unwrap()
}

fn iv(s: &str) -> Interval {
    s.parse().unwrap()
}

#[test]
fn normalize_examples() {
    assert_eq!(IntervalSet::normalize(vec![iv("(0,1/2)"), iv("(1/4,3/4)")]), set(r#"["(0,3/4)"]"#));
    assert_eq!(IntervalSet::normalize(vec![iv("(0,1/2)"), iv("[1/2,1)")]), set(r#"["(0,1)"]"#));
    assert_eq!(IntervalSet::normalize(vec![iv("(0,1/2)"), iv("(1/2,1)")]).len(), 2);
    assert!(Interval::open(q(1, 2), q(1, 3)).is_err());
}

#[test]
fn affine_examples() {
    let third = set(r#"["(1/3,2/3)"]"#);
    assert_eq!(third.affine(&q(1, 1), &q(-1, 3)).unwrap(), set(r#"["(0,1/3)"]"#));
    assert_eq!(set(r#"["(0,1)"]"#).affine(&q(-1, 1), &q(0, 1)).unwrap(), set(r#"["(-1,0)"]"#));
    let mixed = set(r#"["[0,1/4)","(1/2,1)"]"#);
    assert_eq!(mixed.affine(&q(2, 1), &q(1, 1)).unwrap(), set(r#"["[1,3/2)","(2,3)"]"#));
    assert_eq!(mixed.affine(&q(-1, 1), &q(0, 1)).unwrap(), set(r#"["(-1,-1/2)","(-1/4,0]"]"#));
    assert!(mixed.affine(&q(0, 1), &q(1, 1)).is_err());
}

#[test]
fn boolean_examples() {
    let unit = iv("[0,1]");
    assert_eq!(set(r#"["(4/9,5/9)"]"#).complement_within(&unit), set(r#"["[0,4/9]","[5/9,1]"]"#));
    assert_eq!(set(r#"["(0,1/2)"]"#).intersect(&set(r#"["(1/4,1)"]"#)), set(r#"["(1/4,1/2)"]"#));
    assert_eq!(IntervalSet::empty().union(&set(r#"["[1,2]"]"#)), set(r#"["[1,2]"]"#));
}

#[test]
fn measure_examples() {
    assert_eq!(set(r#"["(0,1/2)","[1/2,1)"]"#).measure(), q(1, 1));
    assert_eq!(IntervalSet::empty().measure(), q(0, 1));
    assert_eq!(set(r#"["[0,4/9]","[5/9,1]"]"#).measure(), q(8, 9));
}

#[test]
fn left_neighborhood_examples() {
    assert_eq!(set(r#"["(1/3,2/3)"]"#).left_neighborhood(&q(1, 6)).unwrap(), set(r#"["(1/6,2/3)"]"#));
    assert_eq!(
        set(r#"["(0,1/4)","(1/2,3/4)"]"#).left_neighborhood(&q(1, 8)).unwrap(),
        set(r#"["(-1/8,1/4)","(3/8,3/4)"]"#)
    );
    assert!(set(r#"["(0,1)"]"#).left_neighborhood(&q(0, 1)).is_err());
}

#[test]
fn star_examples() {
    assert_eq!(set(r#"["(1/3,2/3)"]"#).star().unwrap(), set(r#"["[1/3,2/3)"]"#));
    assert_eq!(set(r#"["(0,1/4)","(1/2,1)"]"#).star().unwrap(), set(r#"["[0,1/4)","[1/2,1)"]"#));
    assert!(set(r#"["(0,1/2)","(1/2,1]"]"#).star().is_err());
}

#[test]
fn serialization_forms() {
    let s = set(r#"["(0,1/2)","[3/4,1]","[2,5/2)","(3,7/2]"]"#);
    assert_eq!(serde_json::to_string(&s).unwrap(), r#"["(0,1/2)","[3/4,1]","[2,5/2)","(3,7/2]"]"#);
    assert_eq!(serde_json::to_string(&q(6, 3)).unwrap(), r#""2""#);
}

#[test]
fn seeded_suite_is_deterministic() {
    let a = run_suite(2024, 200);
    assert!(a.pass, "{:?}", a.properties);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&run_suite(2024, 200)).unwrap());
}

fn arb_rational() -> impl Strategy<Value = Rational> {
    (-40i64..40, 1i64..9).prop_map(|(n, d)| q(n, d))
}

fn arb_interval() -> impl Strategy<Value = Interval> {
    (arb_rational(), arb_rational(), any::<bool>(), any::<bool>())
        .prop_filter("distinct ends", |(a, b, _, _)| a != b)
        .prop_map(|(a, b, l, h)| {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            Interval::new(lo, hi, l, h).unwrap()
        })
}

fn arb_set() -> impl Strategy<Value = IntervalSet> {
    prop::collection::vec(arb_interval(), 0..5).prop_map(IntervalSet::normalize)
}

proptest! {
    #[test]
    fn normalize_is_idempotent(raw in prop::collection::vec(arb_interval(), 0..6)) {
        let s = IntervalSet::normalize(raw);
        prop_assert_eq!(IntervalSet::normalize(s.parts().to_vec()), s);
    }

    #[test]
    fn translation_commutes_with_complement(a in arb_set(), w in arb_interval(), t in arb_rational()) {
        let lhs = a.complement_within(&w).affine(&Rational::one(), &t).unwrap();
        let rhs = a.affine(&Rational::one(), &t).unwrap().complement_within(&w.translate(&t));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn measure_inclusion_exclusion(a in arb_set(), b in arb_set()) {
        prop_assert_eq!(a.union(&b).measure() + a.intersect(&b).measure(), a.measure() + b.measure());
    }

    #[test]
    fn left_neighborhood_monotone(a in arb_set(), b in arb_set(), r in 1i64..20, extra in 0i64..20) {
        let (r1, r2) = (q(r, 7), q(r + extra, 7));
        let ab = a.union(&b);
        prop_assert!(a.left_neighborhood(&r1).unwrap().is_subset_of(&ab.left_neighborhood(&r1).unwrap()));
        prop_assert!(a.left_neighborhood(&r1).unwrap().is_subset_of(&a.left_neighborhood(&r2).unwrap()));
        prop_assert_eq!(
            ab.left_neighborhood(&r1).unwrap(),
            a.left_neighborhood(&r1).unwrap().union(&b.left_neighborhood(&r1).unwrap())
        );
    }

    #[test]
    fn difference_matches_complement(a in arb_set(), b in arb_set()) {
        let d = a.difference(&b);
        prop_assert!(d.intersect(&b).is_empty());
        prop_assert_eq!(d.union(&a.intersect(&b)), a);
    }
}
