use affine_copies::cantor::{
    build_cantor, check_avoidance, truncated_union_cover, verify_cantor, BuiltinOracle, CantorConstruction,
    FinitePoints, GapOracle, MiddleThird, TernaryCantor,
};
use affine_copies::{q, Interval, IntervalSet, Rational};

fn default_at(depth: u32) -> CantorConstruction {
    build_cantor(&MiddleThird, depth).unwrap()
}

#[test]
fn counts_match_binary_tree() {
    let c = default_at(7);
    let gaps: usize = c.levels.iter().map(|l| l.gaps.len()).sum();
    assert_eq!(gaps, (1 << 7) - 1);
    assert_eq!(c.level(7).remnants.len(), 1 << 7);
}

#[test]
fn first_children_lengths_in_range() {
    for oracle in ["middle-third", "ternary-cantor", "points:1/2,4/9,13/27"] {
        let o: BuiltinOracle = oracle.parse().unwrap();
        let c = build_cantor(&o, 1).unwrap();
        for j in 1..=2 {
            let len = c.remnant(1, j).length();
            assert!(len >= q(1, 3) && len < q(2, 3), "{oracle}: |K_1,{j}| = {len}");
        }
    }
}

#[test]
fn default_depth_six_is_clean() {
    let report = verify_cantor(&default_at(6), 3);
    assert!(report.pass, "{:?}", report.violations);
    assert!(report.checks > 0);
}

#[test]
fn depth_one_has_no_descent_checks() {
    let c = default_at(1);
    let a = verify_cantor(&c, 0);
    let b = verify_cantor(&c, 5);
    assert!(a.pass && b.pass);
    assert_eq!(a.checks, b.checks);
}

#[test]
fn gap_lengths_are_unit_fractions_halving() {
    let c = default_at(10);
    for n in 1..=10 {
        let l = c.gap_length(n);
        assert!(l.is_unit_fraction());
        if n > 1 {
            assert!(l <= &(c.gap_length(n - 1) / Rational::integer(2)));
        }
    }
}

#[test]
fn gap_length_is_largest_admissible_unit_fraction() {
    // recompute the unshrunk oracle gaps and the admissible bound
    let c = default_at(6);
    for n in 1..=6u32 {
        let shortest = (1..=(1u64 << (n - 1)))
            .map(|j| MiddleThird.gap(&c.remnant(n - 1, j)).unwrap().length())
            .min()
            .unwrap();
        let bound = if n == 1 { shortest } else { shortest.min(c.gap_length(n - 1) / Rational::integer(2)) };
        let l = c.gap_length(n).clone();
        assert!(l <= bound);
        // the next larger unit fraction is too long
        let next = Rational::unit_fraction(l.recip().floor() - 1u32);
        assert!(l.recip() == Rational::one() || next > bound);
    }
}

#[test]
fn shrunk_gaps_are_centered_in_oracle_gaps() {
    let c = default_at(5);
    for n in 1..=5u32 {
        for j in 1..=(1u64 << (n - 1)) {
            let raw = MiddleThird.gap(&c.remnant(n - 1, j)).unwrap();
            let g = c.gap(n, j);
            assert_eq!(raw.midpoint(), g.midpoint());
            assert!(raw.contains_interval(g));
        }
    }
}

#[test]
fn moved_gap_fails_left_cover_at_its_index() {
    let mut c = default_at(4);
    // push I_{3,2} to the far right of K_{2,2}
    let parent = c.remnant(2, 2);
    let l = c.gap_length(3).clone();
    let moved = Interval::open(parent.hi() - &l * Rational::integer(2), parent.hi() - &l).unwrap();
    c.levels[2].gaps[1] = moved;
    let report = verify_cantor(&c, 1);
    assert!(!report.pass);
    assert!(report.violations.iter().any(|v| v.check == "left-cover" && v.n == 3 && v.j == 2));
    assert!(report.violations.iter().any(|v| v.check == "middle-third" && v.n == 3 && v.j == 2));
}

#[test]
fn builder_rejects_oracle_outside_middle_third() {
    struct Lopsided;
    impl GapOracle for Lopsided {
        fn gap(&self, k: &Interval) -> Result<Interval, String> {
            let third = k.length() / Rational::integer(3);
            Interval::open(k.lo().clone(), k.lo() + third).map_err(|e| e.to_string())
        }
        fn misses_target(&self, _: &Interval) -> Option<bool> {
            None
        }
        fn name(&self) -> String {
            "lopsided".into()
        }
    }
    let err = build_cantor(&Lopsided, 3).unwrap_err().to_string();
    assert!(err.contains("level 1, interval 1"), "{err}");
}

#[test]
fn ternary_construction_avoids_cantor_set() {
    let c = build_cantor(&TernaryCantor, 7).unwrap();
    assert!(verify_cantor(&c, 3).pass);
    assert!(check_avoidance(&c, &TernaryCantor).is_empty());
    // every gap endpoint lies outside the Cantor set or on its boundary, never inside a gap's span
    for lv in &c.levels {
        for g in &lv.gaps {
            assert_eq!(TernaryCantor.misses_target(g), Some(true));
        }
    }
}

#[test]
fn finite_point_construction_avoids_points() {
    let pts = vec![q(1, 2), q(4, 9), q(5, 9), q(13, 27), q(2, 9), q(7, 9), q(1, 7)];
    let o = FinitePoints::new(pts.clone());
    let c = build_cantor(&o, 6).unwrap();
    assert!(verify_cantor(&c, 2).pass);
    assert!(check_avoidance(&c, &o).is_empty());
    for n in 1..=6 {
        let on = c.gap_set(n);
        assert!(pts.iter().all(|p| !on.contains(p)));
    }
}

#[test]
fn right_descent_adjacency() {
    let c = default_at(8);
    for n in 1..8u32 {
        for j in 1..=(1u64 << n) {
            for k in 1..=(8 - n) {
                let gap = c.gap(n + k, j << (k - 1));
                assert_eq!(gap.hi(), c.remnant(n + k, j << k).lo());
            }
        }
    }
}

#[test]
fn telescoping_cover_is_half_open_from_left_end() {
    let c = default_at(8);
    for n in 1..8u32 {
        for j in 1..=(1u64 << n) {
            let base = c.remnant(n, j);
            for k in 1..=(8 - n) {
                let cover = c.telescoping_cover(n, j, k).unwrap();
                assert_eq!(cover.len(), 1, "n={n} j={j} k={k}");
                let right = Interval::closed_open(base.lo().clone(), base.hi() + Rational::one()).unwrap();
                let clipped = cover.intersect(&IntervalSet::from(right));
                let expected =
                    Interval::closed_open(base.lo().clone(), c.remnant(n + k, j << k).lo().clone()).unwrap();
                assert_eq!(clipped, IntervalSet::from(expected));
            }
        }
    }
}

#[test]
fn truncated_cover_small_case() {
    let c = default_at(6);
    let r = truncated_union_cover(&c, 2, 4).unwrap();
    assert_eq!(r.bound, q(256, 729));
    assert!(r.within_tails);
    assert!(r.uncovered_measure < q(256, 729));
    assert!(r.pass);
}

#[test]
fn truncated_cover_shrinks_with_k() {
    let c = default_at(9);
    let mut prev: Option<IntervalSet> = None;
    for k in 1..=7 {
        let r = truncated_union_cover(&c, 2, k).unwrap();
        assert!(r.pass, "k={k}");
        if let Some(p) = &prev {
            assert!(r.uncovered.is_subset_of(p));
        }
        prev = Some(r.uncovered);
    }
}

#[test]
fn truncated_cover_parameter_errors() {
    let c = default_at(5);
    assert!(truncated_union_cover(&c, 5, 1).is_err());
    assert!(truncated_union_cover(&c, 0, 1).is_err());
    assert!(truncated_union_cover(&c, 2, 0).is_err());
}

#[test]
fn json_shape_round_trips() {
    let c = default_at(2);
    let v = serde_json::to_value(&c).unwrap();
    assert_eq!(v["depth"], 2);
    assert_eq!(v["levels"][0]["n"], 1);
    assert_eq!(v["levels"][0]["l"], "1/9");
    assert_eq!(v["levels"][0]["gaps"][0], "(4/9,5/9)");
    assert_eq!(v["levels"][0]["remnants"][1], "[5/9,1]");
    let back: CantorConstruction = serde_json::from_value(v).unwrap();
    assert_eq!(back, c);
}
