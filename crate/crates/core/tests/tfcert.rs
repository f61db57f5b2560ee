mod common;

use common::{r, perturbation_case, perturbation_sides};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twofold::ifs::{covers_disjoint_at_depth, IntervalCover, SetTag, SimilaritySystem};
use twofold::numeric::Span;
use twofold::tfcert::{certify_pair, check_tf, pairs_up_to, window_test, PairStatus, Summary, WindowResult};
use twofold::{Caps, ExactParams, Interval64, Params, Rational};

fn exact(p: &Rational, q: &Rational) -> ExactParams {
    ExactParams::from_rationals(p, q).unwrap()
}

fn witness_is_exact(params: &ExactParams, m: u32, n: u32, status: &PairStatus) {
    let PairStatus::Overlap(w) = status else {
        panic!("expected an overlap, got {status:?}");
    };
    let sys = SimilaritySystem::new(params.clone());
    assert_eq!(sys.address_point(&w.u).unwrap(), Span::point(w.value.clone()));
    assert_eq!(sys.address_point(&w.v).unwrap(), Span::point(w.value.clone()));
    let u: Vec<u8> = (0..=m as usize).map(|k| w.u.letter(k).unwrap()).collect();
    let v: Vec<u8> = (0..=n as usize).map(|k| w.v.letter(k).unwrap()).collect();
    assert!(u[..m as usize].iter().all(|&l| l == 1) && u[m as usize] >= 3);
    assert!(v[..n as usize].iter().all(|&l| l == 2) && v[n as usize] >= 3);
}

#[test]
fn pair_order_is_by_sum_then_m() {
    let pairs: Vec<_> = pairs_up_to(4).collect();
    assert_eq!(pairs, vec![(1, 1), (1, 2), (2, 1), (1, 3), (2, 2), (3, 1)]);
}

#[test]
fn powers_of_p_fail_at_the_matching_pair() {
    let p = r(1, 16);
    for (k, mn) in [(2usize, (2, 1)), (3, (3, 1))] {
        let q = num_traits::pow(p.clone(), k);
        let params = exact(&p, &q);
        let report = check_tf(&params, 6, 8, &Caps::default()).unwrap();
        assert_eq!(report.summary, Summary::FailedAt { m: mn.0, n: mn.1 });
        let v = report.verdicts.iter().find(|v| (v.m, v.n) == mn).unwrap();
        witness_is_exact(&params, mn.0, mn.1, &v.status);
    }
}

#[test]
fn equal_parameters_fail_at_one_one() {
    let params = exact(&r(1, 20), &r(1, 20));
    let report = check_tf(&params, 4, 6, &Caps::default()).unwrap();
    assert_eq!(report.failed_at(), Some((1, 1)));
}

#[test]
fn touching_images_are_found_below_the_depth_budget() {
    // p (1 - q) = q puts S_1 S_4 (0) on S_2 (1)
    for (p, q) in [(r(1, 20), r(1, 21)), (r(1, 17), r(1, 18))] {
        let params = exact(&p, &q);
        let v = certify_pair(&params, 1, 1, 12, &Caps::default()).unwrap();
        witness_is_exact(&params, 1, 1, &v.status);
    }
}

#[test]
fn reference_parameters_certify_to_sum_twenty() {
    let params = exact(&r(1, 20), &r(1, 50));
    let report = check_tf(&params, 20, 16, &Caps::default()).unwrap();
    assert!(matches!(report.summary, Summary::CertifiedUpTo { ref unknowns, .. } if unknowns.is_empty()));
    assert_eq!(report.outside_window + report.verdicts.len(), 190);
    for v in &report.verdicts {
        assert!(matches!(&v.status, PairStatus::Disjoint { gap, .. } if gap > &Rational::from_integer(0.into())));
    }
}

#[test]
fn candidates_near_the_diagonal_certify() {
    // q/p = 99/100 is inside the (1, 1) window
    let params = exact(&r(1, 20), &r(99, 2000));
    assert_eq!(window_test(&params, 1, 1).unwrap(), WindowResult::Candidate);
    let v = certify_pair(&params, 1, 1, 16, &Caps::default()).unwrap();
    match v.status {
        PairStatus::Disjoint { ref gap, by_window } => {
            assert!(!by_window);
            assert!(gap > &Rational::from_integer(0.into()));
        }
        ref other => panic!("{other:?}"),
    }
    // the same pair in interval mode never reports an overlap
    let iv = Params::<Interval64>::from_rationals(&r(1, 20), &r(1, 21)).unwrap();
    let v = certify_pair(&iv, 1, 1, 8, &Caps::default()).unwrap();
    assert!(!v.is_overlap());
}

#[test]
fn disjoint_verdicts_survive_finer_uniform_covers() {
    let caps = Caps::default();
    for (p, q) in [(r(1, 20), r(99, 2000)), (r(1, 17), r(3, 50)), (r(1, 30), r(1, 31))] {
        let params = exact(&p, &q);
        let sys = SimilaritySystem::new(params.clone());
        let a = IntervalCover::build(&sys, SetTag::A, 8, &caps).unwrap();
        for (m, n) in pairs_up_to(4) {
            let v = certify_pair(&params, m, n, 6, &caps).unwrap();
            if v.is_disjoint() {
                let x = a.image(&sys.word_map(&twofold::ifs::Word::repeat(1, m as usize).unwrap()));
                let y = a.image(&sys.word_map(&twofold::ifs::Word::repeat(2, n as usize).unwrap()));
                assert!(sorted_lists_disjoint(&x, &y), "({m}, {n}) at {p}, {q}");
            }
        }
    }
}

/// Both lists sorted with pairwise disjoint members.
fn sorted_lists_disjoint(x: &[Span<Rational>], y: &[Span<Rational>]) -> bool {
    x.iter().all(|u| {
        let k = y.partition_point(|w| w.hi < u.lo);
        k == y.len() || y[k].lo > u.hi
    })
}

#[test]
fn unknown_count_does_not_grow_with_depth() {
    let params = exact(&r(1, 20), &r(1, 21));
    let mut last = usize::MAX;
    for depth in [2, 4, 8, 12] {
        let report = check_tf(&params, 8, depth, &Caps::default()).unwrap();
        let unknowns = report.unknown_count();
        assert!(unknowns <= last);
        last = unknowns;
    }
}

#[test]
fn report_json_has_schema_and_rationals() {
    let params = exact(&r(1, 16), &r(1, 256));
    let report = check_tf(&params, 6, 8, &Caps::default()).unwrap();
    let j = report.to_json();
    assert_eq!(j["schema_version"], 1);
    assert_eq!(j["summary"]["kind"], "FailedAt");
    assert_eq!(j["q"]["rational"], "1/256");
    assert_eq!(j["pairs"][0]["status"], "Overlap");
}

#[test]
fn perturbation_inequality_on_seeded_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..300 {
        let case = perturbation_case(&mut rng, 24);
        let (lhs, rhs) = perturbation_sides(&case);
        assert!(lhs > rhs, "{case:?}");
    }
}

fn arb_param() -> impl Strategy<Value = Rational> {
    (1i64..=65_536).prop_map(|n| r(n, 1 << 20))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn outside_window_pairs_have_disjoint_covers(p in arb_param(), q in arb_param(), m in 1u32..8, n in 1u32..8) {
        let params = exact(&p, &q);
        if window_test(&params, m, n).unwrap() == WindowResult::OutsideWindow {
            let sys = SimilaritySystem::new(params);
            prop_assert!(covers_disjoint_at_depth(&sys, m, n, 12));
        }
    }

    #[test]
    fn overlap_witnesses_are_exact(p in arb_param(), k in 1usize..3) {
        let q = num_traits::pow(p.clone(), k + 1);
        prop_assume!(q > Rational::from_integer(0.into()));
        let params = exact(&p, &q);
        let v = certify_pair(&params, (k + 1) as u32, 1, 8, &Caps::default()).unwrap();
        witness_is_exact(&params, (k + 1) as u32, 1, &v.status);
    }

    #[test]
    fn float_and_exact_modes_agree_where_both_decide(p in arb_param(), q in arb_param(), m in 1u32..4, n in 1u32..4) {
        let e = certify_pair(&exact(&p, &q), m, n, 10, &Caps::default()).unwrap();
        let f = certify_pair(&Params::<Interval64>::from_rationals(&p, &q).unwrap(), m, n, 10, &Caps::default()).unwrap();
        prop_assert!(!f.is_overlap());
        if f.is_disjoint() {
            prop_assert!(!e.is_overlap());
        }
    }
}
