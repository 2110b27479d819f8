mod common;

use common::*;
use henon_core::function::EntireFunction;
use henon_core::henon_like::{HenonMap, Point2};
use henon_core::symbolic::{
    build_transition_table, count_admissible_words, first_separation, replay_cloud, separated_set_estimate,
    subshift_entropy, survivor_clouds, DiskLayout, OneDimensional, TransitionTable,
};
use proptest::prelude::*;

fn table() -> impl Strategy<Value = TransitionTable> {
    (2usize..6, prop::collection::vec(any::<bool>(), 216))
        .prop_map(|(k, bits)| TransitionTable::from_fn(k, |i, l, j| bits[(i * 6 + l) * 6 + j]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn word_counts_match_matrix_powers(t in table(), m in 0usize..8) {
        prop_assert_eq!(count_admissible_words(&t, m), words_by_matrix_power(&t, m));
    }

    #[test]
    fn entropy_matches_gelfand_formula(t in table()) {
        let h = subshift_entropy(&t);
        let oracle = entropy_by_gelfand(&t);
        if oracle.is_finite() && oracle > 1e-6 {
            prop_assert!((h - oracle).abs() <= 1e-6, "{} vs {}", h, oracle);
        } else {
            prop_assert!(h <= 1e-6);
        }
    }

    #[test]
    fn rich_tables_meet_growth_bound(k in 3usize..8, seed in any::<u64>(), m in 2usize..7) {
        let t = random_rich_table(k, seed);
        let bound = (k * k) as u128 * ((k - 2) as u128).pow(m as u32 - 2);
        prop_assert!(count_admissible_words(&t, m) >= bound);
        prop_assert!(subshift_entropy(&t) >= ((k - 2) as f64).ln() - 1e-9);
    }

    #[test]
    fn separated_witnesses_separate(count in 8usize..200, n in 1usize..8, eps in 0.05..0.5f64) {
        let map = OneDimensional(EntireFunction::monomial(2));
        let seeds: Vec<Point2> = (0..count)
            .map(|q| [c(0.0, std::f64::consts::TAU * q as f64 / count as f64).exp(), c(0.0, 0.0)])
            .collect();
        let est = separated_set_estimate(&map, &seeds, n, eps).unwrap();
        prop_assert_eq!(est.k, est.witnesses.len());
        for a in 0..est.k {
            for b in a + 1..est.k {
                prop_assert!(first_separation(&map, est.witnesses[a], est.witnesses[b], n, eps).unwrap().is_some());
            }
        }
    }
}

#[test]
fn survivor_clouds_nest_and_replay() {
    let lay = DiskLayout::imaginary_axis(5, 0.3, 0.45);
    let delta = c(0.1, 0.0);
    let s = build_transition_table(&EntireFunction::exp(), delta, &lay, 1..=60, None).unwrap();
    let map = HenonMap::rescaled(&EntireFunction::exp(), delta, s.n).unwrap();
    let clouds = survivor_clouds(&map, &s, 2, 0.1).unwrap();
    assert_eq!(clouds.len(), 3);
    for pair in clouds.windows(2) {
        assert!(pair[1].points.iter().all(|p| pair[0].points.contains(p)));
    }
    for cloud in &clouds {
        assert!(replay_cloud(&map, &lay, cloud));
    }
    assert!(!clouds[0].points.is_empty());
}

#[test]
fn search_without_success_reports_not_rich() {
    let lay = DiskLayout::imaginary_axis(5, 0.3, 0.45);
    let s = build_transition_table(&EntireFunction::exp(), c(0.1, 0.0), &lay, 1..=3, Some(5)).unwrap();
    assert!(!s.rich);
}
