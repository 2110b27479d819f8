mod common;

use common::*;
use henon_core::function::EntireFunction;
use henon_core::henon_like::HenonMap;
use henon_core::periodic::{
    count_itineraries, enumerate_cyclic_itineraries, graph_transform_step, newton_refine_periodic,
    periodic_itinerary_orbit, GraphDisk, ItineraryOptions, LocalAffine, NewtonOptions, DEFAULT_NODES,
};
use henon_core::symbolic::{build_transition_table, transition_table_at, DiskLayout, TransitionStructure};
use proptest::prelude::*;

fn exp_structure() -> (HenonMap, TransitionStructure) {
    let lay = DiskLayout::imaginary_axis(5, 0.3, 0.45);
    let delta = c(0.1, 0.0);
    let s = build_transition_table(&EntireFunction::exp(), delta, &lay, 1..=60, None).unwrap();
    (HenonMap::rescaled(&EntireFunction::exp(), delta, s.n).unwrap(), s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn multiplier_product_is_delta_power(slope in 2.0..20.0f64, delta in 0.05..0.8f64, period in 1usize..5) {
        let f = EntireFunction::real_poly(&[0.0, slope]);
        let map = HenonMap::new(f, c(delta, 0.0)).unwrap();
        let o = newton_refine_periodic(&map, period, [c(0.3, 0.1), c(-0.2, 0.4)], &NewtonOptions::default()).unwrap();
        let prod = o.multipliers.unstable * o.multipliers.stable;
        prop_assert!((prod - c(delta, 0.0).powu(period as u32)).norm() <= 1e-9 * delta.powi(period as i32));
        prop_assert!(o.saddle);
        prop_assert_eq!(o.minimal, period == 1);
    }

    #[test]
    fn affine_cycles_match_closed_form(slope in 20.0..80.0f64, delta in 0.02..0.2f64) {
        let lay = DiskLayout::imaginary_axis(3, 0.3, 0.45);
        let (m, d) = (c(slope, 0.0), c(delta, 0.0));
        let model = LocalAffine::new(lay.centers.clone(), m);
        let s = transition_table_at(&model, d, &lay, 1, 3).unwrap();
        prop_assume!(s.table.allows(1, 0, 2) && s.table.allows(2, 1, 0) && s.table.allows(0, 2, 1));
        let map = HenonMap::new(model, d).unwrap();
        let o = periodic_itinerary_orbit(&map, &s, &[0, 1, 2], &ItineraryOptions::default()).unwrap();
        for t in 0..3 {
            let centers: Vec<_> = (0..3).map(|q| lay.centers[(t + q) % 3]).collect();
            let p = affine_cycle_point(m, d, &centers);
            prop_assert!((o.points[t][0] - p[0]).norm() < 1e-11 && (o.points[t][1] - p[1]).norm() < 1e-11);
        }
    }

    #[test]
    fn formula_never_exceeds_enumeration(k in 3usize..9, n in 3usize..5, seed in any::<u64>()) {
        let t = random_rich_table(k, seed);
        let formula = count_itineraries(k as u64, n as u64).unwrap();
        prop_assert!(enumerate_cyclic_itineraries(&t, n) >= formula);
    }
}

#[test]
fn formula_values() {
    assert_eq!(count_itineraries(10, 3).unwrap(), 180);
    assert_eq!(count_itineraries(9, 3).unwrap(), 72);
    assert_eq!(count_itineraries(8, 3).unwrap(), 0);
    assert!(count_itineraries(10, 2).is_err());
    // k(k-1)...(k-N+2)(k-3N+1)
    assert_eq!(count_itineraries(20, 4).unwrap(), 20 * 19 * 18 * 9);
}

#[test]
fn graph_sweeps_contract_on_exp() {
    let (map, s) = exp_structure();
    let o = periodic_itinerary_orbit(&map, &s, &[1, 2, 3], &ItineraryOptions::default()).unwrap();
    assert!(o.residual < 1e-9 && o.minimal && o.saddle);
    assert!(o.cone.as_ref().unwrap().pass);
    let d = &o.sweep_distances;
    assert!(d.len() >= 2 && *d.last().unwrap() < 1e-10);
    // after the first few sweeps the change shrinks monotonically
    for w in d[2..].windows(2) {
        assert!(w[1] <= w[0] * 1.0001 + 1e-14, "{:?}", d);
    }
}

#[test]
fn flat_exp_graph_stays_in_range() {
    let (map, s) = exp_structure();
    let k = s.k();
    for i in 0..k {
        for l in 0..k {
            let flat = GraphDisk::flat(&s, i, l, DEFAULT_NODES).unwrap();
            for &j in s.table.get(i, l) {
                let g = graph_transform_step(&map.f, &s, &flat, j).unwrap();
                assert!(g.range < s.layout.r, "({i},{l})->{j}: range {}", g.range);
            }
        }
    }
}

#[test]
fn inadmissible_symbol_is_rejected() {
    let (map, s) = exp_structure();
    let k = s.k();
    let (i, l, j) = (0..k)
        .flat_map(|i| (0..k).flat_map(move |l| (0..k).map(move |j| (i, l, j))))
        .find(|&(i, l, j)| !s.table.allows(i, l, j))
        .expect("exp table is not full");
    let flat = GraphDisk::flat(&s, i, l, DEFAULT_NODES).unwrap();
    let err = graph_transform_step(&map.f, &s, &flat, j).unwrap_err();
    assert!(err.to_string().contains("not in J"));
}

#[test]
fn short_and_repeating_itineraries_are_rejected() {
    let (map, s) = exp_structure();
    for it in [vec![1], vec![1, 2], vec![1, 2, 1]] {
        assert!(periodic_itinerary_orbit(&map, &s, &it, &ItineraryOptions::default()).is_err());
    }
}
