use henon_core::lacunary::{
    build_schedule, verify_schedule, EntropyProfile, Inequality, LacunarySchedule, DEFAULT_N_CAP,
};
use proptest::prelude::*;

fn profile() -> impl Strategy<Value = EntropyProfile> {
    prop_oneof![
        Just(EntropyProfile::Log1p),
        Just(EntropyProfile::Log),
        (0.5..3.0f64).prop_map(|s| EntropyProfile::Table { points: vec![(0.0, 0.0), (1.0, s), (10.0, s + 2.0)] }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn schedules_verify_and_increase(p in profile(), terms in 1usize..4) {
        let s = build_schedule(&p, terms, DEFAULT_N_CAP).unwrap();
        prop_assert_eq!(s.terms.len(), terms);
        prop_assert!(verify_schedule(&s).pass);
        for w in s.terms.windows(2) {
            prop_assert!(w[1].r > w[0].r && w[1].n > w[0].n && w[1].log2_a < w[0].log2_a);
        }
        for t in &s.terms {
            prop_assert!((p.eval(t.r) - (t.n as f64).ln()).abs() <= 1e-9);
        }
    }

    #[test]
    fn schedules_round_trip_through_json(p in profile(), terms in 1usize..4) {
        let s = build_schedule(&p, terms, DEFAULT_N_CAP).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        let back: LacunarySchedule = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(s, back);
    }
}

#[test]
fn tampered_schedule_is_rejected() {
    let mut s = build_schedule(&EntropyProfile::Log1p, 3, DEFAULT_N_CAP).unwrap();
    s.terms[1].log2_a += 10.0;
    let report = verify_schedule(&s);
    assert!(!report.pass);
    assert!(report.of(Inequality::NextTermBelow).any(|c| !c.pass));
}

#[test]
fn n_cap_is_honored() {
    assert!(build_schedule(&EntropyProfile::Log1p, 3, 10).is_err());
}
