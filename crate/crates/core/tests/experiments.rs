use proptest::prelude::*;
use tmconv_core::lab::run_trial_observed;
use tmconv_core::{
    predict_regions, run_experiment, run_trial, ActionPair, ExperimentReport, OneBitEnv, RegionPrediction, TrialSpec,
};

fn unit() -> impl Strategy<Value = f64> {
    (0u32..=100).prop_map(|k| f64::from(k) / 100.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trial_outcome_invariants(a in unit(), b in unit(), c in unit(), s in 1.0f64..20.0,
                                depth in 1u32..8, steps in 1u64..400, seed in any::<u64>()) {
        let spec = TrialSpec::new(OneBitEnv::new(a, b, c).unwrap(), s, depth, steps, seed).unwrap();
        let o = run_trial(&spec, 3).unwrap();
        prop_assert_eq!(o.initial_pair, ActionPair::EE);
        prop_assert_eq!(o.occupancy.total(), steps);
        prop_assert!((0.0..=1.0).contains(&o.tail_fraction));
        prop_assert!(o.last_change_step <= steps);
        prop_assert_eq!(o, run_trial(&spec, 3).unwrap());
    }

    #[test]
    fn prediction_never_contains_both_included(a in unit(), b in unit(), c in unit(), s in 1.0f64..50.0) {
        let p = predict_regions(&OneBitEnv::new(a, b, c).unwrap(), s).unwrap();
        prop_assert!(!p.contains(ActionPair::II));
        let mut sorted = p.outcomes().to_vec();
        sorted.sort();
        prop_assert_eq!(sorted.as_slice(), p.outcomes());
        if let RegionPrediction::Outcomes(v) = &p {
            prop_assert!(!v.is_empty());
        }
    }
}

#[test]
fn noise_free_identity_is_absorbing() {
    let spec = TrialSpec::new(OneBitEnv::noise_free(0.3).unwrap(), 3.0, 2, 5_000, 11).unwrap();
    for trial in 0..50 {
        let mut reached = false;
        run_trial_observed(&spec, trial, |step, team| {
            let pair = ActionPair::new(team.automata()[0].action(), team.automata()[1].action());
            if reached {
                assert_eq!(pair, ActionPair::IE, "left (I,E) at step {step}");
            }
            reached |= pair == ActionPair::IE;
        })
        .unwrap();
        assert!(reached);
    }
}

#[test]
fn report_is_reproducible_and_round_trips() {
    let spec = TrialSpec::new(OneBitEnv::new(0.8, 0.3, 0.6).unwrap(), 2.5, 5, 4_000, 99).unwrap();
    let first = run_experiment(&spec, 30).unwrap();
    assert_eq!(first, run_experiment(&spec, 30).unwrap());
    let json = serde_json::to_string(&first).unwrap();
    let back: ExperimentReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, first);
    assert_eq!(serde_json::to_string(&back).unwrap(), json);
}

#[test]
fn infinite_thresholds_survive_json() {
    let t = tmconv_core::thresholds(&OneBitEnv::noise_free(0.5).unwrap()).unwrap();
    let json = serde_json::to_string(&t).unwrap();
    assert!(json.contains("\"s6\":\"inf\""));
    assert_eq!(serde_json::from_str::<tmconv_core::ThresholdSet>(&json).unwrap(), t);
}
