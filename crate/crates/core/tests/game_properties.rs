mod common;

use collision_game::game::{expected_utility, others_silent, CostProfile, StrategyProfile};
use proptest::prelude::*;

fn game(max_n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2..=max_n).prop_flat_map(|n| {
        (
            prop::collection::vec(0.05f64..20.0, n),
            prop::collection::vec(prop_oneof![Just(0.0), Just(1.0), 0.0f64..1.0], n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn transmit_payoff_matches_outcome_enumeration((costs, probs) in game(12)) {
        let costs = CostProfile::new(costs).unwrap();
        let strategy = StrategyProfile::new(probs).unwrap();
        for i in 0..costs.len() {
            let eu = expected_utility(i, &strategy, &costs).unwrap();
            let transmit = common::payoff_of_action(i, true, strategy.probs(), &costs);
            let backoff = common::payoff_of_action(i, false, strategy.probs(), &costs);
            prop_assert!((eu.transmit - transmit).abs() < 1e-12);
            prop_assert_eq!(eu.backoff, 0.0);
            prop_assert_eq!(backoff, 0.0);
            prop_assert!((eu.overall - strategy.prob(i) * transmit).abs() < 1e-12);
        }
    }

    #[test]
    fn transmit_payoff_vanishes_exactly_at_the_cost_ratio(c in 0.01f64..100.0, q in 0.0f64..1.0) {
        // q = a_i  <=>  payoff 0, and the payoff increases with q.
        let a = c / (1.0 + c);
        let payoff = |q: f64| q - (1.0 - q) * c;
        prop_assert!(payoff(a).abs() < 1e-12 * (1.0 + c));
        if (q - a).abs() > 1e-12 {
            prop_assert_eq!(payoff(q) > 0.0, q > a);
        }
        prop_assert!(payoff((q + 0.01).min(1.0)) >= payoff(q));
    }

    #[test]
    fn others_silent_matches_direct_products(probs in prop::collection::vec(0.0f64..=1.0, 1..40)) {
        let fast = others_silent(&probs);
        for i in 0..probs.len() {
            let direct: f64 = probs.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, p)| 1.0 - p).product();
            prop_assert!((fast[i] - direct).abs() < 1e-13);
        }
    }
}
