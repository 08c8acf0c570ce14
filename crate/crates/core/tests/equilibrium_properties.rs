mod common;

use collision_game::equilibrium::{enumerate_equilibria, fmne, verify_equilibrium};
use collision_game::game::{CostProfile, StrategyProfile};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn every_reported_equilibrium_passes_the_enumeration_oracle(
        costs in (2usize..=3).prop_flat_map(|n| prop::collection::vec(0.05f64..20.0, n))
    ) {
        let costs = CostProfile::new(costs).unwrap();
        for report in enumerate_equilibria(&costs).unwrap() {
            prop_assert!(report.exists);
            let profile = report.profile.unwrap();
            prop_assert!(common::is_nash(profile.probs(), &costs, 1e-9));
        }
    }

    #[test]
    fn fmne_satisfies_the_indifference_identity(
        costs in (2usize..=60).prop_flat_map(|n| prop::collection::vec(0.2f64..5.0, n))
    ) {
        let costs = CostProfile::new(costs).unwrap();
        let report = fmne(&costs).unwrap();
        if let Some(profile) = report.profile.filter(|_| report.exists) {
            for i in 0..costs.len() {
                let q: f64 = (0..costs.len()).filter(|&j| j != i).map(|j| 1.0 - profile.prob(j)).product();
                prop_assert!((q - costs.ratio(i)).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn verification_agrees_with_the_oracle_on_random_profiles(
        (costs, probs) in (2usize..=4).prop_flat_map(|n| (
            prop::collection::vec(0.05f64..20.0, n),
            prop::collection::vec(prop_oneof![Just(0.0), Just(1.0), 0.0f64..1.0], n),
        ))
    ) {
        let costs = CostProfile::new(costs).unwrap();
        let strategy = StrategyProfile::new(probs).unwrap();
        let report = verify_equilibrium(&strategy, &costs, 1e-9).unwrap();
        let oracle_gain = common::max_pure_deviation_gain(strategy.probs(), &costs);
        prop_assert!((report.max_deviation_gain.unwrap() - oracle_gain).abs() < 1e-12);
    }
}

/// Largest unilateral gain, computed from the closed-form transmit payoff via
/// prefix and suffix products of `1 - p`.
fn max_gain(probs: &[f64], costs: &[f64]) -> f64 {
    let n = probs.len();
    let mut suffix = [1.0f64; 8];
    for j in (0..n).rev() {
        suffix[j] = suffix[j + 1] * (1.0 - probs[j]);
    }
    let mut prefix = 1.0;
    let mut gain = 0.0f64;
    for i in 0..n {
        let q = prefix * suffix[i + 1];
        let t = q - (1.0 - q) * costs[i];
        gain = gain.max(t.max(0.0) - probs[i] * t);
        prefix *= 1.0 - probs[i];
    }
    gain
}

/// Compass search on the maximal deviation gain, shrinking the step until
/// `min_step`.
fn refine(start: &[f64], costs: &[f64], mut step: f64, min_step: f64) -> (Vec<f64>, f64) {
    let mut x = start.to_vec();
    let mut best = max_gain(&x, costs);
    while step >= min_step {
        let mut improved = false;
        for i in 0..x.len() {
            for dir in [-1.0, 1.0] {
                let mut y = x.clone();
                y[i] = (y[i] + dir * step).clamp(0.0, 1.0);
                let g = max_gain(&y, costs);
                if g < best {
                    best = g;
                    x = y;
                    improved = true;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    (x, best)
}

/// Grid points at resolution `h` whose deviation gain is within the
/// Lipschitz slack of a true equilibrium, split into all flagged points and
/// those that are local minima of the gain among their grid neighbours.
fn grid_candidates(n: usize, c: f64, h: f64) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let side = (1.0 / h).round() as usize + 1;
    let costs = vec![c; n];
    let slack = 0.5 * h * (n - 1) as f64 * (1.0 + c) + 1e-12;
    let total = side.pow(n as u32);
    let point = |mut flat: usize| -> Vec<f64> {
        (0..n)
            .map(|_| {
                let k = flat % side;
                flat /= side;
                k as f64 * h
            })
            .collect()
    };
    let mut gains = Vec::with_capacity(total);
    let mut probs = vec![0.0; n];
    for mut f in 0..total {
        for p in probs.iter_mut() {
            *p = (f % side) as f64 * h;
            f /= side;
        }
        gains.push(max_gain(&probs, &costs));
    }
    let mut flagged = Vec::new();
    let mut minima = Vec::new();
    for (f, &g) in gains.iter().enumerate() {
        if g > slack {
            continue;
        }
        flagged.push(point(f));
        let mut stride = 1;
        let mut is_min = true;
        for _ in 0..n {
            let k = (f / stride) % side;
            if (k > 0 && gains[f - stride] < g) || (k + 1 < side && gains[f + stride] < g) {
                is_min = false;
            }
            stride *= side;
        }
        if is_min {
            minima.push(point(f));
        }
    }
    (flagged, minima)
}

#[test]
fn grid_search_finds_no_equilibrium_missing_from_the_enumeration() {
    let h = 1e-2;
    for n in 2..=4 {
        for &c in &[0.5, 1.0, 3.0] {
            let costs = CostProfile::homogeneous(c, n).unwrap();
            let known: Vec<Vec<f64>> = enumerate_equilibria(&costs)
                .unwrap()
                .into_iter()
                .map(|r| r.profile.unwrap().probs().to_vec())
                .collect();
            let (candidates, minima) = grid_candidates(n, c, h);

            // Every enumerated equilibrium has a flagged grid point nearby.
            for eq in &known {
                assert!(
                    candidates
                        .iter()
                        .any(|p| common::sup_distance(p, eq) <= h / 2.0 + 1e-12),
                    "n={n} c={c}: equilibrium {eq:?} not bracketed by the grid"
                );
            }

            // Every equilibrium reached by refining a local minimum is enumerated.
            let refined: Vec<(Vec<f64>, f64)> = minima
                .iter()
                .map(|start| refine(start, costs.costs(), h / 2.0, 1e-10))
                .filter(|(_, gain)| *gain <= 1e-9)
                .collect();
            for (x, gain) in &refined {
                assert!(
                    known.iter().any(|eq| common::sup_distance(x, eq) <= 1e-2),
                    "n={n} c={c}: search found {x:?} (gain {gain:e}) outside the enumeration"
                );
            }
            let found = refined.len();
            assert!(found > 0);
            eprintln!(
                "n={n} c={c}: {} flagged, {} minima, {found} refined to equilibria",
                candidates.len(),
                minima.len()
            );
        }
    }
}
