//! Independent brute-force oracles shared by the integration tests.
//!
//! Nothing here calls into the closed forms under test: every quantity is
//! obtained by enumerating action profiles and applying the utility
//! function directly.

#![allow(dead_code)]

use collision_game::game::{utility, ActionProfile, CostProfile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Costs drawn log-uniformly from `[lo, hi]`.
pub fn log_uniform_costs(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|_| rng.random_range(a..b).exp()).collect()
}

/// Probability of a full action profile under independent mixing.
pub fn profile_probability(actions: &[bool], probs: &[f64]) -> f64 {
    actions
        .iter()
        .zip(probs)
        .map(|(&a, &p)| if a { p } else { 1.0 - p })
        .product()
}

fn profiles(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u64..1 << n).map(move |mask| (0..n).map(|i| mask >> i & 1 == 1).collect())
}

/// `E[u_i | a_i = action]` by enumerating the opponents' actions.
pub fn payoff_of_action(i: usize, action: bool, probs: &[f64], costs: &CostProfile) -> f64 {
    let n = probs.len();
    profiles(n)
        .filter(|a| a[i] == action)
        .map(|a| {
            let weight: f64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| if a[j] { probs[j] } else { 1.0 - probs[j] })
                .product();
            weight * utility(&ActionProfile::new(a), i, costs).unwrap()
        })
        .sum()
}

/// Largest gain any player obtains from switching to a pure action.
pub fn max_pure_deviation_gain(probs: &[f64], costs: &CostProfile) -> f64 {
    (0..probs.len())
        .map(|i| {
            let transmit = payoff_of_action(i, true, probs, costs);
            let backoff = payoff_of_action(i, false, probs, costs);
            let current = probs[i] * transmit + (1.0 - probs[i]) * backoff;
            transmit.max(backoff) - current
        })
        .fold(0.0, f64::max)
}

pub fn is_nash(probs: &[f64], costs: &CostProfile, tol: f64) -> bool {
    max_pure_deviation_gain(probs, costs) <= tol
}

/// Law of the number of transmissions by enumerating all `2^n` profiles.
pub fn enumerate_arrivals(probs: &[f64]) -> Vec<f64> {
    let n = probs.len();
    let mut mass = vec![0.0; n + 1];
    for a in profiles(n) {
        let k = a.iter().filter(|&&x| x).count();
        mass[k] += profile_probability(&a, probs);
    }
    mass
}

pub fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
