//! Seeded Monte Carlo simulation of one-shot play.
//!
//! Trial `t` reads its `n` Bernoulli draws from a fixed window of a single
//! ChaCha8 keystream (the seed selects the key, the trial index the word
//! offset), so the sample path is a function of `(seed, trial)` only. Work
//! is split into fixed blocks of trials and reduced with integer counters,
//! which makes serial and parallel runs bit-identical.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distribution::{variational_distance, Distance, Pmf};
use crate::game::{CostProfile, StrategyProfile};
use crate::{Error, Result};

/// Identifies the generator and the stream layout in reports.
pub const RNG_ID: &str = "chacha8/seed_from_u64/word-offset-per-trial/v1";

/// Trials per work item.
const BLOCK_TRIALS: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub trials: u64,
    /// `arrival_counts[k]` is the number of trials with `S = k`, dense up
    /// to the largest observed `S`.
    pub arrival_counts: Vec<u64>,
    pub empirical_pmf: Pmf,
    pub idle_count: u64,
    pub success_count: u64,
    pub collision_count: u64,
    /// Fraction of trials with exactly one transmission.
    pub throughput: f64,
    /// Fraction of trials with two or more transmissions.
    pub collision_rate: f64,
    pub idle_rate: f64,
    /// Per-player average realized utility.
    pub mean_utility: Vec<f64>,
    pub seed: u64,
    pub rng_id: String,
}

impl SimulationReport {
    pub fn mean_arrivals(&self) -> f64 {
        self.empirical_pmf.mean()
    }
}

#[derive(Clone, Copy)]
enum Draw {
    Never,
    Always,
    /// Transmit when a uniform `u64` falls below the threshold.
    Below(u64),
}

impl Draw {
    fn new(p: f64) -> Self {
        if p <= 0.0 {
            Self::Never
        } else if p >= 1.0 {
            Self::Always
        } else {
            // 2^64 * p < 2^64 for p < 1
            Self::Below((p * 18_446_744_073_709_551_616.0) as u64)
        }
    }

    #[inline]
    fn hit(self, word: u64) -> bool {
        match self {
            Self::Never => false,
            Self::Always => true,
            Self::Below(t) => word < t,
        }
    }
}

struct Tally {
    arrivals: Vec<u64>,
    successes: Vec<u64>,
    collisions: Vec<u64>,
}

impl Tally {
    fn new(n: usize) -> Self {
        Self {
            arrivals: vec![0; n + 1],
            successes: vec![0; n],
            collisions: vec![0; n],
        }
    }

    fn merge(mut self, other: Self) -> Self {
        let add = |a: &mut [u64], b: &[u64]| a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        add(&mut self.arrivals, &other.arrivals);
        add(&mut self.successes, &other.successes);
        add(&mut self.collisions, &other.collisions);
        self
    }
}

fn run_block(draws: &[Draw], seed: u64, first: u64, count: u64) -> Tally {
    let n = draws.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Each u64 consumes two 32-bit keystream words.
    rng.set_word_pos(u128::from(first) * n as u128 * 2);
    let mut tally = Tally::new(n);
    let mut active = Vec::with_capacity(n);
    for _ in 0..count {
        active.clear();
        for (i, d) in draws.iter().enumerate() {
            if d.hit(rng.next_u64()) {
                active.push(i);
            }
        }
        tally.arrivals[active.len()] += 1;
        match active.len() {
            0 => {}
            1 => tally.successes[active[0]] += 1,
            _ => active.iter().for_each(|&i| tally.collisions[i] += 1),
        }
    }
    tally
}

/// Plays the game `trials` times with independent actions drawn from
/// `strategy`.
pub fn simulate(
    strategy: &StrategyProfile,
    costs: &CostProfile,
    trials: u64,
    seed: u64,
) -> Result<SimulationReport> {
    simulate_with(strategy, costs, trials, seed, Execution::default())
}

pub fn simulate_with(
    strategy: &StrategyProfile,
    costs: &CostProfile,
    trials: u64,
    seed: u64,
    execution: Execution,
) -> Result<SimulationReport> {
    if trials == 0 {
        return Err(Error::ZeroTrials);
    }
    strategy.check_against(costs)?;
    let n = costs.len();
    let draws: Vec<Draw> = strategy.probs().iter().map(|&p| Draw::new(p)).collect();
    let blocks = trials.div_ceil(BLOCK_TRIALS);
    let block = |b: u64| {
        let first = b * BLOCK_TRIALS;
        run_block(&draws, seed, first, BLOCK_TRIALS.min(trials - first))
    };
    let tally = match execution {
        Execution::Serial => (0..blocks).map(block).fold(Tally::new(n), Tally::merge),
        Execution::Parallel => (0..blocks)
            .into_par_iter()
            .map(block)
            .reduce(|| Tally::new(n), Tally::merge),
    };

    let mut arrival_counts = tally.arrivals;
    let observed = arrival_counts.iter().rposition(|&c| c > 0).unwrap_or(0);
    arrival_counts.truncate(observed + 1);
    let idle_count = arrival_counts[0];
    let success_count = arrival_counts.get(1).copied().unwrap_or(0);
    let collision_count = trials - idle_count - success_count;
    let t = trials as f64;
    let mean_utility = (0..n)
        .map(|i| (tally.successes[i] as f64 - costs.cost(i) * tally.collisions[i] as f64) / t)
        .collect();
    Ok(SimulationReport {
        trials,
        empirical_pmf: Pmf::from_counts(&arrival_counts)?,
        arrival_counts,
        idle_count,
        success_count,
        collision_count,
        throughput: success_count as f64 / t,
        collision_rate: collision_count as f64 / t,
        idle_rate: idle_count as f64 / t,
        mean_utility,
        seed,
        rng_id: RNG_ID.to_string(),
    })
}

/// `d_V` between the empirical arrival law and `reference`.
pub fn empirical_distance(report: &SimulationReport, reference: &Pmf) -> Distance {
    variational_distance(&report.empirical_pmf, reference)
}
