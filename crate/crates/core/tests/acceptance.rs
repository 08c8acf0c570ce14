//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p collision-game --test acceptance`.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use collision_game::asymptotics::{arrival_mean_sequence, example_limit, limit_recipe, Verdict};
use collision_game::distribution::{
    mixture_pmf, poisson_binomial, poisson_pmf, variational_distance, MixtureLimit, Pmf,
};
use collision_game::equilibrium::{fmne, mixed_equilibrium, pure_equilibria};
use collision_game::game::{CostFamily, CostProfile, StrategyProfile};
use collision_game::montecarlo::{empirical_distance, simulate_with, Execution};
use rand::Rng;

const TAIL: f64 = 1e-12;

const AC1_MAX_DV: f64 = 1.0e-3;
const AC1_MAX_RUNTIME: Duration = Duration::from_secs(1);
const AC2_MAX_DV: f64 = 0.01;
const AC2_MAX_RUNTIME: Duration = Duration::from_secs(10);
const AC3_SAMPLES: usize = 1000;
const AC3_MAX_GAP: f64 = 1e-10;
const AC4_COST_VECTORS: usize = 200;
const AC4_NON_EQUILIBRIA: usize = 200;
const AC4_ORACLE_TOL: f64 = 1e-9;
const AC5_MAX_GAP: f64 = 1e-3;
const AC6_EPSILON: f64 = 0.05;
const AC6_N: usize = 10_000;
const AC7_TRIALS: u64 = 1_000_000;
const AC7_SEED: u64 = 20_240_601;
const AC7_MAX_DV: f64 = 0.01;
const AC8_ENUM_TOL: f64 = 1e-12;
const AC8_METRIC_TOL: f64 = 1e-12;
const AC8_PAIRS: usize = 100;

const EXAMPLE_M: [f64; 2] = [1.5, 2.0];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn fmne_law(costs: &CostProfile) -> Pmf {
    let eq = fmne(costs).unwrap();
    assert!(eq.exists, "FMNE missing for n = {}", costs.len());
    poisson_binomial(eq.profile.unwrap().probs()).unwrap()
}

fn ac1() -> Outcome {
    let start = Instant::now();
    let limit = poisson_pmf(2f64.ln(), TAIL).unwrap();
    let d: Vec<f64> = [10, 100, 1000]
        .iter()
        .map(|&n| {
            variational_distance(
                &fmne_law(&CostProfile::homogeneous(1.0, n).unwrap()),
                &limit,
            )
            .value
        })
        .collect();
    let elapsed = start.elapsed();
    let monotone = d.windows(2).all(|w| w[1] < w[0]);
    outcome(
        monotone && d[2] <= AC1_MAX_DV && elapsed < AC1_MAX_RUNTIME,
        format!(
            "d_V at n=10,100,1000 = {:.3e}, {:.3e}, {:.3e} (monotone: {monotone}, limit {AC1_MAX_DV:e}); {elapsed:.2?} (limit {AC1_MAX_RUNTIME:?})",
            d[0], d[1], d[2]
        ),
    )
}

fn ac2() -> Outcome {
    let start = Instant::now();
    let costs = CostFamily::ExampleFamily {
        m: EXAMPLE_M.to_vec(),
    }
    .costs(5000)
    .unwrap();
    let mixture = MixtureLimit::new((5f64 / 4.0).ln(), vec![1.0 / 6.0, 0.25]).unwrap();
    let d = variational_distance(&fmne_law(&costs), &mixture_pmf(&mixture, TAIL).unwrap());
    let elapsed = start.elapsed();
    outcome(
        d.value + d.uncertainty <= AC2_MAX_DV && elapsed < AC2_MAX_RUNTIME,
        format!(
            "d_V = {:.3e} (+/- {:.1e}, limit {AC2_MAX_DV}); {elapsed:.2?} (limit {AC2_MAX_RUNTIME:?})",
            d.value, d.uncertainty
        ),
    )
}

/// Costs log-uniform inside a random sub-window of `[0.1, 10]` whose log
/// width is itself log-uniform, so that games with many players still admit
/// an FMNE with non-negligible probability.
fn windowed_costs(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let (lo, hi) = (0.1f64.ln(), 10f64.ln());
    let width = rng.random_range(1e-4f64.ln()..(hi - lo).ln()).exp();
    let left = rng.random_range(lo..=hi - width);
    (0..n)
        .map(|_| rng.random_range(left..left + width).exp())
        .collect()
}

fn ac3() -> Outcome {
    let mut rng = common::rng(3);
    let mut accepted = 0;
    let mut drawn = 0;
    let mut worst = 0.0f64;
    let mut n_seen = [false; 51];
    while accepted < AC3_SAMPLES {
        drawn += 1;
        let n = rng.random_range(2..=50);
        let costs = CostProfile::new(windowed_costs(&mut rng, n)).unwrap();
        let eq = fmne(&costs).unwrap();
        if !eq.exists {
            continue;
        }
        accepted += 1;
        n_seen[n] = true;
        let p = eq.profile.unwrap();
        for i in 0..n {
            let q: f64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| 1.0 - p.prob(j))
                .product();
            worst = worst.max((q - costs.ratio(i)).abs());
        }
    }
    let sizes = n_seen.iter().filter(|&&s| s).count();
    outcome(
        worst <= AC3_MAX_GAP,
        format!(
            "max |q_i - a_i| = {worst:.2e} over {accepted} games ({drawn} drawn, {sizes} distinct n; limit {AC3_MAX_GAP:e})"
        ),
    )
}

fn supports(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..1 << n)
        .filter(|m| m.count_ones() >= 2)
        .map(move |m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
}

fn ac4() -> Outcome {
    let mut rng = common::rng(4);
    let mut emitted = 0;
    let mut emitted_failures = 0;
    let mut games = Vec::new();
    for _ in 0..AC4_COST_VECTORS {
        let n = rng.random_range(2..=3);
        let costs = CostProfile::new(common::log_uniform_costs(&mut rng, n, 0.1, 10.0)).unwrap();
        let mut equilibria: Vec<Vec<f64>> = pure_equilibria(&costs)
            .iter()
            .map(|s| s.probs().to_vec())
            .collect();
        for support in supports(n) {
            let report = mixed_equilibrium(&costs, &support).unwrap();
            if let Some(p) = report.profile.filter(|_| report.exists) {
                equilibria.push(p.probs().to_vec());
            }
        }
        let full = fmne(&costs).unwrap();
        if let Some(p) = full.profile.filter(|_| full.exists) {
            equilibria.push(p.probs().to_vec());
        }
        for eq in &equilibria {
            emitted += 1;
            if !common::is_nash(eq, &costs, AC4_ORACLE_TOL) {
                emitted_failures += 1;
            }
        }
        games.push((costs, equilibria));
    }

    // Half the probes are uniform profiles, half are small perturbations of
    // an emitted equilibrium; all are kept away from every emitted one.
    let mut probes = 0;
    let mut probe_passes = 0;
    while probes < AC4_NON_EQUILIBRIA {
        let (costs, equilibria) = &games[rng.random_range(0..games.len())];
        let n = costs.len();
        let probs: Vec<f64> = if probes % 2 == 0 {
            (0..n).map(|_| rng.random()).collect()
        } else {
            let base = &equilibria[rng.random_range(0..equilibria.len())];
            let scale = rng.random_range(1e-3f64.ln()..0.1f64.ln()).exp();
            base.iter()
                .map(|p| (p + scale * rng.random_range(-1.0..1.0)).clamp(0.0, 1.0))
                .collect()
        };
        if equilibria
            .iter()
            .any(|e| common::sup_distance(e, &probs) < 1e-6)
        {
            continue;
        }
        let probs = StrategyProfile::new(probs).unwrap();
        probes += 1;
        if common::is_nash(probs.probs(), costs, AC4_ORACLE_TOL) {
            probe_passes += 1;
        }
    }
    outcome(
        emitted_failures == 0 && probe_passes == 0,
        format!(
            "{emitted} emitted equilibria, {emitted_failures} rejected by the oracle; {probes} other profiles, {probe_passes} accepted (tol {AC4_ORACLE_TOL:e})"
        ),
    )
}

fn ac5() -> Outcome {
    let grid = [100, 1000, 10_000];
    let cases = [
        (
            "homogeneous c=1",
            CostFamily::Homogeneous { c: 1.0 },
            2f64.ln(),
        ),
        (
            "example M=(1.5,2)",
            CostFamily::ExampleFamily {
                m: EXAMPLE_M.to_vec(),
            },
            (5f64 / 4.0).ln() + 5.0 / 12.0,
        ),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, family, limit) in cases {
        let diag = arrival_mean_sequence(&family, &grid).unwrap();
        let gap = (diag.last_m().unwrap_or(f64::NAN) - limit).abs();
        pass &= diag.verdict == Verdict::Converges && gap <= AC5_MAX_GAP;
        parts.push(format!(
            "{name}: {:?}, |m - limit| = {gap:.2e}",
            diag.verdict
        ));
    }
    outcome(
        pass,
        format!("{} (limit {AC5_MAX_GAP:e})", parts.join("; ")),
    )
}

fn ac6() -> Outcome {
    let family = CostFamily::ExampleFamily {
        m: EXAMPLE_M.to_vec(),
    };
    let recipe = limit_recipe(&family, AC6_EPSILON, AC6_N).unwrap();
    let exact = mixture_pmf(&example_limit(&EXAMPLE_M).unwrap(), TAIL).unwrap();
    let d = variational_distance(&mixture_pmf(&recipe.mixture(), TAIL).unwrap(), &exact);
    outcome(
        d.value + d.uncertainty <= AC6_EPSILON,
        format!(
            "K = {}, lambda = {:.6}, bernoullis = {:.6?}; d_V = {:.3e} (+/- {:.1e}, limit {AC6_EPSILON})",
            recipe.k, recipe.lambda, recipe.bernoullis, d.value, d.uncertainty
        ),
    )
}

fn ac7() -> Outcome {
    let costs = CostProfile::homogeneous(1.0, 100).unwrap();
    let s = fmne(&costs).unwrap().profile.unwrap();
    let exact = poisson_binomial(s.probs()).unwrap();
    let first = simulate_with(&s, &costs, AC7_TRIALS, AC7_SEED, Execution::Parallel).unwrap();
    let rerun = simulate_with(&s, &costs, AC7_TRIALS, AC7_SEED, Execution::Parallel).unwrap();
    let serial = simulate_with(&s, &costs, AC7_TRIALS, AC7_SEED, Execution::Serial).unwrap();
    let d = empirical_distance(&first, &exact);
    let identical = first == rerun && first == serial;
    outcome(
        d.value <= AC7_MAX_DV && identical,
        format!(
            "d_V = {:.3e} (limit {AC7_MAX_DV}); reruns and serial/parallel identical: {identical}",
            d.value
        ),
    )
}

fn random_pmf(rng: &mut impl Rng) -> Pmf {
    let len = rng.random_range(1..40);
    let w: Vec<f64> = (0..len).map(|_| rng.random::<f64>().powi(3)).collect();
    let total: f64 = w.iter().sum::<f64>() + f64::MIN_POSITIVE;
    Pmf::new(w.iter().map(|x| x / total).collect(), 0.0).unwrap()
}

fn ac8() -> Outcome {
    let mut rng = common::rng(8);
    let mut enum_gap = 0.0f64;
    for n in 0..=15 {
        for _ in 0..4 {
            let probs: Vec<f64> = (0..n).map(|_| rng.random()).collect();
            let dp = poisson_binomial(&probs).unwrap();
            let exact = common::enumerate_arrivals(&probs);
            let gap = exact
                .iter()
                .enumerate()
                .map(|(k, e)| (dp.get(k) - e).abs())
                .fold(0.0, f64::max);
            enum_gap = enum_gap.max(gap);
        }
    }

    let mut violations = 0;
    for _ in 0..AC8_PAIRS {
        let (f, g, h) = (
            random_pmf(&mut rng),
            random_pmf(&mut rng),
            random_pmf(&mut rng),
        );
        let d = |a: &Pmf, b: &Pmf| variational_distance(a, b).value;
        let ok = d(&f, &f) <= AC8_METRIC_TOL
            && d(&f, &g) == d(&g, &f)
            && (0.0..=2.0).contains(&d(&f, &g))
            && d(&f, &h) <= d(&f, &g) + d(&g, &h) + AC8_METRIC_TOL
            && (d(&f, &g) > AC8_METRIC_TOL || f.mass() == g.mass());
        if !ok {
            violations += 1;
        }
    }
    outcome(
        enum_gap <= AC8_ENUM_TOL && violations == 0,
        format!(
            "max |DP - enumeration| = {enum_gap:.2e} for n <= 15 (limit {AC8_ENUM_TOL:e}); {violations} metric-axiom violations over {AC8_PAIRS} pmf triples"
        ),
    )
}

type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("AC1", "homogeneous Poisson limit", ac1),
        ("AC2", "heterogeneous mixture limit", ac2),
        ("AC3", "FMNE indifference identity", ac3),
        ("AC4", "brute-force Nash equivalence", ac4),
        ("AC5", "convergence criterion surrogate", ac5),
        ("AC6", "limit recipe consistency", ac6),
        ("AC7", "Monte Carlo fidelity and determinism", ac7),
        ("AC8", "distribution kernel oracles", ac8),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        let o = run();
        failed += usize::from(!o.pass);
        println!(
            "[{}] {id} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
