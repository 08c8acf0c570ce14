//! Nash equilibria of the one-shot game.
//!
//! The game has exactly `n` pure equilibria (one lone transmitter). A
//! profile in which the players of a support `S` (with `|S| >= 2`) mix and
//! everybody else backs off is an equilibrium iff, with
//! `t = (prod_{i in S} a_i)^(1 / (|S| - 1))`,
//!
//! - `a_i > t` for every `i` in `S`,
//! - `a_i >= t` for every `i` outside `S`,
//!
//! and then `p_i = 1 - t / a_i` on `S`. The full support gives the
//! fully-mixed equilibrium (FMNE), where `t` is usually written `gamma_n`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::game::{compensated_sum, others_silent, transmit_payoff, CostProfile, StrategyProfile};
use crate::tolerance;
use crate::{Error, Result};

/// Largest player count for which every support is enumerated.
pub const ENUMERATION_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionKind {
    /// `a_i > t` for a support member.
    StrictSupport,
    /// `a_i >= t` for a player outside the support.
    WeakOutside,
    /// A mixing player must be indifferent between its two actions.
    Indifference,
    /// A sure transmitter must not gain by backing off.
    TransmitBestResponse,
    /// A silent player must not gain by transmitting.
    BackoffBestResponse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub player: usize,
    pub kind: ConditionKind,
    pub condition: String,
    /// Signed slack of the condition; negative or (for strict conditions)
    /// within the strictness band means violated.
    pub margin: f64,
    /// The margin lies within the numerical tolerance of zero.
    pub boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub support: Vec<usize>,
    /// The equilibrium profile; `None` when the existence conditions fail.
    pub profile: Option<StrategyProfile>,
    pub exists: bool,
    pub violations: Vec<Violation>,
    /// `(prod_{i in S} a_i)^(1/(|S|-1))`; this is `gamma_n` for the full
    /// support. Absent for reports produced by [`verify_equilibrium`].
    pub gamma: Option<f64>,
    /// Largest expected-payoff gain any player obtains by a unilateral
    /// deviation; absent when no profile was built.
    pub max_deviation_gain: Option<f64>,
}

impl EquilibriumReport {
    /// True when some failed condition sits on the tolerance boundary.
    pub fn boundary(&self) -> bool {
        self.violations.iter().any(|v| v.boundary)
    }
}

/// `pi(c') = prod_{i in support} a_i`, evaluated in log space.
pub fn pi(costs: &CostProfile, support: &[usize]) -> Result<f64> {
    if support.is_empty() {
        return Err(Error::EmptySupport);
    }
    for &i in support {
        costs.check_player(i)?;
    }
    Ok(log_pi(costs, support).exp())
}

fn log_pi(costs: &CostProfile, support: &[usize]) -> f64 {
    compensated_sum(support.iter().map(|&i| costs.ratio(i).ln()))
}

/// The `n` pure equilibria; profile `k` has only player `k` transmitting.
pub fn pure_equilibria(costs: &CostProfile) -> Vec<StrategyProfile> {
    (0..costs.len())
        .map(|k| StrategyProfile::pure(costs.len(), k).expect("k < n"))
        .collect()
}

fn normalize_support(costs: &CostProfile, support: &[usize]) -> Result<Vec<usize>> {
    let mut sorted = support.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(Error::DuplicateSupportIndex(w[0]));
        }
    }
    for &i in &sorted {
        costs.check_player(i)?;
    }
    if sorted.len() < 2 {
        return Err(Error::SupportTooSmall(sorted.len()));
    }
    Ok(sorted)
}

/// Builds and checks the mixed equilibrium supported on `support`.
pub fn mixed_equilibrium(costs: &CostProfile, support: &[usize]) -> Result<EquilibriumReport> {
    let support = normalize_support(costs, support)?;
    let n = costs.len();
    let log_gamma = log_pi(costs, &support) / (support.len() - 1) as f64;
    let gamma = log_gamma.exp();

    let mut member = vec![false; n];
    for &i in &support {
        member[i] = true;
    }

    let mut violations = Vec::new();
    for i in 0..n {
        let a = costs.ratio(i);
        let margin = a - gamma;
        if member[i] {
            if margin <= tolerance::STRICT_MARGIN {
                violations.push(Violation {
                    player: i,
                    kind: ConditionKind::StrictSupport,
                    condition: format!("a_{i} = {a} > {gamma}"),
                    margin,
                    boundary: margin.abs() <= tolerance::STRICT_MARGIN,
                });
            }
        } else if margin < -tolerance::STRICT_MARGIN {
            violations.push(Violation {
                player: i,
                kind: ConditionKind::WeakOutside,
                condition: format!("a_{i} = {a} >= {gamma}"),
                margin,
                boundary: false,
            });
        }
    }

    if !violations.is_empty() {
        return Ok(EquilibriumReport {
            support,
            profile: None,
            exists: false,
            violations,
            gamma: Some(gamma),
            max_deviation_gain: None,
        });
    }

    // p_i = 1 - gamma / a_i, kept accurate when gamma is close to a_i.
    let probs: Vec<f64> = (0..n)
        .map(|i| {
            if member[i] {
                -(log_gamma - costs.ratio(i).ln()).exp_m1()
            } else {
                0.0
            }
        })
        .collect();
    let profile = StrategyProfile::new(probs)?;
    let check = verify_equilibrium(&profile, costs, tolerance::VERIFY)?;
    Ok(EquilibriumReport {
        support,
        profile: Some(profile),
        exists: check.exists,
        violations: check.violations,
        gamma: Some(gamma),
        max_deviation_gain: check.max_deviation_gain,
    })
}

/// The fully-mixed equilibrium, i.e. the mixed equilibrium on all players.
pub fn fmne(costs: &CostProfile) -> Result<EquilibriumReport> {
    let all: Vec<usize> = (0..costs.len()).collect();
    mixed_equilibrium(costs, &all)
}

/// Best-response check of an arbitrary profile.
///
/// With `T_i = q_i - (1 - q_i) c_i` the payoff of transmitting against the
/// others' mixture, a mixing player needs `|T_i| <= tol`, a sure
/// transmitter `T_i >= -tol` and a silent player `T_i <= tol`.
pub fn verify_equilibrium(
    strategy: &StrategyProfile,
    costs: &CostProfile,
    tol: f64,
) -> Result<EquilibriumReport> {
    strategy.check_against(costs)?;
    let q = others_silent(strategy.probs());
    let mut violations = Vec::new();
    let mut max_gain = 0.0_f64;
    for (i, &qi) in q.iter().enumerate() {
        let p = strategy.prob(i);
        let t = transmit_payoff(qi, costs.cost(i));
        max_gain = max_gain.max(t.max(0.0) - p * t);
        let (kind, margin, text) = if p == 1.0 {
            (
                ConditionKind::TransmitBestResponse,
                t + tol,
                format!("transmit payoff {t} >= 0"),
            )
        } else if p == 0.0 {
            (
                ConditionKind::BackoffBestResponse,
                tol - t,
                format!("transmit payoff {t} <= 0"),
            )
        } else {
            (
                ConditionKind::Indifference,
                tol - t.abs(),
                format!("transmit payoff {t} = 0"),
            )
        };
        if margin < 0.0 {
            violations.push(Violation {
                player: i,
                kind,
                condition: text,
                margin,
                boundary: false,
            });
        }
    }
    Ok(EquilibriumReport {
        support: strategy.support().to_vec(),
        profile: Some(strategy.clone()),
        exists: violations.is_empty(),
        violations,
        gamma: None,
        max_deviation_gain: Some(max_gain),
    })
}

/// Every equilibrium of the game: the pure ones followed by the mixed
/// equilibria over each support of size at least 2 that admits one,
/// ordered by support bitmask. Limited to [`ENUMERATION_LIMIT`] players.
pub fn enumerate_equilibria(costs: &CostProfile) -> Result<Vec<EquilibriumReport>> {
    let n = costs.len();
    if n > ENUMERATION_LIMIT {
        return Err(Error::TooManyPlayers {
            n,
            limit: ENUMERATION_LIMIT,
        });
    }
    let mut out = pure_equilibria(costs)
        .iter()
        .map(|p| verify_equilibrium(p, costs, tolerance::VERIFY))
        .collect::<Result<Vec<_>>>()?;
    let mixed: Vec<EquilibriumReport> = (1u32..1 << n)
        .into_par_iter()
        .filter(|mask| mask.count_ones() >= 2)
        .map(|mask| {
            let support: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            mixed_equilibrium(costs, &support)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|r| r.exists)
        .collect();
    out.extend(mixed);
    Ok(out)
}
