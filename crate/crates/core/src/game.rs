//! Domain types of the one-shot random-access game and its utility function.

use serde::{Deserialize, Serialize};

use crate::tolerance;
use crate::{Error, Result};

/// Costs of a failed transmission, one per player, together with the cached
/// ratios `a_i = c_i / (1 + c_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct CostProfile {
    costs: Vec<f64>,
    ratios: Vec<f64>,
}

impl CostProfile {
    pub fn new(costs: Vec<f64>) -> Result<Self> {
        if costs.len() < 2 {
            return Err(Error::TooFewPlayers(costs.len()));
        }
        if let Some((index, &value)) = costs
            .iter()
            .enumerate()
            .find(|(_, c)| !(c.is_finite() && **c > 0.0 && cost_ratio(**c) < 1.0))
        {
            return Err(Error::InvalidCost { index, value });
        }
        let ratios = costs.iter().map(|c| cost_ratio(*c)).collect();
        Ok(Self { costs, ratios })
    }

    pub fn homogeneous(c: f64, n: usize) -> Result<Self> {
        Self::new(vec![c; n])
    }

    /// Number of players.
    pub fn len(&self) -> usize {
        self.costs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.costs.is_empty()
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    /// The ratios `a_i = c_i / (1 + c_i)`, each in `(0, 1)`.
    pub fn ratios(&self) -> &[f64] {
        &self.ratios
    }

    pub fn cost(&self, i: usize) -> f64 {
        self.costs[i]
    }

    pub fn ratio(&self, i: usize) -> f64 {
        self.ratios[i]
    }

    pub(crate) fn check_player(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::PlayerOutOfRange {
                index: i,
                n: self.len(),
            })
        }
    }
}

impl TryFrom<Vec<f64>> for CostProfile {
    type Error = Error;

    fn try_from(costs: Vec<f64>) -> Result<Self> {
        Self::new(costs)
    }
}

impl From<CostProfile> for Vec<f64> {
    fn from(profile: CostProfile) -> Self {
        profile.costs
    }
}

/// `a = c / (1 + c)`.
pub fn cost_ratio(c: f64) -> f64 {
    c / (1.0 + c)
}

/// One realized action per player: `true` transmits, `false` backs off.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionProfile(Vec<bool>);

impl ActionProfile {
    pub fn new(actions: Vec<bool>) -> Self {
        Self(actions)
    }

    /// Builds a profile from 0/1 entries; any nonzero value transmits.
    pub fn from_bits(bits: &[u8]) -> Self {
        Self(bits.iter().map(|&b| b != 0).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn transmits(&self, i: usize) -> bool {
        self.0[i]
    }

    /// `||a||_1`, the number of simultaneous transmissions.
    pub fn transmitters(&self) -> usize {
        self.0.iter().filter(|&&a| a).count()
    }

    pub fn actions(&self) -> &[bool] {
        &self.0
    }
}

/// Payoff of player `i` under a realized action profile: 0 for backing
/// off, 1 for a lone transmission and `-c_i` for a collision.
pub fn utility(profile: &ActionProfile, i: usize, costs: &CostProfile) -> Result<f64> {
    costs.check_player(i)?;
    if profile.len() != costs.len() {
        return Err(Error::LengthMismatch {
            expected: costs.len(),
            actual: profile.len(),
        });
    }
    Ok(payoff(
        profile.transmits(i),
        profile.transmitters(),
        costs.cost(i),
    ))
}

#[inline]
pub(crate) fn payoff(transmits: bool, transmitters: usize, cost: f64) -> f64 {
    match (transmits, transmitters) {
        (false, _) => 0.0,
        (true, 1) => 1.0,
        (true, _) => -cost,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    Pure,
    Mixed,
    FullyMixed,
}

/// Independent transmission probabilities, one per player.
///
/// Entries within [`tolerance::CLASSIFY`] of 0 or 1 are snapped to the
/// endpoint, so `support` is exactly the set of indices with `p_i > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStrategy")]
pub struct StrategyProfile {
    probs: Vec<f64>,
    support: Vec<usize>,
    kind: StrategyKind,
}

#[derive(Deserialize)]
struct RawStrategy {
    probs: Vec<f64>,
}

impl TryFrom<RawStrategy> for StrategyProfile {
    type Error = Error;

    fn try_from(raw: RawStrategy) -> Result<Self> {
        Self::new(raw.probs)
    }
}

impl StrategyProfile {
    pub fn new(mut probs: Vec<f64>) -> Result<Self> {
        for (index, p) in probs.iter_mut().enumerate() {
            if !(-tolerance::CLASSIFY..=1.0 + tolerance::CLASSIFY).contains(p) {
                return Err(Error::InvalidProbability { index, value: *p });
            }
            if *p <= tolerance::CLASSIFY {
                *p = 0.0;
            } else if *p >= 1.0 - tolerance::CLASSIFY {
                *p = 1.0;
            }
        }
        let support: Vec<usize> = probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, _)| i)
            .collect();
        let kind = if probs.iter().all(|&p| p == 0.0 || p == 1.0) {
            StrategyKind::Pure
        } else if probs.iter().all(|&p| p > 0.0 && p < 1.0) {
            StrategyKind::FullyMixed
        } else {
            StrategyKind::Mixed
        };
        Ok(Self {
            probs,
            support,
            kind,
        })
    }

    /// The pure profile in which only player `k` transmits.
    pub fn pure(n: usize, k: usize) -> Result<Self> {
        if k >= n {
            return Err(Error::PlayerOutOfRange { index: k, n });
        }
        let mut probs = vec![0.0; n];
        probs[k] = 1.0;
        Self::new(probs)
    }

    /// Everybody backs off.
    pub fn silent(n: usize) -> Self {
        Self {
            probs: vec![0.0; n],
            support: Vec::new(),
            kind: StrategyKind::Pure,
        }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, i: usize) -> f64 {
        self.probs[i]
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn kind(&self) -> StrategyKind {
        self.kind
    }

    /// Expected number of transmissions, `sum_i p_i`.
    pub fn mean_arrivals(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub(crate) fn check_against(&self, costs: &CostProfile) -> Result<()> {
        if self.len() == costs.len() {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                expected: costs.len(),
                actual: self.len(),
            })
        }
    }
}

/// For every player `i`, the probability `q_i = prod_{j != i} (1 - p_j)`
/// that all other players back off.
///
/// Computed from one compensated sum of `log(1 - p_j)`, so the error stays
/// near machine precision for large `n`.
pub fn others_silent(probs: &[f64]) -> Vec<f64> {
    let sure = probs.iter().filter(|&&p| p >= 1.0).count();
    let log_idle = compensated_sum(probs.iter().filter(|&&p| p < 1.0).map(|&p| (-p).ln_1p()));
    probs
        .iter()
        .map(|&p| {
            if p >= 1.0 {
                if sure == 1 {
                    log_idle.exp()
                } else {
                    0.0
                }
            } else if sure > 0 {
                0.0
            } else {
                (log_idle - (-p).ln_1p()).exp()
            }
        })
        .collect()
}

/// Neumaier summation; keeps `log pi` accurate over many players.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut carry = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// Expected payoff of player `i` split by its own action.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectedUtility {
    /// Payoff of transmitting for sure: `q_i - (1 - q_i) c_i`.
    pub transmit: f64,
    /// Payoff of backing off, always 0.
    pub backoff: f64,
    /// `p_i * transmit + (1 - p_i) * backoff`.
    pub overall: f64,
}

pub fn expected_utility(
    i: usize,
    strategy: &StrategyProfile,
    costs: &CostProfile,
) -> Result<ExpectedUtility> {
    costs.check_player(i)?;
    strategy.check_against(costs)?;
    let q = strategy
        .probs()
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, p)| 1.0 - p)
        .product::<f64>();
    let transmit = transmit_payoff(q, costs.cost(i));
    Ok(ExpectedUtility {
        transmit,
        backoff: 0.0,
        overall: strategy.prob(i) * transmit,
    })
}

/// `q - (1 - q) c`, which equals `(1 + c)(q - a)` with `a = c / (1 + c)`.
#[inline]
pub(crate) fn transmit_payoff(q: f64, cost: f64) -> f64 {
    q - (1.0 - q) * cost
}

/// Parametric cost sequences `c_1, c_2, ...` (players indexed from 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum SequenceRule {
    /// `c_i = base * (1 + amplitude * i^(-exponent))`.
    PowerDecay {
        base: f64,
        amplitude: f64,
        exponent: f64,
    },
    /// Odd players cost `low`, even players cost `high`.
    Alternating { low: f64, high: f64 },
    /// `c_i = base + slope * (i - 1)`.
    Linear { base: f64, slope: f64 },
}

impl SequenceRule {
    pub fn id(&self) -> &'static str {
        match self {
            Self::PowerDecay { .. } => "power_decay",
            Self::Alternating { .. } => "alternating",
            Self::Linear { .. } => "linear",
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSequence(msg));
        match *self {
            Self::PowerDecay {
                base,
                amplitude,
                exponent,
            } => {
                if !(base > 0.0 && base.is_finite()) {
                    return bad(format!("power_decay base {base} must be positive"));
                }
                if !(amplitude > -1.0 && amplitude.is_finite()) {
                    return bad(format!("power_decay amplitude {amplitude} must exceed -1"));
                }
                if !(exponent > 0.0 && exponent.is_finite()) {
                    return bad(format!("power_decay exponent {exponent} must be positive"));
                }
            }
            Self::Alternating { low, high } => {
                if !(low > 0.0 && high > 0.0 && low.is_finite() && high.is_finite()) {
                    return bad(format!(
                        "alternating costs ({low}, {high}) must be positive"
                    ));
                }
            }
            Self::Linear { base, slope } => {
                if !(base > 0.0 && base.is_finite() && slope >= 0.0 && slope.is_finite()) {
                    return bad(format!(
                        "linear needs base > 0 and slope >= 0, got ({base}, {slope})"
                    ));
                }
            }
        }
        Ok(())
    }

    /// Cost of player `i` (1-based).
    pub fn cost(&self, i: usize) -> f64 {
        let x = i as f64;
        match *self {
            Self::PowerDecay {
                base,
                amplitude,
                exponent,
            } => base * (1.0 + amplitude * x.powf(-exponent)),
            Self::Alternating { low, high } => {
                if i % 2 == 1 {
                    low
                } else {
                    high
                }
            }
            Self::Linear { base, slope } => base + slope * (x - 1.0),
        }
    }
}

/// A rule producing the cost vector for any player count, with costs of
/// existing players unchanged as players are added.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostFamily {
    /// A fixed list; smaller games use its prefix.
    Explicit {
        costs: Vec<f64>,
    },
    Homogeneous {
        c: f64,
    },
    /// `(M_1, ..., M_l, 1, 1, ...)`.
    ExampleFamily {
        m: Vec<f64>,
    },
    Sequence(SequenceRule),
}

impl CostFamily {
    pub fn costs(&self, n: usize) -> Result<CostProfile> {
        if n < 2 {
            return Err(Error::TooFewPlayers(n));
        }
        match self {
            Self::Explicit { costs } => {
                if costs.len() < n {
                    return Err(Error::ExplicitTooShort {
                        available: costs.len(),
                        requested: n,
                    });
                }
                CostProfile::new(costs[..n].to_vec())
            }
            Self::Homogeneous { c } => CostProfile::homogeneous(*c, n),
            Self::ExampleFamily { m } => {
                validate_heavy_costs(m)?;
                if n < m.len() {
                    return Err(Error::InvalidExampleFamily(format!(
                        "n = {n} is smaller than l = {}",
                        m.len()
                    )));
                }
                let mut costs = m.clone();
                costs.resize(n, 1.0);
                CostProfile::new(costs)
            }
            Self::Sequence(rule) => {
                rule.validate()?;
                CostProfile::new((1..=n).map(|i| rule.cost(i)).collect())
            }
        }
    }
}

/// Rejects example-family cost lists outside `M_i > 1`.
pub(crate) fn validate_heavy_costs(m: &[f64]) -> Result<()> {
    if m.is_empty() {
        return Err(Error::InvalidExampleFamily("l must be at least 1".into()));
    }
    if let Some((i, v)) = m
        .iter()
        .enumerate()
        .find(|(_, v)| !(v.is_finite() && **v > 1.0))
    {
        return Err(Error::InvalidExampleFamily(format!(
            "M_{} = {v} must be finite and greater than 1",
            i + 1
        )));
    }
    Ok(())
}

/// A cost family evaluated at a fixed player count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostGeneratorSpec {
    pub family: CostFamily,
    pub n: usize,
}

impl CostGeneratorSpec {
    pub fn explicit(costs: Vec<f64>) -> Self {
        let n = costs.len();
        Self {
            family: CostFamily::Explicit { costs },
            n,
        }
    }

    pub fn homogeneous(c: f64, n: usize) -> Self {
        Self {
            family: CostFamily::Homogeneous { c },
            n,
        }
    }

    pub fn example_family(m: Vec<f64>, n: usize) -> Self {
        Self {
            family: CostFamily::ExampleFamily { m },
            n,
        }
    }

    pub fn sequence(rule: SequenceRule, n: usize) -> Self {
        Self {
            family: CostFamily::Sequence(rule),
            n,
        }
    }

    pub fn with_n(&self, n: usize) -> Self {
        Self {
            family: self.family.clone(),
            n,
        }
    }
}

pub fn make_costs(spec: &CostGeneratorSpec) -> Result<CostProfile> {
    spec.family.costs(spec.n)
}
