//! Limit laws of the arrival count `S_n` at the fully-mixed equilibrium
//! and finite-grid diagnostics of its convergence.
//!
//! Along a cost sequence whose FMNE exists for every `n`, `S_n` converges
//! in distribution iff `m_n = sum_i p_{i,n}` has a limit in `(0, inf)`.
//! The limit is then approximated to any precision by a Poisson variable
//! plus finitely many Bernoulli terms, one for each player whose limiting
//! transmission probability `p_{i,inf} = 1 - alpha / a_i` is not small.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distribution::MixtureLimit;
use crate::equilibrium::fmne;
use crate::game::{compensated_sum, validate_heavy_costs, CostFamily, CostProfile};
use crate::tolerance;
use crate::{Error, Result};

/// Relative variation of `m_n` across the upper half of the grid below
/// which the sequence is declared convergent.
pub const CONVERGENCE_VARIATION: f64 = 1e-2;

/// Growth of `m_n` per decade of `n` above which the sequence is declared
/// divergent.
pub const DIVERGENCE_GROWTH_PER_DECADE: f64 = 0.1;

/// Poisson limit of the homogeneous game: `Po(-log(c / (1 + c)))`.
pub fn homogeneous_limit(c: f64) -> Result<MixtureLimit> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::NonPositiveParameter {
            name: "c",
            value: c,
        });
    }
    MixtureLimit::poisson(c.recip().ln_1p())
}

/// Existence conditions of the FMNE for the cost vector
/// `(M_1, ..., M_l, 1, ..., 1)` of length `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleConditions {
    pub n: usize,
    pub holds: bool,
    /// For each heavy player `i <= l`: `M_i/(1+M_i) - gamma_n`, where
    /// `gamma_n = (1/2)^((n-l)/(n-1)) prod_j (M_j/(1+M_j))^(1/(n-1))`.
    pub heavy_margins: Vec<f64>,
    /// `(1/2)^(l-1) - prod_j M_j/(1+M_j)`, the condition shared by all
    /// unit-cost players; independent of `n`.
    pub unit_margin: f64,
    /// Upper end of the sufficient window `M_i in (1, 1/(2^((l-1)/l) - 1))`;
    /// `None` (unbounded) when `l = 1`.
    pub window_upper: Option<f64>,
    /// Every `M_i` lies inside the sufficient window.
    pub in_window: bool,
}

pub fn example_family_conditions(m: &[f64], n: usize) -> Result<ExampleConditions> {
    if m.is_empty() {
        return Err(Error::InvalidExampleFamily("l must be at least 1".into()));
    }
    if let Some((i, v)) = m
        .iter()
        .enumerate()
        .find(|(_, v)| !(v.is_finite() && **v > 0.0))
    {
        return Err(Error::InvalidExampleFamily(format!(
            "M_{} = {v} must be positive and finite",
            i + 1
        )));
    }
    let l = m.len();
    if n <= l {
        return Err(Error::InvalidExampleFamily(format!(
            "n = {n} must exceed l = {l}"
        )));
    }
    let ratios: Vec<f64> = m.iter().map(|&v| v / (1.0 + v)).collect();
    let log_prod: f64 = ratios.iter().map(|a| a.ln()).sum();
    let log_half = 0.5f64.ln();
    let gamma = (((n - l) as f64 * log_half + log_prod) / (n - 1) as f64).exp();
    let heavy_margins: Vec<f64> = ratios.iter().map(|a| a - gamma).collect();
    let unit_margin = ((l - 1) as f64 * log_half).exp() - log_prod.exp();
    let window_upper = (l > 1).then(|| 1.0 / (2f64.powf((l - 1) as f64 / l as f64) - 1.0));
    let in_window = m
        .iter()
        .all(|&v| v > 1.0 && window_upper.is_none_or(|u| v < u));
    let holds = heavy_margins.iter().all(|&g| g > tolerance::STRICT_MARGIN)
        && unit_margin > tolerance::STRICT_MARGIN;
    Ok(ExampleConditions {
        n,
        holds,
        heavy_margins,
        unit_margin,
        window_upper,
        in_window,
    })
}

/// Limit law of `S_n` for the family `(M_1, ..., M_l, 1, 1, ...)`:
/// `Po(log(2^(1-l)) + sum_j log(1 + 1/M_j)) + sum_i Bern(1 - (1+M_i)/(2 M_i))`.
///
/// Requires `M_i > 1` for all `i` and `prod_j M_j/(1+M_j) < (1/2)^(l-1)`,
/// the conditions under which the FMNE exists for all large `n`.
pub fn example_limit(m: &[f64]) -> Result<MixtureLimit> {
    validate_heavy_costs(m)?;
    let l = m.len();
    let lambda = (1.0 - l as f64) * 2f64.ln() + m.iter().map(|v| v.recip().ln_1p()).sum::<f64>();
    if lambda <= 0.0 {
        return Err(Error::InvalidExampleFamily(format!(
            "prod M_j/(1+M_j) must be below (1/2)^(l-1); Poisson mean would be {lambda}"
        )));
    }
    let bernoullis = m.iter().map(|&v| (v - 1.0) / (2.0 * v)).collect();
    MixtureLimit::new(lambda, bernoullis)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converges,
    Diverges,
    Inconclusive,
}

/// One grid point of [`ConvergenceDiagnostics`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub n: usize,
    pub fmne_exists: bool,
    /// `sum_i p_{i,n}` at the FMNE.
    pub m_n: Option<f64>,
    /// `(prod_i a_i)^(1/(n-1))`.
    pub gamma_n: Option<f64>,
    /// Geometric mean of `a_1, ..., a_n`.
    pub geo_n: Option<f64>,
    pub a_min: Option<f64>,
    /// Why the costs could not be built at this `n`.
    pub error: Option<String>,
}

impl GridPoint {
    /// `|Geo_n - a_min(n)|`, the gap that closes as `n` grows.
    pub fn geo_gap(&self) -> Option<f64> {
        Some((self.geo_n? - self.a_min?).abs())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceDiagnostics {
    pub rows: Vec<GridPoint>,
    /// `Geo_n` at the largest grid point where the costs exist.
    pub alpha_estimate: Option<f64>,
    pub verdict: Verdict,
}

impl ConvergenceDiagnostics {
    pub fn last_m(&self) -> Option<f64> {
        self.rows.last()?.m_n
    }
}

fn log_ratio_sum(costs: &CostProfile) -> f64 {
    compensated_sum(costs.ratios().iter().map(|a| a.ln()))
}

fn grid_point(family: &CostFamily, n: usize) -> GridPoint {
    let costs = match family.costs(n) {
        Ok(c) => c,
        Err(e) => {
            return GridPoint {
                n,
                fmne_exists: false,
                m_n: None,
                gamma_n: None,
                geo_n: None,
                a_min: None,
                error: Some(e.to_string()),
            }
        }
    };
    let log_sum = log_ratio_sum(&costs);
    let eq = fmne(&costs).expect("full support of a valid profile");
    let m_n = eq.profile.as_ref().map(|p| p.mean_arrivals());
    GridPoint {
        n,
        fmne_exists: eq.exists,
        m_n: if eq.exists { m_n } else { None },
        gamma_n: Some((log_sum / (n - 1) as f64).exp()),
        geo_n: Some((log_sum / n as f64).exp()),
        a_min: costs.ratios().iter().copied().reduce(f64::min),
        error: None,
    }
}

/// Evaluates the FMNE along `grid` and classifies the trend of `m_n`.
///
/// The verdict looks at the upper half of the grid only: `Converges` when
/// the total variation of `m_n` there is below [`CONVERGENCE_VARIATION`]
/// relative to the last value, `Diverges` when `m_n` grows faster than
/// [`DIVERGENCE_GROWTH_PER_DECADE`] per decade of `n`, and `Inconclusive`
/// otherwise or whenever the FMNE is missing in that half.
pub fn arrival_mean_sequence(
    family: &CostFamily,
    grid: &[usize],
) -> Result<ConvergenceDiagnostics> {
    if grid.is_empty() || grid[0] < 2 || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidGrid);
    }
    let rows: Vec<GridPoint> = grid.par_iter().map(|&n| grid_point(family, n)).collect();
    let alpha_estimate = rows.iter().rev().find_map(|r| r.geo_n);
    let verdict = classify(&rows);
    Ok(ConvergenceDiagnostics {
        rows,
        alpha_estimate,
        verdict,
    })
}

fn classify(rows: &[GridPoint]) -> Verdict {
    let top = &rows[rows.len() / 2..];
    if top.len() < 2 {
        return Verdict::Inconclusive;
    }
    let Some(m): Option<Vec<f64>> = top.iter().map(|r| r.m_n).collect() else {
        return Verdict::Inconclusive;
    };
    let last = m[m.len() - 1];
    let variation: f64 = m.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    if last > 0.0 && variation < CONVERGENCE_VARIATION * last {
        return Verdict::Converges;
    }
    let decades = (top[top.len() - 1].n as f64 / top[0].n as f64).log10();
    if m[0] > 0.0 && (last / m[0]).powf(1.0 / decades) - 1.0 > DIVERGENCE_GROWTH_PER_DECADE {
        return Verdict::Diverges;
    }
    Verdict::Inconclusive
}

/// Indices whose ratio `a_i` lies farther than `delta` from `alpha`.
pub fn ratio_outliers(costs: &CostProfile, alpha: f64, delta: f64) -> Vec<usize> {
    costs
        .ratios()
        .iter()
        .enumerate()
        .filter(|(_, a)| (**a - alpha).abs() > delta)
        .map(|(i, _)| i)
        .collect()
}

/// A concrete Poisson-plus-Bernoulli approximation of the limit of `S_n`,
/// estimated from the FMNE at a single large `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitRecipe {
    pub epsilon: f64,
    pub n: usize,
    /// First player (1-based) whose limiting probability is folded into
    /// the Poisson term; players `1..K` keep their own Bernoulli term.
    pub k: usize,
    pub lambda: f64,
    /// `p_{i,inf}` for players `1..K`.
    pub bernoullis: Vec<f64>,
    /// `m_n` at the FMNE.
    pub m_estimate: f64,
    /// `Geo_n`, the estimate of `alpha = lim a_min(n)`.
    pub alpha_estimate: f64,
    /// `|Geo_n - a_min(n)|`.
    pub alpha_gap: f64,
    pub warnings: Vec<String>,
}

impl LimitRecipe {
    pub fn mixture(&self) -> MixtureLimit {
        MixtureLimit::new(self.lambda, self.bernoullis.clone())
            .expect("recipe keeps lambda >= 0 and probabilities in [0, 1]")
    }
}

/// Splits the limit of `S_n` into `K - 1` Bernoulli terms and a Poisson
/// remainder, choosing the smallest `K` with
/// `max_{i >= K} p_{i,inf} <= epsilon / (8 m)`.
pub fn limit_recipe(family: &CostFamily, epsilon: f64, n: usize) -> Result<LimitRecipe> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::NonPositiveParameter {
            name: "epsilon",
            value: epsilon,
        });
    }
    let costs = family.costs(n)?;
    let eq = fmne(&costs)?;
    let profile = match eq.profile {
        Some(p) if eq.exists => p,
        _ => return Err(Error::FmneMissing(n)),
    };
    let m = profile.mean_arrivals();
    let alpha = (log_ratio_sum(&costs) / n as f64).exp();
    let a_min = costs.ratios().iter().copied().fold(f64::INFINITY, f64::min);
    let limits: Vec<f64> = costs
        .ratios()
        .iter()
        .map(|a| (1.0 - alpha / a).max(0.0))
        .collect();
    let threshold = epsilon / (8.0 * m);
    let keep = limits
        .iter()
        .rposition(|&p| p > threshold)
        .map_or(0, |i| i + 1);
    let bernoullis = limits[..keep].to_vec();
    let mut lambda = m - bernoullis.iter().sum::<f64>();
    let mut warnings = Vec::new();
    if lambda < 0.0 {
        if lambda < -tolerance::LAMBDA_FLOOR {
            return Err(Error::NegativeLambda(lambda));
        }
        warnings.push(format!("Poisson mean estimate {lambda} floored at 0"));
        lambda = 0.0;
    }
    Ok(LimitRecipe {
        epsilon,
        n,
        k: keep + 1,
        lambda,
        bernoullis,
        m_estimate: m,
        alpha_estimate: alpha,
        alpha_gap: (alpha - a_min).abs(),
        warnings,
    })
}
