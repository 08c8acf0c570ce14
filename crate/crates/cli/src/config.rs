//! The TOML run configuration and its validation.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use collision_game::distribution::MixtureLimit;
use collision_game::game::{CostFamily, CostProfile};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

/// The cost family and, for single-game commands, the player count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostsConfig {
    #[serde(flatten)]
    pub family: CostFamily,
    pub n: Option<usize>,
}

/// Law the exact FMNE arrival distribution (or a simulation) is compared to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Reference {
    /// The analytic limit where one is known, else the limit recipe.
    #[default]
    Limit,
    /// `Po(m_n)` with the same mean as the compared law.
    PoissonMean,
    /// The exact Poisson-binomial law of the profile itself.
    Exact,
    Mixture {
        lambda: f64,
        bernoullis: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EquilibriaConfig {
    /// Supports (0-based player indices) whose mixed equilibrium is reported.
    pub supports: Option<Vec<Vec<usize>>>,
    /// Enumerate every support; defaults to true when no supports are given
    /// and `n` is small enough.
    pub enumerate: Option<bool>,
    pub tolerance: f64,
}

impl Default for EquilibriaConfig {
    fn default() -> Self {
        Self {
            supports: None,
            enumerate: None,
            tolerance: collision_game::tolerance::VERIFY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LimitConfig {
    pub grid: Vec<usize>,
    pub epsilon: f64,
    /// Also run the limit recipe; always on for families without a closed
    /// form.
    pub recipe: bool,
    /// Player count at which the recipe is estimated; the last grid point
    /// by default.
    pub recipe_n: Option<usize>,
}

impl Default for LimitConfig {
    fn default() -> Self {
        Self {
            grid: vec![100, 1000, 10_000],
            epsilon: 0.05,
            recipe: false,
            recipe_n: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DistanceConfig {
    pub grid: Vec<usize>,
    pub reference: Reference,
    /// Recipe precision when the reference limit has no closed form.
    pub epsilon: f64,
    pub tail_threshold: f64,
}

impl Default for DistanceConfig {
    fn default() -> Self {
        Self {
            grid: vec![10, 100, 1000],
            reference: Reference::Limit,
            epsilon: 0.05,
            tail_threshold: collision_game::tolerance::POISSON_TAIL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub trials: Option<u64>,
    /// Explicit strategy; the FMNE when absent.
    pub probs: Option<Vec<f64>>,
    pub reference: Option<Reference>,
    pub epsilon: f64,
    pub tail_threshold: f64,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            trials: None,
            probs: None,
            reference: None,
            epsilon: 0.05,
            tail_threshold: collision_game::tolerance::POISSON_TAIL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub n: Vec<usize>,
    /// Families to sweep; the `[costs]` family when absent.
    pub families: Option<Vec<CostFamily>>,
    pub reference: Reference,
    pub epsilon: f64,
    pub tail_threshold: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            n: vec![10, 100, 1000],
            families: None,
            reference: Reference::Limit,
            epsilon: 0.05,
            tail_threshold: collision_game::tolerance::POISSON_TAIL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub costs: Option<CostsConfig>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub equilibria: EquilibriaConfig,
    #[serde(default)]
    pub limit: LimitConfig,
    #[serde(default)]
    pub distance: DistanceConfig,
    #[serde(default)]
    pub simulate: SimulateConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).map_err(|e| e.context(format!("in config {}", path.display())))
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        toml::from_str(text).map_err(|e| anyhow!("{}", e.to_string().trim_end()))
    }

    pub fn family(&self) -> anyhow::Result<&CostFamily> {
        self.costs
            .as_ref()
            .map(|c| &c.family)
            .ok_or_else(|| anyhow!("costs: section is required for this command"))
    }

    /// The cost profile of the single game named by `[costs]`.
    pub fn game(&self) -> anyhow::Result<CostProfile> {
        let costs = self
            .costs
            .as_ref()
            .ok_or_else(|| anyhow!("costs: section is required for this command"))?;
        let n = match (&costs.family, costs.n) {
            (_, Some(n)) => n,
            (CostFamily::Explicit { costs }, None) => costs.len(),
            _ => bail!("costs.n: required for this family"),
        };
        costs.family.costs(n).map_err(|e| anyhow!("costs: {e}"))
    }
}

pub fn check_grid(field: &str, grid: &[usize]) -> anyhow::Result<()> {
    if grid.is_empty() {
        bail!("{field}: must not be empty");
    }
    if grid[0] < 2 {
        bail!("{field}: player counts must be at least 2");
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        bail!("{field}: must be strictly increasing");
    }
    Ok(())
}

/// Every point of `grid` yields a valid cost profile.
pub fn check_family_on_grid(
    field: &str,
    family: &CostFamily,
    grid: &[usize],
) -> anyhow::Result<()> {
    for &n in grid {
        family
            .costs(n)
            .map_err(|e| anyhow!("{field}: n = {n}: {e}"))?;
    }
    Ok(())
}

pub fn check_positive(field: &str, value: f64) -> anyhow::Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        bail!("{field}: must be positive, got {value}")
    }
}

pub fn check_reference(field: &str, reference: &Reference) -> anyhow::Result<()> {
    if let Reference::Mixture { lambda, bernoullis } = reference {
        MixtureLimit::new(*lambda, bernoullis.clone()).map_err(|e| anyhow!("{field}: {e}"))?;
    }
    Ok(())
}
