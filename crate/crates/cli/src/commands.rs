//! The subcommands. Each builds a typed result document; mathematical
//! outcomes such as a missing equilibrium are recorded as data.

use anyhow::{anyhow, bail};
use collision_game::asymptotics::{
    arrival_mean_sequence, example_limit, homogeneous_limit, limit_recipe, ConvergenceDiagnostics,
    LimitRecipe,
};
use collision_game::distribution::{
    mixture_pmf, poisson_binomial, poisson_pmf, variational_distance, Distance, MixtureLimit, Pmf,
};
use collision_game::equilibrium::{
    enumerate_equilibria, fmne, mixed_equilibrium, pure_equilibria, verify_equilibrium,
    EquilibriumReport, ENUMERATION_LIMIT,
};
use collision_game::game::{CostFamily, CostProfile, StrategyProfile};
use collision_game::montecarlo::{empirical_distance, simulate, SimulationReport};
use serde::{Deserialize, Serialize};

use crate::config::{
    check_family_on_grid, check_grid, check_positive, check_reference, Reference, RunConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Pure,
    Mixed,
    FullyMixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumRecord {
    pub role: Role,
    /// Whether the profile passes verification at the configured tolerance;
    /// absent when no profile exists.
    pub verified: Option<bool>,
    pub report: EquilibriumReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriaResult {
    pub costs: Vec<f64>,
    pub tolerance: f64,
    pub enumerated: bool,
    pub equilibria: Vec<EquilibriumRecord>,
}

/// A limit law together with the operation that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitLaw {
    pub source: String,
    pub mixture: MixtureLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitResult {
    pub family: CostFamily,
    pub limit: Option<LimitLaw>,
    pub limit_error: Option<String>,
    pub recipe: Option<LimitRecipe>,
    pub recipe_error: Option<String>,
    pub diagnostics: ConvergenceDiagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceRow {
    pub n: usize,
    pub fmne_exists: bool,
    pub m_n: Option<f64>,
    pub d_v: Option<f64>,
    pub uncertainty: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceResult {
    pub family: CostFamily,
    pub reference: Reference,
    pub reference_law: Option<LimitLaw>,
    pub reference_error: Option<String>,
    pub rows: Vec<DistanceRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceRecord {
    pub reference: Reference,
    pub reference_law: Option<LimitLaw>,
    pub value: f64,
    pub uncertainty: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateResult {
    pub costs: Vec<f64>,
    /// `fmne` or `config`.
    pub strategy_source: String,
    pub strategy: StrategyProfile,
    pub report: SimulationReport,
    pub distance: Option<DistanceRecord>,
    pub reference_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCase {
    pub case: usize,
    pub family: CostFamily,
    pub reference_law: Option<LimitLaw>,
    pub reference_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub case: usize,
    pub n: usize,
    pub metric: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub reference: Reference,
    pub cases: Vec<SweepCase>,
    pub rows: Vec<SweepRow>,
}

pub fn validate_equilibria(cfg: &RunConfig) -> anyhow::Result<()> {
    let costs = cfg.game()?;
    let n = costs.len();
    check_positive("equilibria.tolerance", cfg.equilibria.tolerance)?;
    if let Some(supports) = &cfg.equilibria.supports {
        for (k, s) in supports.iter().enumerate() {
            mixed_equilibrium(&costs, s).map_err(|e| anyhow!("equilibria.supports[{k}]: {e}"))?;
        }
    }
    if cfg.equilibria.enumerate == Some(true) && n > ENUMERATION_LIMIT {
        bail!("equilibria.enumerate: n = {n} exceeds the enumeration limit {ENUMERATION_LIMIT}");
    }
    Ok(())
}

pub fn equilibria(cfg: &RunConfig) -> anyhow::Result<EquilibriaResult> {
    let costs = cfg.game()?;
    let n = costs.len();
    let tol = cfg.equilibria.tolerance;
    let verified = |r: &EquilibriumReport| -> anyhow::Result<Option<bool>> {
        match (&r.profile, r.exists) {
            (Some(p), true) => Ok(Some(verify_equilibrium(p, &costs, tol)?.exists)),
            _ => Ok(None),
        }
    };
    let mut out = Vec::new();
    for p in pure_equilibria(&costs) {
        let report = verify_equilibrium(&p, &costs, tol)?;
        out.push(EquilibriumRecord {
            role: Role::Pure,
            verified: Some(report.exists),
            report,
        });
    }
    let enumerate = cfg.equilibria.supports.is_none()
        && cfg.equilibria.enumerate.unwrap_or(n <= ENUMERATION_LIMIT);
    let mixed: Vec<EquilibriumReport> = if let Some(supports) = &cfg.equilibria.supports {
        supports
            .iter()
            .map(|s| mixed_equilibrium(&costs, s))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .filter(|r| r.support.len() != n)
            .collect()
    } else if enumerate {
        enumerate_equilibria(&costs)?
            .into_iter()
            .filter(|r| r.support.len() >= 2 && r.support.len() < n)
            .collect()
    } else {
        Vec::new()
    };
    for report in mixed {
        out.push(EquilibriumRecord {
            role: Role::Mixed,
            verified: verified(&report)?,
            report,
        });
    }
    let full = fmne(&costs)?;
    out.push(EquilibriumRecord {
        role: Role::FullyMixed,
        verified: verified(&full)?,
        report: full,
    });
    Ok(EquilibriaResult {
        costs: costs.costs().to_vec(),
        tolerance: tol,
        enumerated: enumerate,
        equilibria: out,
    })
}

/// The closed-form limit where one is known, else the recipe at `n`.
fn limit_law(family: &CostFamily, epsilon: f64, n: usize) -> Result<LimitLaw, String> {
    let law = |source: &str, m: collision_game::Result<MixtureLimit>| {
        m.map(|mixture| LimitLaw {
            source: source.to_string(),
            mixture,
        })
        .map_err(|e| e.to_string())
    };
    match family {
        CostFamily::Homogeneous { c } => law("homogeneous_limit", homogeneous_limit(*c)),
        CostFamily::ExampleFamily { m } => law("example_limit", example_limit(m)),
        _ => law(
            "limit_recipe",
            limit_recipe(family, epsilon, n).map(|r| r.mixture()),
        ),
    }
}

fn has_closed_form(family: &CostFamily) -> bool {
    matches!(
        family,
        CostFamily::Homogeneous { .. } | CostFamily::ExampleFamily { .. }
    )
}

pub fn validate_limit(cfg: &RunConfig) -> anyhow::Result<()> {
    let family = cfg.family()?;
    check_grid("limit.grid", &cfg.limit.grid)?;
    check_family_on_grid("costs", family, &cfg.limit.grid)?;
    check_positive("limit.epsilon", cfg.limit.epsilon)?;
    if let Some(n) = cfg.limit.recipe_n {
        check_grid("limit.recipe_n", &[n])?;
        check_family_on_grid("costs", family, &[n])?;
    }
    Ok(())
}

pub fn limit(cfg: &RunConfig) -> anyhow::Result<LimitResult> {
    let family = cfg.family()?;
    let diagnostics = arrival_mean_sequence(family, &cfg.limit.grid)?;
    let (limit, limit_error) = if has_closed_form(family) {
        match limit_law(family, cfg.limit.epsilon, 0) {
            Ok(l) => (Some(l), None),
            Err(e) => (None, Some(e)),
        }
    } else {
        (None, None)
    };
    let (recipe, recipe_error) = if cfg.limit.recipe || !has_closed_form(family) {
        let n = cfg
            .limit
            .recipe_n
            .unwrap_or(*cfg.limit.grid.last().expect("validated grid"));
        match limit_recipe(family, cfg.limit.epsilon, n) {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e.to_string())),
        }
    } else {
        (None, None)
    };
    Ok(LimitResult {
        family: family.clone(),
        limit,
        limit_error,
        recipe,
        recipe_error,
        diagnostics,
    })
}

/// The comparison law of a [`Reference`], fixed across player counts where
/// possible.
enum Resolved {
    Fixed(Pmf),
    PoissonMean,
    Exact,
    Missing,
}

fn resolve(
    reference: &Reference,
    family: &CostFamily,
    epsilon: f64,
    n: usize,
    tail: f64,
) -> anyhow::Result<(Resolved, Option<LimitLaw>, Option<String>)> {
    Ok(match reference {
        Reference::Limit => match limit_law(family, epsilon, n) {
            Ok(law) => (
                Resolved::Fixed(mixture_pmf(&law.mixture, tail)?),
                Some(law),
                None,
            ),
            Err(e) => (Resolved::Missing, None, Some(e)),
        },
        Reference::Mixture { lambda, bernoullis } => {
            let mixture = MixtureLimit::new(*lambda, bernoullis.clone())?;
            let law = LimitLaw {
                source: "config".to_string(),
                mixture,
            };
            (
                Resolved::Fixed(mixture_pmf(&law.mixture, tail)?),
                Some(law),
                None,
            )
        }
        Reference::PoissonMean => (Resolved::PoissonMean, None, None),
        Reference::Exact => (Resolved::Exact, None, None),
    })
}

fn compare(
    exact: &Pmf,
    mean: f64,
    resolved: &Resolved,
    tail: f64,
) -> anyhow::Result<Option<Distance>> {
    Ok(match resolved {
        Resolved::Fixed(pmf) => Some(variational_distance(exact, pmf)),
        Resolved::PoissonMean => Some(variational_distance(exact, &poisson_pmf(mean, tail)?)),
        Resolved::Exact => Some(variational_distance(exact, exact)),
        Resolved::Missing => None,
    })
}

/// The FMNE and the exact law of its arrival count, if the FMNE exists.
fn fmne_law(costs: &CostProfile) -> anyhow::Result<Option<(StrategyProfile, Pmf)>> {
    let eq = fmne(costs)?;
    match eq.profile {
        Some(p) if eq.exists => {
            let pmf = poisson_binomial(p.probs())?;
            Ok(Some((p, pmf)))
        }
        _ => Ok(None),
    }
}

pub fn validate_distance(cfg: &RunConfig) -> anyhow::Result<()> {
    let family = cfg.family()?;
    let d = &cfg.distance;
    check_grid("distance.grid", &d.grid)?;
    check_family_on_grid("costs", family, &d.grid)?;
    check_positive("distance.epsilon", d.epsilon)?;
    check_positive("distance.tail_threshold", d.tail_threshold)?;
    check_reference("distance.reference", &d.reference)
}

pub fn distance(cfg: &RunConfig) -> anyhow::Result<DistanceResult> {
    let family = cfg.family()?;
    let d = &cfg.distance;
    let n_max = *d.grid.last().expect("validated grid");
    let (resolved, reference_law, reference_error) =
        resolve(&d.reference, family, d.epsilon, n_max, d.tail_threshold)?;
    let mut rows = Vec::with_capacity(d.grid.len());
    for &n in &d.grid {
        let costs = family.costs(n)?;
        let row = match fmne_law(&costs)? {
            Some((p, pmf)) => {
                let m = p.mean_arrivals();
                let dist = compare(&pmf, m, &resolved, d.tail_threshold)?;
                DistanceRow {
                    n,
                    fmne_exists: true,
                    m_n: Some(m),
                    d_v: dist.map(|x| x.value),
                    uncertainty: dist.map(|x| x.uncertainty),
                }
            }
            None => DistanceRow {
                n,
                fmne_exists: false,
                m_n: None,
                d_v: None,
                uncertainty: None,
            },
        };
        rows.push(row);
    }
    Ok(DistanceResult {
        family: family.clone(),
        reference: d.reference.clone(),
        reference_law,
        reference_error,
        rows,
    })
}

pub fn validate_simulate(cfg: &RunConfig) -> anyhow::Result<()> {
    let costs = cfg.game()?;
    let s = &cfg.simulate;
    if cfg.seed.is_none() {
        bail!("seed: required for simulate (set `seed` in the config or pass --seed)");
    }
    match s.trials {
        None => bail!("simulate.trials: required (set it in the config or pass --trials)"),
        Some(0) => bail!("simulate.trials: must be at least 1"),
        Some(_) => {}
    }
    if let Some(probs) = &s.probs {
        let p = StrategyProfile::new(probs.clone()).map_err(|e| anyhow!("simulate.probs: {e}"))?;
        if p.len() != costs.len() {
            bail!(
                "simulate.probs: {} probabilities for {} players",
                p.len(),
                costs.len()
            );
        }
    } else if fmne_law(&costs)?.is_none() {
        bail!("simulate.probs: required because the FMNE does not exist for these costs");
    }
    check_positive("simulate.epsilon", s.epsilon)?;
    check_positive("simulate.tail_threshold", s.tail_threshold)?;
    if let Some(r) = &s.reference {
        check_reference("simulate.reference", r)?;
    }
    Ok(())
}

pub fn simulate_cmd(cfg: &RunConfig) -> anyhow::Result<SimulateResult> {
    let costs = cfg.game()?;
    let s = &cfg.simulate;
    let (strategy, source) = match &s.probs {
        Some(p) => (StrategyProfile::new(p.clone())?, "config"),
        None => (
            fmne_law(&costs)?.ok_or_else(|| anyhow!("FMNE missing"))?.0,
            "fmne",
        ),
    };
    let seed = cfg.seed.expect("validated seed");
    let report = simulate(&strategy, &costs, s.trials.expect("validated trials"), seed)?;
    let (distance, reference_error) = match &s.reference {
        None => (None, None),
        Some(reference) => {
            let family = cfg.family()?;
            let (resolved, law, err) =
                resolve(reference, family, s.epsilon, costs.len(), s.tail_threshold)?;
            let resolved = match resolved {
                Resolved::Exact => Resolved::Fixed(poisson_binomial(strategy.probs())?),
                Resolved::PoissonMean => {
                    Resolved::Fixed(poisson_pmf(strategy.mean_arrivals(), s.tail_threshold)?)
                }
                other => other,
            };
            let record = match resolved {
                Resolved::Fixed(pmf) => {
                    let d = empirical_distance(&report, &pmf);
                    Some(DistanceRecord {
                        reference: reference.clone(),
                        reference_law: law,
                        value: d.value,
                        uncertainty: d.uncertainty,
                    })
                }
                _ => None,
            };
            (record, err)
        }
    };
    Ok(SimulateResult {
        costs: costs.costs().to_vec(),
        strategy_source: source.to_string(),
        strategy,
        report,
        distance,
        reference_error,
    })
}

fn sweep_families(cfg: &RunConfig) -> anyhow::Result<Vec<CostFamily>> {
    match &cfg.sweep.families {
        Some(f) if f.is_empty() => bail!("sweep.families: must not be empty"),
        Some(f) => Ok(f.clone()),
        None => Ok(vec![cfg
            .family()
            .map_err(|_| anyhow!("sweep.families: required when there is no [costs] section"))?
            .clone()]),
    }
}

pub fn validate_sweep(cfg: &RunConfig) -> anyhow::Result<()> {
    let s = &cfg.sweep;
    check_grid("sweep.n", &s.n)?;
    for (k, family) in sweep_families(cfg)?.iter().enumerate() {
        check_family_on_grid(&format!("sweep.families[{k}]"), family, &s.n)?;
    }
    check_positive("sweep.epsilon", s.epsilon)?;
    check_positive("sweep.tail_threshold", s.tail_threshold)?;
    check_reference("sweep.reference", &s.reference)
}

pub fn sweep(cfg: &RunConfig) -> anyhow::Result<SweepResult> {
    let s = &cfg.sweep;
    let n_max = *s.n.last().expect("validated grid");
    let mut cases = Vec::new();
    let mut rows = Vec::new();
    for (case, family) in sweep_families(cfg)?.into_iter().enumerate() {
        let (resolved, reference_law, reference_error) =
            resolve(&s.reference, &family, s.epsilon, n_max, s.tail_threshold)?;
        let diag = arrival_mean_sequence(&family, &s.n)?;
        for point in &diag.rows {
            let n = point.n;
            let mut push = |metric: &str, value: Option<f64>| {
                if let Some(value) = value {
                    rows.push(SweepRow {
                        case,
                        n,
                        metric: metric.to_string(),
                        value,
                    });
                }
            };
            push("fmne_exists", Some(f64::from(u8::from(point.fmne_exists))));
            push("gamma_n", point.gamma_n);
            push("geo_n", point.geo_n);
            push("a_min", point.a_min);
            if let Some((p, pmf)) = fmne_law(&family.costs(n)?)? {
                let m = p.mean_arrivals();
                push("m_n", Some(m));
                push("throughput", Some(pmf.get(1)));
                push(
                    "collision_rate",
                    Some((1.0 - pmf.get(0) - pmf.get(1)).max(0.0)),
                );
                if let Some(d) = compare(&pmf, m, &resolved, s.tail_threshold)? {
                    push("d_v", Some(d.value));
                    push("d_v_uncertainty", Some(d.uncertainty));
                }
            }
        }
        cases.push(SweepCase {
            case,
            family,
            reference_law,
            reference_error,
        });
    }
    Ok(SweepResult {
        reference: s.reference.clone(),
        cases,
        rows,
    })
}
