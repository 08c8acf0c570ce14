//! Rendering result documents as JSON or CSV, and the `--schema` text.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::commands::{DistanceResult, EquilibriaResult, LimitResult, SimulateResult, SweepResult};
use crate::config::Format;
use crate::Command;

pub const SCHEMA_VERSION: u32 = 1;

/// Envelope of every JSON output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document<T> {
    pub schema_version: u32,
    pub command: String,
    pub result: T,
}

impl<T> Document<T> {
    pub fn new(command: Command, result: T) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.name().to_string(),
            result,
        }
    }
}

pub struct Table {
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<String>>,
}

pub const EQUILIBRIA_HEADER: &[&str] = &[
    "role",
    "support",
    "exists",
    "verified",
    "boundary",
    "gamma",
    "max_deviation_gain",
    "probs",
    "violations",
];
pub const LIMIT_HEADER: &[&str] = &[
    "row",
    "n",
    "fmne_exists",
    "m_n",
    "gamma_n",
    "geo_n",
    "a_min",
    "geo_gap",
    "lambda",
    "k",
    "bernoullis",
    "mean",
    "alpha_estimate",
    "verdict",
    "note",
];
pub const DISTANCE_HEADER: &[&str] = &["n", "fmne_exists", "m_n", "d_v", "uncertainty"];
pub const SIMULATE_HEADER: &[&str] = &["field", "index", "value"];
pub const SWEEP_HEADER: &[&str] = &["case", "family", "n", "metric", "value"];

/// Shortest round-trip representation, as written in the JSON output.
fn num(x: f64) -> String {
    serde_json::to_string(&x).expect("f64 always serializes")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn join<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(" ")
}

fn snake<T: Serialize>(value: &T) -> String {
    serde_json::to_value(value)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

pub fn equilibria_table(r: &EquilibriaResult) -> Table {
    let rows = r
        .equilibria
        .iter()
        .map(|e| {
            let rep = &e.report;
            vec![
                snake(&e.role),
                join(&rep.support, |i| i.to_string()),
                rep.exists.to_string(),
                e.verified.map(|v| v.to_string()).unwrap_or_default(),
                rep.boundary().to_string(),
                opt(rep.gamma),
                opt(rep.max_deviation_gain),
                rep.profile
                    .as_ref()
                    .map(|p| join(p.probs(), |x| num(*x)))
                    .unwrap_or_default(),
                join(&rep.violations, |v| {
                    format!("{}:{}:{}", v.player, snake(&v.kind), num(v.margin))
                }),
            ]
        })
        .collect();
    Table {
        header: EQUILIBRIA_HEADER,
        rows,
    }
}

pub fn limit_table(r: &LimitResult) -> Table {
    let blank = || vec![String::new(); LIMIT_HEADER.len()];
    let mut rows = Vec::new();
    if let Some(l) = &r.limit {
        let mut row = blank();
        row[0] = "limit".into();
        row[8] = num(l.mixture.lambda());
        row[9] = l.mixture.k().to_string();
        row[10] = join(l.mixture.bernoullis(), |x| num(*x));
        row[11] = num(l.mixture.mean());
        row[14] = l.source.clone();
        rows.push(row);
    } else if let Some(e) = &r.limit_error {
        let mut row = blank();
        row[0] = "limit".into();
        row[14] = e.clone();
        rows.push(row);
    }
    if let Some(rec) = &r.recipe {
        let mut row = blank();
        row[0] = "recipe".into();
        row[1] = rec.n.to_string();
        row[8] = num(rec.lambda);
        row[9] = rec.k.to_string();
        row[10] = join(&rec.bernoullis, |x| num(*x));
        row[11] = num(rec.m_estimate);
        row[12] = num(rec.alpha_estimate);
        row[7] = num(rec.alpha_gap);
        row[14] = rec.warnings.join("; ");
        rows.push(row);
    } else if let Some(e) = &r.recipe_error {
        let mut row = blank();
        row[0] = "recipe".into();
        row[14] = e.clone();
        rows.push(row);
    }
    for p in &r.diagnostics.rows {
        let mut row = blank();
        row[0] = "grid".into();
        row[1] = p.n.to_string();
        row[2] = p.fmne_exists.to_string();
        row[3] = opt(p.m_n);
        row[4] = opt(p.gamma_n);
        row[5] = opt(p.geo_n);
        row[6] = opt(p.a_min);
        row[7] = opt(p.geo_gap());
        row[14] = p.error.clone().unwrap_or_default();
        rows.push(row);
    }
    let mut row = blank();
    row[0] = "verdict".into();
    row[12] = opt(r.diagnostics.alpha_estimate);
    row[13] = snake(&r.diagnostics.verdict);
    rows.push(row);
    Table {
        header: LIMIT_HEADER,
        rows,
    }
}

pub fn distance_table(r: &DistanceResult) -> Table {
    let rows = r
        .rows
        .iter()
        .map(|d| {
            vec![
                d.n.to_string(),
                d.fmne_exists.to_string(),
                opt(d.m_n),
                opt(d.d_v),
                opt(d.uncertainty),
            ]
        })
        .collect();
    Table {
        header: DISTANCE_HEADER,
        rows,
    }
}

pub fn simulate_table(r: &SimulateResult) -> Table {
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut scalar =
        |field: &str, value: String| rows.push(vec![field.into(), String::new(), value]);
    let rep = &r.report;
    scalar("trials", rep.trials.to_string());
    scalar("seed", rep.seed.to_string());
    scalar("rng_id", rep.rng_id.clone());
    scalar("strategy_source", r.strategy_source.clone());
    scalar("idle_count", rep.idle_count.to_string());
    scalar("success_count", rep.success_count.to_string());
    scalar("collision_count", rep.collision_count.to_string());
    scalar("throughput", num(rep.throughput));
    scalar("collision_rate", num(rep.collision_rate));
    scalar("idle_rate", num(rep.idle_rate));
    scalar("mean_arrivals", num(rep.mean_arrivals()));
    if let Some(d) = &r.distance {
        scalar("d_v", num(d.value));
        scalar("d_v_uncertainty", num(d.uncertainty));
    }
    let mut indexed = |field: &str, values: Vec<String>| {
        for (i, v) in values.into_iter().enumerate() {
            rows.push(vec![field.into(), i.to_string(), v]);
        }
    };
    indexed("prob", r.strategy.probs().iter().map(|x| num(*x)).collect());
    indexed(
        "arrival_count",
        rep.arrival_counts.iter().map(u64::to_string).collect(),
    );
    indexed(
        "pmf",
        rep.empirical_pmf.mass().iter().map(|x| num(*x)).collect(),
    );
    indexed(
        "mean_utility",
        rep.mean_utility.iter().map(|x| num(*x)).collect(),
    );
    Table {
        header: SIMULATE_HEADER,
        rows,
    }
}

pub fn sweep_table(r: &SweepResult) -> Table {
    let labels: Vec<String> = r
        .cases
        .iter()
        .map(|c| serde_json::to_string(&c.family).unwrap_or_default())
        .collect();
    let rows = r
        .rows
        .iter()
        .map(|row| {
            vec![
                row.case.to_string(),
                labels[row.case].clone(),
                row.n.to_string(),
                row.metric.clone(),
                num(row.value),
            ]
        })
        .collect();
    Table {
        header: SWEEP_HEADER,
        rows,
    }
}

fn sink(out: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn write<T: Serialize>(
    doc: &Document<T>,
    table: impl FnOnce(&T) -> Table,
    format: Format,
    out: Option<&Path>,
) -> anyhow::Result<()> {
    let mut w = sink(out)?;
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, doc)?;
            writeln!(w)?;
        }
        Format::Csv => {
            let t = table(&doc.result);
            let mut csv = csv::Writer::from_writer(&mut w);
            csv.write_record(t.header)?;
            for row in &t.rows {
                csv.write_record(row)?;
            }
            csv.flush()?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn schema(command: Command) -> String {
    let (json, header, notes) = match command {
        Command::Equilibria => (
            "result.costs, result.tolerance, result.enumerated, result.equilibria[]: \
             {role, verified, report: {support, profile, exists, violations[], gamma, max_deviation_gain}}",
            EQUILIBRIA_HEADER,
            "One row per reported profile: pure equilibria, mixed equilibria on proper supports \
             (requested or enumerated), then the fully-mixed record, which is always present. \
             Player indices are 0-based; list cells are space-separated; violations are \
             player:kind:margin.",
        ),
        Command::Limit => (
            "result.family, result.limit {source, mixture}, result.limit_error, result.recipe, \
             result.recipe_error, result.diagnostics {rows[], alpha_estimate, verdict}",
            LIMIT_HEADER,
            "Row kinds: limit (closed form; k counts its Bernoulli terms; note names the source), recipe (n is the estimation \
             point, k the first player folded into the Poisson term, geo_gap is |Geo_n - a_min|, mean is m_n, note lists warnings), grid (one per \
             n), verdict (converges | diverges | inconclusive).",
        ),
        Command::Distance => (
            "result.family, result.reference, result.reference_law, result.reference_error, \
             result.rows[]: {n, fmne_exists, m_n, d_v, uncertainty}",
            DISTANCE_HEADER,
            "d_v is sum_k |f(k) - g(k)| (range [0, 2]) between the exact FMNE arrival law and the \
             reference; uncertainty bounds the truncated tails. Empty cells where the FMNE or \
             reference is missing.",
        ),
        Command::Simulate => (
            "result.costs, result.strategy_source, result.strategy, result.report {trials, \
             arrival_counts, empirical_pmf, idle_count, success_count, collision_count, \
             throughput, collision_rate, idle_rate, mean_utility, seed, rng_id}, result.distance, \
             result.reference_error",
            SIMULATE_HEADER,
            "Long format. Scalar fields leave index empty; prob, arrival_count, pmf and \
             mean_utility are indexed by player or arrival count.",
        ),
        Command::Sweep => (
            "result.reference, result.cases[]: {case, family, reference_law, reference_error}, \
             result.rows[]: {case, n, metric, value}",
            SWEEP_HEADER,
            "Long format over families x n. Metrics: fmne_exists (0/1), gamma_n, geo_n, a_min, \
             and when the FMNE exists m_n, throughput, collision_rate, d_v, d_v_uncertainty. \
             family is the case's cost family as JSON.",
        ),
    };
    format!(
        "{name} (schema_version {SCHEMA_VERSION})\n\nJSON: {{schema_version, command, result}}\n  {json}\n\nCSV columns: {}\n  {notes}\n",
        header.join(","),
        name = command.name(),
    )
}
