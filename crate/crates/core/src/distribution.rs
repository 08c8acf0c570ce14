//! Finite-support distribution algebra on the nonnegative integers.
//!
//! Distances follow the convention `d_V(f, g) = sum_k |f(k) - g(k)|`,
//! without the factor 1/2, so they lie in `[0, 2]`.

use serde::{Deserialize, Serialize};

use crate::tolerance;
use crate::{Error, Result};

/// A probability mass function on `0..mass.len()`, plus a bound on the
/// probability that falls beyond the stored range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPmf")]
pub struct Pmf {
    mass: Vec<f64>,
    tail: f64,
}

#[derive(Deserialize)]
struct RawPmf {
    mass: Vec<f64>,
    tail: f64,
}

impl TryFrom<RawPmf> for Pmf {
    type Error = Error;

    fn try_from(raw: RawPmf) -> Result<Self> {
        Pmf::new(raw.mass, raw.tail)
    }
}

impl Pmf {
    pub fn new(mass: Vec<f64>, tail: f64) -> Result<Self> {
        if mass.is_empty() {
            return Err(Error::InvalidPmf("no mass entries".into()));
        }
        if let Some((k, m)) = mass
            .iter()
            .enumerate()
            .find(|(_, m)| !(m.is_finite() && **m >= 0.0))
        {
            return Err(Error::InvalidPmf(format!("mass[{k}] = {m}")));
        }
        if !(tail.is_finite() && tail >= 0.0) {
            return Err(Error::InvalidPmf(format!("tail bound {tail}")));
        }
        let total: f64 = mass.iter().sum::<f64>() + tail;
        if (total - 1.0).abs() > tolerance::PMF_NORMALIZATION {
            return Err(Error::InvalidPmf(format!("total mass {total}")));
        }
        Ok(Self { mass, tail })
    }

    pub fn point_mass(k: usize) -> Self {
        let mut mass = vec![0.0; k + 1];
        mass[k] = 1.0;
        Self { mass, tail: 0.0 }
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        check_probability(0, p)?;
        Ok(Self {
            mass: vec![1.0 - p, p],
            tail: 0.0,
        })
    }

    /// Empirical pmf of a histogram; masses are exact multiples of
    /// `1 / total`.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::InvalidPmf("empty histogram".into()));
        }
        let t = total as f64;
        Ok(Self {
            mass: counts.iter().map(|&c| c as f64 / t).collect(),
            tail: 0.0,
        })
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// `P(X = k)`, zero beyond the stored range.
    pub fn get(&self, k: usize) -> f64 {
        self.mass.get(k).copied().unwrap_or(0.0)
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }

    /// Largest stored value `K_max`.
    pub fn max_value(&self) -> usize {
        self.mass.len() - 1
    }

    pub fn mean(&self) -> f64 {
        self.mass
            .iter()
            .enumerate()
            .map(|(k, m)| k as f64 * m)
            .sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.mass
            .iter()
            .enumerate()
            .map(|(k, m)| (k as f64 - mean).powi(2) * m)
            .sum()
    }
}

fn check_probability(index: usize, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidProbability { index, value: p })
    }
}

/// Poisson mean plus independent Bernoulli terms: the law of
/// `Po(lambda) + Bern(p_1) + ... + Bern(p_K)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMixture")]
pub struct MixtureLimit {
    lambda: f64,
    bernoullis: Vec<f64>,
}

#[derive(Deserialize)]
struct RawMixture {
    lambda: f64,
    bernoullis: Vec<f64>,
}

impl TryFrom<RawMixture> for MixtureLimit {
    type Error = Error;

    fn try_from(raw: RawMixture) -> Result<Self> {
        MixtureLimit::new(raw.lambda, raw.bernoullis)
    }
}

impl MixtureLimit {
    pub fn new(lambda: f64, bernoullis: Vec<f64>) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::InvalidLambda(lambda));
        }
        for (i, &p) in bernoullis.iter().enumerate() {
            check_probability(i, p)?;
        }
        Ok(Self { lambda, bernoullis })
    }

    pub fn poisson(lambda: f64) -> Result<Self> {
        Self::new(lambda, Vec::new())
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn bernoullis(&self) -> &[f64] {
        &self.bernoullis
    }

    /// Number of Bernoulli terms.
    pub fn k(&self) -> usize {
        self.bernoullis.len()
    }

    pub fn mean(&self) -> f64 {
        self.lambda + self.bernoullis.iter().sum::<f64>()
    }
}

/// Exact law of a sum of independent Bernoulli variables, by the
/// `O(n^2)` convolution recurrence.
pub fn poisson_binomial(probs: &[f64]) -> Result<Pmf> {
    for (i, &p) in probs.iter().enumerate() {
        check_probability(i, p)?;
    }
    let mut mass = Vec::with_capacity(probs.len() + 1);
    mass.push(1.0);
    for &p in probs {
        mass.push(0.0);
        for k in (1..mass.len()).rev() {
            mass[k] = mass[k] * (1.0 - p) + mass[k - 1] * p;
        }
        mass[0] *= 1.0 - p;
    }
    Ok(Pmf { mass, tail: 0.0 })
}

/// Poisson pmf truncated at the first `K` whose remaining tail is provably
/// below `tail_threshold`.
///
/// Masses are accumulated in log space so large means do not underflow at
/// `k = 0`. The recorded tail uses the geometric bound
/// `P(X > K) <= P(X = K + 1) / (1 - lambda / (K + 2))`, valid once
/// `K + 2 > lambda`.
pub fn poisson_pmf(lambda: f64, tail_threshold: f64) -> Result<Pmf> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidLambda(lambda));
    }
    if tail_threshold.is_nan() || tail_threshold <= 0.0 {
        return Err(Error::NonPositiveParameter {
            name: "tail_threshold",
            value: tail_threshold,
        });
    }
    if lambda == 0.0 {
        return Ok(Pmf::point_mass(0));
    }
    let ln_lambda = lambda.ln();
    let mut log_mass = -lambda;
    let mut mass = vec![log_mass.exp()];
    loop {
        let k = mass.len() - 1;
        let next = (log_mass + ln_lambda - ((k + 1) as f64).ln()).exp();
        let ratio = lambda / (k + 2) as f64;
        if ratio < 1.0 {
            let bound = next / (1.0 - ratio);
            if bound < tail_threshold {
                return Ok(Pmf { mass, tail: bound });
            }
        }
        log_mass += ln_lambda - ((k + 1) as f64).ln();
        mass.push(log_mass.exp());
    }
}

/// Law of the sum of two independent variables. Tail bounds add.
pub fn convolve(f: &Pmf, g: &Pmf) -> Pmf {
    let mut mass = vec![0.0; f.mass.len() + g.mass.len() - 1];
    for (i, &fi) in f.mass.iter().enumerate() {
        if fi == 0.0 {
            continue;
        }
        for (j, &gj) in g.mass.iter().enumerate() {
            mass[i + j] += fi * gj;
        }
    }
    Pmf {
        mass,
        tail: f.tail + g.tail,
    }
}

pub fn mixture_pmf(m: &MixtureLimit, tail_threshold: f64) -> Result<Pmf> {
    let poisson = poisson_pmf(m.lambda, tail_threshold)?;
    let bernoulli = poisson_binomial(&m.bernoullis)?;
    Ok(convolve(&poisson, &bernoulli))
}

/// A distance together with the additive uncertainty coming from the
/// truncated tails of its two arguments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Distance {
    pub value: f64,
    pub uncertainty: f64,
}

/// `sum_k |f(k) - g(k)|` over the stored ranges, at most 2.
pub fn variational_distance(f: &Pmf, g: &Pmf) -> Distance {
    let len = f.mass.len().max(g.mass.len());
    let value: f64 = (0..len).map(|k| (f.get(k) - g.get(k)).abs()).sum();
    Distance {
        value: value.min(2.0),
        uncertainty: f.tail + g.tail,
    }
}
