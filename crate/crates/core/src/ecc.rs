//! Ensemble copula coupling.
//!
//! Given a raw ensemble of `M` members over `L` margins, ECC
//! 1. records the rank template `σ_ℓ(m) = rk(x_m^ℓ)` of the raw ensemble,
//! 2. draws `M` sorted samples `x̃_(1) ≤ … ≤ x̃_(M)` from each postprocessed
//!    predictive margin, and
//! 3. reorders them as `x̂_m^ℓ = x̃_(σ_ℓ(m))^ℓ`.
//!
//! The output has the postprocessed margins and the raw ensemble's empirical
//! copula. Nothing here allocates more than `O(M · L)`; in particular no
//! copula grid is ever materialized.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::empirical::{rank_values, TiePolicy};
use crate::error::{Error, Result};
use crate::normal::{standard_normal_cdf, standard_normal_quantile};
use crate::stochastic::RankMatrix;

/// Random-draw sampling for margin `ℓ` uses stream `SAMPLING_STREAM_BASE + ℓ`,
/// disjoint from the tie-breaking streams `0..L`.
pub const SAMPLING_STREAM_BASE: u64 = 1 << 32;

/// One forecast coordinate: a (variable, location, lead time) triple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MarginId {
    pub variable: String,
    pub location: String,
    pub lead_time: String,
}

impl MarginId {
    pub fn new(variable: impl Into<String>, location: impl Into<String>, lead_time: impl Into<String>) -> Self {
        MarginId {
            variable: variable.into(),
            location: location.into(),
            lead_time: lead_time.into(),
        }
    }

    /// Placeholder id for margin `index` of an anonymous dataset.
    pub fn indexed(index: usize) -> Self {
        MarginId::new("x", index.to_string(), "0")
    }
}

impl fmt::Display for MarginId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.variable, self.location, self.lead_time)
    }
}

/// `M` members × `L` margins of real-valued forecasts.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleDataset {
    margins: Vec<MarginId>,
    members: usize,
    // margin-major: values[ℓ * members + m]
    values: Vec<f64>,
}

impl EnsembleDataset {
    /// `columns[ℓ]` holds the `M` member values of margin `ℓ`.
    pub fn new(margins: Vec<MarginId>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if margins.len() != columns.len() {
            return Err(Error::DimensionMismatch {
                expected: margins.len(),
                found: columns.len(),
            });
        }
        let members = columns.first().map_or(0, Vec::len);
        if members == 0 || margins.is_empty() {
            return Err(Error::EmptyShape {
                resolution: members,
                dim: margins.len(),
            });
        }
        let mut seen = std::collections::HashSet::new();
        for id in &margins {
            if !seen.insert(id) {
                return Err(Error::DuplicateMargin(id.to_string()));
            }
        }
        let mut values = Vec::with_capacity(members * margins.len());
        for col in columns {
            if col.len() != members {
                return Err(Error::Shape {
                    expected: members,
                    found: col.len(),
                });
            }
            values.extend(col);
        }
        if let Some((position, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { position, value });
        }
        Ok(EnsembleDataset {
            margins,
            members,
            values,
        })
    }

    /// Dataset with placeholder margin ids.
    pub fn from_columns(columns: Vec<Vec<f64>>) -> Result<Self> {
        let ids = (0..columns.len()).map(MarginId::indexed).collect();
        Self::new(ids, columns)
    }

    pub fn members(&self) -> usize {
        self.members
    }

    /// Number of margins `L`.
    pub fn dim(&self) -> usize {
        self.margins.len()
    }

    pub fn margins(&self) -> &[MarginId] {
        &self.margins
    }

    pub fn margin_index(&self, id: &MarginId) -> Option<usize> {
        self.margins.iter().position(|m| m == id)
    }

    /// Member values of margin `ℓ`, in member order.
    pub fn margin_values(&self, margin: usize) -> &[f64] {
        &self.values[margin * self.members..(margin + 1) * self.members]
    }

    pub fn value(&self, member: usize, margin: usize) -> f64 {
        self.values[margin * self.members + member]
    }

    pub fn member(&self, member: usize) -> Vec<f64> {
        (0..self.dim()).map(|l| self.value(member, l)).collect()
    }

    pub fn has_ties(&self, margin: usize) -> bool {
        let mut v = self.margin_values(margin).to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        v.windows(2).any(|w| w[0] == w[1])
    }
}

/// A postprocessed univariate predictive distribution.
#[derive(Debug, Clone, PartialEq)]
pub enum PredictiveMargin {
    Gaussian { mean: f64, sd: f64 },
    /// Empirical distribution of the given samples (kept sorted).
    Empirical { samples: Vec<f64> },
}

impl PredictiveMargin {
    pub fn gaussian(mean: f64, sd: f64) -> Result<Self> {
        let m = PredictiveMargin::Gaussian { mean, sd };
        m.validate()?;
        Ok(m)
    }

    pub fn empirical(mut samples: Vec<f64>) -> Result<Self> {
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateMargin("empirical samples must be finite".into()));
        }
        samples.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        let m = PredictiveMargin::Empirical { samples };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PredictiveMargin::Gaussian { mean, sd } => {
                if !mean.is_finite() || !sd.is_finite() || *sd <= 0.0 {
                    return Err(Error::DegenerateMargin(format!(
                        "gaussian needs finite mean and sd > 0 (mean={mean}, sd={sd})"
                    )));
                }
            }
            PredictiveMargin::Empirical { samples } => {
                if samples.is_empty() {
                    return Err(Error::DegenerateMargin("empirical margin has no samples".into()));
                }
                if samples.windows(2).any(|w| !(w[0] <= w[1])) {
                    return Err(Error::DegenerateMargin("empirical samples must be sorted".into()));
                }
            }
        }
        Ok(())
    }

    /// Quantile function. For the empirical margin this is the `⌈pN⌉`-th
    /// smallest sample, the generalized inverse of the right-continuous
    /// empirical cdf.
    pub fn quantile(&self, p: f64) -> f64 {
        match self {
            PredictiveMargin::Gaussian { mean, sd } => mean + sd * standard_normal_quantile(p),
            PredictiveMargin::Empirical { samples } => {
                let n = samples.len();
                let k = (p * n as f64).ceil().clamp(1.0, n as f64) as usize;
                samples[k - 1]
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            PredictiveMargin::Gaussian { mean, sd } => standard_normal_cdf((x - mean) / sd),
            PredictiveMargin::Empirical { samples } => {
                samples.partition_point(|&s| s <= x) as f64 / samples.len() as f64
            }
        }
    }
}

/// How the `M` values are drawn from each predictive margin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SamplingScheme {
    /// Equally spaced quantiles at levels `(m - 1/2) / M` (ECC-Q).
    #[default]
    Quantiles,
    /// Inverse-cdf transforms of seeded uniform draws, then sorted (ECC-R).
    RandomDraws { seed: u64 },
}

/// The raw ensemble's rank template; ties are broken at random, margin `ℓ`
/// using stream `ℓ` of a generator seeded with `seed`.
pub fn dependence_template(raw: &EnsembleDataset, seed: u64) -> RankMatrix {
    let columns: Vec<Vec<usize>> = (0..raw.dim())
        .into_par_iter()
        .map(|l| rank_values(raw.margin_values(l), TiePolicy::Random(seed), l).expect("random ties never fail"))
        .collect();
    RankMatrix::from_columns(&columns).expect("ranks are permutations")
}

/// Sorted samples `x̃_(1) ≤ … ≤ x̃_(M)` from a predictive margin.
pub fn marginal_samples(margin: &PredictiveMargin, members: usize, scheme: SamplingScheme) -> Result<Vec<f64>> {
    marginal_samples_stream(margin, members, scheme, SAMPLING_STREAM_BASE)
}

/// As [`marginal_samples`], drawing random uniforms from stream `stream`.
pub fn marginal_samples_stream(
    margin: &PredictiveMargin,
    members: usize,
    scheme: SamplingScheme,
    stream: u64,
) -> Result<Vec<f64>> {
    margin.validate()?;
    if members == 0 {
        return Err(Error::EmptyShape {
            resolution: members,
            dim: 1,
        });
    }
    let mut out: Vec<f64> = match scheme {
        SamplingScheme::Quantiles => (1..=members)
            .map(|m| margin.quantile((m as f64 - 0.5) / members as f64))
            .collect(),
        SamplingScheme::RandomDraws { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            (0..members)
                .map(|_| {
                    let u = loop {
                        let u: f64 = rng.gen();
                        if u > 0.0 {
                            break u;
                        }
                    };
                    margin.quantile(u)
                })
                .collect()
        }
    };
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite quantiles"));
    Ok(out)
}

/// `x̂_m^ℓ = samples[ℓ][σ_ℓ(m) - 1]`.
pub fn ecc_reorder(template: &RankMatrix, samples: &[Vec<f64>], margins: &[MarginId]) -> Result<EnsembleDataset> {
    if samples.len() != template.dim() {
        return Err(Error::DimensionMismatch {
            expected: template.dim(),
            found: samples.len(),
        });
    }
    for (l, s) in samples.iter().enumerate() {
        if s.len() != template.members() {
            return Err(Error::Shape {
                expected: template.members(),
                found: s.len(),
            });
        }
        if s.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::UnsortedSamples { margin: l + 1 });
        }
    }
    let columns = samples
        .iter()
        .enumerate()
        .map(|(l, s)| (0..template.members()).map(|m| s[template.rank(m, l) - 1]).collect())
        .collect();
    EnsembleDataset::new(margins.to_vec(), columns)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PreservationReport {
    pub preserved: bool,
    /// Margins (0-based) whose ordering disagrees with the raw template.
    pub mismatched_margins: Vec<usize>,
    /// Margins (0-based) where the ECC values contain ties; for these,
    /// preservation means only that the values are non-decreasing along the
    /// raw template.
    pub tied_margins: Vec<usize>,
}

/// Checks that `ecc` has the same rank template, hence the same empirical
/// copula, as `raw` (raw ties broken with `seed`).
pub fn verify_copula_preservation(raw: &EnsembleDataset, ecc: &EnsembleDataset, seed: u64) -> Result<PreservationReport> {
    if raw.dim() != ecc.dim() {
        return Err(Error::DimensionMismatch {
            expected: raw.dim(),
            found: ecc.dim(),
        });
    }
    if raw.members() != ecc.members() {
        return Err(Error::Shape {
            expected: raw.members(),
            found: ecc.members(),
        });
    }
    let template = dependence_template(raw, seed);
    let verdicts: Vec<(bool, bool)> = (0..raw.dim())
        .into_par_iter()
        .map(|l| {
            let expected = template.column(l);
            let values = ecc.margin_values(l);
            if ecc.has_ties(l) {
                let mut by_rank = vec![0.0; values.len()];
                for (m, &r) in expected.iter().enumerate() {
                    by_rank[r - 1] = values[m];
                }
                (by_rank.windows(2).all(|w| w[0] <= w[1]), true)
            } else {
                let got = rank_values(values, TiePolicy::Reject, l).expect("tie-free");
                (got == expected, false)
            }
        })
        .collect();
    let mismatched_margins: Vec<usize> = verdicts.iter().enumerate().filter(|(_, v)| !v.0).map(|(l, _)| l).collect();
    let tied_margins = verdicts.iter().enumerate().filter(|(_, v)| v.1).map(|(l, _)| l).collect();
    Ok(PreservationReport {
        preserved: mismatched_margins.is_empty(),
        mismatched_margins,
        tied_margins,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginSummary {
    pub id: MarginId,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EccReport {
    pub preserved: bool,
    /// SHA-256 of the raw rank template.
    pub template_hash: String,
    /// Margins whose postprocessed samples contain ties.
    pub tied_margins: Vec<MarginId>,
    pub per_margin: Vec<MarginSummary>,
}

#[derive(Debug, Clone)]
pub struct EccRun {
    pub ensemble: EnsembleDataset,
    pub template: RankMatrix,
    pub report: EccReport,
}

/// SHA-256 over `M`, `L` and the row-major ranks, all as little-endian `u64`.
pub fn template_hash(template: &RankMatrix) -> String {
    let mut hasher = Sha256::new();
    hasher.update((template.members() as u64).to_le_bytes());
    hasher.update((template.dim() as u64).to_le_bytes());
    for &r in template.as_slice() {
        hasher.update((r as u64).to_le_bytes());
    }
    hex::encode(hasher.finalize())
}

/// The full pipeline: template, per-margin sampling, reordering, verification.
pub fn run_ecc(raw: &EnsembleDataset, margins: &[PredictiveMargin], scheme: SamplingScheme, seed: u64) -> Result<EccRun> {
    if margins.len() != raw.dim() {
        return Err(Error::DimensionMismatch {
            expected: raw.dim(),
            found: margins.len(),
        });
    }
    let template = dependence_template(raw, seed);
    let samples = margins
        .par_iter()
        .enumerate()
        .map(|(l, f)| marginal_samples_stream(f, raw.members(), scheme, SAMPLING_STREAM_BASE + l as u64))
        .collect::<Result<Vec<_>>>()?;
    let ensemble = ecc_reorder(&template, &samples, raw.margins())?;
    let check = verify_copula_preservation(raw, &ensemble, seed)?;
    let per_margin = samples
        .iter()
        .zip(raw.margins())
        .map(|(s, id)| MarginSummary {
            id: id.clone(),
            min: s[0],
            max: s[s.len() - 1],
        })
        .collect();
    let report = EccReport {
        preserved: check.preserved,
        template_hash: template_hash(&template),
        tied_margins: check.tied_margins.iter().map(|&l| raw.margins()[l].clone()).collect(),
        per_margin,
    };
    Ok(EccRun {
        ensemble,
        template,
        report,
    })
}
