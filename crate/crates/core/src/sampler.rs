//! Exact sampling of output patterns from an enumerated probability table.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::gaussian::{InterferometerUnitary, SqueezeParams};
use crate::probability::{enumerate_bounded_patterns, pair_tail_above, PhotonPattern, SqueezedEvaluator};
use crate::random::SplitMix64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub pattern: PhotonPattern,
    pub probability: f64,
}

/// What the table was computed from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentMetadata {
    pub modes: usize,
    pub squeezers: usize,
    pub squeeze: Vec<f64>,
    pub unitary_seed: Option<u64>,
    pub max_total: usize,
    pub max_per_mode: usize,
}

#[derive(Serialize, Deserialize)]
struct TableRecord {
    entries: Vec<TableEntry>,
    residual_tail_bound: f64,
    metadata: ExperimentMetadata,
}

/// Pattern probabilities below a photon-number cutoff plus the analytic mass
/// of everything above it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TableRecord", into = "TableRecord")]
pub struct DistributionTable {
    entries: Vec<TableEntry>,
    residual: f64,
    metadata: ExperimentMetadata,
}

impl DistributionTable {
    /// Checks non-negativity and that `Σp + residual` is within `tol` of one.
    pub fn new(entries: Vec<TableEntry>, residual: f64, metadata: ExperimentMetadata, tol: f64) -> Result<Self> {
        if let Some(e) = entries.iter().find(|e| !(e.probability >= 0.0)) {
            return Err(Error::Domain(format!(
                "pattern {} has probability {}",
                e.pattern, e.probability
            )));
        }
        if !(residual >= 0.0) {
            return Err(Error::Domain(format!("residual mass {residual} is negative")));
        }
        let table = Self {
            entries,
            residual,
            metadata,
        };
        let mass = table.total_mass();
        if (mass - 1.0).abs() > tol {
            return Err(Error::Normalization { mass, tol });
        }
        Ok(table)
    }

    pub fn entries(&self) -> &[TableEntry] {
        &self.entries
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn metadata(&self) -> &ExperimentMetadata {
        &self.metadata
    }

    pub fn with_unitary_seed(mut self, seed: u64) -> Self {
        self.metadata.unitary_seed = Some(seed);
        self
    }

    /// `Σ p + residual`.
    pub fn total_mass(&self) -> f64 {
        self.entries.iter().map(|e| e.probability).sum::<f64>() + self.residual
    }
}

impl TryFrom<TableRecord> for DistributionTable {
    type Error = Error;

    fn try_from(rec: TableRecord) -> Result<Self> {
        Self::new(
            rec.entries,
            rec.residual_tail_bound,
            rec.metadata,
            Config::DEFAULT.table_mass_tol,
        )
    }
}

impl From<DistributionTable> for TableRecord {
    fn from(t: DistributionTable) -> Self {
        TableRecord {
            entries: t.entries,
            residual_tail_bound: t.residual,
            metadata: t.metadata,
        }
    }
}

pub fn build_distribution(
    t: &InterferometerUnitary,
    params: &SqueezeParams,
    max_total: usize,
    max_per_mode: usize,
) -> Result<DistributionTable> {
    build_distribution_with(t, params, max_total, max_per_mode, &Config::DEFAULT)
}

/// Tabulates every pattern from [`enumerate_bounded_patterns`]; the residual is
/// the pair-number tail above `max_total / 2` pairs.
pub fn build_distribution_with(
    t: &InterferometerUnitary,
    params: &SqueezeParams,
    max_total: usize,
    max_per_mode: usize,
    cfg: &Config,
) -> Result<DistributionTable> {
    let modes = t.modes();
    let largest = max_total.min(modes.saturating_mul(max_per_mode));
    if largest > cfg.hafnian_cap {
        return Err(Error::HafnianCap {
            dim: largest,
            cap: cfg.hafnian_cap,
        });
    }
    let evaluator = SqueezedEvaluator::new(t, params, cfg)?;
    let entries = enumerate_bounded_patterns(modes, max_total, max_per_mode)
        .into_iter()
        .map(|pattern| {
            let probability = evaluator.probability(&pattern)?;
            Ok(TableEntry { pattern, probability })
        })
        .collect::<Result<Vec<_>>>()?;
    let metadata = ExperimentMetadata {
        modes,
        squeezers: params.active_count(),
        squeeze: params.values().to_vec(),
        unitary_seed: None,
        max_total,
        max_per_mode,
    };
    let residual = pair_tail_above(params, max_total / 2);
    DistributionTable::new(entries, residual, metadata, cfg.table_mass_tol)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub pattern: PhotonPattern,
    pub count: u64,
}

/// Result of a sampling run: per-pattern counts in table order (patterns that
/// were never drawn are omitted) and the number of draws landing beyond the cutoff.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Samples {
    pub records: Vec<SampleRecord>,
    pub seed: u64,
    pub draws: u64,
    pub residual_draws: u64,
}

/// A table together with the draws taken from it; this is what gets written to disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingRun {
    pub table: DistributionTable,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Samples>,
}

/// Inverse-CDF sampling over the table entries followed by a residual bucket.
/// One uniform per draw from `SplitMix64::new(seed)`.
pub fn draw(table: &DistributionTable, draws: u64, seed: u64) -> Samples {
    let mut cumulative = Vec::with_capacity(table.entries.len());
    let mut acc = 0.0;
    for e in &table.entries {
        acc += e.probability;
        cumulative.push(acc);
    }
    let total = acc + table.residual;

    let mut counts = vec![0u64; table.entries.len()];
    let mut residual_draws = 0;
    let mut rng = SplitMix64::new(seed);
    for _ in 0..draws {
        let u = rng.next_f64() * total;
        let k = cumulative.partition_point(|&c| c <= u);
        match counts.get_mut(k) {
            Some(c) => *c += 1,
            None => residual_draws += 1,
        }
    }
    let records = table
        .entries
        .iter()
        .zip(counts)
        .filter(|(_, c)| *c > 0)
        .map(|(e, count)| SampleRecord {
            pattern: e.pattern.clone(),
            count,
        })
        .collect();
    Samples {
        records,
        seed,
        draws,
        residual_draws,
    }
}

/// Relative frequency of each total photon number; residual draws are not binned.
pub fn total_photon_histogram(samples: &Samples) -> BTreeMap<usize, f64> {
    let mut hist = BTreeMap::new();
    if samples.draws == 0 {
        return hist;
    }
    for rec in &samples.records {
        *hist.entry(rec.pattern.total()).or_insert(0.0) += rec.count as f64;
    }
    for v in hist.values_mut() {
        *v /= samples.draws as f64;
    }
    hist
}

/// Total-variation distance between the empirical frequencies and the table,
/// counting the residual bucket as one more outcome.
pub fn total_variation(table: &DistributionTable, samples: &Samples) -> f64 {
    let n = samples.draws.max(1) as f64;
    let observed: BTreeMap<&PhotonPattern, u64> =
        samples.records.iter().map(|r| (&r.pattern, r.count)).collect();
    let mut tv: f64 = table
        .entries
        .iter()
        .map(|e| {
            let freq = observed.get(&e.pattern).copied().unwrap_or(0) as f64 / n;
            (freq - e.probability).abs()
        })
        .sum();
    tv += (samples.residual_draws as f64 / n - table.residual).abs();
    tv / 2.0
}
