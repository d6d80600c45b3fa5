//! Production scoring: stakeholder, factor and system scores, and the
//! percentile benchmark over previously evaluated systems.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scale::{Dimension, ResponseMatrix, ScaleDefinition};
use crate::stats::mean;

/// Mean of one respondent's codes.
pub fn stakeholder_score(row: &[u8]) -> Result<f64> {
    if row.is_empty() {
        return Err(Error::MissingValue {
            row: 0,
            column: "item_1".into(),
        });
    }
    Ok(row.iter().map(|&c| f64::from(c)).sum::<f64>() / row.len() as f64)
}

pub fn stakeholder_scores(matrix: &ResponseMatrix) -> Vec<f64> {
    matrix
        .rows()
        .map(|r| r.iter().map(|&c| f64::from(c)).sum::<f64>() / r.len() as f64)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorScore {
    pub dimension: Dimension,
    pub n_items: usize,
    pub score: f64,
}

/// Mean over respondents × items of each dimension, in the scale's
/// dimension order.
pub fn factor_scores(matrix: &ResponseMatrix, scale: &ScaleDefinition) -> Result<Vec<FactorScore>> {
    if matrix.n_items() != scale.item_count() {
        return Err(Error::DimensionMismatch {
            expected: scale.item_count(),
            actual: matrix.n_items(),
        });
    }
    scale
        .dimensions()
        .iter()
        .map(|dim| {
            let idx = scale.items_in(dim);
            if idx.is_empty() {
                return Err(Error::EmptyDimension(dim.to_string()));
            }
            let sum: f64 = matrix
                .rows()
                .map(|r| idx.iter().map(|&i| f64::from(r[i])).sum::<f64>())
                .sum();
            Ok(FactorScore {
                dimension: dim.clone(),
                n_items: idx.len(),
                score: sum / (idx.len() * matrix.n_respondents()) as f64,
            })
        })
        .collect()
}

/// Dimensions ordered from weakest to strongest factor score; ties keep
/// scale order.
pub fn deficiency_ranking(scores: &[FactorScore]) -> Vec<Dimension> {
    let mut sorted: Vec<&FactorScore> = scores.iter().collect();
    sorted.sort_by(|a, b| a.score.total_cmp(&b.score));
    sorted.into_iter().map(|s| s.dimension.clone()).collect()
}

/// Weighted mean of factor scores; `None` means uniform weights.
pub fn system_score(factor_scores: &[f64], weights: Option<&[f64]>) -> Result<f64> {
    if factor_scores.is_empty() {
        return Err(Error::EmptyDimension("all".into()));
    }
    match weights {
        None => Ok(mean(factor_scores)),
        Some(w) => {
            if w.len() != factor_scores.len() {
                return Err(Error::DimensionMismatch {
                    expected: factor_scores.len(),
                    actual: w.len(),
                });
            }
            let total: f64 = w.iter().sum();
            if w.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) || (total - 1.0).abs() > 1e-9 {
                return Err(Error::BadWeights);
            }
            Ok(factor_scores.iter().zip(w).map(|(s, w)| s * w).sum())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XeqScores {
    pub stakeholder_scores: Vec<f64>,
    pub factor_scores: Vec<FactorScore>,
    pub weights: Vec<f64>,
    pub system_score: f64,
    pub deficiency_ranking: Vec<Dimension>,
}

pub fn xeq_scores(matrix: &ResponseMatrix, scale: &ScaleDefinition, weights: Option<&[f64]>) -> Result<XeqScores> {
    let factors = factor_scores(matrix, scale)?;
    let values: Vec<f64> = factors.iter().map(|f| f.score).collect();
    let system = system_score(&values, weights)?;
    let weights = weights.map_or_else(|| vec![1.0 / values.len() as f64; values.len()], <[f64]>::to_vec);
    Ok(XeqScores {
        stakeholder_scores: stakeholder_scores(matrix),
        deficiency_ranking: deficiency_ranking(&factors),
        factor_scores: factors,
        weights,
        system_score: system,
    })
}

/// Mean participant total per dimension: each respondent's sum over the
/// dimension's items, averaged over respondents.
pub fn dimension_totals(matrix: &ResponseMatrix, scale: &ScaleDefinition) -> Result<BTreeMap<String, f64>> {
    factor_scores(matrix, scale).map(|fs| {
        fs.into_iter()
            .map(|f| (f.dimension.to_string(), f.score * f.n_items as f64))
            .collect()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BenchmarkCategory {
    Bad,
    BelowAverage,
    AboveAverage,
    Good,
    Excellent,
}

impl BenchmarkCategory {
    /// Bands with the lower edge inclusive.
    pub fn from_percentile(p: f64) -> Self {
        if p >= 90.0 {
            BenchmarkCategory::Excellent
        } else if p >= 75.0 {
            BenchmarkCategory::Good
        } else if p >= 50.0 {
            BenchmarkCategory::AboveAverage
        } else if p >= 25.0 {
            BenchmarkCategory::BelowAverage
        } else {
            BenchmarkCategory::Bad
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            BenchmarkCategory::Excellent => "within the top 10% of benchmarked systems",
            BenchmarkCategory::Good => "below the top 10% and above the lower 75%",
            BenchmarkCategory::AboveAverage => "below the top 25% and above the lower 50%",
            BenchmarkCategory::BelowAverage => "below the top 50% and above the lower 25%",
            BenchmarkCategory::Bad => "within the 25% worst benchmarked systems",
        }
    }
}

/// Mean-rank percentile of `value` in `reference`: (below + ½·ties) / n × 100.
pub fn percentile_rank(reference: &[f64], value: f64) -> f64 {
    let below = reference.iter().filter(|&&r| r < value).count() as f64;
    let ties = reference.iter().filter(|&&r| r == value).count() as f64;
    (below + 0.5 * ties) / reference.len() as f64 * 100.0
}

pub const STORE_FORMAT_VERSION: u32 = 1;

fn default_format() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkEntry {
    pub system_id: String,
    pub totals: BTreeMap<String, f64>,
    pub timestamp: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkStore {
    #[serde(default = "default_format")]
    pub format_version: u32,
    /// Revision counter, bumped on every mutation.
    pub version: u64,
    pub scale_id: String,
    pub scale_version: String,
    pub entries: Vec<BenchmarkEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionClassification {
    pub dimension: String,
    pub value: f64,
    pub percentile: f64,
    pub category: BenchmarkCategory,
}

impl BenchmarkStore {
    pub fn new(scale_id: impl Into<String>, scale_version: impl Into<String>) -> Self {
        BenchmarkStore {
            format_version: STORE_FORMAT_VERSION,
            version: 0,
            scale_id: scale_id.into(),
            scale_version: scale_version.into(),
            entries: Vec::new(),
        }
    }

    pub fn for_scale(scale: &ScaleDefinition) -> Self {
        Self::new(scale.scale_id(), scale.version())
    }

    pub fn add(&mut self, entry: BenchmarkEntry) -> Result<()> {
        if self.entries.iter().any(|e| e.system_id == entry.system_id) {
            return Err(Error::DuplicateSystem(entry.system_id));
        }
        if let Some(first) = self.entries.first() {
            let want: Vec<&String> = first.totals.keys().collect();
            let got: Vec<&String> = entry.totals.keys().collect();
            if want != got {
                return Err(Error::DimensionMismatch {
                    expected: want.len(),
                    actual: got.len(),
                });
            }
        }
        self.entries.push(entry);
        self.version += 1;
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let store: BenchmarkStore = serde_json::from_str(text)?;
        if store.format_version > STORE_FORMAT_VERSION {
            return Err(Error::VersionMismatch(format!(
                "store format {} is newer than supported format {}; upgrade the toolkit",
                store.format_version, STORE_FORMAT_VERSION
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for e in &store.entries {
            if !seen.insert(&e.system_id) {
                return Err(Error::DuplicateSystem(e.system_id.clone()));
            }
        }
        Ok(store)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("store serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Loads and checks that the store was built for `scale`.
    pub fn load_for(path: &Path, scale: &ScaleDefinition) -> Result<Self> {
        let store = Self::load(path)?;
        store.check_scale(scale)?;
        Ok(store)
    }

    pub fn check_scale(&self, scale: &ScaleDefinition) -> Result<()> {
        if self.scale_id != scale.scale_id() || self.scale_version != scale.version() {
            return Err(Error::VersionMismatch(format!(
                "store was built for {} v{}, scale is {} v{}",
                self.scale_id,
                self.scale_version,
                scale.scale_id(),
                scale.version()
            )));
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|source| Error::Write {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Per-dimension category of `candidate` against the stored systems.
    /// The candidate is never part of its own reference set.
    pub fn classify(&self, candidate: &BTreeMap<String, f64>) -> Result<Vec<DimensionClassification>> {
        let first = self.entries.first().ok_or(Error::EmptyBenchmark)?;
        if first.totals.len() != candidate.len() || first.totals.keys().any(|k| !candidate.contains_key(k)) {
            return Err(Error::DimensionMismatch {
                expected: first.totals.len(),
                actual: candidate.len(),
            });
        }
        Ok(candidate
            .iter()
            .map(|(dim, &value)| {
                let reference: Vec<f64> = self.entries.iter().map(|e| e.totals[dim]).collect();
                let percentile = percentile_rank(&reference, value);
                DimensionClassification {
                    dimension: dim.clone(),
                    value,
                    percentile,
                    category: BenchmarkCategory::from_percentile(percentile),
                }
            })
            .collect())
    }
}

pub fn classify_system(store: &BenchmarkStore, candidate: &BTreeMap<String, f64>) -> Result<Vec<DimensionClassification>> {
    store.classify(candidate)
}
