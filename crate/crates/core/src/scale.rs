//! Instrument definitions, Likert encoding and respondent-level totals.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Evaluation dimension an item belongs to.
///
/// The XEQ reference scale uses the four named dimensions; other instruments
/// may declare their own labels, which land in `Other`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dimension {
    Learning,
    Utility,
    Fulfilment,
    Engagement,
    Other(String),
}

impl Dimension {
    pub const XEQ: [Dimension; 4] = [
        Dimension::Learning,
        Dimension::Utility,
        Dimension::Fulfilment,
        Dimension::Engagement,
    ];

    pub fn parse(label: &str) -> Dimension {
        match label.trim().to_ascii_lowercase().as_str() {
            "learning" => Dimension::Learning,
            "utility" => Dimension::Utility,
            "fulfilment" | "fulfillment" => Dimension::Fulfilment,
            "engagement" => Dimension::Engagement,
            _ => Dimension::Other(label.trim().to_string()),
        }
    }

    pub fn as_str(&self) -> &str {
        match self {
            Dimension::Learning => "Learning",
            Dimension::Utility => "Utility",
            Dimension::Fulfilment => "Fulfilment",
            Dimension::Engagement => "Engagement",
            Dimension::Other(s) => s,
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Dimension {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Dimension {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(Dimension::parse(&s))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Item {
    /// 1-based position in the instrument.
    pub id: usize,
    pub text: String,
    pub dimension: Dimension,
}

pub const STANDARD_LIKERT_LABELS: [&str; 5] = [
    "Strongly Disagree",
    "Somewhat Disagree",
    "Neutral",
    "Somewhat Agree",
    "Strongly Agree",
];

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ScaleFile {
    scale_id: String,
    version: String,
    likert_labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    likert_codes: Option<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dimensions: Option<Vec<Dimension>>,
    items: Vec<Item>,
}

/// A validated instrument. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleDefinition {
    scale_id: String,
    version: String,
    items: Vec<Item>,
    dimensions: Vec<Dimension>,
    likert_labels: Vec<String>,
    likert_codes: Vec<u8>,
}

impl ScaleDefinition {
    /// Builds a scale with the standard 1–5 coding.
    ///
    /// When `dimensions` is `None` every item must use one of the four XEQ
    /// dimensions; otherwise items must reference the declared list.
    pub fn new(
        scale_id: impl Into<String>,
        version: impl Into<String>,
        items: Vec<Item>,
        likert_labels: Vec<String>,
        dimensions: Option<Vec<Dimension>>,
    ) -> Result<Self> {
        Self::with_codes(scale_id, version, items, likert_labels, vec![1, 2, 3, 4, 5], dimensions)
    }

    pub fn with_codes(
        scale_id: impl Into<String>,
        version: impl Into<String>,
        items: Vec<Item>,
        likert_labels: Vec<String>,
        likert_codes: Vec<u8>,
        dimensions: Option<Vec<Dimension>>,
    ) -> Result<Self> {
        let scale_id = scale_id.into();
        if items.len() < 2 {
            return Err(Error::InvalidScale(format!(
                "a scale needs at least 2 items, got {}",
                items.len()
            )));
        }
        let mut seen = HashSet::new();
        for (pos, item) in items.iter().enumerate() {
            if !seen.insert(item.id) {
                return Err(Error::InvalidScale(format!("duplicate item id {}", item.id)));
            }
            if item.id != pos + 1 {
                return Err(Error::InvalidScale(format!(
                    "item ids must be 1-based and in order; found {} at position {}",
                    item.id,
                    pos + 1
                )));
            }
        }
        if likert_labels.len() != 5 || likert_codes.len() != 5 {
            return Err(Error::InvalidScale(
                "exactly 5 Likert labels and codes are required".into(),
            ));
        }
        if likert_codes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidScale("Likert codes must be strictly increasing".into()));
        }
        let mut lowered = HashSet::new();
        for l in &likert_labels {
            if !lowered.insert(l.trim().to_lowercase()) {
                return Err(Error::InvalidScale(format!("duplicate Likert label {l:?}")));
            }
        }

        let declared = dimensions.is_some();
        let dimensions = dimensions.unwrap_or_else(|| Dimension::XEQ.to_vec());
        for item in &items {
            if !dimensions.contains(&item.dimension) {
                return Err(Error::InvalidScale(format!(
                    "item {} references undeclared dimension {:?}{}",
                    item.id,
                    item.dimension.as_str(),
                    if declared { "" } else { " (declare a `dimensions` list for non-XEQ scales)" }
                )));
            }
        }
        // Drop declared dimensions that no item uses so downstream per-dimension
        // statistics never see an empty block.
        let dimensions = dimensions
            .into_iter()
            .filter(|d| items.iter().any(|i| &i.dimension == d))
            .collect();

        Ok(ScaleDefinition {
            scale_id,
            version: version.into(),
            items,
            dimensions,
            likert_labels,
            likert_codes,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: ScaleFile = serde_json::from_str(text).map_err(|e| Error::InvalidScale(e.to_string()))?;
        Self::with_codes(
            f.scale_id,
            f.version,
            f.items,
            f.likert_labels,
            f.likert_codes.unwrap_or_else(|| vec![1, 2, 3, 4, 5]),
            f.dimensions,
        )
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let f = ScaleFile {
            scale_id: self.scale_id.clone(),
            version: self.version.clone(),
            likert_labels: self.likert_labels.clone(),
            likert_codes: Some(self.likert_codes.clone()),
            dimensions: Some(self.dimensions.clone()),
            items: self.items.clone(),
        };
        serde_json::to_string_pretty(&f).expect("scale serializes")
    }

    /// The 18-item XEQ scale, version 1.0.
    pub fn xeq() -> Self {
        Self::from_json(XEQ_SCALE_JSON).expect("built-in XEQ fixture is valid")
    }

    pub fn scale_id(&self) -> &str {
        &self.scale_id
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn item_count(&self) -> usize {
        self.items.len()
    }

    /// Dimensions in declaration order, restricted to those with items.
    pub fn dimensions(&self) -> &[Dimension] {
        &self.dimensions
    }

    /// Zero-based column indices of the items in `dim`.
    pub fn items_in(&self, dim: &Dimension) -> Vec<usize> {
        self.items
            .iter()
            .enumerate()
            .filter(|(_, it)| &it.dimension == dim)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn likert_labels(&self) -> &[String] {
        &self.likert_labels
    }

    pub fn likert_codes(&self) -> &[u8] {
        &self.likert_codes
    }

    pub fn min_code(&self) -> u8 {
        self.likert_codes[0]
    }

    pub fn max_code(&self) -> u8 {
        self.likert_codes[4]
    }

    pub fn is_valid_code(&self, code: i64) -> bool {
        self.likert_codes.iter().any(|&c| i64::from(c) == code)
    }

    /// Maps a label to its code. Matching ignores case and surrounding
    /// whitespace.
    pub fn encode_response(&self, label: &str) -> Result<u8> {
        let needle = label.trim().to_lowercase();
        self.likert_labels
            .iter()
            .position(|l| l.trim().to_lowercase() == needle)
            .map(|p| self.likert_codes[p])
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn decode_response(&self, code: u8) -> Option<&str> {
        self.likert_codes
            .iter()
            .position(|&c| c == code)
            .map(|p| self.likert_labels[p].as_str())
    }

    /// Sum of one respondent's codes.
    pub fn participant_total(&self, row: &[u8]) -> Result<u32> {
        if row.len() != self.items.len() {
            return Err(Error::DimensionMismatch {
                expected: self.items.len(),
                actual: row.len(),
            });
        }
        for (i, &c) in row.iter().enumerate() {
            if !self.is_valid_code(i64::from(c)) {
                return Err(Error::InvalidCode {
                    row: 0,
                    item: i + 1,
                    code: i64::from(c),
                });
            }
        }
        Ok(participant_total(row))
    }
}

/// Unchecked row sum.
pub fn participant_total(row: &[u8]) -> u32 {
    row.iter().map(|&c| u32::from(c)).sum()
}

pub const XEQ_SCALE_JSON: &str = include_str!("../fixtures/xeq_scale.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Wave {
    #[default]
    Test,
    Retest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RespondentMeta {
    pub respondent_id: String,
    /// Experimental arm, e.g. "Positive" / "Negative".
    pub group: Option<String>,
    /// Application domain, used as a blocking factor.
    pub domain: Option<String>,
    pub duration: f64,
    pub allocated_duration: f64,
}

impl RespondentMeta {
    pub fn new(id: impl Into<String>) -> Self {
        RespondentMeta {
            respondent_id: id.into(),
            group: None,
            domain: None,
            duration: 1.0,
            allocated_duration: 1.0,
        }
    }

    pub fn with_group(mut self, group: impl Into<String>) -> Self {
        self.group = Some(group.into());
        self
    }
}

/// N respondents by M items of Likert codes, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseMatrix {
    scale_id: String,
    respondents: Vec<RespondentMeta>,
    values: Vec<u8>,
    n_items: usize,
    wave: Wave,
}

impl ResponseMatrix {
    pub fn new(
        scale: &ScaleDefinition,
        respondents: Vec<RespondentMeta>,
        rows: Vec<Vec<u8>>,
        wave: Wave,
    ) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if rows.len() != respondents.len() {
            return Err(Error::DimensionMismatch {
                expected: respondents.len(),
                actual: rows.len(),
            });
        }
        let m = scale.item_count();
        let mut ids = HashSet::new();
        let mut values = Vec::with_capacity(rows.len() * m);
        for (r, (row, meta)) in rows.iter().zip(&respondents).enumerate() {
            if !ids.insert(meta.respondent_id.as_str()) {
                return Err(Error::DuplicateRespondent(meta.respondent_id.clone()));
            }
            if !(meta.duration >= 0.0) || !(meta.allocated_duration > 0.0) {
                return Err(Error::InvalidScale(format!(
                    "respondent {:?} has invalid durations",
                    meta.respondent_id
                )));
            }
            if row.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    actual: row.len(),
                });
            }
            for (i, &c) in row.iter().enumerate() {
                if !scale.is_valid_code(i64::from(c)) {
                    return Err(Error::InvalidCode {
                        row: r + 1,
                        item: i + 1,
                        code: i64::from(c),
                    });
                }
            }
            values.extend_from_slice(row);
        }
        Ok(ResponseMatrix {
            scale_id: scale.scale_id().to_string(),
            respondents,
            values,
            n_items: m,
            wave,
        })
    }

    /// Convenience constructor with generated ids `r1..rN`.
    pub fn from_rows(scale: &ScaleDefinition, rows: Vec<Vec<u8>>) -> Result<Self> {
        let meta = (1..=rows.len()).map(|i| RespondentMeta::new(format!("r{i}"))).collect();
        Self::new(scale, meta, rows, Wave::Test)
    }

    pub fn scale_id(&self) -> &str {
        &self.scale_id
    }

    pub fn wave(&self) -> Wave {
        self.wave
    }

    pub fn n_respondents(&self) -> usize {
        self.respondents.len()
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    pub fn respondents(&self) -> &[RespondentMeta] {
        &self.respondents
    }

    pub fn row(&self, j: usize) -> &[u8] {
        &self.values[j * self.n_items..(j + 1) * self.n_items]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u8]> {
        self.values.chunks_exact(self.n_items)
    }

    pub fn column(&self, i: usize) -> Vec<f64> {
        self.rows().map(|r| f64::from(r[i])).collect()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.n_items).map(|i| self.column(i)).collect()
    }

    /// Participant totals in respondent order.
    pub fn totals(&self) -> Vec<u32> {
        self.rows().map(participant_total).collect()
    }

    pub fn totals_f64(&self) -> Vec<f64> {
        self.rows().map(|r| f64::from(participant_total(r))).collect()
    }

    /// Column sum for the 1-based `item_id`.
    pub fn item_total(&self, item_id: usize) -> Result<u32> {
        if self.respondents.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if item_id == 0 || item_id > self.n_items {
            return Err(Error::UnknownItem(item_id));
        }
        Ok(self.rows().map(|r| u32::from(r[item_id - 1])).sum())
    }

    pub fn with_wave(mut self, wave: Wave) -> Self {
        self.wave = wave;
        self
    }

    /// Keeps the respondents whose indices are listed, in the given order.
    pub fn select(&self, indices: &[usize]) -> Self {
        let mut values = Vec::with_capacity(indices.len() * self.n_items);
        for &j in indices {
            values.extend_from_slice(self.row(j));
        }
        ResponseMatrix {
            scale_id: self.scale_id.clone(),
            respondents: indices.iter().map(|&j| self.respondents[j].clone()).collect(),
            values,
            n_items: self.n_items,
            wave: self.wave,
        }
    }

    /// Rows as `f64` feature vectors.
    pub fn features(&self) -> Vec<Vec<f64>> {
        self.rows().map(|r| r.iter().map(|&c| f64::from(c)).collect()).collect()
    }

    pub fn group_labels(&self) -> Option<Vec<String>> {
        self.respondents.iter().map(|r| r.group.clone()).collect()
    }
}
