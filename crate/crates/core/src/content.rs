//! Content Validity Index from expert relevance ratings.
//!
//! Item-level indices are kept as exact `endorsed / panel` counts so that
//! the universal-agreement test never depends on floating rounding.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relevance scale, lowest first. Codes are positions + 1.
pub const RELEVANCE_LABELS: [&str; 5] = [
    "Not Relevant at All",
    "Somewhat Not Relevant",
    "Neutral",
    "Somewhat Relevant",
    "Extremely Relevant",
];

/// Default selection cutoff; items at or below it are removed.
pub const DEFAULT_THRESHOLD: f64 = 0.75;
/// Conventional I-CVI baseline.
pub const CONVENTIONAL_THRESHOLD: f64 = 0.78;

/// Experts by items, codes 1..=5 on the relevance scale.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpertRatingMatrix {
    experts: Vec<String>,
    values: Vec<Vec<u8>>,
}

impl ExpertRatingMatrix {
    pub fn new(experts: Vec<String>, values: Vec<Vec<u8>>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyPanel);
        }
        if experts.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: experts.len(),
                actual: values.len(),
            });
        }
        let m = values[0].len();
        for (r, row) in values.iter().enumerate() {
            if row.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    actual: row.len(),
                });
            }
            if let Some(i) = row.iter().position(|c| !(1..=5).contains(c)) {
                return Err(Error::InvalidCode {
                    row: r + 1,
                    item: i + 1,
                    code: i64::from(row[i]),
                });
            }
        }
        Ok(ExpertRatingMatrix { experts, values })
    }

    pub fn experts(&self) -> &[String] {
        &self.experts
    }

    pub fn values(&self) -> &[Vec<u8>] {
        &self.values
    }

    pub fn n_experts(&self) -> usize {
        self.values.len()
    }

    pub fn n_items(&self) -> usize {
        self.values[0].len()
    }

    pub fn column(&self, item: usize) -> Vec<u8> {
        self.values.iter().map(|r| r[item]).collect()
    }
}

/// 1 where the rating is one of the top two relevance levels.
pub fn dichotomize_relevance(ratings: &ExpertRatingMatrix) -> Vec<Vec<u8>> {
    ratings
        .values
        .iter()
        .map(|row| row.iter().map(|&c| u8::from(c >= 4)).collect())
        .collect()
}

/// Exact item-level index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemCvi {
    pub endorsed: u32,
    pub panel: u32,
}

impl ItemCvi {
    pub fn new(endorsed: u32, panel: u32) -> Result<Self> {
        if panel == 0 {
            return Err(Error::EmptyPanel);
        }
        if endorsed > panel {
            return Err(Error::DimensionMismatch {
                expected: panel as usize,
                actual: endorsed as usize,
            });
        }
        Ok(ItemCvi { endorsed, panel })
    }

    /// Recovers the count behind a rounded decimal, e.g. 0.7692 with 13
    /// experts gives 10/13.
    pub fn from_rounded(value: f64, panel: u32) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::Config(format!("I-CVI {value} outside [0, 1]")));
        }
        Self::new((value * f64::from(panel)).round() as u32, panel)
    }

    pub fn value(&self) -> f64 {
        f64::from(self.endorsed) / f64::from(self.panel)
    }

    pub fn is_universal(&self) -> bool {
        self.endorsed == self.panel
    }

    pub fn exceeds(&self, threshold: f64) -> bool {
        f64::from(self.endorsed) > threshold * f64::from(self.panel)
    }
}

/// I-CVI of one dichotomized column.
pub fn item_cvi(binary_column: &[u8], n_experts: usize) -> Result<ItemCvi> {
    if n_experts == 0 {
        return Err(Error::EmptyPanel);
    }
    if binary_column.len() != n_experts {
        return Err(Error::DimensionMismatch {
            expected: n_experts,
            actual: binary_column.len(),
        });
    }
    let endorsed = binary_column.iter().filter(|&&b| b != 0).count();
    ItemCvi::new(endorsed as u32, n_experts as u32)
}

/// S-CVI by averaging.
pub fn scale_cvi_average(i_cvi: &[ItemCvi]) -> Result<f64> {
    if i_cvi.is_empty() {
        return Err(Error::EmptyScale);
    }
    Ok(i_cvi.iter().map(ItemCvi::value).sum::<f64>() / i_cvi.len() as f64)
}

/// S-CVI by universal agreement.
pub fn scale_cvi_universal(i_cvi: &[ItemCvi]) -> Result<f64> {
    if i_cvi.is_empty() {
        return Err(Error::EmptyScale);
    }
    let ones = i_cvi.iter().filter(|c| c.is_universal()).count();
    Ok(ones as f64 / i_cvi.len() as f64)
}

/// 1-based ids of items whose I-CVI is strictly above `threshold`.
pub fn select_items(i_cvi: &[ItemCvi], threshold: f64) -> Vec<usize> {
    i_cvi
        .iter()
        .enumerate()
        .filter(|(_, c)| c.exceeds(threshold))
        .map(|(i, _)| i + 1)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CviReport {
    pub panel_size: usize,
    pub i_cvi: Vec<ItemCvi>,
    pub i_cvi_values: Vec<f64>,
    pub low_items: Vec<usize>,
    pub threshold: f64,
    pub retained_item_ids: Vec<usize>,
    /// Scale-level indices over the retained items.
    pub s_cvi_a: f64,
    pub s_cvi_b: f64,
    /// Scale-level indices over every rated item.
    pub s_cvi_a_all: f64,
    pub s_cvi_b_all: f64,
    pub baselines: CviBaselines,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CviBaselines {
    pub i_cvi: f64,
    pub s_cvi_a: f64,
    pub s_cvi_b: f64,
}

impl Default for CviBaselines {
    fn default() -> Self {
        CviBaselines {
            i_cvi: CONVENTIONAL_THRESHOLD,
            s_cvi_a: 0.90,
            s_cvi_b: 0.80,
        }
    }
}

/// Full content-validity pass: dichotomize, score items, select, summarize.
pub fn content_validity(ratings: &ExpertRatingMatrix, threshold: f64) -> Result<CviReport> {
    let binary = dichotomize_relevance(ratings);
    let n = ratings.n_experts();
    let i_cvi = (0..ratings.n_items())
        .map(|i| {
            let col: Vec<u8> = binary.iter().map(|r| r[i]).collect();
            item_cvi(&col, n)
        })
        .collect::<Result<Vec<_>>>()?;
    content_validity_from_counts(i_cvi, threshold)
}

pub fn content_validity_from_counts(i_cvi: Vec<ItemCvi>, threshold: f64) -> Result<CviReport> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::Config(format!("CVI threshold must be in (0, 1), got {threshold}")));
    }
    let retained = select_items(&i_cvi, threshold);
    let kept: Vec<ItemCvi> = retained.iter().map(|&id| i_cvi[id - 1]).collect();
    let (s_cvi_a, s_cvi_b) = if kept.is_empty() {
        (0.0, 0.0)
    } else {
        (scale_cvi_average(&kept)?, scale_cvi_universal(&kept)?)
    };
    Ok(CviReport {
        panel_size: i_cvi.first().map_or(0, |c| c.panel as usize),
        i_cvi_values: i_cvi.iter().map(ItemCvi::value).collect(),
        low_items: (1..=i_cvi.len()).filter(|id| !retained.contains(id)).collect(),
        threshold,
        s_cvi_a,
        s_cvi_b,
        s_cvi_a_all: scale_cvi_average(&i_cvi)?,
        s_cvi_b_all: scale_cvi_universal(&i_cvi)?,
        retained_item_ids: retained,
        i_cvi,
        baselines: CviBaselines::default(),
    })
}

/// Mean clarity rating per item; descriptive only.
pub fn clarity_means(ratings: &ExpertRatingMatrix) -> Vec<f64> {
    let n = ratings.n_experts() as f64;
    (0..ratings.n_items())
        .map(|i| ratings.values.iter().map(|r| f64::from(r[i])).sum::<f64>() / n)
        .collect()
}

#[derive(Debug, Deserialize)]
struct CviFixtureFile {
    panel_size: u32,
    items: Vec<CviFixtureItem>,
}

#[derive(Debug, Deserialize)]
struct CviFixtureItem {
    endorsed: u32,
}

/// Item-level counts of the published 18-item XEQ scale (13 experts).
pub fn xeq_item_cvi() -> Vec<ItemCvi> {
    let f: CviFixtureFile =
        serde_json::from_str(include_str!("../fixtures/xeq_icvi.json")).expect("valid fixture");
    f.items
        .iter()
        .map(|it| ItemCvi::new(it.endorsed, f.panel_size).expect("valid counts"))
        .collect()
}

pub fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(e: u32) -> ItemCvi {
        ItemCvi::new(e, 13).unwrap()
    }

    #[test]
    fn dichotomizes_top_two_levels() {
        let r = ExpertRatingMatrix::new(
            vec!["a".into(), "b".into()],
            vec![vec![5, 3, 4], vec![4, 1, 4]],
        )
        .unwrap();
        assert_eq!(dichotomize_relevance(&r), vec![vec![1, 0, 1], vec![1, 0, 1]]);
    }

    #[test]
    fn item_level() {
        let mut col = vec![1u8; 10];
        col.extend([0, 0, 0]);
        assert_eq!(round4(item_cvi(&col, 13).unwrap().value()), 0.7692);
        assert_eq!(item_cvi(&[1; 13], 13).unwrap().value(), 1.0);
        assert_eq!(item_cvi(&[0; 13], 13).unwrap().value(), 0.0);
        assert!(matches!(item_cvi(&[], 0), Err(Error::EmptyPanel)));
    }

    #[test]
    fn published_scale_level_values() {
        let v = xeq_item_cvi();
        assert_eq!(v.len(), 18);
        assert_eq!(round4(scale_cvi_average(&v).unwrap()), 0.8846);
        assert_eq!(round4(scale_cvi_universal(&v).unwrap()), 0.2222);
        // exact rational: 207 / 234
        assert!((scale_cvi_average(&v).unwrap() - 207.0 / 234.0).abs() < 1e-15);
    }

    #[test]
    fn fourteen_item_subset_recomputed() {
        let v = xeq_item_cvi();
        let ids = select_items(&v, CONVENTIONAL_THRESHOLD);
        assert_eq!(ids, (1..=14).collect::<Vec<_>>());
        let kept: Vec<_> = ids.iter().map(|&i| v[i - 1]).collect();
        let oracle = (4.0 + 5.0 * 12.0 / 13.0 + 5.0 * 11.0 / 13.0) / 14.0;
        let a = scale_cvi_average(&kept).unwrap();
        assert!((a - oracle).abs() < 1e-15);
        assert!((a - 0.9179).abs() < 0.001);
        assert_eq!(round4(a), 0.9176);
        assert_eq!(scale_cvi_universal(&kept).unwrap(), 4.0 / 14.0);
    }

    #[test]
    fn selection_from_32_items() {
        let mut v = xeq_item_cvi();
        v.extend([9, 8, 9, 5, 7, 3, 9, 6, 2, 9, 0, 4, 8, 1].map(c));
        assert_eq!(v.len(), 32);
        assert_eq!(select_items(&v, DEFAULT_THRESHOLD), (1..=18).collect::<Vec<_>>());
        assert!(select_items(&[ItemCvi::new(1, 2).unwrap(); 4], DEFAULT_THRESHOLD).is_empty());
        // exactly 0.75 is removed
        assert!(select_items(&[ItemCvi::new(3, 4).unwrap()], 0.75).is_empty());
    }

    #[test]
    fn rounding_recovery() {
        for (d, e) in [(1.0, 13), (0.9231, 12), (0.8462, 11), (0.7692, 10)] {
            assert_eq!(ItemCvi::from_rounded(d, 13).unwrap(), c(e));
        }
    }

    #[test]
    fn report_summarizes_retained_items() {
        let ratings = crate::ingest::read_expert_ratings(
            include_str!("../fixtures/xeq_expert_ratings.csv").as_bytes(),
            18,
        )
        .unwrap();
        let rep = content_validity(&ratings, DEFAULT_THRESHOLD).unwrap();
        assert_eq!(rep.i_cvi, xeq_item_cvi());
        assert_eq!(rep.retained_item_ids.len(), 18);
        assert_eq!(round4(rep.s_cvi_a), 0.8846);
        assert!(content_validity(&ratings, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn i_cvi_is_mean_of_dichotomized(panel in prop::collection::vec(prop::collection::vec(1u8..=5, 6), 1..20)) {
            let n = panel.len();
            let r = ExpertRatingMatrix::new((0..n).map(|i| i.to_string()).collect(), panel).unwrap();
            let bin = dichotomize_relevance(&r);
            for i in 0..6 {
                let col: Vec<u8> = bin.iter().map(|row| row[i]).collect();
                let oracle = col.iter().map(|&b| f64::from(b)).sum::<f64>() / n as f64;
                prop_assert_eq!(item_cvi(&col, n).unwrap().value(), oracle);
            }
        }

        #[test]
        fn universal_iff_all_ones(counts in prop::collection::vec(0u32..=7, 1..12)) {
            let v: Vec<ItemCvi> = counts.iter().map(|&e| ItemCvi::new(e, 7).unwrap()).collect();
            let b = scale_cvi_universal(&v).unwrap();
            prop_assert_eq!(b == 1.0, v.iter().all(|c| c.value() == 1.0));
            // threshold near 1 keeps only universally endorsed items
            let near_one = select_items(&v, 0.999);
            prop_assert!(near_one.iter().all(|&id| v[id - 1].is_universal()));
            // threshold 0 keeps any positive support
            let all = select_items(&v, 0.0);
            prop_assert_eq!(all.len(), v.iter().filter(|c| c.endorsed > 0).count());
        }
    }
}
