//! Internal consistency and test-retest reliability.
//!
//! All variances use the unbiased (N − 1) convention.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::ingest::RetestPairs;
use crate::scale::ResponseMatrix;
use crate::stats::{f_test_p, mean, sum_sq_dev, t_test_p};

pub const ITEM_TOTAL_BASELINE: f64 = 0.5;
pub const INTER_ITEM_LOW: f64 = 0.2;
pub const INTER_ITEM_HIGH: f64 = 0.8;
pub const ALPHA_BASELINE: f64 = 0.7;
pub const RHO_BASELINE: f64 = 0.7;

/// Product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(Error::TooFew {
            what: "observations",
            needed: 3,
            got: x.len(),
        });
    }
    pearson_unchecked(x, y)
}

fn pearson_unchecked(x: &[f64], y: &[f64]) -> Result<f64> {
    let mx = mean(x);
    let my = mean(y);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::ConstantInput("first variable"));
    }
    if syy == 0.0 {
        return Err(Error::ConstantInput("second variable"));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub r: f64,
    /// Two-sided, from t = r·√(n−2)/√(1−r²) with n − 2 degrees of freedom.
    pub p_value: f64,
    pub n: usize,
}

pub fn pearson_test(x: &[f64], y: &[f64]) -> Result<Correlation> {
    let r = pearson(x, y)?;
    let df = x.len() as f64 - 2.0;
    let p_value = if r.abs() >= 1.0 {
        0.0
    } else {
        t_test_p(r * (df / (1.0 - r * r)).sqrt(), df)
    };
    Ok(Correlation { r, p_value, n: x.len() })
}

/// Correlation of one item (1-based id) with the participant total.
///
/// The uncorrected form uses the total including the item itself; the
/// corrected form subtracts it first.
pub fn item_total_correlation(matrix: &ResponseMatrix, item_id: usize, corrected: bool) -> Result<f64> {
    if item_id == 0 || item_id > matrix.n_items() {
        return Err(Error::UnknownItem(item_id));
    }
    if matrix.n_respondents() < 3 {
        return Err(Error::TooFew {
            what: "respondents",
            needed: 3,
            got: matrix.n_respondents(),
        });
    }
    let col = matrix.column(item_id - 1);
    let mut totals = matrix.totals_f64();
    if corrected {
        totals.iter_mut().zip(&col).for_each(|(t, c)| *t -= c);
    }
    pearson_unchecked(&col, &totals).map_err(|e| match e {
        Error::ConstantInput("first variable") => Error::ConstantInput("item column"),
        Error::ConstantInput(_) => Error::ConstantInput("total score"),
        other => other,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairFlag {
    Redundant,
    PoorHomogeneity,
    Undefined,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlaggedPair {
    pub item_a: usize,
    pub item_b: usize,
    pub flag: PairFlag,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterItemMatrix {
    /// `None` where a column is constant.
    pub values: Vec<Vec<Option<f64>>>,
    /// Off-diagonal pairs outside the expected band (1-based ids, a < b).
    pub flags: Vec<FlaggedPair>,
    pub mean_off_diagonal: Option<f64>,
}

impl InterItemMatrix {
    pub fn get(&self, a: usize, b: usize) -> Option<f64> {
        self.values[a][b]
    }

    pub fn flag(&self, item_a: usize, item_b: usize) -> Option<PairFlag> {
        let (a, b) = if item_a < item_b { (item_a, item_b) } else { (item_b, item_a) };
        self.flags.iter().find(|f| f.item_a == a && f.item_b == b).map(|f| f.flag)
    }
}

pub fn classify_pair(r: Option<f64>) -> Option<PairFlag> {
    match r {
        None => Some(PairFlag::Undefined),
        Some(r) if r >= INTER_ITEM_HIGH => Some(PairFlag::Redundant),
        Some(r) if r <= INTER_ITEM_LOW => Some(PairFlag::PoorHomogeneity),
        Some(_) => None,
    }
}

pub fn inter_item_matrix(matrix: &ResponseMatrix) -> Result<InterItemMatrix> {
    inter_item_matrix_with(matrix, Execution::default())
}

pub fn inter_item_matrix_with(matrix: &ResponseMatrix, exec: Execution) -> Result<InterItemMatrix> {
    if matrix.n_respondents() < 3 {
        return Err(Error::TooFew {
            what: "respondents",
            needed: 3,
            got: matrix.n_respondents(),
        });
    }
    let cols = matrix.columns();
    inter_item_from_columns(&cols, exec)
}

pub(crate) fn inter_item_from_columns(cols: &[Vec<f64>], exec: Execution) -> Result<InterItemMatrix> {
    let m = cols.len();
    let upper: Vec<Vec<Option<f64>>> = exec.map_indexed(m, |a| {
        (a..m)
            .map(|b| {
                if a == b {
                    (sum_sq_dev(&cols[a]) > 0.0).then_some(1.0)
                } else {
                    pearson_unchecked(&cols[a], &cols[b]).ok()
                }
            })
            .collect()
    });
    let mut values = vec![vec![None; m]; m];
    let mut flags = Vec::new();
    let mut off = Vec::new();
    for a in 0..m {
        for b in a..m {
            let r = upper[a][b - a];
            values[a][b] = r;
            values[b][a] = r;
            if a != b {
                if let Some(v) = r {
                    off.push(v);
                }
                if let Some(flag) = classify_pair(r) {
                    flags.push(FlaggedPair { item_a: a + 1, item_b: b + 1, flag });
                }
            }
        }
    }
    Ok(InterItemMatrix {
        values,
        flags,
        mean_off_diagonal: (!off.is_empty()).then(|| mean(&off)),
    })
}

pub fn cronbach_alpha(matrix: &ResponseMatrix) -> Result<f64> {
    cronbach_alpha_columns(&matrix.columns())
}

/// Alpha over item columns of equal length.
pub fn cronbach_alpha_columns(cols: &[Vec<f64>]) -> Result<f64> {
    let m = cols.len();
    if m < 2 {
        return Err(Error::TooFew {
            what: "items",
            needed: 2,
            got: m,
        });
    }
    let n = cols[0].len();
    if let Some(c) = cols.iter().find(|c| c.len() != n) {
        return Err(Error::LengthMismatch(n, c.len()));
    }
    if n < 2 {
        return Err(Error::TooFew {
            what: "respondents",
            needed: 2,
            got: n,
        });
    }
    let totals: Vec<f64> = (0..n).map(|j| cols.iter().map(|c| c[j]).sum()).collect();
    let total_ss = sum_sq_dev(&totals);
    if total_ss == 0.0 {
        return Err(Error::ZeroTotalVariance);
    }
    // Both variances share the N − 1 divisor, which cancels in the ratio.
    let item_ss: f64 = cols.iter().map(|c| sum_sq_dev(c)).sum();
    let m = m as f64;
    Ok(m / (m - 1.0) * (1.0 - item_ss / total_ss))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ItemTotal {
    pub item_id: usize,
    pub correlation: Option<f64>,
    pub meets_baseline: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReliabilityReport {
    pub corrected_item_total: bool,
    pub item_total: Vec<ItemTotal>,
    pub inter_item: InterItemMatrix,
    pub alpha: f64,
    pub alpha_meets_baseline: bool,
    pub baselines: ReliabilityBaselines,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReliabilityBaselines {
    pub item_total: f64,
    pub inter_item_low: f64,
    pub inter_item_high: f64,
    pub alpha: f64,
}

impl Default for ReliabilityBaselines {
    fn default() -> Self {
        ReliabilityBaselines {
            item_total: ITEM_TOTAL_BASELINE,
            inter_item_low: INTER_ITEM_LOW,
            inter_item_high: INTER_ITEM_HIGH,
            alpha: ALPHA_BASELINE,
        }
    }
}

pub fn reliability_report(
    matrix: &ResponseMatrix,
    corrected: bool,
    baselines: ReliabilityBaselines,
    exec: Execution,
) -> Result<ReliabilityReport> {
    let alpha = cronbach_alpha(matrix)?;
    let item_total = exec.map_indexed(matrix.n_items(), |i| {
        let correlation = item_total_correlation(matrix, i + 1, corrected).ok();
        ItemTotal {
            item_id: i + 1,
            correlation,
            meets_baseline: correlation.is_some_and(|r| r >= baselines.item_total),
        }
    });
    Ok(ReliabilityReport {
        corrected_item_total: corrected,
        item_total,
        inter_item: inter_item_matrix_with(matrix, exec)?,
        alpha,
        alpha_meets_baseline: alpha >= baselines.alpha,
        baselines,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IccVariant {
    /// Mean squares exactly as printed: between-participant variance of the
    /// participant means, and within-participant deviations with no session
    /// effect removed.
    PaperFormula,
    /// Two-way mixed, consistency, single measurement.
    ShroutFleiss3_1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReliabilityBand {
    Poor,
    Moderate,
    Good,
    Excellent,
}

impl ReliabilityBand {
    pub fn of(icc: f64) -> Self {
        if icc >= 0.90 {
            ReliabilityBand::Excellent
        } else if icc >= 0.75 {
            ReliabilityBand::Good
        } else if icc >= 0.5 {
            ReliabilityBand::Moderate
        } else {
            ReliabilityBand::Poor
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IccResult {
    pub variant: IccVariant,
    pub icc: f64,
    pub ms_between: f64,
    pub ms_error: f64,
    pub f: f64,
    pub df1: f64,
    pub df2: f64,
    pub p_value: f64,
    pub k: usize,
    pub band: ReliabilityBand,
}

/// ICC over `scores[participant][session]`.
pub fn icc(scores: &[Vec<f64>], variant: IccVariant) -> Result<IccResult> {
    let n = scores.len();
    if n < 3 {
        return Err(Error::TooFew {
            what: "participants",
            needed: 3,
            got: n,
        });
    }
    let k = scores[0].len();
    if k < 2 {
        return Err(Error::TooFew {
            what: "sessions",
            needed: 2,
            got: k,
        });
    }
    if let Some(r) = scores.iter().find(|r| r.len() != k) {
        return Err(Error::LengthMismatch(k, r.len()));
    }
    let (nf, kf) = (n as f64, k as f64);
    let row_means: Vec<f64> = scores.iter().map(|r| mean(r)).collect();
    let grand = mean(&row_means);
    let ss_rows_of_means: f64 = row_means.iter().map(|m| (m - grand).powi(2)).sum();
    let ss_within: f64 = scores
        .iter()
        .zip(&row_means)
        .map(|(r, m)| r.iter().map(|v| (v - m).powi(2)).sum::<f64>())
        .sum();

    let (ms, ms_e, df1, df2) = match variant {
        IccVariant::PaperFormula => (
            ss_rows_of_means / (nf - 1.0),
            ss_within / (nf * (kf - 1.0)),
            nf - 1.0,
            nf * (kf - 1.0),
        ),
        IccVariant::ShroutFleiss3_1 => {
            let col_means: Vec<f64> = (0..k).map(|s| scores.iter().map(|r| r[s]).sum::<f64>() / nf).collect();
            let ss_cols: f64 = nf * col_means.iter().map(|m| (m - grand).powi(2)).sum::<f64>();
            let ss_err = (ss_within - ss_cols).max(0.0);
            let df_e = (nf - 1.0) * (kf - 1.0);
            (kf * ss_rows_of_means / (nf - 1.0), ss_err / df_e, nf - 1.0, df_e)
        }
    };
    let denom = ms + (kf - 1.0) * ms_e;
    if denom == 0.0 {
        return Err(Error::DegenerateData("ICC denominator is zero"));
    }
    let value = (ms - ms_e) / denom;
    let f = if ms_e == 0.0 { f64::INFINITY } else { ms / ms_e };
    Ok(IccResult {
        variant,
        icc: value,
        ms_between: ms,
        ms_error: ms_e,
        f,
        df1,
        df2,
        p_value: f_test_p(f, df1, df2),
        k,
        band: ReliabilityBand::of(value),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RetestReport {
    pub n_pairs: usize,
    pub pearson: Correlation,
    pub pearson_meets_baseline: bool,
    pub icc_printed: IccResult,
    pub icc_shrout_fleiss: IccResult,
    pub unmatched_test: Vec<String>,
    pub unmatched_retest: Vec<String>,
}

pub fn retest_report(pairs: &RetestPairs) -> Result<RetestReport> {
    let scores = pairs.total_scores();
    let test: Vec<f64> = scores.iter().map(|r| r[0]).collect();
    let retest: Vec<f64> = scores.iter().map(|r| r[1]).collect();
    let pearson = pearson_test(&test, &retest)?;
    Ok(RetestReport {
        n_pairs: scores.len(),
        pearson_meets_baseline: pearson.r > RHO_BASELINE,
        pearson,
        icc_printed: icc(&scores, IccVariant::PaperFormula)?,
        icc_shrout_fleiss: icc(&scores, IccVariant::ShroutFleiss3_1)?,
        unmatched_test: pairs.unmatched_test.clone(),
        unmatched_retest: pairs.unmatched_retest.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scale::{Dimension, Item, ScaleDefinition, STANDARD_LIKERT_LABELS};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn scale(m: usize) -> ScaleDefinition {
        let items = (1..=m)
            .map(|id| Item { id, text: String::new(), dimension: Dimension::Utility })
            .collect();
        let labels = STANDARD_LIKERT_LABELS.iter().map(|s| s.to_string()).collect();
        // single-item scales are not valid instruments; use 2 and ignore one if needed
        ScaleDefinition::new("t", "1", items, labels, None).unwrap()
    }

    fn oracle_pearson(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len() as f64;
        let mx = x.iter().sum::<f64>() / n;
        let my = y.iter().sum::<f64>() / n;
        let num: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
        let dx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
        let dy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
        num / (dx * dy).sqrt()
    }

    #[test]
    fn pearson_basics() {
        assert!((pearson(&[1., 2., 3., 4.], &[1., 2., 3., 4.]).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson(&[1., 2., 3.], &[3., 2., 1.]).unwrap() + 1.0).abs() < 1e-15);
        assert!(matches!(pearson(&[1., 1., 1.], &[1., 2., 3.]), Err(Error::ConstantInput(_))));
        assert!(matches!(pearson(&[1., 2., 3.], &[1., 2.]), Err(Error::LengthMismatch(3, 2))));
    }

    #[test]
    fn pearson_matches_oracle_on_random_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x: Vec<f64> = (0..50).map(|_| rng.random::<f64>()).collect();
        let y: Vec<f64> = (0..50).map(|_| rng.random::<f64>()).collect();
        let r = pearson(&x, &y).unwrap();
        let o = oracle_pearson(&x, &y);
        assert!((r - o).abs() <= 1e-12 * o.abs());
    }

    #[test]
    fn item_total_degenerate_cases() {
        let s = scale(2);
        // item 2 = 6 - item 1 makes the total constant
        let m = ResponseMatrix::from_rows(&s, vec![vec![1, 5], vec![2, 4], vec![4, 2]]).unwrap();
        assert!(matches!(item_total_correlation(&m, 1, false), Err(Error::ConstantInput("total score"))));
        // item equal to its total when the other item is constant
        let m = ResponseMatrix::from_rows(&s, vec![vec![1, 3], vec![2, 3], vec![4, 3]]).unwrap();
        assert!((item_total_correlation(&m, 1, false).unwrap() - 1.0).abs() < 1e-15);
    }

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize, m: usize) -> ResponseMatrix {
        let rows = (0..n).map(|_| (0..m).map(|_| rng.random_range(1..=5u8)).collect()).collect();
        ResponseMatrix::from_rows(&scale(m), rows).unwrap()
    }

    #[test]
    fn item_total_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_matrix(&mut rng, 40, 18);
        let totals = m.totals_f64();
        for i in 0..18 {
            let o = oracle_pearson(&m.column(i), &totals);
            let r = item_total_correlation(&m, i + 1, false).unwrap();
            assert!((r - o).abs() <= 1e-12 * o.abs().max(1e-3));
        }
    }

    #[test]
    fn inter_item_flags() {
        let s = scale(3);
        let m = ResponseMatrix::from_rows(
            &s,
            vec![vec![1, 1, 3], vec![2, 2, 3], vec![5, 5, 3], vec![3, 3, 3]],
        )
        .unwrap();
        let ii = inter_item_matrix(&m).unwrap();
        assert!((ii.get(0, 1).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(ii.flag(1, 2), Some(PairFlag::Redundant));
        assert_eq!(ii.flag(1, 3), Some(PairFlag::Undefined));
        assert_eq!(ii.get(2, 2), None);
    }

    #[test]
    fn independent_noise_is_poorly_homogeneous() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_matrix(&mut rng, 1000, 4);
        let ii = inter_item_matrix(&m).unwrap();
        for a in 0..4 {
            for b in (a + 1)..4 {
                assert!(ii.get(a, b).unwrap().abs() < 0.2);
                assert_eq!(ii.flag(a + 1, b + 1), Some(PairFlag::PoorHomogeneity));
            }
        }
    }

    #[test]
    fn alpha_known_values() {
        let x = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        assert!((cronbach_alpha_columns(&[x.clone(), x]).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            cronbach_alpha_columns(&[vec![1.0, 2.0]]),
            Err(Error::TooFew { what: "items", .. })
        ));
        assert!(matches!(
            cronbach_alpha_columns(&[vec![1.0, 2.0], vec![2.0, 1.0]]),
            Err(Error::ZeroTotalVariance)
        ));
    }

    #[test]
    fn alpha_near_zero_for_uncorrelated_items() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let cols: Vec<Vec<f64>> = (0..2).map(|_| (0..2000).map(|_| rng.random::<f64>()).collect()).collect();
        assert!(cronbach_alpha_columns(&cols).unwrap().abs() < 0.15);
    }

    #[test]
    fn icc_hand_computed_shift_fixture() {
        let scores = vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]];
        // ms = 8/2 = 4, ms_e = 6 * 0.25 / 3 = 0.5 -> 3.5 / 4.5
        let p = icc(&scores, IccVariant::PaperFormula).unwrap();
        assert!((p.icc - 7.0 / 9.0).abs() < 1e-15);
        let sf = icc(&scores, IccVariant::ShroutFleiss3_1).unwrap();
        assert!((sf.icc - 1.0).abs() < 1e-15);
    }

    #[test]
    fn icc_identical_sessions() {
        let scores = vec![vec![10.0, 10.0], vec![20.0, 20.0], vec![15.0, 15.0]];
        for v in [IccVariant::PaperFormula, IccVariant::ShroutFleiss3_1] {
            let r = icc(&scores, v).unwrap();
            assert_eq!(r.icc, 1.0);
            assert_eq!(r.band, ReliabilityBand::Excellent);
            assert_eq!(r.p_value, 0.0);
        }
        let flat = vec![vec![1.0, 1.0]; 3];
        assert!(matches!(icc(&flat, IccVariant::PaperFormula), Err(Error::DegenerateData(_))));
    }

    #[test]
    fn bands() {
        assert_eq!(ReliabilityBand::of(0.8609), ReliabilityBand::Good);
        assert_eq!(ReliabilityBand::of(0.95), ReliabilityBand::Excellent);
        assert_eq!(ReliabilityBand::of(0.75), ReliabilityBand::Good);
    }

    proptest! {
        #[test]
        fn pearson_symmetric_and_affine_invariant(
            x in prop::collection::vec(-100.0f64..100.0, 5..30),
            a in 0.1f64..10.0, b in -5.0f64..5.0,
        ) {
            let y: Vec<f64> = x.iter().enumerate().map(|(i, v)| v.sin() * 3.0 + i as f64).collect();
            prop_assume!(sum_sq_dev(&x) > 1e-6 && sum_sq_dev(&y) > 1e-6);
            let r = pearson(&x, &y).unwrap();
            prop_assert!((r - pearson(&y, &x).unwrap()).abs() < 1e-12);
            let xs: Vec<f64> = x.iter().map(|v| a * v + b).collect();
            prop_assert!((r - pearson(&xs, &y).unwrap()).abs() < 1e-9);
            prop_assert!(r.abs() <= 1.0);
        }

        #[test]
        fn alpha_invariances(seed in any::<u64>(), shift in -3.0f64..3.0, scale_by in 0.2f64..5.0, col in 0usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let common: Vec<f64> = (0..30).map(|_| rng.random::<f64>()).collect();
            let cols: Vec<Vec<f64>> = (0..4)
                .map(|_| common.iter().map(|c| c + rng.random::<f64>()).collect())
                .collect();
            let a = cronbach_alpha_columns(&cols).unwrap();
            prop_assert!(a <= 1.0);
            let mut shifted = cols.clone();
            shifted[col].iter_mut().for_each(|v| *v += shift);
            prop_assert!((a - cronbach_alpha_columns(&shifted).unwrap()).abs() < 1e-9);
            let scaled: Vec<Vec<f64>> = cols.iter().map(|c| c.iter().map(|v| v * scale_by).collect()).collect();
            prop_assert!((a - cronbach_alpha_columns(&scaled).unwrap()).abs() < 1e-9);
        }

        #[test]
        fn inter_item_symmetric_unit_diagonal(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_matrix(&mut rng, 25, 5);
            let ii = inter_item_matrix(&m).unwrap();
            for a in 0..5 {
                for b in 0..5 {
                    prop_assert_eq!(ii.get(a, b), ii.get(b, a));
                }
                if sum_sq_dev(&m.column(a)) > 0.0 {
                    prop_assert_eq!(ii.get(a, a), Some(1.0));
                }
            }
        }

        #[test]
        fn uncorrected_item_total_exceeds_corrected(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = scale(6);
            let rows: Vec<Vec<u8>> = (0..60)
                .map(|_| {
                    let f = rng.random_range(0..=2u8);
                    (0..6).map(|_| 1 + f + rng.random_range(0..=2u8)).collect()
                })
                .collect();
            let m = ResponseMatrix::from_rows(&s, rows).unwrap();
            for i in 1..=6 {
                let (u, c) = (item_total_correlation(&m, i, false), item_total_correlation(&m, i, true));
                if let (Ok(u), Ok(c)) = (u, c) {
                    prop_assert!(u > c);
                }
            }
        }
    }
}
