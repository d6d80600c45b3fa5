//! Discriminant validity: repeated holdout classification with a linear
//! discriminant, and parametric comparison of participant totals between
//! groups.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::ingest::distinct_in_order;
use crate::stats::{f_test_p, mean, sum_sq_dev, t_test_p, variance};

pub const CHANCE_ACCURACY: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub n_trials: usize,
    pub train_fraction: f64,
    pub seed: u64,
    /// Blend of the pooled covariance toward a scaled identity.
    pub shrinkage: f64,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            n_trials: 100,
            train_fraction: 0.7,
            seed: 0,
            shrinkage: 0.1,
        }
    }
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trials == 0 {
            return Err(Error::BadConfig("n_trials must be at least 1".into()));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::BadConfig(format!(
                "train_fraction must be in (0, 1), got {}",
                self.train_fraction
            )));
        }
        if !(0.0..=1.0).contains(&self.shrinkage) {
            return Err(Error::BadConfig(format!("shrinkage must be in [0, 1], got {}", self.shrinkage)));
        }
        Ok(())
    }
}

/// Random stream for one trial: ChaCha8 keyed by the master seed, with the
/// trial index as the stream id. Trials are therefore independent of the
/// order in which they run.
pub fn trial_rng(master_seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial as u64);
    rng
}

/// Per-class proportional split. Both returned index lists are sorted.
pub fn stratified_split<S: AsRef<str>>(
    labels: &[S],
    train_fraction: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let classes = distinct_in_order(labels.iter().map(AsRef::as_ref));
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in &classes {
        let mut members: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter(|(_, l)| l.as_ref() == class)
            .map(|(i, _)| i)
            .collect();
        if members.len() < 2 {
            return Err(Error::ClassTooSmall(class.clone()));
        }
        members.shuffle(rng);
        let n = members.len();
        let n_train = ((train_fraction * n as f64).round() as usize).clamp(1, n - 1);
        train.extend_from_slice(&members[..n_train]);
        test.extend_from_slice(&members[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Two-class Fisher discriminant. Predicts class 0 when `wᵀx + b > 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearDiscriminant {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearDiscriminant {
    pub fn score(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        if self.score(x) > 0.0 {
            0
        } else {
            1
        }
    }
}

/// Fits on `features` with labels in {0, 1}.
pub fn fit_linear_discriminant(features: &[Vec<f64>], labels: &[usize], shrinkage: f64) -> Result<LinearDiscriminant> {
    if features.len() != labels.len() {
        return Err(Error::LengthMismatch(features.len(), labels.len()));
    }
    let p = features.first().map_or(0, Vec::len);
    let mut sums = [DVector::<f64>::zeros(p), DVector::zeros(p)];
    let mut counts = [0usize; 2];
    for (x, &y) in features.iter().zip(labels) {
        if y > 1 {
            return Err(Error::NotBinary(y + 1));
        }
        sums[y] += DVector::from_column_slice(x);
        counts[y] += 1;
    }
    if counts.contains(&0) {
        return Err(Error::NotBinary(1));
    }
    let means = [&sums[0] / counts[0] as f64, &sums[1] / counts[1] as f64];
    let mut scatter = DMatrix::<f64>::zeros(p, p);
    for (x, &y) in features.iter().zip(labels) {
        let d = DVector::from_column_slice(x) - &means[y];
        scatter += &d * d.transpose();
    }
    let n = features.len();
    let dof = if n > 2 { n - 2 } else { n };
    let pooled = scatter / dof as f64;
    let target = pooled.trace() / p as f64;
    let cov = &pooled * (1.0 - shrinkage) + DMatrix::identity(p, p) * (shrinkage * target);

    let eig = SymmetricEigen::new(cov.clone());
    let max = eig.eigenvalues.amax();
    let min = eig.eigenvalues.min();
    if !(max > 0.0) || min <= 1e-12 * max {
        return Err(Error::SingularCovariance);
    }
    let chol = cov.cholesky().ok_or(Error::SingularCovariance)?;
    let w = chol.solve(&(&means[0] - &means[1]));
    let bias = -0.5 * w.dot(&(&means[0] + &means[1]));
    Ok(LinearDiscriminant {
        weights: w.iter().copied().collect(),
        bias,
    })
}

/// Macro-averaged F1 over the two classes; a class never predicted
/// contributes 0.
pub fn macro_f1(truth: &[usize], predicted: &[usize]) -> f64 {
    let mut total = 0.0;
    for c in 0..2 {
        let tp = truth.iter().zip(predicted).filter(|(&t, &p)| t == c && p == c).count() as f64;
        let fp = truth.iter().zip(predicted).filter(|(&t, &p)| t != c && p == c).count() as f64;
        let fn_ = truth.iter().zip(predicted).filter(|(&t, &p)| t == c && p != c).count() as f64;
        if tp + fp > 0.0 && tp + fn_ > 0.0 {
            total += 2.0 * tp / (2.0 * tp + fp + fn_);
        }
    }
    total / 2.0
}

pub fn accuracy(truth: &[usize], predicted: &[usize]) -> f64 {
    truth.iter().zip(predicted).filter(|(t, p)| t == p).count() as f64 / truth.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialResult {
    pub trial: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub accuracy: f64,
    pub macro_f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscriminantReport {
    pub classes: Vec<String>,
    pub config: TrialConfig,
    pub accuracy_mean: f64,
    pub accuracy_sd: f64,
    pub macro_f1_mean: f64,
    pub macro_f1_sd: f64,
    pub baseline_accuracy: f64,
    pub per_trial: Vec<TrialResult>,
}

fn mean_sd(x: &[f64]) -> (f64, f64) {
    let m = mean(x);
    let sd = if x.len() > 1 { variance(x).sqrt() } else { 0.0 };
    (m, sd)
}

pub fn run_discriminant_trials<S: AsRef<str> + Sync>(
    features: &[Vec<f64>],
    labels: &[S],
    config: &TrialConfig,
) -> Result<DiscriminantReport> {
    run_discriminant_trials_with(features, labels, config, Execution::default())
}

pub fn run_discriminant_trials_with<S: AsRef<str> + Sync>(
    features: &[Vec<f64>],
    labels: &[S],
    config: &TrialConfig,
    exec: Execution,
) -> Result<DiscriminantReport> {
    config.validate()?;
    if features.len() != labels.len() {
        return Err(Error::LengthMismatch(features.len(), labels.len()));
    }
    let classes = distinct_in_order(labels.iter().map(AsRef::as_ref));
    if classes.len() != 2 {
        return Err(Error::NotBinary(classes.len()));
    }
    let y: Vec<usize> = labels
        .iter()
        .map(|l| usize::from(l.as_ref() != classes[0]))
        .collect();

    let per_trial = exec.try_map_indexed(config.n_trials, |trial| {
        run_trial(features, labels, &y, config, trial).map_err(|e| Error::Trial {
            trial,
            source: Box::new(e),
        })
    })?;

    let acc: Vec<f64> = per_trial.iter().map(|t| t.accuracy).collect();
    let f1: Vec<f64> = per_trial.iter().map(|t| t.macro_f1).collect();
    let (accuracy_mean, accuracy_sd) = mean_sd(&acc);
    let (macro_f1_mean, macro_f1_sd) = mean_sd(&f1);
    Ok(DiscriminantReport {
        classes,
        config: *config,
        accuracy_mean,
        accuracy_sd,
        macro_f1_mean,
        macro_f1_sd,
        baseline_accuracy: CHANCE_ACCURACY,
        per_trial,
    })
}

fn run_trial<S: AsRef<str>>(
    features: &[Vec<f64>],
    labels: &[S],
    y: &[usize],
    config: &TrialConfig,
    trial: usize,
) -> Result<TrialResult> {
    let mut rng = trial_rng(config.seed, trial);
    let (train, test) = stratified_split(labels, config.train_fraction, &mut rng)?;
    let xs: Vec<Vec<f64>> = train.iter().map(|&i| features[i].clone()).collect();
    let ys: Vec<usize> = train.iter().map(|&i| y[i]).collect();
    let model = fit_linear_discriminant(&xs, &ys, config.shrinkage)?;
    let truth: Vec<usize> = test.iter().map(|&i| y[i]).collect();
    let predicted: Vec<usize> = test.iter().map(|&i| model.predict(&features[i])).collect();
    Ok(TrialResult {
        trial,
        n_train: train.len(),
        n_test: test.len(),
        accuracy: accuracy(&truth, &predicted),
        macro_f1: macro_f1(&truth, &predicted),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupSummary {
    pub label: String,
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub standard_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnovaTable {
    pub test: &'static str,
    pub f: f64,
    pub df_effect: f64,
    pub df_residual: f64,
    pub ss_effect: f64,
    pub ss_residual: f64,
    pub ms_effect: f64,
    /// Residual mean square, i.e. the within-group variance.
    pub ms_residual: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TTest {
    pub test: &'static str,
    pub t: f64,
    pub df: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupComparisonReport {
    pub groups: Vec<GroupSummary>,
    pub one_way: AnovaTable,
    /// Group effect adjusted for the blocking factor (additive model).
    pub blocked: Option<AnovaTable>,
    /// Blocking-factor effect adjusted for group.
    pub block_effect: Option<AnovaTable>,
    pub welch: Option<TTest>,
    pub student: Option<TTest>,
    pub cohens_d: Option<f64>,
    /// Within-group variance of the one-way model.
    pub group_variance: f64,
}

/// Compares totals across groups. With exactly two groups the t-tests and
/// Cohen's d (first group minus second) are included.
pub fn group_comparison<S: AsRef<str>>(
    totals: &[f64],
    groups: &[S],
    blocking: Option<&[S]>,
) -> Result<GroupComparisonReport> {
    if totals.len() != groups.len() {
        return Err(Error::LengthMismatch(totals.len(), groups.len()));
    }
    let labels = distinct_in_order(groups.iter().map(AsRef::as_ref));
    if labels.len() < 2 {
        return Err(Error::NotBinary(labels.len()));
    }
    let samples: Vec<Vec<f64>> = labels
        .iter()
        .map(|l| {
            totals
                .iter()
                .zip(groups)
                .filter(|(_, g)| g.as_ref() == l)
                .map(|(t, _)| *t)
                .collect()
        })
        .collect();
    for (l, s) in labels.iter().zip(&samples) {
        if s.len() < 2 {
            return Err(Error::ClassTooSmall(l.clone()));
        }
    }
    if samples.iter().all(|s| sum_sq_dev(s) == 0.0) {
        return Err(Error::DegenerateGroup);
    }

    let summaries = labels
        .iter()
        .zip(&samples)
        .map(|(l, s)| {
            let sd = variance(s).sqrt();
            GroupSummary {
                label: l.clone(),
                n: s.len(),
                mean: mean(s),
                sd,
                standard_error: sd / (s.len() as f64).sqrt(),
            }
        })
        .collect();

    let one_way = one_way_anova(&samples);
    let group_variance = one_way.ms_residual;

    let (blocked, block_effect) = match blocking {
        Some(blocks) => {
            if blocks.len() != totals.len() {
                return Err(Error::LengthMismatch(totals.len(), blocks.len()));
            }
            let g: Vec<&str> = groups.iter().map(AsRef::as_ref).collect();
            let b: Vec<&str> = blocks.iter().map(AsRef::as_ref).collect();
            let (grp, blk) = additive_anova(totals, &g, &b)?;
            (Some(grp), Some(blk))
        }
        None => (None, None),
    };

    let (welch, student, cohens_d) = if samples.len() == 2 {
        let (a, b) = (&samples[0], &samples[1]);
        let (na, nb) = (a.len() as f64, b.len() as f64);
        let (va, vb) = (variance(a), variance(b));
        let diff = mean(a) - mean(b);

        let se_w = (va / na + vb / nb).sqrt();
        let df_w = (va / na + vb / nb).powi(2) / ((va / na).powi(2) / (na - 1.0) + (vb / nb).powi(2) / (nb - 1.0));
        let t_w = diff / se_w;

        let pooled = ((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0);
        let t_s = diff / (pooled * (1.0 / na + 1.0 / nb)).sqrt();
        let df_s = na + nb - 2.0;
        (
            Some(TTest {
                test: "Welch two-sample t-test",
                t: t_w,
                df: df_w,
                p_value: t_test_p(t_w, df_w),
            }),
            Some(TTest {
                test: "Student two-sample t-test (pooled variance)",
                t: t_s,
                df: df_s,
                p_value: t_test_p(t_s, df_s),
            }),
            Some(diff / pooled.sqrt()),
        )
    } else {
        (None, None, None)
    };

    Ok(GroupComparisonReport {
        groups: summaries,
        one_way,
        blocked,
        block_effect,
        welch,
        student,
        cohens_d,
        group_variance,
    })
}

fn one_way_anova(samples: &[Vec<f64>]) -> AnovaTable {
    let all: Vec<f64> = samples.iter().flatten().copied().collect();
    let grand = mean(&all);
    let ss_between: f64 = samples.iter().map(|s| s.len() as f64 * (mean(s) - grand).powi(2)).sum();
    let ss_within: f64 = samples.iter().map(|s| sum_sq_dev(s)).sum();
    let df_b = samples.len() as f64 - 1.0;
    let df_w = all.len() as f64 - samples.len() as f64;
    let ms_b = ss_between / df_b;
    let ms_w = ss_within / df_w;
    let f = ms_b / ms_w;
    AnovaTable {
        test: "one-way ANOVA on group",
        f,
        df_effect: df_b,
        df_residual: df_w,
        ss_effect: ss_between,
        ss_residual: ss_within,
        ms_effect: ms_b,
        ms_residual: ms_w,
        p_value: f_test_p(f, df_b, df_w),
    }
}

fn dummies(labels: &[&str]) -> Vec<Vec<f64>> {
    let levels = distinct_in_order(labels.iter().copied());
    levels[1..]
        .iter()
        .map(|lvl| labels.iter().map(|l| f64::from(u8::from(l == lvl))).collect())
        .collect()
}

fn residual_ss(y: &DVector<f64>, columns: &[Vec<f64>]) -> Result<(f64, usize)> {
    let n = y.len();
    let mut x = DMatrix::from_element(n, columns.len() + 1, 1.0);
    for (c, col) in columns.iter().enumerate() {
        x.set_column(c + 1, &DVector::from_column_slice(col));
    }
    let svd = x.clone().svd(true, true);
    let rank = svd.rank(1e-10 * svd.singular_values.max());
    let beta = svd.solve(y, 1e-10).map_err(|_| Error::DegenerateData("design matrix"))?;
    let resid = y - x * beta;
    Ok((resid.norm_squared(), rank))
}

/// Type-II F tests for the additive `group + block` model.
fn additive_anova(y: &[f64], groups: &[&str], blocks: &[&str]) -> Result<(AnovaTable, AnovaTable)> {
    let yv = DVector::from_column_slice(y);
    let g = dummies(groups);
    let b = dummies(blocks);
    let full: Vec<Vec<f64>> = g.iter().chain(&b).cloned().collect();
    let (rss_full, rank_full) = residual_ss(&yv, &full)?;
    let (rss_no_group, rank_no_group) = residual_ss(&yv, &b)?;
    let (rss_no_block, rank_no_block) = residual_ss(&yv, &g)?;
    let df_res = (y.len() - rank_full) as f64;
    if df_res <= 0.0 {
        return Err(Error::DegenerateData("no residual degrees of freedom"));
    }
    let ms_res = rss_full / df_res;
    let table = |test, rss_reduced: f64, rank_reduced: usize| {
        let df = (rank_full - rank_reduced) as f64;
        let ss = (rss_reduced - rss_full).max(0.0);
        let ms = if df > 0.0 { ss / df } else { 0.0 };
        let f = ms / ms_res;
        AnovaTable {
            test,
            f,
            df_effect: df,
            df_residual: df_res,
            ss_effect: ss,
            ss_residual: rss_full,
            ms_effect: ms,
            ms_residual: ms_res,
            p_value: if df > 0.0 { f_test_p(f, df, df_res) } else { 1.0 },
        }
    };
    Ok((
        table("two-factor additive ANOVA: group effect adjusted for domain", rss_no_group, rank_no_group),
        table("two-factor additive ANOVA: domain effect adjusted for group", rss_no_block, rank_no_block),
    ))
}
