//! Synthetic Likert data with planted factor structure.
//!
//! Each respondent row draws from its own ChaCha8 stream (`seed_from_u64`
//! of the seed, stream id = row index), so rows can be generated in any
//! order. Normal variates use the Box–Muller transform on 53-bit uniforms
//! `u = (next_u64 >> 11) · 2⁻⁵³`, taking `1 − u` as the radius argument.

use nalgebra::DMatrix;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::scale::{Dimension, RespondentMeta, ResponseMatrix, ScaleDefinition, Wave};

pub const DEFAULT_THRESHOLDS: [f64; 4] = [-1.5, -0.5, 0.5, 1.5];
/// Latent value used for each category when re-drawing a retest.
pub const CATEGORY_MIDPOINTS: [f64; 5] = [-2.0, -1.0, 0.0, 1.0, 2.0];

pub const POSITIVE_GROUP: &str = "Positive";
pub const NEGATIVE_GROUP: &str = "Negative";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    /// M × K loading matrix, row per item.
    pub loadings: Vec<Vec<f64>>,
    /// K × K factor correlation matrix.
    pub factor_correlations: Vec<Vec<f64>>,
    /// Unique variance per item.
    pub uniqueness: Vec<f64>,
    pub n: usize,
    pub thresholds: [f64; 4],
    /// Latent shift between the two arms when generating grouped data.
    pub group_effect: Option<f64>,
    /// Noise sd for a retest wave.
    pub retest_noise: Option<f64>,
    pub seed: u64,
}

impl GeneratorSpec {
    /// One factor, equal loadings, unit latent variance per item.
    pub fn one_factor(m: usize, loading: f64, n: usize, seed: u64) -> Self {
        GeneratorSpec {
            loadings: vec![vec![loading]; m],
            factor_correlations: vec![vec![1.0]],
            uniqueness: vec![(1.0 - loading * loading).max(1e-6); m],
            n,
            thresholds: DEFAULT_THRESHOLDS,
            group_effect: None,
            retest_noise: None,
            seed,
        }
    }

    /// Simple structure following the scale's dimensions: each item loads
    /// `loading` on its own dimension, factors correlate at `phi`.
    pub fn for_scale(scale: &ScaleDefinition, loading: f64, phi: f64, n: usize, seed: u64) -> Self {
        let dims: &[Dimension] = scale.dimensions();
        let k = dims.len();
        let loadings = scale
            .items()
            .iter()
            .map(|it| {
                let f = dims.iter().position(|d| d == &it.dimension).unwrap_or(0);
                (0..k).map(|c| if c == f { loading } else { 0.0 }).collect()
            })
            .collect();
        let factor_correlations = (0..k)
            .map(|a| (0..k).map(|b| if a == b { 1.0 } else { phi }).collect())
            .collect();
        GeneratorSpec {
            loadings,
            factor_correlations,
            uniqueness: vec![(1.0 - loading * loading).max(1e-6); scale.item_count()],
            n,
            thresholds: DEFAULT_THRESHOLDS,
            group_effect: None,
            retest_noise: None,
            seed,
        }
    }

    pub fn n_items(&self) -> usize {
        self.loadings.len()
    }

    pub fn n_factors(&self) -> usize {
        self.factor_correlations.len()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::BadSpec(m));
        let k = self.n_factors();
        if self.loadings.is_empty() || k == 0 {
            return bad("need at least one item and one factor".into());
        }
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        if self.loadings.iter().any(|r| r.len() != k || r.iter().any(|v| !v.is_finite())) {
            return bad(format!("every loading row needs {k} finite entries"));
        }
        if self.uniqueness.len() != self.n_items() || self.uniqueness.iter().any(|&u| !(u > 0.0) || !u.is_finite()) {
            return bad("uniquenesses must be positive, one per item".into());
        }
        if self.thresholds.windows(2).any(|w| !(w[0] < w[1])) {
            return bad("thresholds must be strictly increasing".into());
        }
        for (a, row) in self.factor_correlations.iter().enumerate() {
            if row.len() != k {
                return bad("factor correlation matrix must be square".into());
            }
            for (b, &v) in row.iter().enumerate() {
                if a == b && v != 1.0 {
                    return bad("factor correlations need a unit diagonal".into());
                }
                if !(v.abs() <= 1.0) || v != self.factor_correlations[b][a] {
                    return bad("factor correlations must be symmetric with |r| ≤ 1".into());
                }
            }
        }
        if let Some(s) = self.retest_noise {
            if !(s >= 0.0) {
                return bad("retest noise must be non-negative".into());
            }
        }
        if let Some(d) = self.group_effect {
            if !d.is_finite() {
                return bad("group effect must be finite".into());
            }
        }
        Ok(())
    }

    fn factor_cholesky(&self) -> Result<DMatrix<f64>> {
        let k = self.n_factors();
        let phi = DMatrix::from_fn(k, k, |a, b| self.factor_correlations[a][b]);
        phi.cholesky()
            .map(|c| c.l())
            .ok_or_else(|| Error::BadSpec("factor correlation matrix is not positive definite".into()))
    }
}

/// Deterministic standard-normal stream.
pub struct NormalStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl NormalStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        NormalStream { rng, spare: None }
    }

    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }
}

/// 1 + number of thresholds strictly below `x`.
pub fn discretize(x: f64, thresholds: &[f64; 4]) -> u8 {
    1 + thresholds.iter().filter(|&&t| x > t).count() as u8
}

fn latent_row(spec: &GeneratorSpec, chol: &DMatrix<f64>, stream: u64, shift: f64) -> Vec<u8> {
    let mut normals = NormalStream::new(spec.seed, stream);
    let k = spec.n_factors();
    let z: Vec<f64> = (0..k).map(|_| normals.next_normal()).collect();
    let f: Vec<f64> = (0..k).map(|a| (0..=a).map(|b| chol[(a, b)] * z[b]).sum()).collect();
    spec.loadings
        .iter()
        .zip(&spec.uniqueness)
        .map(|(lam, psi)| {
            let common: f64 = lam.iter().zip(&f).map(|(l, v)| l * v).sum();
            let x = common + psi.sqrt() * normals.next_normal() + shift;
            discretize(x, &spec.thresholds)
        })
        .collect()
}

fn check_scale(spec: &GeneratorSpec, scale: &ScaleDefinition) -> Result<()> {
    if scale.item_count() != spec.n_items() {
        return Err(Error::BadSpec(format!(
            "spec has {} items but the scale has {}",
            spec.n_items(),
            scale.item_count()
        )));
    }
    if scale.likert_codes() != [1, 2, 3, 4, 5] {
        return Err(Error::BadSpec("generator emits codes 1–5".into()));
    }
    Ok(())
}

/// Raw code rows for `spec`, no scale attached.
pub fn generate_codes(spec: &GeneratorSpec, exec: Execution) -> Result<Vec<Vec<u8>>> {
    spec.validate()?;
    let chol = spec.factor_cholesky()?;
    Ok(exec.map_indexed(spec.n, |j| latent_row(spec, &chol, j as u64, 0.0)))
}

pub fn generate_factor_data(spec: &GeneratorSpec, scale: &ScaleDefinition) -> Result<ResponseMatrix> {
    generate_factor_data_with(spec, scale, Execution::default())
}

pub fn generate_factor_data_with(spec: &GeneratorSpec, scale: &ScaleDefinition, exec: Execution) -> Result<ResponseMatrix> {
    check_scale(spec, scale)?;
    let rows = generate_codes(spec, exec)?;
    ResponseMatrix::from_rows(scale, rows)
}

/// `n_per_group` Positive respondents followed by `n_per_group` Negative
/// ones whose latent item values are shifted by `-delta`.
pub fn generate_two_group(spec: &GeneratorSpec, scale: &ScaleDefinition, delta: f64, n_per_group: usize) -> Result<ResponseMatrix> {
    generate_two_group_with(spec, scale, delta, n_per_group, Execution::default())
}

pub fn generate_two_group_with(
    spec: &GeneratorSpec,
    scale: &ScaleDefinition,
    delta: f64,
    n_per_group: usize,
    exec: Execution,
) -> Result<ResponseMatrix> {
    // `spec.n` is superseded by `n_per_group` here
    GeneratorSpec { n: 2 * n_per_group.max(1), ..spec.clone() }.validate()?;
    check_scale(spec, scale)?;
    if !delta.is_finite() {
        return Err(Error::BadSpec("delta must be finite".into()));
    }
    if n_per_group == 0 {
        return Err(Error::BadSpec("n_per_group must be positive".into()));
    }
    let chol = spec.factor_cholesky()?;
    let rows = exec.map_indexed(2 * n_per_group, |j| {
        let shift = if j < n_per_group { 0.0 } else { -delta };
        latent_row(spec, &chol, j as u64, shift)
    });
    let meta = (0..2 * n_per_group)
        .map(|j| {
            let group = if j < n_per_group { POSITIVE_GROUP } else { NEGATIVE_GROUP };
            RespondentMeta::new(format!("r{}", j + 1)).with_group(group)
        })
        .collect();
    ResponseMatrix::new(scale, meta, rows, Wave::Test)
}

/// Retest wave: each code is mapped to its category midpoint, perturbed by
/// `N(0, noise²)` and discretized again with the default thresholds.
/// Respondent ids are kept so the waves pair up.
pub fn generate_retest(matrix: &ResponseMatrix, scale: &ScaleDefinition, noise: f64, seed: u64) -> Result<ResponseMatrix> {
    if !(noise >= 0.0) {
        return Err(Error::BadSpec("retest noise must be non-negative".into()));
    }
    let codes = scale.likert_codes();
    let rows = Execution::default().map_indexed(matrix.n_respondents(), |j| {
        let mut normals = NormalStream::new(seed, j as u64);
        matrix
            .row(j)
            .iter()
            .map(|&c| {
                let k = codes.iter().position(|&x| x == c).unwrap_or(0);
                let x = CATEGORY_MIDPOINTS[k] + noise * normals.next_normal();
                codes[usize::from(discretize(x, &DEFAULT_THRESHOLDS)) - 1]
            })
            .collect()
    });
    ResponseMatrix::new(scale, matrix.respondents().to_vec(), rows, Wave::Retest)
}

/// Assigns domains round-robin and completion times in
/// `[0.6, 1.0] × allocated` so simulated files look like survey exports.
pub fn with_survey_metadata(
    matrix: &ResponseMatrix,
    scale: &ScaleDefinition,
    domains: &[String],
    allocated_seconds: f64,
    seed: u64,
) -> Result<ResponseMatrix> {
    if !(allocated_seconds > 0.0) {
        return Err(Error::BadSpec("allocated time must be positive".into()));
    }
    let meta = matrix
        .respondents()
        .iter()
        .enumerate()
        .map(|(j, m)| {
            let mut u = NormalStream::new(seed, j as u64);
            let mut m = m.clone();
            m.domain = (!domains.is_empty()).then(|| domains[j % domains.len()].clone());
            m.allocated_duration = allocated_seconds;
            m.duration = ((0.6 + 0.4 * u.uniform()) * allocated_seconds).round();
            m
        })
        .collect();
    let rows = matrix.rows().map(<[u8]>::to_vec).collect();
    ResponseMatrix::new(scale, meta, rows, matrix.wave())
}

/// Scale with `m` items on one generic dimension, handy for synthetic runs.
pub fn generic_scale(m: usize) -> Result<ScaleDefinition> {
    let dim = Dimension::Other("General".into());
    let items = (1..=m)
        .map(|id| crate::scale::Item {
            id,
            text: format!("Item {id}"),
            dimension: dim.clone(),
        })
        .collect();
    ScaleDefinition::new(
        "SIM",
        "1.0",
        items,
        crate::scale::STANDARD_LIKERT_LABELS.iter().map(|s| s.to_string()).collect(),
        Some(vec![dim]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{correlation_matrix, efa_eigenvalues};
    use crate::discriminant::{run_discriminant_trials, TrialConfig};
    use crate::ingest::pair_retest;
    use crate::reliability::{icc, pearson, IccVariant};
    use crate::stats::mean;
    use proptest::prelude::*;
    use statrs::distribution::{ContinuousCDF, Normal};

    #[test]
    fn same_seed_same_matrix() {
        let scale = ScaleDefinition::xeq();
        let spec = GeneratorSpec::for_scale(&scale, 0.7, 0.3, 50, 11);
        let a = generate_factor_data_with(&spec, &scale, Execution::Sequential).unwrap();
        let b = generate_factor_data_with(&spec, &scale, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        let c = generate_factor_data(&GeneratorSpec { seed: 12, ..spec }, &scale).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_loadings_are_uncorrelated() {
        let scale = generic_scale(6).unwrap();
        let mut spec = GeneratorSpec::one_factor(6, 0.0, 2000, 3);
        spec.uniqueness = vec![1.0; 6];
        let m = generate_factor_data(&spec, &scale).unwrap();
        let cols = m.columns();
        for a in 0..6 {
            for b in a + 1..6 {
                assert!(pearson(&cols[a], &cols[b]).unwrap().abs() < 0.1);
            }
        }
    }

    #[test]
    fn strong_single_factor_gives_one_kaiser_factor() {
        let scale = generic_scale(10).unwrap();
        let m = generate_factor_data(&GeneratorSpec::one_factor(10, 0.9, 5000, 5), &scale).unwrap();
        let efa = efa_eigenvalues(&correlation_matrix(&m).unwrap()).unwrap();
        assert_eq!(efa.suggested_factors.count, 1);
    }

    #[test]
    fn category_frequencies_match_normal_gaps() {
        let scale = generic_scale(2).unwrap();
        let mut spec = GeneratorSpec::one_factor(2, 0.0, 100_000, 17);
        spec.uniqueness = vec![1.0; 2];
        let rows = generate_codes(&spec, Execution::default()).unwrap();
        let norm = Normal::new(0.0, 1.0).unwrap();
        let cuts = [f64::NEG_INFINITY, -1.5, -0.5, 0.5, 1.5, f64::INFINITY];
        for c in 1..=5u8 {
            let freq = rows.iter().filter(|r| r[0] == c).count() as f64 / rows.len() as f64;
            let want = norm.cdf(cuts[c as usize]) - norm.cdf(cuts[c as usize - 1]);
            assert!((freq - want).abs() < 0.01, "category {c}: {freq} vs {want}");
        }
        assert_eq!(scale.item_count(), 2);
    }

    #[test]
    fn two_group_accuracy_tracks_delta() {
        let scale = generic_scale(8).unwrap();
        let spec = GeneratorSpec::one_factor(8, 0.6, 0, 21);
        let cfg = TrialConfig { n_trials: 20, seed: 1, ..Default::default() };

        let null = generate_two_group(&spec, &scale, 0.0, 150).unwrap();
        let rep = run_discriminant_trials(&null.features(), &null.group_labels().unwrap(), &cfg).unwrap();
        assert!((rep.accuracy_mean - 0.5).abs() <= 0.1, "{}", rep.accuracy_mean);

        let far = generate_two_group(&spec, &scale, 3.0, 150).unwrap();
        let rep = run_discriminant_trials(&far.features(), &far.group_labels().unwrap(), &cfg).unwrap();
        assert!(rep.accuracy_mean >= 0.95, "{}", rep.accuracy_mean);

        let g = generate_two_group(&spec, &scale, 0.4, 500).unwrap();
        let t = g.totals_f64();
        assert!(mean(&t[..500]) > mean(&t[500..]));
    }

    #[test]
    fn retest_noise_controls_agreement() {
        let scale = generic_scale(10).unwrap();
        let m = generate_factor_data(&GeneratorSpec::one_factor(10, 0.7, 200, 8), &scale).unwrap();
        let same = generate_retest(&m, &scale, 0.0, 1).unwrap();
        assert_eq!(same.rows().collect::<Vec<_>>(), m.rows().collect::<Vec<_>>());
        assert_eq!(same.wave(), Wave::Retest);
        let pairs = pair_retest(&m, &same).unwrap();
        assert!((icc(&pairs.total_scores(), IccVariant::PaperFormula).unwrap().icc - 1.0).abs() < 1e-12);

        let noisy = generate_retest(&m, &scale, 25.0, 1).unwrap();
        let pairs = pair_retest(&m, &noisy).unwrap();
        assert!(icc(&pairs.total_scores(), IccVariant::PaperFormula).unwrap().icc < 0.3);
        assert_eq!(noisy, generate_retest(&m, &scale, 25.0, 1).unwrap());
    }

    #[test]
    fn spec_validation() {
        let mut s = GeneratorSpec::one_factor(3, 0.5, 10, 0);
        s.thresholds = [0.0, 0.0, 1.0, 2.0];
        assert!(matches!(s.validate(), Err(Error::BadSpec(_))));
        let mut s = GeneratorSpec::one_factor(3, 0.5, 10, 0);
        s.uniqueness[1] = 0.0;
        assert!(s.validate().is_err());
        let mut s = GeneratorSpec::for_scale(&ScaleDefinition::xeq(), 0.5, 0.2, 10, 0);
        s.factor_correlations[0][1] = 1.5;
        assert!(s.validate().is_err());
        assert!(generate_factor_data(&GeneratorSpec::one_factor(3, 0.5, 10, 0), &ScaleDefinition::xeq()).is_err());
    }

    proptest! {
        #[test]
        fn discretize_is_monotone(a in -5.0f64..5.0, b in -5.0f64..5.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(discretize(lo, &DEFAULT_THRESHOLDS) <= discretize(hi, &DEFAULT_THRESHOLDS));
        }

        #[test]
        fn midpoints_round_trip(c in 1u8..=5) {
            prop_assert_eq!(discretize(CATEGORY_MIDPOINTS[usize::from(c) - 1], &DEFAULT_THRESHOLDS), c);
        }
    }
}
