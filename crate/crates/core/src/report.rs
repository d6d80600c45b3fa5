//! End-to-end pipeline and report emission.
//!
//! Analyses run in a fixed order: ingestion → content validity →
//! reliability (including test-retest) → construct validity → discriminant
//! validity → scoring/benchmark. The JSON report holds every computed value
//! unrounded; anything run-specific (timestamps, tool version) lives under
//! the `metadata` key so two runs on the same inputs differ only there.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::construct::{construct_validity, CfaOptions, ConstructReport};
use crate::content::{content_validity, CviReport, DEFAULT_THRESHOLD};
use crate::discriminant::{group_comparison, run_discriminant_trials_with, DiscriminantReport, GroupComparisonReport, TrialConfig};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::ingest::{
    apply_attention_filters, load_expert_ratings, load_responses_with, pair_retest, DroppedRow, Exclusion, LoadOptions,
    MissingPolicy, PatternRule,
};
use crate::reliability::{reliability_report, retest_report, ReliabilityBaselines, ReliabilityReport, RetestReport};
use crate::scale::{Item, ResponseMatrix, ScaleDefinition, Wave};
use crate::scoring::{dimension_totals, xeq_scores, BenchmarkStore, DimensionClassification, XeqScores};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Analysis {
    ContentValidity,
    Reliability,
    TestRetest,
    ConstructValidity,
    DiscriminantValidity,
    Scoring,
}

impl Analysis {
    pub const ALL: [Analysis; 6] = [
        Analysis::ContentValidity,
        Analysis::Reliability,
        Analysis::TestRetest,
        Analysis::ConstructValidity,
        Analysis::DiscriminantValidity,
        Analysis::Scoring,
    ];

    fn needs_responses(self) -> bool {
        self != Analysis::ContentValidity
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub scale: PathBuf,
    pub responses: Option<PathBuf>,
    pub expert_ratings: Option<PathBuf>,
    pub retest: Option<PathBuf>,
    pub benchmark: Option<PathBuf>,
    pub analyses: BTreeSet<Analysis>,
    pub cvi_threshold: f64,
    pub reliability_baselines: ReliabilityBaselines,
    pub corrected_item_total: bool,
    pub missing: MissingPolicy,
    /// `None` disables the attention filters.
    pub min_time_fraction: Option<f64>,
    pub pattern_rule: PatternRule,
    /// Required when discriminant trials are enabled.
    pub seed: Option<u64>,
    pub n_trials: usize,
    pub train_fraction: f64,
    pub shrinkage: f64,
    pub weights: Option<Vec<f64>>,
    pub out_dir: Option<PathBuf>,
    /// Decimals in the human-readable tables.
    pub rounding: usize,
}

impl PipelineConfig {
    pub fn new(scale: impl Into<PathBuf>) -> Self {
        PipelineConfig {
            scale: scale.into(),
            responses: None,
            expert_ratings: None,
            retest: None,
            benchmark: None,
            analyses: BTreeSet::new(),
            cvi_threshold: DEFAULT_THRESHOLD,
            reliability_baselines: ReliabilityBaselines::default(),
            corrected_item_total: false,
            missing: MissingPolicy::Reject,
            min_time_fraction: Some(0.5),
            pattern_rule: PatternRule::default(),
            seed: None,
            n_trials: 100,
            train_fraction: 0.7,
            shrinkage: 0.1,
            weights: None,
            out_dir: None,
            rounding: 4,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |m: &str| Err(Error::Config(m.to_string()));
        if self.analyses.is_empty() {
            return cfg("at least one analysis must be enabled");
        }
        if self.analyses.iter().any(|a| a.needs_responses()) && self.responses.is_none() {
            return cfg("a responses file is required for the selected analyses");
        }
        if self.analyses.contains(&Analysis::ContentValidity) && self.expert_ratings.is_none() {
            return cfg("content validity needs an expert ratings file");
        }
        if self.analyses.contains(&Analysis::TestRetest) && self.retest.is_none() {
            return cfg("test-retest needs a retest responses file");
        }
        if self.analyses.contains(&Analysis::DiscriminantValidity) {
            if self.seed.is_none() {
                return cfg("discriminant trials need an explicit seed");
            }
            self.trial_config().validate()?;
        }
        if !(self.cvi_threshold > 0.0 && self.cvi_threshold < 1.0) {
            return cfg("CVI threshold must be in (0, 1)");
        }
        Ok(())
    }

    fn trial_config(&self) -> TrialConfig {
        TrialConfig {
            n_trials: self.n_trials,
            train_fraction: self.train_fraction,
            seed: self.seed.unwrap_or(0),
            shrinkage: self.shrinkage,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleSection {
    pub scale_id: String,
    pub version: String,
    pub items: Vec<Item>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IngestionSection {
    pub n_loaded: usize,
    pub dropped_rows: Vec<DroppedRow>,
    pub attention_filters: bool,
    pub min_time_fraction: Option<f64>,
    pub pattern_rule: PatternRule,
    pub excluded: Vec<Exclusion>,
    pub n_retained: usize,
    pub retest_n_loaded: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscriminantSection {
    pub trials: DiscriminantReport,
    pub group_comparison: GroupComparisonReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoringSection {
    #[serde(flatten)]
    pub scores: XeqScores,
    pub dimension_totals: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub benchmark: Option<Vec<DimensionClassification>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub scale: ScaleSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ingestion: Option<IngestionSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub content_validity: Option<CviReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reliability: Option<ReliabilityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_retest: Option<RetestReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub construct_validity: Option<ConstructReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discriminant_validity: Option<DiscriminantSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scoring: Option<ScoringSection>,
}

/// Run-specific values kept apart from the analysis results.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Metadata {
    pub generated_at: Option<String>,
    pub tool_version: String,
}

impl Report {
    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }

    /// Pretty JSON with the metadata block attached.
    pub fn to_json(&self, metadata: &Metadata) -> String {
        let mut v = self.to_value();
        v["metadata"] = serde_json::to_value(metadata).expect("metadata serializes");
        let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug)]
pub struct PipelineOutput {
    pub report: Report,
    pub json: String,
    pub text: String,
    pub written: Vec<PathBuf>,
}

pub fn run_pipeline(config: &PipelineConfig, metadata: &Metadata) -> Result<PipelineOutput> {
    run_pipeline_with(config, metadata, Execution::default())
}

pub fn run_pipeline_with(config: &PipelineConfig, metadata: &Metadata, exec: Execution) -> Result<PipelineOutput> {
    config.validate()?;
    let report = analyze(config, exec)?;
    let json = report.to_json(metadata);
    let text = render_text(&report, config.rounding);
    let mut written = Vec::new();
    if let Some(dir) = &config.out_dir {
        fs::create_dir_all(dir).map_err(|source| Error::Write {
            path: dir.clone(),
            source,
        })?;
        written.push(write_file(&dir.join("report.json"), &json)?);
        written.push(write_file(&dir.join("report.txt"), &text)?);
        let value = report.to_value();
        if let Ok(table) = emit_table3_style(&value, config.rounding) {
            written.push(write_file(&dir.join("table3.txt"), &table)?);
        }
        if let Some(c) = &report.construct_validity {
            let path = dir.join("scree.svg");
            emit_scree(&c.efa.eigenvalues, &path)?;
            written.push(path);
        }
    }
    Ok(PipelineOutput {
        report,
        json,
        text,
        written,
    })
}

pub fn write_file(path: &Path, contents: &str) -> Result<PathBuf> {
    fs::write(path, contents).map_err(|source| Error::Write {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(path.to_path_buf())
}

fn analyze(config: &PipelineConfig, exec: Execution) -> Result<Report> {
    let on = |a: Analysis| config.analyses.contains(&a);
    let scale = ScaleDefinition::load(&config.scale)?;
    let mut report = Report {
        scale: ScaleSection {
            scale_id: scale.scale_id().to_string(),
            version: scale.version().to_string(),
            items: scale.items().to_vec(),
        },
        ingestion: None,
        content_validity: None,
        reliability: None,
        test_retest: None,
        construct_validity: None,
        discriminant_validity: None,
        scoring: None,
    };

    // ingestion
    let mut responses: Option<ResponseMatrix> = None;
    let mut retest: Option<ResponseMatrix> = None;
    if config.analyses.iter().any(|a| a.needs_responses()) {
        let path = config.responses.as_ref().expect("validated");
        let opts = LoadOptions {
            missing: config.missing,
            wave: Wave::Test,
        };
        let (loaded, dropped_rows) = load_responses_with(path, &scale, &opts)?;
        let n_loaded = loaded.n_respondents();
        let (retained, excluded) = match config.min_time_fraction {
            Some(frac) => {
                let r = apply_attention_filters(&loaded, frac, config.pattern_rule)?;
                (r.retained, r.excluded)
            }
            None => (loaded, Vec::new()),
        };
        let mut retest_n_loaded = None;
        if on(Analysis::TestRetest) {
            let path = config.retest.as_ref().expect("validated");
            let opts = LoadOptions {
                missing: config.missing,
                wave: Wave::Retest,
            };
            let (m, _) = load_responses_with(path, &scale, &opts)?;
            retest_n_loaded = Some(m.n_respondents());
            retest = Some(m);
        }
        report.ingestion = Some(IngestionSection {
            n_loaded,
            dropped_rows,
            attention_filters: config.min_time_fraction.is_some(),
            min_time_fraction: config.min_time_fraction,
            pattern_rule: config.pattern_rule,
            excluded,
            n_retained: retained.n_respondents(),
            retest_n_loaded,
        });
        responses = Some(retained);
    }

    if on(Analysis::ContentValidity) {
        let path = config.expert_ratings.as_ref().expect("validated");
        let ratings = load_expert_ratings(path, scale.item_count())?;
        report.content_validity = Some(content_validity(&ratings, config.cvi_threshold)?);
    }

    if let Some(m) = &responses {
        if on(Analysis::Reliability) {
            report.reliability = Some(reliability_report(
                m,
                config.corrected_item_total,
                config.reliability_baselines,
                exec,
            )?);
        }
        if let Some(r) = &retest {
            report.test_retest = Some(retest_report(&pair_retest(m, r)?)?);
        }
        if on(Analysis::ConstructValidity) {
            let opts = CfaOptions {
                seed: config.seed.unwrap_or(0),
                ..CfaOptions::default()
            };
            report.construct_validity = Some(construct_validity(m, &scale, &opts)?);
        }
        if on(Analysis::DiscriminantValidity) {
            let labels = m.group_labels().ok_or_else(|| Error::MissingColumn("group".into()))?;
            let trials = run_discriminant_trials_with(&m.features(), &labels, &config.trial_config(), exec)?;
            let domains: Option<Vec<String>> = m.respondents().iter().map(|r| r.domain.clone()).collect();
            let comparison = group_comparison(&m.totals_f64(), &labels, domains.as_deref())?;
            report.discriminant_validity = Some(DiscriminantSection {
                trials,
                group_comparison: comparison,
            });
        }
        if on(Analysis::Scoring) {
            let scores = xeq_scores(m, &scale, config.weights.as_deref())?;
            let totals = dimension_totals(m, &scale)?;
            let benchmark = match &config.benchmark {
                Some(path) => Some(BenchmarkStore::load_for(path, &scale)?.classify(&totals)?),
                None => None,
            };
            report.scoring = Some(ScoringSection {
                scores,
                dimension_totals: totals,
                benchmark,
            });
        }
    }
    Ok(report)
}

/// Fixed-width text table; the first column is left-aligned.
pub fn text_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i > 0 {
                s.push_str("  ");
            }
            let pad = w - cell.chars().count();
            if i == 0 {
                s.push_str(cell);
                s.push_str(&" ".repeat(pad));
            } else {
                s.push_str(&" ".repeat(pad));
                s.push_str(cell);
            }
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    out.push_str(&rule.join("  "));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

fn fmt(x: f64, d: usize) -> String {
    format!("{x:.d$}")
}

fn fmt_opt(x: Option<f64>, d: usize) -> String {
    x.map_or_else(|| "n/a".to_string(), |v| fmt(v, d))
}

pub fn render_text(report: &Report, d: usize) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} v{} ({} items)\n", report.scale.scale_id, report.scale.version, report.scale.items.len());

    if let Some(ing) = &report.ingestion {
        let _ = writeln!(out, "== Ingestion ==");
        let _ = writeln!(
            out,
            "loaded {}, dropped {}, excluded {}, retained {}",
            ing.n_loaded,
            ing.dropped_rows.len(),
            ing.excluded.len(),
            ing.n_retained
        );
        for e in &ing.excluded {
            let _ = writeln!(out, "  excluded {} ({:?})", e.respondent_id, e.reason);
        }
        out.push('\n');
    }

    if let Some(c) = &report.content_validity {
        let _ = writeln!(out, "== Content validity ({} experts) ==", c.panel_size);
        let rows: Vec<Vec<String>> = c
            .i_cvi
            .iter()
            .enumerate()
            .map(|(i, cvi)| {
                vec![
                    (i + 1).to_string(),
                    format!("{}/{}", cvi.endorsed, cvi.panel),
                    fmt(cvi.value(), d),
                    if c.retained_item_ids.contains(&(i + 1)) { "yes" } else { "no" }.to_string(),
                ]
            })
            .collect();
        out.push_str(&text_table(&["Item", "Endorsed", "I-CVI", "Retained"], &rows));
        let _ = writeln!(
            out,
            "S-CVI/Ave {} and S-CVI/UA {} over retained items (all items: {} / {})\n",
            fmt(c.s_cvi_a, d),
            fmt(c.s_cvi_b, d),
            fmt(c.s_cvi_a_all, d),
            fmt(c.s_cvi_b_all, d)
        );
    }

    if let Some(r) = &report.reliability {
        let _ = writeln!(out, "== Reliability ==");
        let rows: Vec<Vec<String>> = r
            .item_total
            .iter()
            .map(|it| vec![it.item_id.to_string(), fmt_opt(it.correlation, d), it.meets_baseline.to_string()])
            .collect();
        out.push_str(&text_table(&["Item", "iT", "Meets baseline"], &rows));
        let _ = writeln!(out, "Cronbach's alpha {}", fmt(r.alpha, d));
        let _ = writeln!(out, "mean inter-item correlation {}", fmt_opt(r.inter_item.mean_off_diagonal, d));
        for p in &r.inter_item.flags {
            let r = r.inter_item.get(p.item_a - 1, p.item_b - 1);
            let _ = writeln!(out, "  items {} and {}: {} ({:?})", p.item_a, p.item_b, fmt_opt(r, d), p.flag);
        }
        out.push('\n');
    }

    if let Some(t) = &report.test_retest {
        let _ = writeln!(out, "== Test-retest ({} pairs) ==", t.n_pairs);
        let _ = writeln!(out, "Pearson r {} (p = {})", fmt(t.pearson.r, d), fmt(t.pearson.p_value, d));
        for i in [&t.icc_printed, &t.icc_shrout_fleiss] {
            let _ = writeln!(
                out,
                "ICC {:?}: {} (F = {}, p = {}, {:?})",
                i.variant,
                fmt(i.icc, d),
                fmt(i.f, d),
                fmt(i.p_value, d),
                i.band
            );
        }
        out.push('\n');
    }

    if let Some(c) = &report.construct_validity {
        let _ = writeln!(out, "== Construct validity ==");
        let rows: Vec<Vec<String>> = c
            .efa
            .eigenvalues
            .iter()
            .zip(&c.efa.variance_proportion)
            .zip(&c.efa.cumulative_proportion)
            .enumerate()
            .map(|(i, ((e, p), cp))| vec![(i + 1).to_string(), fmt(*e, d), fmt(*p, d), fmt(*cp, d)])
            .collect();
        out.push_str(&text_table(&["Component", "Eigenvalue", "Proportion", "Cumulative"], &rows));
        let _ = writeln!(
            out,
            "suggested factors: {} ({:?}); scree elbow: {}",
            c.efa.suggested_factors.count, c.efa.suggested_factors.rule, c.efa.scree_elbow_factors
        );
        for (name, fit) in [("one-factor", &c.one_factor), ("dimension", &c.dimensions)] {
            let _ = writeln!(
                out,
                "{name} CFA: discrepancy {}, converged {}, df {}",
                fmt(fit.discrepancy, d),
                fit.converged,
                fit.degrees_of_freedom
            );
        }
        out.push('\n');
    }

    if let Some(ds) = &report.discriminant_validity {
        let t = &ds.trials;
        let _ = writeln!(out, "== Discriminant validity ==");
        let _ = writeln!(
            out,
            "{} trials: accuracy {} ± {}, macro-F1 {} ± {} (chance {})",
            t.per_trial.len(),
            fmt(t.accuracy_mean, d),
            fmt(t.accuracy_sd, d),
            fmt(t.macro_f1_mean, d),
            fmt(t.macro_f1_sd, d),
            fmt(t.baseline_accuracy, d)
        );
        let g = &ds.group_comparison;
        let rows: Vec<Vec<String>> = g
            .groups
            .iter()
            .map(|s| vec![s.label.clone(), s.n.to_string(), fmt(s.mean, d), fmt(s.standard_error, d)])
            .collect();
        out.push_str(&text_table(&["Group", "N", "Mean total", "SE"], &rows));
        for a in std::iter::once(&g.one_way).chain(&g.blocked) {
            let _ = writeln!(out, "{}: F = {}, p = {}", a.test, fmt(a.f, d), fmt(a.p_value, d));
        }
        for t in g.welch.iter().chain(&g.student) {
            let _ = writeln!(out, "{}: t = {}, p = {}", t.test, fmt(t.t, d), fmt(t.p_value, d));
        }
        if let Some(cd) = g.cohens_d {
            let _ = writeln!(out, "Cohen's d {}", fmt(cd, d));
        }
        out.push('\n');
    }

    if let Some(s) = &report.scoring {
        let _ = writeln!(out, "== XEQ scores ==");
        let rows: Vec<Vec<String>> = s
            .scores
            .factor_scores
            .iter()
            .map(|f| {
                let total = s.dimension_totals.get(f.dimension.as_str()).copied();
                vec![f.dimension.to_string(), fmt(f.score, d), fmt_opt(total, d)]
            })
            .collect();
        out.push_str(&text_table(&["Dimension", "Factor score", "Mean total"], &rows));
        let _ = writeln!(out, "system score {}", fmt(s.scores.system_score, d));
        let ranking: Vec<&str> = s.scores.deficiency_ranking.iter().map(|d| d.as_str()).collect();
        let _ = writeln!(out, "needs improvement first: {}", ranking.join(", "));
        if let Some(b) = &s.benchmark {
            let rows: Vec<Vec<String>> = b
                .iter()
                .map(|c| vec![c.dimension.clone(), fmt(c.value, d), fmt(c.percentile, d), format!("{:?}", c.category)])
                .collect();
            out.push_str(&text_table(&["Dimension", "Total", "Percentile", "Category"], &rows));
        }
        out.push('\n');
    }
    out
}

fn section<'a>(report: &'a Value, key: &'static str) -> Result<&'a Value> {
    match report.get(key) {
        Some(v) if !v.is_null() => Ok(v),
        _ => Err(Error::MissingSection(key)),
    }
}

fn cell(v: Option<&Value>, d: usize) -> String {
    v.and_then(Value::as_f64).map_or_else(|| "-".to_string(), |x| fmt(x, d))
}

/// Item / I-CVI / iT / one-factor loading / dimension / CFA loading, one
/// row per item in scale order. Works on the JSON form of a report so it can
/// be re-rendered from a saved `report.json`. Loadings print as `-` when the
/// construct section is absent.
pub fn emit_table3_style(report: &Value, d: usize) -> Result<String> {
    let content = section(report, "content_validity")?;
    let reliability = section(report, "reliability")?;
    let items = report
        .pointer("/scale/items")
        .and_then(Value::as_array)
        .ok_or(Error::MissingSection("scale"))?;
    let icvi = content.get("i_cvi_values").and_then(Value::as_array).ok_or(Error::MissingSection("content_validity"))?;
    let item_total = reliability
        .get("item_total")
        .and_then(Value::as_array)
        .filter(|a| !a.is_empty())
        .ok_or(Error::MissingSection("reliability"))?;
    let construct = report.get("construct_validity").filter(|v| !v.is_null());
    let loading = |fit: &str, i: usize, field: &str| {
        construct.and_then(|c| c.pointer(&format!("/{fit}/loadings/{i}/{field}")))
    };

    let rows: Vec<Vec<String>> = items
        .iter()
        .enumerate()
        .map(|(i, item)| {
            vec![
                item.get("text").and_then(Value::as_str).unwrap_or("").to_string(),
                cell(icvi.get(i), d),
                cell(item_total.get(i).and_then(|t| t.get("correlation")), d),
                cell(loading("one_factor", i, "standardized"), d),
                item.get("dimension").and_then(Value::as_str).unwrap_or("").to_string(),
                cell(loading("dimensions", i, "loading"), d),
            ]
        })
        .collect();
    Ok(text_table(
        &["Item", "I-CVI", "iT", "One-Factor Loading", "Dimension", "CFA Loading"],
        &rows,
    ))
}

pub const SCREE_WIDTH: f64 = 640.0;
pub const SCREE_HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;

/// (x, y) pixel positions of the scree markers.
pub fn scree_points(eigenvalues: &[f64]) -> Vec<(f64, f64)> {
    let n = eigenvalues.len();
    let top = eigenvalues.iter().copied().fold(1.0_f64, f64::max);
    let w = SCREE_WIDTH - 2.0 * MARGIN;
    let h = SCREE_HEIGHT - 2.0 * MARGIN;
    eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            let x = if n > 1 {
                MARGIN + w * i as f64 / (n - 1) as f64
            } else {
                MARGIN + w / 2.0
            };
            (x, MARGIN + h * (1.0 - e.max(0.0) / top))
        })
        .collect()
}

/// Static SVG scree plot: x = component (1-based), y = eigenvalue, with a
/// dashed Kaiser line at 1 and the data embedded as a CSV `<metadata>` block.
pub fn scree_svg(eigenvalues: &[f64]) -> Result<String> {
    if eigenvalues.is_empty() {
        return Err(Error::MissingSection("construct_validity"));
    }
    let pts = scree_points(eigenvalues);
    let top = eigenvalues.iter().copied().fold(1.0_f64, f64::max);
    let h = SCREE_HEIGHT - 2.0 * MARGIN;
    let kaiser_y = MARGIN + h * (1.0 - 1.0 / top);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SCREE_WIDTH}" height="{SCREE_HEIGHT}" viewBox="0 0 {SCREE_WIDTH} {SCREE_HEIGHT}">"#
    );
    let _ = writeln!(s, "<title>Scree plot</title>");
    let _ = writeln!(s, "<metadata id=\"data\">component,eigenvalue");
    for (i, e) in eigenvalues.iter().enumerate() {
        let _ = writeln!(s, "{},{}", i + 1, e);
    }
    let _ = writeln!(s, "</metadata>");
    let _ = writeln!(
        s,
        r#"<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{}" stroke="black"/>"#,
        SCREE_HEIGHT - MARGIN
    );
    let _ = writeln!(
        s,
        r#"<line x1="{MARGIN}" y1="{y}" x2="{}" y2="{y}" stroke="black"/>"#,
        SCREE_WIDTH - MARGIN,
        y = SCREE_HEIGHT - MARGIN
    );
    let _ = writeln!(
        s,
        r#"<line class="kaiser" x1="{MARGIN}" y1="{kaiser_y:.2}" x2="{}" y2="{kaiser_y:.2}" stroke="gray" stroke-dasharray="4 4"/>"#,
        SCREE_WIDTH - MARGIN
    );
    let poly: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    let _ = writeln!(s, r#"<polyline fill="none" stroke="steelblue" stroke-width="2" points="{}"/>"#, poly.join(" "));
    for (i, (x, y)) in pts.iter().enumerate() {
        let _ = writeln!(s, r#"<circle class="marker" cx="{x:.2}" cy="{y:.2}" r="4" fill="steelblue"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{}" font-size="10" text-anchor="middle">{}</text>"#,
            SCREE_HEIGHT - MARGIN + 15.0,
            i + 1
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">Component</text>"#,
        SCREE_WIDTH / 2.0,
        SCREE_HEIGHT - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="15" y="{}" font-size="12" text-anchor="middle" transform="rotate(-90 15 {})">Eigenvalue</text>"#,
        SCREE_HEIGHT / 2.0,
        SCREE_HEIGHT / 2.0
    );
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_scree(eigenvalues: &[f64], path: &Path) -> Result<()> {
    let svg = scree_svg(eigenvalues)?;
    write_file(path, &svg).map(|_| ())
}

/// Re-renders Table-3 text and the scree plot from a saved JSON report.
pub fn render_saved_report(report: &Value, out_dir: &Path, d: usize) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|source| Error::Write {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut written = vec![write_file(&out_dir.join("table3.txt"), &emit_table3_style(report, d)?)?];
    if let Some(eigs) = report.pointer("/construct_validity/efa/eigenvalues").and_then(Value::as_array) {
        let eigs: Vec<f64> = eigs.iter().filter_map(Value::as_f64).collect();
        let path = out_dir.join("scree.svg");
        emit_scree(&eigs, &path)?;
        written.push(path);
    }
    Ok(written)
}

/// Minimal metadata for callers without a clock.
pub fn metadata(generated_at: Option<String>) -> Metadata {
    Metadata {
        generated_at,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    }
}

/// Shape check used by callers that only need the section keys.
pub fn section_keys(report_json: &Value) -> Vec<String> {
    report_json
        .as_object()
        .map(|o| o.keys().filter(|k| *k != "metadata" && *k != "scale").cloned().collect())
        .unwrap_or_default()
}

/// Drops the metadata block so two reports can be compared.
pub fn strip_metadata(report_json: &str) -> Result<String> {
    let mut v: Value = serde_json::from_str(report_json)?;
    if let Some(o) = v.as_object_mut() {
        o.remove("metadata");
    }
    Ok(serde_json::to_string_pretty(&v)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::content::{content_validity_from_counts, xeq_item_cvi};
    use serde_json::json;

    fn xeq_value(with_reliability: bool) -> Value {
        let scale = ScaleDefinition::xeq();
        let cvi = content_validity_from_counts(xeq_item_cvi(), DEFAULT_THRESHOLD).unwrap();
        let mut v = json!({
            "scale": { "scale_id": "XEQ", "version": "1.0", "items": scale.items() },
            "content_validity": cvi,
        });
        if with_reliability {
            v["reliability"] = json!({ "item_total": (1..=18).map(|i| json!({"item_id": i, "correlation": 0.5})).collect::<Vec<_>>() });
        }
        v
    }

    #[test]
    fn table3_icvi_column() {
        let table = emit_table3_style(&xeq_value(true), 4).unwrap();
        let lines: Vec<&str> = table.lines().skip(2).collect();
        assert_eq!(lines.len(), 18);
        let mut counts = BTreeMap::new();
        for l in &lines {
            for v in ["1.0000", "0.9231", "0.8462", "0.7692"] {
                if l.contains(v) {
                    *counts.entry(v).or_insert(0) += 1;
                }
            }
        }
        assert_eq!(counts["1.0000"], 4);
        assert_eq!(counts["0.9231"], 5);
        assert_eq!(counts["0.8462"], 5);
        assert_eq!(counts["0.7692"], 4);
        assert!(lines[0].starts_with("The explanations received"));
    }

    #[test]
    fn table3_requires_sections() {
        assert!(matches!(emit_table3_style(&xeq_value(false), 4), Err(Error::MissingSection("reliability"))));
        let mut v = xeq_value(true);
        v["reliability"] = json!({ "item_total": [] });
        assert!(matches!(emit_table3_style(&v, 4), Err(Error::MissingSection("reliability"))));
        assert_eq!(fmt(12.0 / 13.0, 4), "0.9231");
    }

    #[test]
    fn scree_markers_and_shape() {
        let eigs = [9.5, 1.4, 0.9, 0.7, 0.5, 0.4, 0.35, 0.3, 0.28, 0.26, 0.24, 0.2, 0.18, 0.15, 0.1, 0.08, 0.05, 0.02];
        let svg = scree_svg(&eigs).unwrap();
        assert_eq!(svg.matches("<circle class=\"marker\"").count(), 18);
        assert!(svg.contains("18,0.02"));
        let pts = scree_points(&eigs);
        // screen y grows downward: non-increasing eigenvalues give non-decreasing y
        assert!(pts.windows(2).all(|w| w[1].1 >= w[0].1));
        let drops: Vec<f64> = pts.windows(2).map(|w| w[1].1 - w[0].1).collect();
        assert!(drops[1..].iter().all(|&x| x < drops[0]));
        assert!(scree_svg(&[]).is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = PipelineConfig::new("scale.json");
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        c.analyses.insert(Analysis::DiscriminantValidity);
        c.responses = Some("r.csv".into());
        assert!(matches!(c.validate(), Err(Error::Config(m)) if m.contains("seed")));
        c.seed = Some(1);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn text_table_alignment() {
        let t = text_table(&["A", "Value"], &[vec!["x".into(), "1.0".into()], vec!["long".into(), "10.25".into()]]);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines[0], "A     Value");
        assert_eq!(lines[1], "----  -----");
        assert_eq!(lines[2], "x       1.0");
    }
}
