//! Loading, validating and filtering response datasets.

use std::collections::{HashMap, HashSet};
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::content::{ExpertRatingMatrix, RELEVANCE_LABELS};
use crate::error::{Error, Result};
use crate::scale::{RespondentMeta, ResponseMatrix, ScaleDefinition, Wave};

pub const COL_ID: &str = "respondent_id";
pub const COL_GROUP: &str = "group";
pub const COL_DOMAIN: &str = "domain";
pub const COL_DURATION: &str = "duration_seconds";
pub const COL_ALLOCATED: &str = "allocated_seconds";

/// What to do with a row that has a blank cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum MissingPolicy {
    /// Fail with `MissingValue` naming the row and column.
    #[default]
    Reject,
    /// Drop the row and list it in the load report.
    Exclude,
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    pub missing: MissingPolicy,
    pub wave: Wave,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DroppedRow {
    pub row: usize,
    pub respondent_id: String,
    pub reason: String,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(row: usize, e: csv::Error) -> Error {
    Error::Parse {
        row,
        column: String::new(),
        message: e.to_string(),
    }
}

struct Header {
    index: HashMap<String, usize>,
}

impl Header {
    fn read<R: Read>(rdr: &mut csv::Reader<R>) -> Result<Self> {
        let headers = rdr.headers().map_err(|e| csv_err(0, e))?;
        let index = headers
            .iter()
            .enumerate()
            .map(|(i, h)| (h.trim().to_ascii_lowercase(), i))
            .collect();
        Ok(Header { index })
    }

    fn require(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    }

    fn optional(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    fn items(&self, m: usize) -> Result<Vec<usize>> {
        (1..=m).map(|i| self.require(&format!("item_{i}"))).collect()
    }
}

fn parse_code(cell: &str, row: usize, column: &str, scale: &ScaleDefinition) -> Result<u8> {
    if let Ok(v) = cell.parse::<i64>() {
        if scale.is_valid_code(v) {
            return Ok(v as u8);
        }
        return Err(Error::Parse {
            row,
            column: column.to_string(),
            message: format!("{v} is not one of the codes {:?}", scale.likert_codes()),
        });
    }
    scale.encode_response(cell)
}

fn parse_seconds(cell: &str, row: usize, column: &str) -> Result<f64> {
    cell.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite() && *v >= 0.0)
        .ok_or_else(|| Error::Parse {
            row,
            column: column.to_string(),
            message: format!("{cell:?} is not a non-negative number of seconds"),
        })
}

/// Reads a response CSV with default options.
pub fn load_responses(path: &Path, scale: &ScaleDefinition) -> Result<ResponseMatrix> {
    load_responses_with(path, scale, &LoadOptions::default()).map(|(m, _)| m)
}

pub fn load_responses_with(
    path: &Path,
    scale: &ScaleDefinition,
    opts: &LoadOptions,
) -> Result<(ResponseMatrix, Vec<DroppedRow>)> {
    let file = std::fs::File::open(path).map_err(io_err(path))?;
    read_responses(file, scale, opts)
}

pub fn read_responses<R: Read>(
    reader: R,
    scale: &ScaleDefinition,
    opts: &LoadOptions,
) -> Result<(ResponseMatrix, Vec<DroppedRow>)> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = Header::read(&mut rdr)?;
    let c_id = header.require(COL_ID)?;
    let c_group = header.require(COL_GROUP)?;
    let c_dur = header.require(COL_DURATION)?;
    let c_alloc = header.require(COL_ALLOCATED)?;
    let c_domain = header.optional(COL_DOMAIN);
    let c_items = header.items(scale.item_count())?;

    let mut metas = Vec::new();
    let mut rows = Vec::new();
    let mut dropped = Vec::new();

    'records: for (k, rec) in rdr.records().enumerate() {
        let row = k + 1;
        let rec = rec.map_err(|e| csv_err(row, e))?;
        let get = |c: usize| rec.get(c).unwrap_or("");
        let id = get(c_id).to_string();

        let mut blank = None;
        if id.is_empty() {
            blank = Some(COL_ID.to_string());
        } else {
            for (name, c) in [(COL_DURATION, c_dur), (COL_ALLOCATED, c_alloc)] {
                if get(c).is_empty() {
                    blank = Some(name.to_string());
                    break;
                }
            }
            if blank.is_none() {
                blank = c_items
                    .iter()
                    .enumerate()
                    .find(|(_, &c)| get(c).is_empty())
                    .map(|(i, _)| format!("item_{}", i + 1));
            }
        }
        if let Some(column) = blank {
            match opts.missing {
                MissingPolicy::Reject => return Err(Error::MissingValue { row, column }),
                MissingPolicy::Exclude => {
                    dropped.push(DroppedRow {
                        row,
                        respondent_id: id,
                        reason: format!("blank cell in column {column}"),
                    });
                    continue 'records;
                }
            }
        }

        let duration = parse_seconds(get(c_dur), row, COL_DURATION)?;
        let allocated = parse_seconds(get(c_alloc), row, COL_ALLOCATED)?;
        if allocated <= 0.0 {
            return Err(Error::Parse {
                row,
                column: COL_ALLOCATED.into(),
                message: "allocated time must be positive".into(),
            });
        }
        let mut codes = Vec::with_capacity(c_items.len());
        for (i, &c) in c_items.iter().enumerate() {
            codes.push(parse_code(get(c), row, &format!("item_{}", i + 1), scale)?);
        }
        let non_empty = |s: &str| (!s.is_empty()).then(|| s.to_string());
        metas.push(RespondentMeta {
            respondent_id: id,
            group: non_empty(get(c_group)),
            domain: c_domain.and_then(|c| non_empty(get(c))),
            duration,
            allocated_duration: allocated,
        });
        rows.push(codes);
    }

    let matrix = ResponseMatrix::new(scale, metas, rows, opts.wave)?;
    Ok((matrix, dropped))
}

/// Writes a matrix in the response CSV schema, codes as integers.
pub fn write_responses<W: std::io::Write>(matrix: &ResponseMatrix, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let to_err = |e: csv::Error| Error::Parse {
        row: 0,
        column: String::new(),
        message: e.to_string(),
    };
    let mut header: Vec<String> = [COL_ID, COL_GROUP, COL_DOMAIN, COL_DURATION, COL_ALLOCATED]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend((1..=matrix.n_items()).map(|i| format!("item_{i}")));
    w.write_record(&header).map_err(to_err)?;
    for (meta, row) in matrix.respondents().iter().zip(matrix.rows()) {
        let mut rec = vec![
            meta.respondent_id.clone(),
            meta.group.clone().unwrap_or_default(),
            meta.domain.clone().unwrap_or_default(),
            meta.duration.to_string(),
            meta.allocated_duration.to_string(),
        ];
        rec.extend(row.iter().map(|c| c.to_string()));
        w.write_record(&rec).map_err(to_err)?;
    }
    w.flush().map_err(|source| Error::Write {
        path: "<csv>".into(),
        source,
    })
}

pub fn load_expert_ratings(path: &Path, n_items: usize) -> Result<ExpertRatingMatrix> {
    let file = std::fs::File::open(path).map_err(io_err(path))?;
    read_expert_ratings(file, n_items)
}

/// Reads `expert_id,item_1..item_M` with relevance labels or codes 1–5.
pub fn read_expert_ratings<R: Read>(reader: R, n_items: usize) -> Result<ExpertRatingMatrix> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = Header::read(&mut rdr)?;
    let c_id = header.require("expert_id")?;
    let c_items = header.items(n_items)?;
    let mut experts = Vec::new();
    let mut values = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let row = k + 1;
        let rec = rec.map_err(|e| csv_err(row, e))?;
        let get = |c: usize| rec.get(c).unwrap_or("");
        let mut ratings = Vec::with_capacity(n_items);
        for (i, &c) in c_items.iter().enumerate() {
            let column = format!("item_{}", i + 1);
            let cell = get(c);
            if cell.is_empty() {
                return Err(Error::MissingValue { row, column });
            }
            ratings.push(parse_relevance(cell, row, &column)?);
        }
        experts.push(get(c_id).to_string());
        values.push(ratings);
    }
    ExpertRatingMatrix::new(experts, values)
}

fn parse_relevance(cell: &str, row: usize, column: &str) -> Result<u8> {
    if let Ok(v) = cell.parse::<i64>() {
        return if (1..=5).contains(&v) {
            Ok(v as u8)
        } else {
            Err(Error::Parse {
                row,
                column: column.to_string(),
                message: format!("relevance code {v} outside 1..=5"),
            })
        };
    }
    let needle = cell.trim().to_lowercase();
    RELEVANCE_LABELS
        .iter()
        .position(|l| l.to_lowercase() == needle)
        .map(|p| p as u8 + 1)
        .ok_or_else(|| Error::UnknownLabel(cell.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternRule {
    /// Exclude rows with zero variance (the same answer everywhere).
    pub straight_line: bool,
    /// Exclude rows whose longest run of identical consecutive answers
    /// covers at least this fraction of the items.
    pub max_run_fraction: Option<f64>,
}

impl Default for PatternRule {
    fn default() -> Self {
        PatternRule {
            straight_line: true,
            max_run_fraction: Some(0.8),
        }
    }
}

impl PatternRule {
    pub fn matches(&self, row: &[u8]) -> bool {
        if row.is_empty() {
            return false;
        }
        if self.straight_line && row.iter().all(|&c| c == row[0]) {
            return true;
        }
        if let Some(frac) = self.max_run_fraction {
            let run = longest_run(row);
            return run as f64 >= frac * row.len() as f64;
        }
        false
    }
}

fn longest_run(row: &[u8]) -> usize {
    let mut best = 0;
    let mut cur = 0;
    for (i, &c) in row.iter().enumerate() {
        cur = if i > 0 && c == row[i - 1] { cur + 1 } else { 1 };
        best = best.max(cur);
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExclusionReason {
    UnderTime,
    PatternResponse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exclusion {
    pub respondent_id: String,
    pub reason: ExclusionReason,
}

#[derive(Debug, Clone)]
pub struct ExclusionReport {
    pub retained: ResponseMatrix,
    pub excluded: Vec<Exclusion>,
    pub min_time_fraction: f64,
    pub pattern_rule: PatternRule,
}

/// Drops respondents who were too fast or answered in a pattern.
/// Under-time takes precedence when both apply.
pub fn apply_attention_filters(
    matrix: &ResponseMatrix,
    min_time_fraction: f64,
    pattern_rule: PatternRule,
) -> Result<ExclusionReport> {
    if !(min_time_fraction > 0.0 && min_time_fraction <= 1.0) {
        return Err(Error::Config(format!(
            "min_time_fraction must be in (0, 1], got {min_time_fraction}"
        )));
    }
    if let Some(f) = pattern_rule.max_run_fraction {
        if !(f > 0.0 && f <= 1.0) {
            return Err(Error::Config(format!("max_run_fraction must be in (0, 1], got {f}")));
        }
    }
    let mut keep = Vec::new();
    let mut excluded = Vec::new();
    for (j, meta) in matrix.respondents().iter().enumerate() {
        let reason = if meta.duration < min_time_fraction * meta.allocated_duration {
            Some(ExclusionReason::UnderTime)
        } else if pattern_rule.matches(matrix.row(j)) {
            Some(ExclusionReason::PatternResponse)
        } else {
            None
        };
        match reason {
            Some(reason) => excluded.push(Exclusion {
                respondent_id: meta.respondent_id.clone(),
                reason,
            }),
            None => keep.push(j),
        }
    }
    if keep.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(ExclusionReport {
        retained: matrix.select(&keep),
        excluded,
        min_time_fraction,
        pattern_rule,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RetestPair {
    pub respondent_id: String,
    pub test_row: Vec<u8>,
    pub retest_row: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RetestPairs {
    pub pairs: Vec<RetestPair>,
    /// Ids present only in the first wave.
    pub unmatched_test: Vec<String>,
    /// Ids present only in the second wave.
    pub unmatched_retest: Vec<String>,
}

impl RetestPairs {
    /// Participant totals as `[test, retest]` rows.
    pub fn total_scores(&self) -> Vec<Vec<f64>> {
        self.pairs
            .iter()
            .map(|p| {
                vec![
                    f64::from(crate::scale::participant_total(&p.test_row)),
                    f64::from(crate::scale::participant_total(&p.retest_row)),
                ]
            })
            .collect()
    }
}

/// Inner-joins two waves on respondent id, in first-wave order.
pub fn pair_retest(test: &ResponseMatrix, retest: &ResponseMatrix) -> Result<RetestPairs> {
    if test.scale_id() != retest.scale_id() {
        return Err(Error::InvalidScale(format!(
            "waves use different scales ({} vs {})",
            test.scale_id(),
            retest.scale_id()
        )));
    }
    if test.n_items() != retest.n_items() {
        return Err(Error::DimensionMismatch {
            expected: test.n_items(),
            actual: retest.n_items(),
        });
    }
    let index = |m: &ResponseMatrix| -> Result<HashMap<String, usize>> {
        let mut idx = HashMap::new();
        for (j, r) in m.respondents().iter().enumerate() {
            if idx.insert(r.respondent_id.clone(), j).is_some() {
                return Err(Error::DuplicateRespondent(r.respondent_id.clone()));
            }
        }
        Ok(idx)
    };
    let test_idx = index(test)?;
    let retest_idx = index(retest)?;

    let mut pairs = Vec::new();
    let mut unmatched_test = Vec::new();
    for (j, r) in test.respondents().iter().enumerate() {
        match retest_idx.get(&r.respondent_id) {
            Some(&k) => pairs.push(RetestPair {
                respondent_id: r.respondent_id.clone(),
                test_row: test.row(j).to_vec(),
                retest_row: retest.row(k).to_vec(),
            }),
            None => unmatched_test.push(r.respondent_id.clone()),
        }
    }
    let unmatched_retest = retest
        .respondents()
        .iter()
        .filter(|r| !test_idx.contains_key(&r.respondent_id))
        .map(|r| r.respondent_id.clone())
        .collect();
    Ok(RetestPairs {
        pairs,
        unmatched_test,
        unmatched_retest,
    })
}

/// Distinct values in first-appearance order.
pub(crate) fn distinct_in_order<'a>(values: impl IntoIterator<Item = &'a str>) -> Vec<String> {
    let mut seen = HashSet::new();
    values
        .into_iter()
        .filter(|v| seen.insert(*v))
        .map(str::to_string)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scale::{Item, Dimension, STANDARD_LIKERT_LABELS};

    fn scale(m: usize) -> ScaleDefinition {
        let items = (1..=m)
            .map(|id| Item { id, text: String::new(), dimension: Dimension::Utility })
            .collect();
        ScaleDefinition::new(
            "t",
            "1",
            items,
            STANDARD_LIKERT_LABELS.iter().map(|s| s.to_string()).collect(),
            None,
        )
        .unwrap()
    }

    const GOOD: &str = "respondent_id,group,duration_seconds,allocated_seconds,item_1,item_2,item_3\n\
        a,Positive,100,120,1,2,Strongly Agree\n\
        b,Negative,90,120,somewhat agree,3,3\n\
        c,,60,120,5,4,2\n";

    fn read(csv: &str, m: usize) -> Result<ResponseMatrix> {
        read_responses(csv.as_bytes(), &scale(m), &LoadOptions::default()).map(|(m, _)| m)
    }

    #[test]
    fn loads_well_formed_file() {
        let m = read(GOOD, 3).unwrap();
        assert_eq!(m.n_respondents(), 3);
        assert_eq!(m.row(0), &[1, 2, 5]);
        assert_eq!(m.row(1), &[4, 3, 3]);
        assert_eq!(m.respondents()[2].group, None);
        assert_eq!(m.respondents()[0].group.as_deref(), Some("Positive"));
    }

    #[test]
    fn out_of_range_code_is_a_parse_error() {
        let csv = GOOD.replace("c,,60,120,5,4,2", "c,,60,120,5,6,2");
        match read(&csv, 3) {
            Err(Error::Parse { row, column, .. }) => {
                assert_eq!(row, 3);
                assert_eq!(column, "item_2");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_duration_column() {
        let csv = "respondent_id,group,allocated_seconds,item_1,item_2\na,,10,1,2\n";
        assert!(matches!(read(csv, 2), Err(Error::MissingColumn(c)) if c == COL_DURATION));
    }

    #[test]
    fn unknown_label() {
        let csv = GOOD.replace("Strongly Agree", "Agree somewhat!");
        assert!(matches!(read(&csv, 3), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn blank_cells_reject_or_exclude() {
        let csv = GOOD.replace("c,,60,120,5,4,2", "c,,60,120,5,,2");
        assert!(matches!(
            read(&csv, 3),
            Err(Error::MissingValue { row: 3, ref column }) if column == "item_2"
        ));
        let opts = LoadOptions { missing: MissingPolicy::Exclude, ..Default::default() };
        let (m, dropped) = read_responses(csv.as_bytes(), &scale(3), &opts).unwrap();
        assert_eq!(m.n_respondents(), 2);
        assert_eq!(dropped.len(), 1);
        assert_eq!(dropped[0].respondent_id, "c");
    }

    #[test]
    fn duplicate_ids_rejected() {
        let csv = GOOD.replace("c,,60", "b,,60");
        assert!(matches!(read(&csv, 3), Err(Error::DuplicateRespondent(id)) if id == "b"));
    }

    #[test]
    fn write_then_read_round_trips() {
        let m = read(GOOD, 3).unwrap();
        let mut buf = Vec::new();
        write_responses(&m, &mut buf).unwrap();
        assert_eq!(read(std::str::from_utf8(&buf).unwrap(), 3).unwrap(), m);
    }

    fn meta(id: &str, dur: f64, alloc: f64) -> RespondentMeta {
        RespondentMeta { duration: dur, allocated_duration: alloc, ..RespondentMeta::new(id) }
    }

    #[test]
    fn under_time_and_pattern_exclusions() {
        let s = scale(3);
        let m = ResponseMatrix::new(
            &s,
            vec![meta("fast", 10.0, 30.0), meta("ok", 20.0, 30.0), meta("flat", 30.0, 30.0)],
            vec![vec![1, 2, 3], vec![1, 2, 3], vec![3, 3, 3]],
            Wave::Test,
        )
        .unwrap();
        let rep = apply_attention_filters(&m, 0.5, PatternRule::default()).unwrap();
        assert_eq!(rep.retained.n_respondents(), 1);
        assert_eq!(rep.excluded[0], Exclusion { respondent_id: "fast".into(), reason: ExclusionReason::UnderTime });
        assert_eq!(rep.excluded[1].reason, ExclusionReason::PatternResponse);
        // exactly half the time is not under time
        let m2 = ResponseMatrix::new(&s, vec![meta("x", 15.0, 30.0)], vec![vec![1, 2, 3]], Wave::Test).unwrap();
        assert!(apply_attention_filters(&m2, 0.5, PatternRule::default()).unwrap().excluded.is_empty());
    }

    #[test]
    fn straight_line_on_xeq_row() {
        let row = [3u8; 18];
        // oracle: zero sample variance
        let mean = row.iter().map(|&c| f64::from(c)).sum::<f64>() / 18.0;
        let var = row.iter().map(|&c| (f64::from(c) - mean).powi(2)).sum::<f64>();
        assert_eq!(var, 0.0);
        let rule = PatternRule { straight_line: true, max_run_fraction: None };
        assert!(rule.matches(&row));
        assert!(!rule.matches(&[3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 4]));
    }

    #[test]
    fn long_run_rule() {
        let mut row = [4u8; 18];
        row[0] = 1;
        row[1] = 2;
        row[2] = 5; // run of 15 = 83% of 18
        assert!(PatternRule::default().matches(&row));
        row[3] = 1; // run of 14 < 14.4
        assert!(!PatternRule::default().matches(&row));
    }

    #[test]
    fn cohort_of_73_with_5_failures_keeps_68() {
        let s = ScaleDefinition::xeq();
        let mut metas = Vec::new();
        let mut rows = Vec::new();
        for j in 0..73 {
            let fail = j % 15 == 0; // 0,15,30,45,60
            metas.push(meta(&format!("p{j}"), if fail { 100.0 } else { 500.0 }, 600.0));
            rows.push((0..18).map(|i| ((i + j) % 5 + 1) as u8).collect());
        }
        let m = ResponseMatrix::new(&s, metas, rows, Wave::Test).unwrap();
        let rep = apply_attention_filters(&m, 0.5, PatternRule::default()).unwrap();
        assert_eq!(rep.excluded.len(), 5);
        assert_eq!(rep.retained.n_respondents(), 68);
        let again = apply_attention_filters(&rep.retained, 0.5, PatternRule::default()).unwrap();
        assert!(again.excluded.is_empty());
    }

    fn wave(s: &ScaleDefinition, ids: &[&str]) -> ResponseMatrix {
        ResponseMatrix::new(
            s,
            ids.iter().map(|id| RespondentMeta::new(*id)).collect(),
            ids.iter().enumerate().map(|(k, _)| vec![(k % 5 + 1) as u8; 3]).collect(),
            Wave::Test,
        )
        .unwrap()
    }

    #[test]
    fn pairing() {
        let s = scale(3);
        let p = pair_retest(&wave(&s, &["a", "b"]), &wave(&s, &["b", "a"])).unwrap();
        assert_eq!(p.pairs.len(), 2);
        assert!(p.unmatched_test.is_empty() && p.unmatched_retest.is_empty());

        let p = pair_retest(&wave(&s, &["a", "b"]), &wave(&s, &["b", "c"])).unwrap();
        assert_eq!(p.pairs.len(), 1);
        assert_eq!(p.pairs[0].respondent_id, "b");
        assert_eq!(p.unmatched_test, vec!["a"]);
        assert_eq!(p.unmatched_retest, vec!["c"]);

        let swapped = pair_retest(&wave(&s, &["b", "c"]), &wave(&s, &["a", "b"])).unwrap();
        assert_eq!(swapped.pairs[0].test_row, p.pairs[0].retest_row);
        assert_eq!(swapped.pairs[0].retest_row, p.pairs[0].test_row);
    }

    #[test]
    fn duplicate_in_retest_csv() {
        let csv = "respondent_id,group,duration_seconds,allocated_seconds,item_1,item_2,item_3\n\
            a,,1,1,1,2,3\na,,1,1,1,2,3\n";
        assert!(matches!(read(csv, 3), Err(Error::DuplicateRespondent(_))));
    }

    #[test]
    fn expert_ratings_parse_labels_and_codes() {
        let csv = "expert_id,item_1,item_2\nE1,Extremely Relevant,neutral\nE2,4,1\n";
        let r = read_expert_ratings(csv.as_bytes(), 2).unwrap();
        assert_eq!(r.values(), &[vec![5, 3], vec![4, 1]]);
        assert!(read_expert_ratings("expert_id,item_1\nE1,7\n".as_bytes(), 1).is_err());
    }
}
