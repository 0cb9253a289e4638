//! Segment-level agreement between metric scores and human MQM judgements.
//!
//! Scores are oriented so that higher means better before correlating: a
//! lower-is-better metric is negated, and so is MQM. A positive coefficient
//! therefore always means agreement with the raters.
//!
//! Labels name what is correlated:
//!
//! * `chrF`: the metric's score for each (segment, system) observation.
//! * `chrF:mbr`: the selected candidate's mean score against every
//!   pseudoreference of the segment's pairwise matrix.
//! * `avg(MetricX,chrF)`: the mean of the members' oriented scores.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::io::{MatrixStore, SegmentScore};
use crate::mbr;
use crate::registry::{self, Orientation};
use crate::types::{MatrixKind, MqmRecord, ScoreMatrix, SelectionRecord};

/// Suffix marking pseudoreference-based scores.
pub const MBR_SUFFIX: &str = ":mbr";

/// Mean of row `candidate` over every pseudoreference, self pair included.
pub fn pseudoref_score(candidate: usize, matrix: &ScoreMatrix) -> Result<f64> {
    if matrix.kind != MatrixKind::Pairwise {
        return Err(Error::WrongKind {
            expected: MatrixKind::Pairwise.as_str(),
            found: matrix.kind.as_str(),
        });
    }
    if candidate >= matrix.n {
        return Err(Error::IndexOutOfRange {
            index: candidate,
            n: matrix.n,
        });
    }
    let all: Vec<usize> = (0..matrix.n).collect();
    Ok(mbr::row_mean(matrix, candidate, &all, false))
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::SampleLengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::TooFewObservations(x.len()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::UndefinedCorrelation("non-finite observation"));
    }
    Ok(())
}

fn tie_pairs(sorted: &[f64]) -> u64 {
    let mut total = 0u64;
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total + run * (run - 1) / 2
}

/// Sorts `values` ascending with a stable merge sort and returns the number
/// of inversions it removed.
fn merge_count(values: &mut [f64], scratch: &mut [f64]) -> u64 {
    let n = values.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = merge_count(&mut values[..mid], &mut scratch[..mid]);
    swaps += merge_count(&mut values[mid..], &mut scratch[mid..]);
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if values[j] < values[i] {
            scratch[k] = values[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            scratch[k] = values[i];
            i += 1;
        }
        k += 1;
    }
    scratch[k..k + mid - i].copy_from_slice(&values[i..mid]);
    k += mid - i;
    scratch[k..k + n - j].copy_from_slice(&values[j..n]);
    values.copy_from_slice(&scratch[..n]);
    swaps
}

/// Kendall's tau-b in O(n log n) (Knight's algorithm).
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let n = x.len() as u64;
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(y[a].total_cmp(&y[b])));

    let xs: Vec<f64> = order.iter().map(|&i| x[i]).collect();
    let tied_x = tie_pairs(&xs);
    let mut tied_xy = 0u64;
    let mut run = 1u64;
    for w in order.windows(2) {
        if x[w[0]] == x[w[1]] && y[w[0]] == y[w[1]] {
            run += 1;
        } else {
            tied_xy += run * (run - 1) / 2;
            run = 1;
        }
    }
    tied_xy += run * (run - 1) / 2;

    let mut ys: Vec<f64> = order.iter().map(|&i| y[i]).collect();
    let mut scratch = vec![0.0; ys.len()];
    let discordant = merge_count(&mut ys, &mut scratch);
    let tied_y = tie_pairs(&ys);

    let total = n * (n - 1) / 2;
    if tied_x == total || tied_y == total {
        return Err(Error::UndefinedCorrelation("constant input"));
    }
    // concordant - discordant, with both counts over untied pairs
    let concordant = total + tied_xy - tied_x - tied_y - discordant;
    let numerator = concordant as i64 - discordant as i64;
    let denominator = ((total - tied_x) as f64 * (total - tied_y) as f64).sqrt();
    Ok(numerator as f64 / denominator)
}

/// Sample Pearson correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation("zero variance"));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statistic {
    KendallTau,
    Pearson,
}

impl Statistic {
    pub fn as_str(self) -> &'static str {
        match self {
            Statistic::KendallTau => "kendall_tau",
            Statistic::Pearson => "pearson",
        }
    }

    pub fn compute(self, x: &[f64], y: &[f64]) -> Result<f64> {
        match self {
            Statistic::KendallTau => kendall_tau(x, y),
            Statistic::Pearson => pearson(x, y),
        }
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kendall_tau" | "tau" | "kendall" => Ok(Statistic::KendallTau),
            "pearson" | "r" => Ok(Statistic::Pearson),
            other => Err(Error::Invalid(format!("unknown statistic `{other}`"))),
        }
    }
}

/// A correlation label: one score key, or the average of several.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Label {
    Single(String),
    Average(Vec<String>),
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix("avg(").and_then(|r| r.strip_suffix(')')) {
            let members = inner
                .split(',')
                .map(str::trim)
                .filter(|m| !m.is_empty())
                .map(canonical_key)
                .collect::<Result<Vec<_>>>()?;
            if members.is_empty() {
                return Err(Error::Invalid(format!("empty average `{s}`")));
            }
            return Ok(Label::Average(members));
        }
        Ok(Label::Single(canonical_key(s)?))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Single(key) => f.write_str(key),
            Label::Average(keys) => write!(f, "avg({})", keys.join(",")),
        }
    }
}

/// Canonical form of a score key such as `MetricX`, `MetricX:mbr` or
/// `MetricX@ref`, with aliases resolved.
pub fn canonical_key(key: &str) -> Result<String> {
    let (base, mbr) = match key.strip_suffix(MBR_SUFFIX) {
        Some(b) => (b, MBR_SUFFIX),
        None => (key, ""),
    };
    let (base, at_ref) = match registry::strip_at_ref(base) {
        Some(b) => (b, registry::AT_REF_SUFFIX),
        None => (base, ""),
    };
    Ok(format!("{}{at_ref}{mbr}", registry::canonical_id(base)?))
}

pub fn key_orientation(key: &str) -> Result<Orientation> {
    let base = key.strip_suffix(MBR_SUFFIX).unwrap_or(key);
    let base = registry::strip_at_ref(base).unwrap_or(base);
    Ok(registry::lookup(base)?.orientation)
}

/// Metric scores keyed by (segment, system), one map per score key.
#[derive(Debug, Clone, Default)]
pub struct ScoreTable {
    scores: HashMap<String, HashMap<(String, String), f64>>,
}

impl ScoreTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, mut record: SegmentScore) -> Result<()> {
        record.metric_id = canonical_key(&record.metric_id)?;
        if !record.score.is_finite() {
            return Err(Error::NonFinite {
                segment: record.segment_id,
                metric: record.metric_id,
                position: 0,
            });
        }
        let slot = self.scores.entry(record.metric_id.clone()).or_default();
        let key = (record.segment_id, record.system_id);
        if slot.insert(key.clone(), record.score).is_some() {
            return Err(Error::Invalid(format!(
                "duplicate `{}` score for ({}, {})",
                record.metric_id, key.0, key.1
            )));
        }
        Ok(())
    }

    pub fn get(&self, key: &str, segment: &str, system: &str) -> Option<f64> {
        self.scores
            .get(key)?
            .get(&(segment.to_string(), system.to_string()))
            .copied()
    }

    /// Adds `<metric>:mbr` scores: each selection's pseudoreference score in
    /// the segment's `metric` matrix.
    pub fn add_pseudoref_scores(
        &mut self,
        selections: &[SelectionRecord],
        matrices: &MatrixStore,
        metric: &str,
    ) -> Result<()> {
        let metric = registry::canonical_id(metric)?;
        for sel in selections {
            let matrix = matrices
                .get(&sel.segment_id)
                .and_then(|m| m.get(metric))
                .ok_or_else(|| Error::MissingMatrix {
                    metric: metric.to_string(),
                    segment: sel.segment_id.clone(),
                })?;
            self.insert(SegmentScore {
                segment_id: sel.segment_id.clone(),
                system_id: sel.system_id.clone(),
                metric_id: format!("{metric}{MBR_SUFFIX}"),
                score: pseudoref_score(sel.selected_index, matrix)?,
            })?;
        }
        Ok(())
    }
}

impl FromIterator<SegmentScore> for Result<ScoreTable> {
    fn from_iter<I: IntoIterator<Item = SegmentScore>>(iter: I) -> Self {
        let mut table = ScoreTable::new();
        for record in iter {
            table.insert(record)?;
        }
        Ok(table)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Pooling {
    /// One coefficient per language pair.
    #[default]
    PerPair,
    /// One coefficient over every observation.
    Global,
}

impl FromStr for Pooling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pair" | "per-pair" => Ok(Pooling::PerPair),
            "global" => Ok(Pooling::Global),
            other => Err(Error::Invalid(format!("unknown pooling `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationResult {
    /// Language pair, or `all` under global pooling.
    pub group: String,
    pub metric_label: String,
    pub statistic: Statistic,
    pub value: f64,
    pub n_pairs: usize,
}

fn oriented_values(
    label: &Label,
    table: &ScoreTable,
    observations: &[&MqmRecord],
) -> Result<Vec<f64>> {
    let keys: Vec<&String> = match label {
        Label::Single(k) => vec![k],
        Label::Average(ks) => ks.iter().collect(),
    };
    let orientations = keys
        .iter()
        .map(|k| key_orientation(k))
        .collect::<Result<Vec<_>>>()?;
    let mut missing = Vec::new();
    let mut values = Vec::with_capacity(observations.len());
    for obs in observations {
        let mut sum = 0.0;
        let mut complete = true;
        for (key, o) in keys.iter().zip(&orientations) {
            match table.get(key, &obs.segment_id, &obs.system_id) {
                Some(v) => sum += o.normalize(v),
                None => complete = false,
            }
        }
        if complete {
            values.push(sum / keys.len() as f64);
        } else {
            missing.push((obs.segment_id.clone(), obs.system_id.clone()));
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingObservation(missing));
    }
    Ok(values)
}

/// Correlates every label with negated MQM.
///
/// Under [`Pooling::PerPair`], `segment_pairs` maps each segment id to its
/// language pair and groups appear in first-seen order of the MQM records.
pub fn correlate_with_mqm(
    mqm: &[MqmRecord],
    table: &ScoreTable,
    labels: &[Label],
    statistics: &[Statistic],
    pooling: Pooling,
    segment_pairs: &HashMap<String, String>,
) -> Result<Vec<CorrelationResult>> {
    let mut seen = HashSet::new();
    for r in mqm {
        r.validate()?;
        if !seen.insert((&r.segment_id, &r.system_id)) {
            return Err(Error::Invalid(format!(
                "duplicate MQM record for ({}, {})",
                r.segment_id, r.system_id
            )));
        }
    }

    let mut groups: Vec<(String, Vec<&MqmRecord>)> = Vec::new();
    for r in mqm {
        let group = match pooling {
            Pooling::Global => "all".to_string(),
            Pooling::PerPair => segment_pairs
                .get(&r.segment_id)
                .cloned()
                .ok_or_else(|| Error::UnknownSegment(r.segment_id.clone()))?,
        };
        match groups.iter_mut().find(|(g, _)| *g == group) {
            Some((_, members)) => members.push(r),
            None => groups.push((group, vec![r])),
        }
    }

    let mut results = Vec::new();
    for (group, observations) in &groups {
        let human: Vec<f64> = observations.iter().map(|r| -r.mqm_score).collect();
        for label in labels {
            let metric = oriented_values(label, table, observations)?;
            for &statistic in statistics {
                results.push(CorrelationResult {
                    group: group.clone(),
                    metric_label: label.to_string(),
                    statistic,
                    value: statistic.compute(&metric, &human)?,
                    n_pairs: observations.len(),
                });
            }
        }
    }
    Ok(results)
}

/// Tab-separated rows: group, label, statistic, value, n.
pub fn render_correlations(results: &[CorrelationResult]) -> String {
    let mut out = String::from("group\tlabel\tstatistic\tvalue\tn\n");
    for r in results {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            r.group,
            r.metric_label,
            r.statistic.as_str(),
            r.value,
            r.n_pairs
        ));
    }
    out
}
