//! Scoring of selected outputs and the baseline-relative report grid.
//!
//! Each report cell holds a system's mean score on one evaluation metric,
//! its delta to the baseline (positive means better whatever the metric's
//! orientation), a two-sided paired t-test p-value against the baseline on
//! the same segments, and a significance mark: `*` for p < 0.05, `†` for
//! p < 0.01, `‡` for p < 0.001.
//!
//! Reports are produced per language pair plus an `all` block whose means
//! are the unweighted average of the per-pair means and whose p-values pool
//! the paired segments of every pair.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::MatrixStore;
use crate::lexical::LexicalMetric;
use crate::registry::{self, MetricKind, Orientation};
use crate::stats;
use crate::types::{CandidateSet, MatrixKind, SelectionRecord};

/// One evaluation score of one system's output on one segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentEvaluation {
    pub segment_id: String,
    pub language_pair: String,
    pub system_id: String,
    pub metric_id: String,
    pub score: f64,
}

fn score_one(
    selection: &SelectionRecord,
    set: &CandidateSet,
    metric: &registry::MetricSpec,
    matrices: &MatrixStore,
) -> Result<f64> {
    let reference = match metric.kind {
        MetricKind::ReferenceBased => Some(
            set.reference
                .as_deref()
                .ok_or_else(|| Error::MissingReference(set.segment_id.clone()))?,
        ),
        MetricKind::Qe => None,
    };
    if let (Ok(lexical), Some(reference)) = (LexicalMetric::from_id(metric.id), reference) {
        return lexical.score(&selection.selected_text, reference);
    }
    let key = match metric.kind {
        MetricKind::ReferenceBased => registry::at_ref_key(metric.id),
        MetricKind::Qe => metric.id.to_string(),
    };
    let missing = || Error::MissingExternalScore {
        metric: key.clone(),
        segment: set.segment_id.clone(),
    };
    let vector = matrices
        .get(&set.segment_id)
        .and_then(|m| m.get(&key))
        .ok_or_else(missing)?;
    if vector.kind != MatrixKind::Qe {
        return Err(Error::WrongKind {
            expected: MatrixKind::Qe.as_str(),
            found: vector.kind.as_str(),
        });
    }
    if vector.n != set.len() {
        return Err(Error::LengthMismatch {
            segment: set.segment_id.clone(),
            metric: key.clone(),
            expected: set.len(),
            found: vector.n,
        });
    }
    Ok(vector.scores[selection.selected_index])
}

/// Scores every selection with every metric, in selection order and then
/// metric order.
///
/// Lexical reference-based metrics are computed against the segment's
/// reference. Other reference-based metrics are read from `<metric>@ref`
/// vectors and QE metrics from their QE vectors, indexed by the selected
/// candidate.
pub fn evaluate_selections(
    selections: &[SelectionRecord],
    sets: &HashMap<String, CandidateSet>,
    metrics: &[&str],
    matrices: &MatrixStore,
) -> Result<Vec<SegmentEvaluation>> {
    let specs = metrics
        .iter()
        .map(|m| registry::lookup(m))
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<Vec<SegmentEvaluation>> = selections
        .par_iter()
        .map(|sel| {
            let set = sets
                .get(&sel.segment_id)
                .ok_or_else(|| Error::UnknownSegment(sel.segment_id.clone()))?;
            sel.validate_against(set)?;
            specs
                .iter()
                .map(|spec| {
                    Ok(SegmentEvaluation {
                        segment_id: sel.segment_id.clone(),
                        language_pair: set.language_pair.clone(),
                        system_id: sel.system_id.clone(),
                        metric_id: spec.id.to_string(),
                        score: score_one(sel, set, spec, matrices)?,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// Two-sided paired Student t-test on `a[i] - b[i]`.
///
/// All-zero differences give 1.0; constant nonzero differences give 0.0.
pub fn paired_ttest(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::SampleLengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::TooFewObservations(n));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    if diffs.iter().all(|&d| d == 0.0) {
        return Ok(1.0);
    }
    let nf = n as f64;
    let mean = diffs.iter().sum::<f64>() / nf;
    let ss: f64 = diffs.iter().map(|d| (d - mean) * (d - mean)).sum();
    let sd = (ss / (nf - 1.0)).sqrt();
    if sd == 0.0 {
        return Ok(0.0);
    }
    let t = mean / (sd / nf.sqrt());
    Ok(stats::student_t_two_sided(t, nf - 1.0))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mark {
    #[default]
    None,
    Star,
    Dagger,
    DoubleDagger,
}

impl Mark {
    pub fn symbol(self) -> &'static str {
        match self {
            Mark::None => "",
            Mark::Star => "*",
            Mark::Dagger => "†",
            Mark::DoubleDagger => "‡",
        }
    }
}

pub fn significance_mark(p: f64) -> Mark {
    if p < 0.001 {
        Mark::DoubleDagger
    } else if p < 0.01 {
        Mark::Dagger
    } else if p < 0.05 {
        Mark::Star
    } else {
        Mark::None
    }
}

/// The system × metric grid for one language pair, or for all of them.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub group: String,
    pub baseline_id: String,
    pub systems: Vec<String>,
    pub metrics: Vec<String>,
    pub orientations: Vec<Orientation>,
    /// `means[s][m]`
    pub means: Vec<Vec<f64>>,
    pub deltas: Vec<Vec<f64>>,
    pub p_values: Vec<Vec<f64>>,
    pub marks: Vec<Vec<Mark>>,
}

fn first_seen<'a>(items: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for item in items {
        if !out.iter().any(|s| s == item) {
            out.push(item.to_string());
        }
    }
    out
}

/// (system, metric) → segment key → score.
type Cells<'a> = HashMap<(&'a str, &'a str), HashMap<(&'a str, &'a str), f64>>;

fn index_cells(evaluations: &[SegmentEvaluation]) -> Result<Cells<'_>> {
    let mut cells: Cells = HashMap::new();
    for e in evaluations {
        if !e.score.is_finite() {
            return Err(Error::NonFinite {
                segment: e.segment_id.clone(),
                metric: e.metric_id.clone(),
                position: 0,
            });
        }
        let seg = (e.language_pair.as_str(), e.segment_id.as_str());
        let slot = cells
            .entry((e.system_id.as_str(), e.metric_id.as_str()))
            .or_default();
        if slot.insert(seg, e.score).is_some() {
            return Err(Error::Invalid(format!(
                "duplicate `{}` score for system `{}` on segment `{}`",
                e.metric_id, e.system_id, e.segment_id
            )));
        }
    }
    Ok(cells)
}

/// Baseline and system scores aligned on the baseline's segment order.
fn paired<'a>(
    cells: &Cells<'a>,
    segments: &[(&'a str, &'a str)],
    baseline: &str,
    system: &str,
    metric: &str,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let lookup = |sys: &str| -> Result<Vec<f64>> {
        let scores = cells.get(&(sys, metric));
        segments
            .iter()
            .map(|seg| {
                scores
                    .and_then(|s| s.get(seg))
                    .copied()
                    .ok_or_else(|| Error::MissingEvaluation {
                        system: sys.to_string(),
                        metric: metric.to_string(),
                        segment: seg.1.to_string(),
                    })
            })
            .collect()
    };
    Ok((lookup(system)?, lookup(baseline)?))
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

struct Frame {
    systems: Vec<String>,
    metrics: Vec<String>,
    orientations: Vec<Orientation>,
}

fn frame(evaluations: &[SegmentEvaluation], baseline_id: &str) -> Result<Frame> {
    let systems = first_seen(evaluations.iter().map(|e| e.system_id.as_str()));
    if !systems.iter().any(|s| s == baseline_id) {
        return Err(Error::MissingBaseline(baseline_id.to_string()));
    }
    let metrics = first_seen(evaluations.iter().map(|e| e.metric_id.as_str()));
    let orientations = metrics
        .iter()
        .map(|m| registry::lookup(m).map(|s| s.orientation))
        .collect::<Result<_>>()?;
    Ok(Frame {
        systems,
        metrics,
        orientations,
    })
}

fn baseline_segments<'a>(
    evaluations: &'a [SegmentEvaluation],
    baseline: &str,
    metric: &str,
) -> Vec<(&'a str, &'a str)> {
    evaluations
        .iter()
        .filter(|e| e.system_id == baseline && e.metric_id == metric)
        .map(|e| (e.language_pair.as_str(), e.segment_id.as_str()))
        .collect()
}

fn assemble(
    group: String,
    baseline_id: &str,
    frame: Frame,
    mut cell: impl FnMut(&str, &str) -> Result<(f64, f64)>,
) -> Result<EvaluationReport> {
    let base_row = frame
        .systems
        .iter()
        .position(|s| s == baseline_id)
        .expect("baseline checked by frame");
    let mut means = Vec::with_capacity(frame.systems.len());
    let mut p_values = Vec::with_capacity(frame.systems.len());
    for system in &frame.systems {
        let mut mrow = Vec::with_capacity(frame.metrics.len());
        let mut prow = Vec::with_capacity(frame.metrics.len());
        for metric in &frame.metrics {
            let (m, p) = cell(system, metric)?;
            mrow.push(m);
            prow.push(p);
        }
        means.push(mrow);
        p_values.push(prow);
    }
    let deltas = means
        .iter()
        .map(|row| {
            row.iter()
                .zip(&means[base_row])
                .zip(&frame.orientations)
                .map(|((&m, &b), o)| o.normalize(m - b))
                .collect()
        })
        .collect();
    let marks = p_values
        .iter()
        .map(|row: &Vec<f64>| row.iter().map(|&p| significance_mark(p)).collect())
        .collect();
    Ok(EvaluationReport {
        group,
        baseline_id: baseline_id.to_string(),
        systems: frame.systems,
        metrics: frame.metrics,
        orientations: frame.orientations,
        means,
        deltas,
        p_values,
        marks,
    })
}

/// Builds one report over all `evaluations`, pairing each system with the
/// baseline segment by segment.
pub fn build_report(
    evaluations: &[SegmentEvaluation],
    baseline_id: &str,
    group: &str,
) -> Result<EvaluationReport> {
    let frame = frame(evaluations, baseline_id)?;
    let cells = index_cells(evaluations)?;
    let segments: HashMap<String, Vec<(&str, &str)>> = frame
        .metrics
        .iter()
        .map(|m| (m.clone(), baseline_segments(evaluations, baseline_id, m)))
        .collect();
    assemble(group.to_string(), baseline_id, frame, |system, metric| {
        let segs = &segments[metric];
        let (sys, base) = paired(&cells, segs, baseline_id, system, metric)?;
        Ok((mean(&sys), paired_ttest(&sys, &base)?))
    })
}

/// Label of the cross-pair block.
pub const ALL_GROUP: &str = "all";

/// One report per language pair, in first-seen order, followed by the `all`
/// block when there is more than one pair.
pub fn build_reports(
    evaluations: &[SegmentEvaluation],
    baseline_id: &str,
) -> Result<Vec<EvaluationReport>> {
    let pairs = first_seen(evaluations.iter().map(|e| e.language_pair.as_str()));
    let mut reports = Vec::with_capacity(pairs.len() + 1);
    for pair in &pairs {
        let subset: Vec<SegmentEvaluation> = evaluations
            .iter()
            .filter(|e| &e.language_pair == pair)
            .cloned()
            .collect();
        reports.push(build_report(&subset, baseline_id, pair)?);
    }
    if pairs.len() > 1 {
        reports.push(build_aggregate(evaluations, baseline_id, &reports)?);
    }
    Ok(reports)
}

fn build_aggregate(
    evaluations: &[SegmentEvaluation],
    baseline_id: &str,
    per_pair: &[EvaluationReport],
) -> Result<EvaluationReport> {
    let frame = frame(evaluations, baseline_id)?;
    let cells = index_cells(evaluations)?;
    let pair_mean = |report: &EvaluationReport, system: &str, metric: &str| {
        let s = report.systems.iter().position(|x| x == system)?;
        let m = report.metrics.iter().position(|x| x == metric)?;
        Some(report.means[s][m])
    };
    assemble(
        ALL_GROUP.to_string(),
        baseline_id,
        frame,
        |system, metric| {
            let mut total = 0.0;
            for report in per_pair {
                total +=
                    pair_mean(report, system, metric).ok_or_else(|| Error::MissingEvaluation {
                        system: system.to_string(),
                        metric: metric.to_string(),
                        segment: format!("<{}>", report.group),
                    })?;
            }
            let segs = baseline_segments(evaluations, baseline_id, metric);
            let (sys, base) = paired(&cells, &segs, baseline_id, system, metric)?;
            Ok((total / per_pair.len() as f64, paired_ttest(&sys, &base)?))
        },
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Tsv,
    Markdown,
    Html,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tsv" => Ok(ReportFormat::Tsv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "html" => Ok(ReportFormat::Html),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

/// Three significant figures, as in 0.598, 1.70, 83.7 or 123.
pub fn format_sig3(value: f64) -> String {
    if value == 0.0 || !value.is_finite() {
        return format!("{value:.2}");
    }
    let decimals = |v: f64| (2 - v.abs().log10().floor() as i32).max(0) as usize;
    let d = decimals(value);
    let text = format!("{value:.d$}");
    // rounding may carry into a new leading digit, as in 9.996 -> 10.00
    let rounded: f64 = text.parse().unwrap_or(value);
    if rounded != 0.0 && decimals(rounded) < d {
        let d = decimals(rounded);
        return format!("{value:.d$}");
    }
    text
}

fn verdict(report: &EvaluationReport, s: usize, m: usize) -> Option<bool> {
    let delta = report.deltas[s][m];
    if report.systems[s] == report.baseline_id || delta == 0.0 {
        None
    } else {
        Some(delta > 0.0)
    }
}

fn render_tsv(reports: &[EvaluationReport], out: &mut String) {
    let Some(first) = reports.first() else {
        return;
    };
    out.push_str("group\tsystem");
    for metric in &first.metrics {
        let _ = write!(out, "\t{metric}\t{metric} delta\t{metric} p");
    }
    out.push('\n');
    for r in reports {
        for (s, system) in r.systems.iter().enumerate() {
            let _ = write!(out, "{}\t{system}", r.group);
            for m in 0..r.metrics.len() {
                let _ = write!(
                    out,
                    "\t{}\t{}\t{}",
                    r.means[s][m], r.deltas[s][m], r.p_values[s][m]
                );
            }
            out.push('\n');
        }
    }
}

fn orientation_note(o: Orientation) -> &'static str {
    match o {
        Orientation::HigherBetter => "↑",
        Orientation::LowerBetter => "↓",
    }
}

fn render_markdown(reports: &[EvaluationReport], out: &mut String) {
    for (k, r) in reports.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "### {}\n", r.group);
        out.push_str("| MBR/QE Method |");
        for (metric, &o) in r.metrics.iter().zip(&r.orientations) {
            let _ = write!(out, " {metric} {} |", orientation_note(o));
        }
        out.push_str("\n|---|");
        for _ in &r.metrics {
            out.push_str("---:|");
        }
        out.push('\n');
        for (s, system) in r.systems.iter().enumerate() {
            let _ = write!(out, "| {system} |");
            for m in 0..r.metrics.len() {
                let mark = r.marks[s][m];
                let value = format!("{}{}", format_sig3(r.means[s][m]), mark.symbol());
                let value = if mark == Mark::None {
                    value
                } else {
                    format!("**{value}**")
                };
                let tag = match verdict(r, s, m) {
                    Some(true) => " 🟢",
                    Some(false) => " 🔴",
                    None => "",
                };
                let _ = write!(out, " {value}{tag} |");
            }
            out.push('\n');
        }
    }
}

fn html_escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

fn render_html(reports: &[EvaluationReport], out: &mut String) {
    for r in reports {
        let _ = writeln!(out, "<h3>{}</h3>", html_escape(&r.group));
        out.push_str("<table>\n<thead>\n<tr><th>MBR/QE Method</th>");
        for (metric, &o) in r.metrics.iter().zip(&r.orientations) {
            let _ = write!(
                out,
                "<th>{} {}</th>",
                html_escape(metric),
                orientation_note(o)
            );
        }
        out.push_str("</tr>\n</thead>\n<tbody>\n");
        for (s, system) in r.systems.iter().enumerate() {
            let _ = write!(out, "<tr><th>{}</th>", html_escape(system));
            for m in 0..r.metrics.len() {
                let mark = r.marks[s][m];
                let style = match verdict(r, s, m) {
                    Some(true) => " class=\"better\" style=\"background:#c6efce\"",
                    Some(false) => " class=\"worse\" style=\"background:#ffc7ce\"",
                    None => "",
                };
                let value = format!("{}{}", format_sig3(r.means[s][m]), mark.symbol());
                if mark == Mark::None {
                    let _ = write!(out, "<td{style}>{value}</td>");
                } else {
                    let _ = write!(out, "<td{style}><b>{value}</b></td>");
                }
            }
            out.push_str("</tr>\n");
        }
        out.push_str("</tbody>\n</table>\n");
    }
}

/// Serializes reports. TSV carries full-precision mean, delta and p columns;
/// markdown and HTML show the rounded mean with its mark, bold when
/// significant, and flag cells better or worse than the baseline.
pub fn render_report(reports: &[EvaluationReport], format: ReportFormat) -> String {
    let mut out = String::new();
    match format {
        ReportFormat::Tsv => render_tsv(reports, &mut out),
        ReportFormat::Markdown => render_markdown(reports, &mut out),
        ReportFormat::Html => render_html(reports, &mut out),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(pair: &str, seg: &str, sys: &str, metric: &str, score: f64) -> SegmentEvaluation {
        SegmentEvaluation {
            segment_id: seg.into(),
            language_pair: pair.into(),
            system_id: sys.into(),
            metric_id: metric.into(),
            score,
        }
    }

    #[test]
    fn ttest_conventions() {
        let a = [1.0, 2.0, 3.0];
        assert_eq!(paired_ttest(&a, &a).unwrap(), 1.0);
        assert_eq!(
            paired_ttest(&[2.0, 3.0, 4.0, 5.0], &[1.0, 2.0, 3.0, 4.0]).unwrap(),
            0.0
        );
        assert!(matches!(
            paired_ttest(&[1.0], &[2.0]),
            Err(Error::TooFewObservations(1))
        ));
        assert!(matches!(
            paired_ttest(&[1.0, 2.0], &[2.0]),
            Err(Error::SampleLengthMismatch { left: 2, right: 1 })
        ));
    }

    #[test]
    fn marks_follow_thresholds() {
        assert_eq!(significance_mark(0.2), Mark::None);
        assert_eq!(significance_mark(0.05), Mark::None);
        assert_eq!(significance_mark(0.0499), Mark::Star);
        assert_eq!(significance_mark(0.003), Mark::Dagger);
        assert_eq!(significance_mark(0.001), Mark::Dagger);
        assert_eq!(significance_mark(0.0009), Mark::DoubleDagger);
    }

    #[test]
    fn three_significant_figures() {
        assert_eq!(format_sig3(0.598), "0.598");
        assert_eq!(format_sig3(1.7), "1.70");
        assert_eq!(format_sig3(83.71), "83.7");
        assert_eq!(format_sig3(123.4), "123");
        assert_eq!(format_sig3(9.996), "10.0");
        assert_eq!(format_sig3(0.09996), "0.100");
        assert_eq!(format_sig3(-2.345), "-2.35");
        assert_eq!(format_sig3(0.0), "0.00");
    }

    #[test]
    fn deltas_follow_orientation() {
        let mut evs = Vec::new();
        for (k, seg) in ["a", "b", "c"].iter().enumerate() {
            let k = k as f64;
            evs.push(ev("en-de", seg, "greedy", "TER", 50.0 + k));
            evs.push(ev("en-de", seg, "greedy", "chrF", 50.0 + k));
            evs.push(ev("en-de", seg, "sys", "TER", 40.0 + k * 1.5));
            evs.push(ev("en-de", seg, "sys", "chrF", 40.0 + k * 1.5));
        }
        let r = build_report(&evs, "greedy", "en-de").unwrap();
        assert_eq!(r.systems, vec!["greedy", "sys"]);
        assert_eq!(r.deltas[0], vec![0.0, 0.0]);
        assert_eq!(r.marks[0], vec![Mark::None, Mark::None]);
        assert!(r.deltas[1][0] > 0.0, "lower TER is better");
        assert!(r.deltas[1][1] < 0.0, "lower chrF is worse");
        assert_eq!(r.p_values[1][0], r.p_values[1][1]);

        assert!(matches!(
            build_report(&evs, "nobody", "en-de"),
            Err(Error::MissingBaseline(_))
        ));
    }

    #[test]
    fn aggregate_weights_pairs_equally() {
        let mut evs = vec![
            ev("en-de", "a", "greedy", "chrF", 10.0),
            ev("en-de", "a", "sys", "chrF", 20.0),
        ];
        evs.push(ev("en-de", "b", "greedy", "chrF", 10.0));
        evs.push(ev("en-de", "b", "sys", "chrF", 22.0));
        for (k, seg) in ["x", "y", "z", "w"].iter().enumerate() {
            evs.push(ev("en-sw", seg, "greedy", "chrF", 50.0));
            evs.push(ev("en-sw", seg, "sys", "chrF", 50.0 + k as f64));
        }
        let reports = build_reports(&evs, "greedy").unwrap();
        assert_eq!(reports.len(), 3);
        let all = &reports[2];
        assert_eq!(all.group, "all");
        assert_eq!(all.means[1][0], (21.0 + 51.5) / 2.0);
        assert_eq!(all.means[0][0], 30.0);

        let sys: Vec<f64> = vec![20.0, 22.0, 50.0, 51.0, 52.0, 53.0];
        let base: Vec<f64> = vec![10.0, 10.0, 50.0, 50.0, 50.0, 50.0];
        assert_eq!(all.p_values[1][0], paired_ttest(&sys, &base).unwrap());
    }

    #[test]
    fn missing_cells_are_reported() {
        let evs = vec![
            ev("en-de", "a", "greedy", "chrF", 1.0),
            ev("en-de", "b", "greedy", "chrF", 2.0),
            ev("en-de", "a", "sys", "chrF", 1.0),
        ];
        assert!(matches!(
            build_report(&evs, "greedy", "en-de"),
            Err(Error::MissingEvaluation { ref segment, .. }) if segment == "b"
        ));
    }

    #[test]
    fn tiny_render() {
        let evs = vec![
            ev("en-de", "a", "greedy", "chrF", 1.0),
            ev("en-de", "b", "greedy", "chrF", 2.0),
        ];
        let r = build_report(&evs, "greedy", "en-de").unwrap();
        let md = render_report(std::slice::from_ref(&r), ReportFormat::Markdown);
        assert_eq!(
            md,
            "### en-de\n\n| MBR/QE Method | chrF ↑ |\n|---|---:|\n| greedy | 1.50 |\n"
        );
        let tsv = render_report(&[r], ReportFormat::Tsv);
        assert_eq!(
            tsv,
            "group\tsystem\tchrF\tchrF delta\tchrF p\nen-de\tgreedy\t1.5\t0\t1\n"
        );
        assert!(matches!(
            "pdf".parse::<ReportFormat>(),
            Err(Error::UnknownFormat(_))
        ));
    }

    #[test]
    fn dagger_cell() {
        let mut r = build_report(
            &[
                ev("p", "a", "g", "chrF", 1.0),
                ev("p", "b", "g", "chrF", 2.0),
                ev("p", "a", "s", "chrF", 3.0),
                ev("p", "b", "s", "chrF", 4.0),
            ],
            "g",
            "p",
        )
        .unwrap();
        r.p_values[1][0] = 0.003;
        r.marks[1][0] = significance_mark(0.003);
        let md = render_report(&[r], ReportFormat::Markdown);
        assert!(md.contains("| s | **3.50†** 🟢 |"), "{md}");
    }

    fn set(seg: &str, reference: Option<&str>) -> CandidateSet {
        CandidateSet {
            segment_id: seg.into(),
            source: "src".into(),
            candidates: vec!["the cat sat".into(), "a dog ran".into()],
            reference: reference.map(str::to_string),
            doc_context: None,
            language_pair: "en-de".into(),
        }
    }

    #[test]
    fn evaluation_sources() {
        let sets: HashMap<String, CandidateSet> = [
            ("s1".to_string(), set("s1", Some("the cat sat"))),
            ("s2".to_string(), set("s2", None)),
        ]
        .into_iter()
        .collect();
        let sel = |seg: &str, i: usize| SelectionRecord::from_set(&sets[seg], "sys", i).unwrap();
        let store = crate::io::index_matrices(vec![
            crate::types::ScoreMatrix::qe("s1", "MetricX@ref", vec![0.5, 3.0]),
            crate::types::ScoreMatrix::qe("s2", "CometKiwi22", vec![0.1, 0.7]),
        ])
        .unwrap();

        let out = evaluate_selections(&[sel("s1", 0)], &sets, &["chrF", "TER", "MetricX"], &store)
            .unwrap();
        let scores: Vec<f64> = out.iter().map(|e| e.score).collect();
        assert_eq!(scores, vec![100.0, 0.0, 0.5]);

        let out = evaluate_selections(&[sel("s2", 1)], &sets, &["CometKiwi22"], &store).unwrap();
        assert_eq!(out[0].score, 0.7);

        assert!(matches!(
            evaluate_selections(&[sel("s2", 1)], &sets, &["chrF"], &store),
            Err(Error::MissingReference(_))
        ));
        assert!(matches!(
            evaluate_selections(&[sel("s1", 1)], &sets, &["XCOMET-XXL"], &store),
            Err(Error::MissingExternalScore { .. })
        ));
    }
}
