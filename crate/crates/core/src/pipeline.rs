//! Two-step selection: keep the top N candidates by a QE stage, then run MBR
//! over the survivors.
//!
//! Names follow `<qe-tag>QE(<N>)<mbr-tag>MBR`, e.g. `mxQE(32)xcMBR` or
//! `noncQE(8)noncnolexMBR`. Group tags resolve per language pair; a stage with
//! more than one metric is combined by rankAvg.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use regex::Regex;

use crate::ensemble::{rank_candidates, RankTable, SegmentMatrices, Strategy};
use crate::error::{Error, Result};
use crate::mbr::{self, MbrConfig};
use crate::registry::{self, GroupName, MetricKind, Orientation};
use crate::types::{CandidateSet, MatrixKind, ScoreMatrix, SelectionRecord};

/// One stage of a pipeline: a single metric or a metric group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StageSpec {
    Metric(&'static str),
    Group(GroupName),
}

impl StageSpec {
    /// Metric ids of this stage for `language_pair`, restricted to `kind`.
    pub fn members(self, language_pair: &str, kind: MetricKind) -> Result<Vec<&'static str>> {
        match self {
            StageSpec::Metric(id) => {
                let spec = registry::lookup(id)?;
                if spec.kind != kind {
                    return Err(Error::KindMismatch {
                        metric: spec.id.to_string(),
                        actual: spec.kind,
                        requested: kind,
                    });
                }
                Ok(vec![spec.id])
            }
            StageSpec::Group(group) => Ok(group.members_of_kind(language_pair, kind)),
        }
    }
}

const QE_TAGS: [(&str, StageSpec); 7] = [
    ("all", StageSpec::Group(GroupName::Qe)),
    ("nolex", StageSpec::Group(GroupName::Qe)),
    ("top", StageSpec::Group(GroupName::TopQe)),
    ("nonc", StageSpec::Group(GroupName::NoNcQe)),
    ("noncnolex", StageSpec::Group(GroupName::NoNcQe)),
    ("mx", StageSpec::Metric(registry::METRICX_QE)),
    ("ck", StageSpec::Metric(registry::COMETKIWI23_XXL)),
];

const MBR_TAGS: [(&str, StageSpec); 7] = [
    ("all", StageSpec::Group(GroupName::All)),
    ("nolex", StageSpec::Group(GroupName::NoLex)),
    ("top", StageSpec::Group(GroupName::Top)),
    ("nonc", StageSpec::Group(GroupName::NoNc)),
    ("noncnolex", StageSpec::Group(GroupName::NoNcNoLex)),
    ("mx", StageSpec::Metric(registry::METRICX)),
    ("xc", StageSpec::Metric(registry::XCOMET_XXL)),
];

/// The nine two-step families, written with `N` in place of the filter size.
pub const FAMILIES: [&str; 9] = [
    "allQE(N)allMBR",
    "allQE(N)nolexMBR",
    "topQE(N)topMBR",
    "noncQE(N)noncMBR",
    "noncQE(N)noncnolexMBR",
    "mxQE(N)xcMBR",
    "ckQE(N)xcMBR",
    "mxQE(N)mxMBR",
    "ckQE(N)mxMBR",
];

fn resolve_tag(
    table: &[(&'static str, StageSpec)],
    stage: &'static str,
    tag: &str,
) -> Result<(&'static str, StageSpec)> {
    table
        .iter()
        .find(|(t, _)| *t == tag)
        .copied()
        .ok_or_else(|| Error::UnknownTag {
            stage,
            tag: tag.to_string(),
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PipelineSpec {
    pub qe_tag: &'static str,
    pub qe_stage: StageSpec,
    pub filter_n: usize,
    pub mbr_tag: &'static str,
    pub mbr_stage: StageSpec,
}

impl PipelineSpec {
    pub fn with_filter_n(self, filter_n: usize) -> Self {
        PipelineSpec { filter_n, ..self }
    }
}

impl fmt::Display for PipelineSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}QE({}){}MBR", self.qe_tag, self.filter_n, self.mbr_tag)
    }
}

fn grammar() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^([A-Za-z]+)QE\(([^)]*)\)([A-Za-z]+)MBR$").unwrap())
}

/// Parses a pipeline name. The literal `N` is accepted as a placeholder size
/// and yields `filter_n = 0`; substitute a size with
/// [`PipelineSpec::with_filter_n`] before running.
pub fn parse_pipeline_template(name: &str) -> Result<PipelineSpec> {
    let caps = grammar()
        .captures(name)
        .ok_or_else(|| Error::Grammar(name.to_string()))?;
    let (qe_tag, qe_stage) = resolve_tag(&QE_TAGS, "QE", &caps[1])?;
    let (mbr_tag, mbr_stage) = resolve_tag(&MBR_TAGS, "MBR", &caps[3])?;
    let raw = &caps[2];
    let filter_n = if raw == "N" {
        0
    } else {
        match raw.parse::<usize>() {
            Ok(n) if n >= 1 && raw.bytes().all(|b| b.is_ascii_digit()) => n,
            _ => return Err(Error::InvalidFilterN(raw.to_string())),
        }
    };
    Ok(PipelineSpec {
        qe_tag,
        qe_stage,
        filter_n,
        mbr_tag,
        mbr_stage,
    })
}

/// Parses a concrete pipeline name such as `ckQE(32)xcMBR`.
pub fn parse_pipeline_name(name: &str) -> Result<PipelineSpec> {
    let spec = parse_pipeline_template(name)?;
    if spec.filter_n == 0 {
        return Err(Error::InvalidFilterN("N".into()));
    }
    Ok(spec)
}

impl FromStr for PipelineSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_pipeline_name(s)
    }
}

/// Which pseudoreferences the second stage averages over.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum PseudorefMode {
    /// Only the candidates that survived the filter.
    #[default]
    Filtered,
    /// Every candidate of the segment.
    Full,
}

impl PseudorefMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PseudorefMode::Filtered => "filtered",
            PseudorefMode::Full => "full",
        }
    }
}

impl FromStr for PseudorefMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "filtered" => Ok(PseudorefMode::Filtered),
            "full" => Ok(PseudorefMode::Full),
            other => Err(Error::Invalid(format!(
                "unknown pseudoreference mode `{other}`; expected filtered or full"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PipelineConfig {
    pub mbr: MbrConfig,
    pub pseudorefs: PseudorefMode,
}

fn matrix<'a>(
    set: &CandidateSet,
    matrices: &'a SegmentMatrices,
    metric: &str,
    kind: MatrixKind,
) -> Result<&'a ScoreMatrix> {
    let m = matrices.get(metric).ok_or_else(|| Error::MissingMatrix {
        metric: metric.to_string(),
        segment: set.segment_id.clone(),
    })?;
    if m.kind != kind {
        return Err(Error::WrongKind {
            expected: kind.as_str(),
            found: m.kind.as_str(),
        });
    }
    if m.n != set.len() {
        return Err(Error::LengthMismatch {
            segment: set.segment_id.clone(),
            metric: metric.to_string(),
            expected: set.len(),
            found: m.n,
        });
    }
    Ok(m)
}

fn empty_stage(set: &CandidateSet, stage: StageSpec) -> Error {
    Error::Invalid(format!(
        "stage {stage:?} has no metrics for language pair `{}`",
        set.language_pair
    ))
}

/// Sort keys for the QE stage, with the better candidate under `orientation`.
fn qe_keys(
    set: &CandidateSet,
    qe_stage: StageSpec,
    matrices: &SegmentMatrices,
) -> Result<(Vec<f64>, Orientation)> {
    let members = qe_stage.members(&set.language_pair, MetricKind::Qe)?;
    match members.as_slice() {
        [] => Err(empty_stage(set, qe_stage)),
        [single] => {
            let m = matrix(set, matrices, single, MatrixKind::Qe)?;
            Ok((m.scores.clone(), m.orientation))
        }
        _ => {
            let mut columns = Vec::with_capacity(members.len());
            for id in &members {
                let m = matrix(set, matrices, id, MatrixKind::Qe)?;
                columns.push(rank_candidates(&m.scores, m.orientation)?);
            }
            let table = RankTable::from_columns(
                set.segment_id.clone(),
                members.iter().map(|s| s.to_string()).collect(),
                &columns,
            )?;
            Ok((
                crate::ensemble::aggregates(&table, Strategy::RankAvg),
                Orientation::LowerBetter,
            ))
        }
    }
}

/// Indices of the `n_keep` best candidates by the QE stage, in original order.
pub fn qe_filter(
    set: &CandidateSet,
    qe_stage: StageSpec,
    matrices: &SegmentMatrices,
    n_keep: usize,
) -> Result<Vec<usize>> {
    if n_keep == 0 {
        return Err(Error::InvalidFilterN("0".into()));
    }
    let (keys, orientation) = qe_keys(set, qe_stage, matrices)?;
    let mut order: Vec<usize> = (0..keys.len()).collect();
    // stable: equal keys keep ascending index order
    order.sort_by(|&a, &b| {
        orientation
            .normalize(keys[b])
            .total_cmp(&orientation.normalize(keys[a]))
    });
    order.truncate(n_keep);
    order.sort_unstable();
    Ok(order)
}

/// MBR over the candidates in `rows`, averaging over `cols`. Returns an index
/// into the full candidate list.
pub fn mbr_stage_select(
    set: &CandidateSet,
    mbr_stage: StageSpec,
    matrices: &SegmentMatrices,
    rows: &[usize],
    cols: &[usize],
    config: MbrConfig,
) -> Result<usize> {
    let members = mbr_stage.members(&set.language_pair, MetricKind::ReferenceBased)?;
    if members.is_empty() {
        return Err(empty_stage(set, mbr_stage));
    }
    let mut columns = Vec::with_capacity(members.len());
    let mut single = None;
    for id in &members {
        let m = matrix(set, matrices, id, MatrixKind::Pairwise)?;
        let u = mbr::restricted_utilities(m, rows, cols, config)?;
        if members.len() == 1 {
            single = Some(mbr::argbest(&u, m.orientation));
        } else {
            columns.push(rank_candidates(&u, m.orientation)?);
        }
    }
    let local = match single {
        Some(i) => i,
        None => {
            let table = RankTable::from_columns(
                set.segment_id.clone(),
                members.iter().map(|s| s.to_string()).collect(),
                &columns,
            )?;
            crate::ensemble::ensemble_select(&table, Strategy::RankAvg)?
        }
    };
    Ok(rows[local])
}

/// Runs both stages and returns the selected index into `set.candidates`.
pub fn pipeline_select(
    set: &CandidateSet,
    spec: &PipelineSpec,
    matrices: &SegmentMatrices,
    config: PipelineConfig,
) -> Result<usize> {
    let kept = qe_filter(set, spec.qe_stage, matrices, spec.filter_n)?;
    let all: Vec<usize>;
    let cols = match config.pseudorefs {
        PseudorefMode::Filtered => &kept,
        PseudorefMode::Full => {
            all = (0..set.len()).collect();
            &all
        }
    };
    mbr_stage_select(set, spec.mbr_stage, matrices, &kept, cols, config.mbr)
}

pub fn run_pipeline(
    set: &CandidateSet,
    spec: &PipelineSpec,
    matrices: &SegmentMatrices,
    config: PipelineConfig,
) -> Result<SelectionRecord> {
    let index = pipeline_select(set, spec, matrices, config)?;
    SelectionRecord::from_set(set, spec.to_string(), index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::{COMETKIWI23_XXL, METRICX, METRICX_QE, XCOMET_XXL};

    #[test]
    fn parses_named_families() {
        let spec = parse_pipeline_name("ckQE(32)xcMBR").unwrap();
        assert_eq!(spec.qe_stage, StageSpec::Metric(COMETKIWI23_XXL));
        assert_eq!(spec.filter_n, 32);
        assert_eq!(spec.mbr_stage, StageSpec::Metric(XCOMET_XXL));
        assert_eq!(spec.to_string(), "ckQE(32)xcMBR");

        let spec = parse_pipeline_name("noncQE(8)noncnolexMBR").unwrap();
        assert_eq!(spec.qe_stage, StageSpec::Group(GroupName::NoNcQe));
        assert_eq!(spec.mbr_stage, StageSpec::Group(GroupName::NoNcNoLex));

        for family in FAMILIES {
            let t = parse_pipeline_template(family).unwrap();
            assert_eq!(t.with_filter_n(16).to_string(), family.replace('N', "16"));
        }
    }

    #[test]
    fn rejects_bad_names() {
        assert!(matches!(
            parse_pipeline_name("fooQE(32)barMBR"),
            Err(Error::UnknownTag { stage: "QE", .. })
        ));
        assert!(matches!(
            parse_pipeline_name("mxQE(32)ckMBR"),
            Err(Error::UnknownTag { stage: "MBR", .. })
        ));
        assert!(matches!(
            parse_pipeline_name("mxQE32xcMBR"),
            Err(Error::Grammar(_))
        ));
        for bad in ["0", "-3", "x", "", "+4", "N"] {
            let name = format!("mxQE({bad})xcMBR");
            assert!(
                matches!(parse_pipeline_name(&name), Err(Error::InvalidFilterN(_))),
                "{name}"
            );
        }
    }

    #[test]
    fn group_stages_split_by_kind() {
        let spec = parse_pipeline_name("noncQE(4)noncMBR").unwrap();
        assert_eq!(
            spec.qe_stage.members("en-sw", MetricKind::Qe).unwrap(),
            vec![METRICX_QE, registry::AFRICOMET_QE]
        );
        let mbr = spec
            .mbr_stage
            .members("en-de", MetricKind::ReferenceBased)
            .unwrap();
        assert_eq!(mbr[0], METRICX);
        assert!(!mbr.contains(&registry::COMETKIWI22));
        assert!(StageSpec::Metric(METRICX)
            .members("en-de", MetricKind::Qe)
            .is_err());
    }

    fn set(n: usize) -> CandidateSet {
        CandidateSet {
            segment_id: "s".into(),
            source: "src".into(),
            candidates: (0..n).map(|i| format!("c{i}")).collect(),
            reference: None,
            doc_context: None,
            language_pair: "en-de".into(),
        }
    }

    fn with(entries: Vec<ScoreMatrix>) -> SegmentMatrices {
        entries
            .into_iter()
            .map(|m| (m.metric_id.clone(), m))
            .collect()
    }

    #[test]
    fn filter_examples() {
        let s = set(4);
        let ms = with(vec![ScoreMatrix::qe(
            "s",
            COMETKIWI23_XXL,
            vec![0.9, 0.1, 0.8, 0.5],
        )
        .unwrap()]);
        let ck = StageSpec::Metric(COMETKIWI23_XXL);
        assert_eq!(qe_filter(&s, ck, &ms, 2).unwrap(), vec![0, 2]);
        assert_eq!(qe_filter(&s, ck, &ms, 64).unwrap(), vec![0, 1, 2, 3]);

        let ms = with(vec![ScoreMatrix::qe(
            "s",
            METRICX_QE,
            vec![1.0, 0.5, 0.5, 2.0],
        )
        .unwrap()]);
        let mx = StageSpec::Metric(METRICX_QE);
        assert_eq!(qe_filter(&s, mx, &ms, 1).unwrap(), vec![1]);
        assert_eq!(qe_filter(&s, mx, &ms, 3).unwrap(), vec![0, 1, 2]);

        assert!(matches!(
            qe_filter(&s, ck, &ms, 2),
            Err(Error::MissingMatrix { .. })
        ));
    }

    #[test]
    fn pseudoreference_modes_differ() {
        // candidate 2 is filtered out but strongly favours candidate 1
        let s = set(3);
        let ms = with(vec![
            ScoreMatrix::qe("s", METRICX_QE, vec![0.0, 0.0, 9.0]).unwrap(),
            ScoreMatrix::pairwise(
                "s",
                XCOMET_XXL,
                3,
                vec![
                    0.9, 0.5, 0.0, //
                    0.5, 0.8, 0.9, //
                    0.0, 0.0, 1.0,
                ],
            )
            .unwrap(),
        ]);
        let spec = parse_pipeline_name("mxQE(2)xcMBR").unwrap();
        let filtered = pipeline_select(&s, &spec, &ms, PipelineConfig::default()).unwrap();
        assert_eq!(filtered, 0);
        let full = PipelineConfig {
            pseudorefs: PseudorefMode::Full,
            ..Default::default()
        };
        assert_eq!(pipeline_select(&s, &spec, &ms, full).unwrap(), 1);

        let record = run_pipeline(&s, &spec, &ms, PipelineConfig::default()).unwrap();
        assert_eq!(record.system_id, "mxQE(2)xcMBR");
        assert_eq!(record.selected_text, "c0");
    }
}
