//! System descriptors and per-segment selection.
//!
//! A descriptor names how a system picks its output:
//!
//! | descriptor        | selection                                         |
//! |-------------------|---------------------------------------------------|
//! | `greedy`          | candidate 0                                       |
//! | `MetricX`         | MBR with a reference-based metric                 |
//! | `MetricX-QE`      | QE reranking with a QE metric                     |
//! | `rankAvg:noLex`   | rank ensemble over a group                        |
//! | `ckQE(32)xcMBR`   | QE filter then MBR                                |
//!
//! Lexical metrics need no matrix file: a missing chrF, chrF++, sentBLEU or
//! TER matrix is computed from the candidates.

use std::borrow::Cow;
use std::fmt;

use crate::ensemble::{self, EnsembleSpec, SegmentMatrices, Strategy};
use crate::error::{Error, Result};
use crate::lexical::LexicalMetric;
use crate::mbr;
use crate::pipeline::{self, PipelineConfig, PipelineSpec};
use crate::registry::{self, GroupName, MetricKind};
use crate::types::{CandidateSet, MatrixKind, SelectionRecord};

pub const GREEDY: &str = "greedy";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemSpec {
    Greedy,
    Metric(&'static str),
    Ensemble(EnsembleSpec),
    Pipeline(PipelineSpec),
}

/// Defaults applied while parsing descriptors.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Group for a bare strategy such as `rankMed`.
    pub group: Option<GroupName>,
    /// Size substituted into `QE(N)` templates.
    pub filter_n: Option<usize>,
}

impl SystemSpec {
    pub fn parse(descriptor: &str, options: ParseOptions) -> Result<Self> {
        let d = descriptor.trim();
        if d == GREEDY {
            return Ok(SystemSpec::Greedy);
        }
        if let Ok(id) = registry::canonical_id(d) {
            return Ok(SystemSpec::Metric(id));
        }
        if d.ends_with("MBR") && d.contains("QE(") {
            let template = pipeline::parse_pipeline_template(d)?;
            let spec = match (template.filter_n, options.filter_n) {
                (0, Some(n)) if n >= 1 => template.with_filter_n(n),
                (0, _) => return Err(Error::InvalidFilterN("N".into())),
                _ => template,
            };
            return Ok(SystemSpec::Pipeline(spec));
        }
        if d.contains(':') {
            return Ok(SystemSpec::Ensemble(d.parse()?));
        }
        if let Ok(strategy) = d.parse::<Strategy>() {
            let group = options
                .group
                .ok_or_else(|| Error::UnknownSystem(format!("{d} (no group given)")))?;
            return Ok(SystemSpec::Ensemble(EnsembleSpec { strategy, group }));
        }
        Err(Error::UnknownSystem(d.to_string()))
    }

    /// Matrix keys this system reads for a segment of `language_pair`.
    pub fn required_metrics(&self, language_pair: &str) -> Result<Vec<&'static str>> {
        Ok(match self {
            SystemSpec::Greedy => Vec::new(),
            SystemSpec::Metric(id) => vec![*id],
            SystemSpec::Ensemble(spec) => spec.group.members(language_pair),
            SystemSpec::Pipeline(spec) => {
                let mut out = spec.qe_stage.members(language_pair, MetricKind::Qe)?;
                out.extend(
                    spec.mbr_stage
                        .members(language_pair, MetricKind::ReferenceBased)?,
                );
                out
            }
        })
    }

    /// Index of the chosen candidate.
    pub fn select(
        &self,
        set: &CandidateSet,
        matrices: &SegmentMatrices,
        config: PipelineConfig,
    ) -> Result<usize> {
        match self {
            SystemSpec::Greedy => Ok(0),
            SystemSpec::Metric(id) => {
                let m = matrices.get(*id).ok_or_else(|| Error::MissingMatrix {
                    metric: id.to_string(),
                    segment: set.segment_id.clone(),
                })?;
                if m.n != set.len() {
                    return Err(Error::LengthMismatch {
                        segment: set.segment_id.clone(),
                        metric: id.to_string(),
                        expected: set.len(),
                        found: m.n,
                    });
                }
                match m.kind {
                    MatrixKind::Pairwise => mbr::mbr_select_with(m, config.mbr),
                    MatrixKind::Qe => mbr::qe_select(m),
                }
            }
            SystemSpec::Ensemble(spec) => {
                ensemble::select_with_group(set, matrices, *spec, config.mbr)
            }
            SystemSpec::Pipeline(spec) => pipeline::pipeline_select(set, spec, matrices, config),
        }
    }
}

impl fmt::Display for SystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemSpec::Greedy => f.write_str(GREEDY),
            SystemSpec::Metric(id) => f.write_str(id),
            SystemSpec::Ensemble(spec) => spec.fmt(f),
            SystemSpec::Pipeline(spec) => spec.fmt(f),
        }
    }
}

/// `matrices` plus native matrices for any lexical metric in `needed` that
/// is absent.
pub fn with_native_matrices<'a>(
    set: &CandidateSet,
    matrices: &'a SegmentMatrices,
    needed: &[&str],
) -> Result<Cow<'a, SegmentMatrices>> {
    let mut out = Cow::Borrowed(matrices);
    for &metric in needed {
        if matrices.contains_key(metric) || LexicalMetric::from_id(metric).is_err() {
            continue;
        }
        let m = mbr::compute_pairwise_matrix(set, metric)?;
        out.to_mut().insert(metric.to_string(), m);
    }
    Ok(out)
}

/// Runs every system on one segment, in system order.
pub fn decode_segment(
    set: &CandidateSet,
    matrices: &SegmentMatrices,
    systems: &[SystemSpec],
    config: PipelineConfig,
) -> Result<Vec<SelectionRecord>> {
    set.validate()?;
    let mut needed = Vec::new();
    for system in systems {
        for metric in system.required_metrics(&set.language_pair)? {
            if !needed.contains(&metric) {
                needed.push(metric);
            }
        }
    }
    let matrices = with_native_matrices(set, matrices, &needed)?;
    systems
        .iter()
        .map(|system| {
            let index = system.select(set, &matrices, config)?;
            SelectionRecord::from_set(set, system.to_string(), index)
        })
        .collect()
}
