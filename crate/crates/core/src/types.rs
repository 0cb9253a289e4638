//! Domain records shared by every stage of the toolkit.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::registry::{self, MetricKind, Orientation};

/// One source segment with its sampled candidate translations.
///
/// Index 0 holds the greedy output by convention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub segment_id: String,
    pub source: String,
    pub candidates: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub doc_context: Option<String>,
    pub language_pair: String,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.candidates.is_empty() {
            return Err(Error::Invalid(format!(
                "segment `{}` has no candidates",
                self.segment_id
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKind {
    /// n x n, row = hypothesis, column = pseudoreference.
    Pairwise,
    /// length n, one score per candidate.
    Qe,
}

impl MatrixKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MatrixKind::Pairwise => "pairwise",
            MatrixKind::Qe => "qe",
        }
    }
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Scores of one metric for one segment.
///
/// Pairwise scores are row-major: `scores[i * n + j]` is the metric value of
/// hypothesis `i` against pseudoreference `j`. Matrices are not assumed to be
/// symmetric.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreMatrix {
    pub segment_id: String,
    pub metric_id: String,
    pub kind: MatrixKind,
    pub orientation: Orientation,
    pub n: usize,
    pub scores: Vec<f64>,
}

/// Resolves the metric id a matrix may carry, returning the orientation the
/// matrix inherits and checking kind compatibility.
///
/// `<metric>@ref` keys hold reference-based scores against the true
/// reference and are always QE-shaped.
pub fn matrix_orientation(metric_id: &str, kind: MatrixKind) -> Result<(String, Orientation)> {
    if let Some(base) = registry::strip_at_ref(metric_id) {
        let spec = registry::lookup(base)?;
        if spec.kind != MetricKind::ReferenceBased {
            return Err(Error::KindMismatch {
                metric: metric_id.to_string(),
                actual: spec.kind,
                requested: MetricKind::ReferenceBased,
            });
        }
        if kind != MatrixKind::Qe {
            return Err(Error::WrongKind {
                expected: "qe",
                found: kind.as_str(),
            });
        }
        return Ok((registry::at_ref_key(spec.id), spec.orientation));
    }
    let spec = registry::lookup(metric_id)?;
    let requested = match kind {
        MatrixKind::Pairwise => MetricKind::ReferenceBased,
        MatrixKind::Qe => MetricKind::Qe,
    };
    if spec.kind != requested {
        return Err(Error::KindMismatch {
            metric: metric_id.to_string(),
            actual: spec.kind,
            requested,
        });
    }
    Ok((spec.id.to_string(), spec.orientation))
}

impl ScoreMatrix {
    /// Builds and validates a matrix, taking the orientation from the registry.
    pub fn new(
        segment_id: impl Into<String>,
        metric_id: &str,
        kind: MatrixKind,
        n: usize,
        scores: Vec<f64>,
    ) -> Result<Self> {
        let (metric_id, orientation) = matrix_orientation(metric_id, kind)?;
        let m = ScoreMatrix {
            segment_id: segment_id.into(),
            metric_id,
            kind,
            orientation,
            n,
            scores,
        };
        m.check_shape()?;
        Ok(m)
    }

    pub fn pairwise(
        segment_id: impl Into<String>,
        metric_id: &str,
        n: usize,
        scores: Vec<f64>,
    ) -> Result<Self> {
        Self::new(segment_id, metric_id, MatrixKind::Pairwise, n, scores)
    }

    pub fn qe(segment_id: impl Into<String>, metric_id: &str, scores: Vec<f64>) -> Result<Self> {
        let n = scores.len();
        Self::new(segment_id, metric_id, MatrixKind::Qe, n, scores)
    }

    /// Length and finiteness checks, without consulting the registry.
    pub fn check_shape(&self) -> Result<()> {
        let expected = match self.kind {
            MatrixKind::Pairwise => self.n * self.n,
            MatrixKind::Qe => self.n,
        };
        if self.n == 0 || self.scores.len() != expected {
            return Err(Error::LengthMismatch {
                segment: self.segment_id.clone(),
                metric: self.metric_id.clone(),
                expected,
                found: self.scores.len(),
            });
        }
        if let Some(position) = self.scores.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                segment: self.segment_id.clone(),
                metric: self.metric_id.clone(),
                position,
            });
        }
        Ok(())
    }

    #[inline]
    pub fn get(&self, hypothesis: usize, pseudoreference: usize) -> f64 {
        debug_assert_eq!(self.kind, MatrixKind::Pairwise);
        self.scores[hypothesis * self.n + pseudoreference]
    }

    pub fn row(&self, hypothesis: usize) -> &[f64] {
        &self.scores[hypothesis * self.n..(hypothesis + 1) * self.n]
    }
}

/// The candidate a system picked for one segment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionRecord {
    pub segment_id: String,
    pub system_id: String,
    pub selected_index: usize,
    pub selected_text: String,
}

impl SelectionRecord {
    pub fn from_set(
        set: &CandidateSet,
        system_id: impl Into<String>,
        index: usize,
    ) -> Result<Self> {
        let text = set.candidates.get(index).ok_or(Error::IndexOutOfRange {
            index,
            n: set.len(),
        })?;
        Ok(SelectionRecord {
            segment_id: set.segment_id.clone(),
            system_id: system_id.into(),
            selected_index: index,
            selected_text: text.clone(),
        })
    }

    /// Checks the record against its candidate set.
    pub fn validate_against(&self, set: &CandidateSet) -> Result<()> {
        match set.candidates.get(self.selected_index) {
            None => Err(Error::IndexOutOfRange {
                index: self.selected_index,
                n: set.len(),
            }),
            Some(text) if *text != self.selected_text => Err(Error::Invalid(format!(
                "segment `{}`, system `{}`: selected_text differs from candidate {}",
                self.segment_id, self.system_id, self.selected_index
            ))),
            Some(_) => Ok(()),
        }
    }
}

/// A human MQM judgement: error score in [0, 25], lower is better.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MqmRecord {
    pub segment_id: String,
    pub system_id: String,
    pub mqm_score: f64,
}

pub const MQM_MAX: f64 = 25.0;

impl MqmRecord {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=MQM_MAX).contains(&self.mqm_score) {
            return Err(Error::MqmOutOfRange {
                segment: self.segment_id.clone(),
                score: self.mqm_score,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_length_is_checked() {
        assert!(ScoreMatrix::pairwise("s1", "chrF", 2, vec![100.0, 20.0, 30.0, 100.0]).is_ok());
        let err = ScoreMatrix::pairwise("s1", "chrF", 2, vec![100.0, 20.0, 30.0]).unwrap_err();
        assert!(matches!(
            err,
            Error::LengthMismatch {
                expected: 4,
                found: 3,
                ..
            }
        ));
    }

    #[test]
    fn kind_contradictions_are_rejected() {
        let err = ScoreMatrix::qe("s1", "chrF", vec![1.0]).unwrap_err();
        assert!(matches!(err, Error::KindMismatch { .. }));
        let err = ScoreMatrix::pairwise("s1", "MetricX-QE", 1, vec![1.0]).unwrap_err();
        assert!(matches!(err, Error::KindMismatch { .. }));
    }

    #[test]
    fn at_ref_vectors() {
        let m = ScoreMatrix::qe("s1", "MetricX@ref", vec![1.0, 2.0]).unwrap();
        assert_eq!(m.orientation, Orientation::LowerBetter);
        assert!(ScoreMatrix::qe("s1", "MetricX-QE@ref", vec![1.0]).is_err());
        assert!(ScoreMatrix::pairwise("s1", "chrF@ref", 1, vec![1.0]).is_err());
    }

    #[test]
    fn non_finite_rejected() {
        let err = ScoreMatrix::qe("s1", "CometKiwi22", vec![0.1, f64::NAN]).unwrap_err();
        assert!(matches!(err, Error::NonFinite { position: 1, .. }));
    }

    #[test]
    fn mqm_range() {
        let mut r = MqmRecord {
            segment_id: "s".into(),
            system_id: "a".into(),
            mqm_score: 25.0,
        };
        assert!(r.validate().is_ok());
        r.mqm_score = 25.5;
        assert!(r.validate().is_err());
        r.mqm_score = -0.1;
        assert!(r.validate().is_err());
    }
}
