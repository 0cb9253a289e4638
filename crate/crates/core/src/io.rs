//! Line-delimited JSON readers and writers for the toolkit's file formats:
//! candidates, score matrices, selections, MQM records and per-segment
//! evaluation scores.
//!
//! Readers are streaming iterators: they hold one line in memory at a time
//! (plus the set of ids seen, for duplicate detection). Blank lines are
//! skipped. Line numbers in errors are 1-based.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, Write};
use std::marker::PhantomData;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::registry::Orientation;
use crate::types::{
    matrix_orientation, CandidateSet, MatrixKind, MqmRecord, ScoreMatrix, SelectionRecord,
};

/// Generic line-delimited JSON reader.
pub struct JsonLines<R, T> {
    reader: R,
    line: usize,
    buf: String,
    _marker: PhantomData<T>,
}

impl<R: BufRead, T: DeserializeOwned> JsonLines<R, T> {
    pub fn new(reader: R) -> Self {
        JsonLines {
            reader,
            line: 0,
            buf: String::new(),
            _marker: PhantomData,
        }
    }

    /// Line number of the most recently returned record.
    pub fn line(&self) -> usize {
        self.line
    }
}

impl<R: BufRead, T: DeserializeOwned> Iterator for JsonLines<R, T> {
    type Item = Result<T>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buf.clear();
            self.line += 1;
            match self.reader.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => return Some(Err(Error::parse(self.line, e))),
            }
            if self.buf.trim().is_empty() {
                continue;
            }
            return Some(serde_json::from_str(&self.buf).map_err(|e| Error::parse(self.line, e)));
        }
    }
}

/// Reads candidate sets, checking `n >= 1` and segment id uniqueness.
pub struct CandidateReader<R> {
    inner: JsonLines<R, CandidateSet>,
    seen: HashSet<String>,
}

impl<R: BufRead> Iterator for CandidateReader<R> {
    type Item = Result<CandidateSet>;

    fn next(&mut self) -> Option<Self::Item> {
        let set = match self.inner.next()? {
            Ok(set) => set,
            Err(e) => return Some(Err(e)),
        };
        let line = self.inner.line();
        if set.candidates.is_empty() {
            return Some(Err(Error::parse(
                line,
                format!("segment `{}` has an empty candidates list", set.segment_id),
            )));
        }
        if !self.seen.insert(set.segment_id.clone()) {
            return Some(Err(Error::DuplicateSegment(set.segment_id)));
        }
        Some(Ok(set))
    }
}

pub fn read_candidates<R: BufRead>(reader: R) -> CandidateReader<R> {
    CandidateReader {
        inner: JsonLines::new(reader),
        seen: HashSet::new(),
    }
}

/// On-disk matrix record. `orientation` is optional on input and filled in
/// from the registry; when present it must agree with it.
#[derive(Debug, Deserialize)]
struct RawMatrix {
    segment_id: String,
    metric_id: String,
    kind: MatrixKind,
    #[serde(default)]
    orientation: Option<Orientation>,
    n: usize,
    scores: Vec<f64>,
}

impl RawMatrix {
    fn validate(self, line: usize) -> Result<ScoreMatrix> {
        let (metric_id, orientation) = matrix_orientation(&self.metric_id, self.kind)?;
        if let Some(declared) = self.orientation {
            if declared != orientation {
                return Err(Error::parse(
                    line,
                    format!(
                        "metric `{}` is {orientation}, file declares {declared}",
                        self.metric_id
                    ),
                ));
            }
        }
        let m = ScoreMatrix {
            segment_id: self.segment_id,
            metric_id,
            kind: self.kind,
            orientation,
            n: self.n,
            scores: self.scores,
        };
        m.check_shape()?;
        Ok(m)
    }
}

pub struct MatrixReader<R> {
    inner: JsonLines<R, RawMatrix>,
}

impl<R: BufRead> Iterator for MatrixReader<R> {
    type Item = Result<ScoreMatrix>;

    fn next(&mut self) -> Option<Self::Item> {
        let raw = match self.inner.next()? {
            Ok(raw) => raw,
            Err(e) => return Some(Err(e)),
        };
        Some(raw.validate(self.inner.line()))
    }
}

/// Reads score matrices, validating metric ids, kinds, lengths and values.
///
/// Non-finite values cannot be written as JSON numbers, so they surface as
/// parse errors unless a writer emitted them as huge literals that overflow
/// to infinity; both are rejected.
pub fn read_matrices<R: BufRead>(reader: R) -> MatrixReader<R> {
    MatrixReader {
        inner: JsonLines::new(reader),
    }
}

pub fn read_selections<R: BufRead>(reader: R) -> JsonLines<R, SelectionRecord> {
    JsonLines::new(reader)
}

pub struct MqmReader<R> {
    inner: JsonLines<R, MqmRecord>,
}

impl<R: BufRead> Iterator for MqmReader<R> {
    type Item = Result<MqmRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        Some(self.inner.next()?.and_then(|r| {
            r.validate()?;
            Ok(r)
        }))
    }
}

pub fn read_mqm<R: BufRead>(reader: R) -> MqmReader<R> {
    MqmReader {
        inner: JsonLines::new(reader),
    }
}

/// One metric score for one system's output on one segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentScore {
    pub segment_id: String,
    pub system_id: String,
    pub metric_id: String,
    pub score: f64,
}

pub fn read_segment_scores<R: BufRead>(reader: R) -> JsonLines<R, SegmentScore> {
    JsonLines::new(reader)
}

/// Every matrix of a run, keyed by segment id and then by metric key
/// (`<metric>` or `<metric>@ref`).
pub type MatrixStore = HashMap<String, HashMap<String, ScoreMatrix>>;

/// Collects matrices into a [`MatrixStore`], rejecting a second matrix for
/// the same segment and metric key.
pub fn index_matrices<I>(matrices: I) -> Result<MatrixStore>
where
    I: IntoIterator<Item = Result<ScoreMatrix>>,
{
    let mut store = MatrixStore::new();
    for m in matrices {
        let m = m?;
        let slot = store.entry(m.segment_id.clone()).or_default();
        if slot.contains_key(&m.metric_id) {
            return Err(Error::Invalid(format!(
                "duplicate `{}` matrix for segment `{}`",
                m.metric_id, m.segment_id
            )));
        }
        slot.insert(m.metric_id.clone(), m);
    }
    Ok(store)
}

/// Writes one JSON object per line. Floats use the shortest representation
/// that round-trips.
pub fn write_jsonl<'a, T, I, W>(records: I, mut writer: W) -> Result<()>
where
    T: Serialize + 'a,
    I: IntoIterator<Item = &'a T>,
    W: Write,
{
    for (index, record) in records.into_iter().enumerate() {
        serde_json::to_writer(&mut writer, record).map_err(|e| Error::Io {
            index,
            source: e.into(),
        })?;
        writer
            .write_all(b"\n")
            .map_err(|source| Error::Io { index, source })?;
    }
    writer
        .flush()
        .map_err(|source| Error::Io { index: 0, source })
}

pub fn write_selections<'a, I, W>(records: I, writer: W) -> Result<()>
where
    I: IntoIterator<Item = &'a SelectionRecord>,
    W: Write,
{
    write_jsonl(records, writer)
}

pub fn write_matrices<'a, I, W>(records: I, writer: W) -> Result<()>
where
    I: IntoIterator<Item = &'a ScoreMatrix>,
    W: Write,
{
    write_jsonl(records, writer)
}

/// Checks each selection against the candidate set with the same id.
pub fn validate_selections<'a>(
    selections: impl IntoIterator<Item = &'a SelectionRecord>,
    lookup: impl Fn(&str) -> Option<&'a CandidateSet>,
) -> Result<()> {
    for s in selections {
        let set =
            lookup(&s.segment_id).ok_or_else(|| Error::UnknownSegment(s.segment_id.clone()))?;
        s.validate_against(set)?;
    }
    Ok(())
}
