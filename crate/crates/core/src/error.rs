use std::fmt;

use crate::registry::MetricKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the toolkit can report.
///
/// Each variant maps to a stable, machine-parsable code via [`Error::code`],
/// which the CLI prints as `error[<code>]: <message>` and the C ABI exposes
/// as a status integer.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unknown metric `{0}`")]
    UnknownMetric(String),

    #[error("unknown metric group `{0}`")]
    UnknownGroup(String),

    #[error("reference is empty after tokenization")]
    EmptyReference,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate segment `{0}`")]
    DuplicateSegment(String),

    #[error("segment `{segment}`, metric `{metric}`: expected {expected} scores, found {found}")]
    LengthMismatch {
        segment: String,
        metric: String,
        expected: usize,
        found: usize,
    },

    #[error("metric `{metric}` is {actual} and cannot be used as {requested}")]
    KindMismatch {
        metric: String,
        actual: MetricKind,
        requested: MetricKind,
    },

    #[error("segment `{segment}`, metric `{metric}`: non-finite score at position {position}")]
    NonFinite {
        segment: String,
        metric: String,
        position: usize,
    },

    #[error("index {index} out of range for {n} candidates")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("metric `{0}` has no native implementation; score it with the external scorer and ingest the matrix file")]
    UnsupportedNativeMetric(String),

    #[error("expected a {expected} matrix, found {found}")]
    WrongKind {
        expected: &'static str,
        found: &'static str,
    },

    #[error("no `{metric}` scores for segment `{segment}`")]
    MissingMatrix { metric: String, segment: String },

    #[error("unknown ensemble strategy `{0}`")]
    UnknownStrategy(String),

    #[error("malformed pipeline name `{0}`; expected <tag>QE(<N>)<tag>MBR")]
    Grammar(String),

    #[error("unknown {stage} tag `{tag}`")]
    UnknownTag { stage: &'static str, tag: String },

    #[error("invalid filter size `{0}`; must be an integer >= 1")]
    InvalidFilterN(String),

    #[error("segment `{0}` has no reference")]
    MissingReference(String),

    #[error("no external `{metric}` score for segment `{segment}`")]
    MissingExternalScore { metric: String, segment: String },

    #[error("paired samples differ in length ({left} vs {right})")]
    SampleLengthMismatch { left: usize, right: usize },

    #[error("at least 2 observations are required, found {0}")]
    TooFewObservations(usize),

    #[error("baseline system `{0}` not present")]
    MissingBaseline(String),

    #[error("system `{system}` has no `{metric}` score for segment `{segment}`")]
    MissingEvaluation {
        system: String,
        metric: String,
        segment: String,
    },

    #[error("unknown report format `{0}`")]
    UnknownFormat(String),

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(&'static str),

    #[error("missing observations for {}", format_pairs(.0))]
    MissingObservation(Vec<(String, String)>),

    #[error("MQM score {score} for segment `{segment}` lies outside [0, 25]")]
    MqmOutOfRange { segment: String, score: f64 },

    #[error("unresolvable system descriptor `{0}`")]
    UnknownSystem(String),

    #[error("segment `{0}` not found")]
    UnknownSegment(String),

    #[error("record {index}: {source}")]
    Io {
        index: usize,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Invalid(String),
}

fn format_pairs(pairs: &[(String, String)]) -> String {
    let shown: Vec<String> = pairs
        .iter()
        .take(8)
        .map(|(seg, sys)| format!("({seg}, {sys})"))
        .collect();
    let mut out = shown.join(", ");
    if pairs.len() > 8 {
        out.push_str(&format!(" and {} more", pairs.len() - 8));
    }
    out
}

impl Error {
    /// Stable kebab-case identifier for the error class.
    pub fn code(&self) -> &'static str {
        match self {
            Error::UnknownMetric(_) => "unknown-metric",
            Error::UnknownGroup(_) => "unknown-group",
            Error::EmptyReference => "empty-reference",
            Error::Parse { .. } => "parse",
            Error::DuplicateSegment(_) => "duplicate-segment",
            Error::LengthMismatch { .. } => "length-mismatch",
            Error::KindMismatch { .. } => "kind-mismatch",
            Error::NonFinite { .. } => "non-finite",
            Error::IndexOutOfRange { .. } => "index-out-of-range",
            Error::UnsupportedNativeMetric(_) => "unsupported-native-metric",
            Error::WrongKind { .. } => "wrong-kind",
            Error::MissingMatrix { .. } => "missing-matrix",
            Error::UnknownStrategy(_) => "unknown-strategy",
            Error::Grammar(_) => "grammar",
            Error::UnknownTag { .. } => "unknown-tag",
            Error::InvalidFilterN(_) => "invalid-n",
            Error::MissingReference(_) => "missing-reference",
            Error::MissingExternalScore { .. } => "missing-external-score",
            Error::SampleLengthMismatch { .. } => "length-mismatch",
            Error::TooFewObservations(_) => "too-few-observations",
            Error::MissingBaseline(_) => "missing-baseline",
            Error::MissingEvaluation { .. } => "missing-evaluation",
            Error::UnknownFormat(_) => "unknown-format",
            Error::UndefinedCorrelation(_) => "undefined-correlation",
            Error::MissingObservation(_) => "missing-observation",
            Error::MqmOutOfRange { .. } => "mqm-out-of-range",
            Error::UnknownSystem(_) => "unknown-system",
            Error::UnknownSegment(_) => "unknown-segment",
            Error::Io { .. } | Error::File { .. } => "io",
            Error::Invalid(_) => "invalid",
        }
    }

    pub(crate) fn parse(line: usize, message: impl fmt::Display) -> Self {
        Error::Parse {
            line,
            message: message.to_string(),
        }
    }
}
